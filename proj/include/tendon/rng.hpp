#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace tendon {

/// Counter-based deterministic random stream. The draw at a given
/// (seed, stream_id, call index) never depends on thread schedule or on
/// other streams, so parallel pipeline stages stay reproducible.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix(mix(seed) ^ 0x6a09e667f3bcc909ULL ^ mix(stream_id))) {}

    /// stream_id = hash(master seed, stage name, task index)
    static std::uint64_t derive(std::uint64_t master_seed, std::string_view stage,
                                std::uint64_t task_index) {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the stage name
        for (char c : stage) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
            h *= 0x100000001b3ULL;
        }
        // Nested mixes keep the combination non-commutative: swapping the
        // master seed and the task index must not yield the same stream.
        return mix(mix(mix(master_seed) ^ h) ^ mix(task_index));
    }

    std::uint64_t next_u64() { return mix(key_ + counter_++ * 0x9e3779b97f4a7c15ULL); }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes two uniforms per draw.
    double next_gaussian() {
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace tendon
