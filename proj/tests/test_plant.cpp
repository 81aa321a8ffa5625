#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "tendon/plant.hpp"

using namespace tendon;

TEST_CASE("analytical inverse at canonical poses") {
    const TendonDelta d = analytical_inverse({90.0, 0.0});
    CHECK(d.l1 == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(d.l2 == doctest::Approx(-30.0).epsilon(1e-12));
    CHECK(d.l3 == doctest::Approx(-30.0).epsilon(1e-12));

    const TendonDelta z = analytical_inverse({0.0, 0.0});
    CHECK(z.l1 == 0.0);
    CHECK(z.l2 == 0.0);
    CHECK(z.l3 == 0.0);

    // Pure pitch: L1 unaffected, L2 and L3 antisymmetric.
    const TendonDelta p = analytical_inverse({0.0, 45.0});
    CHECK(p.l1 == 0.0);
    CHECK(p.l2 == doctest::Approx(45.0 / 1.732).epsilon(1e-12));
    CHECK(p.l3 == doctest::Approx(-45.0 / 1.732).epsilon(1e-12));
}

TEST_CASE("analytical inverse is sum-zero over a dense pose sweep") {
    RngStream rng(1, 11);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const PoseAngles pose{180.0 * (rng.next_uniform() - 0.5),
                              180.0 * (rng.next_uniform() - 0.5)};
        const TendonDelta d = analytical_inverse(pose);
        worst = std::max(worst, std::abs(d.l1 + d.l2 + d.l3));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("forward inverts the analytical map") {
    RngStream rng(2, 12);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const PoseAngles pose{180.0 * (rng.next_uniform() - 0.5),
                              180.0 * (rng.next_uniform() - 0.5)};
        const PoseAngles back = analytical_forward(analytical_inverse(pose));
        worst = std::max(worst, std::max(std::abs(back.alpha - pose.alpha),
                                         std::abs(back.beta - pose.beta)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("analytical_forward projects non-sum-zero commands") {
    // Adding a common offset to all tendons must not change the pose.
    const TendonDelta base = analytical_inverse({37.0, -18.0});
    const TendonDelta shifted{base.l1 + 5.0, base.l2 + 5.0, base.l3 + 5.0};
    const PoseAngles a = analytical_forward(base);
    const PoseAngles b = analytical_forward(shifted);
    CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-12));
    CHECK(a.beta == doctest::Approx(b.beta).epsilon(1e-12));
}

TEST_CASE("ideal preset reduces plant to analytical kinematics") {
    const PlantParams ideal = plant_preset("ideal");
    RngStream rng(3, 13);
    for (int i = 0; i < 500; ++i) {
        const PoseAngles pose{180.0 * (rng.next_uniform() - 0.5),
                              180.0 * (rng.next_uniform() - 0.5)};
        const PoseAngles got = plant_forward(analytical_inverse(pose), ideal);
        CHECK(std::abs(got.alpha - pose.alpha) < 1e-9);
        CHECK(std::abs(got.beta - pose.beta) < 1e-9);
    }
}

TEST_CASE("default plant deviates from the analytical map") {
    const PlantParams params = plant_preset("default");
    const PoseAngles got = plant_forward(analytical_inverse({80.0, 60.0}), params);
    CHECK(std::abs(got.alpha - 80.0) > 0.5);
    CHECK(std::abs(got.beta - 60.0) > 0.5);
}

TEST_CASE("plant perturbation matches the closed-form expression") {
    const PlantParams params = plant_preset("default");
    const double ks = params.kappa_sat * (4.0 / params.segments);
    const double gs = params.g_sag * (4.0 / params.segments);
    const PoseAngles id{50.0, -70.0};
    const PoseAngles got = plant_forward(analytical_inverse(id), params);
    const double expect_alpha = id.alpha * (1.0 - ks * (id.alpha / 90.0) * (id.alpha / 90.0)) +
                                params.kappa_x * id.alpha * id.beta / 90.0;
    const double expect_beta = id.beta * (1.0 - ks * (id.beta / 90.0) * (id.beta / 90.0)) -
                               gs * std::cos(id.beta * M_PI / 180.0);
    CHECK(got.alpha == doctest::Approx(expect_alpha).epsilon(1e-10));
    CHECK(got.beta == doctest::Approx(expect_beta).epsilon(1e-10));
}

TEST_CASE("invert_plant round-trips through the perturbed plant") {
    for (const char* name : {"ideal", "default", "heavy"}) {
        const PlantParams params = plant_preset(name);
        // The heavy preset saturates before +/-90 (peak achieved angle
        // 60/sqrt(3*0.15) ~ 89.4 deg), so keep it inside its workspace.
        const double lim = std::string(name) == "heavy" ? 60.0 : 90.0;
        for (double a : {-lim, -lim / 2.0, 0.0, lim / 2.0, lim}) {
            for (double b : {-lim, -lim / 3.0, 0.0, lim / 3.0, lim}) {
                const TendonDelta cmd = invert_plant({a, b}, params);
                CHECK(std::abs(cmd.l1 + cmd.l2 + cmd.l3) < 1e-9);
                const PoseAngles got = plant_forward(cmd, params);
                CHECK(std::abs(got.alpha - a) < 1e-5);
                CHECK(std::abs(got.beta - b) < 1e-5);
            }
        }
    }
}

TEST_CASE("invert_plant reports unreachable targets") {
    // Heavy saturation caps the achievable yaw just below 90 degrees.
    CHECK_THROWS_AS(invert_plant({90.0, 0.0}, plant_preset("heavy")), NoConvergence);
    try {
        invert_plant({90.0, 0.0}, plant_preset("heavy"));
    } catch (const NoConvergence& e) {
        CHECK(e.residual > 0.0);
        CHECK(e.residual < 1.0);  // stalls just short of the target
    }
    CHECK_THROWS_AS(invert_plant({120.0, 0.0}, plant_preset("default")), NonFiniteInput);
}

TEST_CASE("measurement noise is gaussian with the configured sigma") {
    PlantParams params = plant_preset("ideal");
    params.noise_sigma = 0.3;
    RngStream rng(9, 21);
    const TendonDelta cmd = analytical_inverse({10.0, 20.0});
    const int n = 20000;
    double sum_a = 0.0, sq_a = 0.0;
    for (int i = 0; i < n; ++i) {
        const PoseAngles got = plant_forward(cmd, params, &rng);
        sum_a += got.alpha - 10.0;
        sq_a += (got.alpha - 10.0) * (got.alpha - 10.0);
    }
    CHECK(sum_a / n == doctest::Approx(0.0).epsilon(0.02));
    CHECK(std::sqrt(sq_a / n) == doctest::Approx(0.3).epsilon(0.03));

    // Without an RNG the plant stays deterministic even with sigma > 0.
    const PoseAngles quiet = plant_forward(cmd, params);
    CHECK(quiet.alpha == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("plant parameter validation") {
    PlantParams p;
    p.segments = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = PlantParams{};
    p.kappa_sat = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = PlantParams{};
    p.noise_sigma = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    CHECK_THROWS_AS(plant_preset("bogus"), ConfigError);
    CHECK_NOTHROW(plant_preset("heavy").validate());
}

TEST_CASE("analytical round trip over 10k poses stays under one second") {
    const auto t0 = std::chrono::steady_clock::now();
    RngStream rng(4, 14);
    double sink = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const PoseAngles pose{180.0 * (rng.next_uniform() - 0.5),
                              180.0 * (rng.next_uniform() - 0.5)};
        sink += analytical_forward(analytical_inverse(pose)).alpha;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(std::isfinite(sink));
    CHECK(secs < 1.0);
}
