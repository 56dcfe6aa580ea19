#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "loewner/bessel.hpp"
#include "loewner/errors.hpp"
#include "loewner/rng.hpp"

using namespace loewner;

TEST_CASE("exact hit probability: plug-ins and domain guards") {
    // delta = |x| limit
    CHECK(exact_hit_probability(2.0, 2.0, 1.0, 1.0) == doctest::Approx(1.0));
    // a=2, kappa=2, x=1, delta=0.5: exponent 2a/k - 1 = 1
    CHECK(exact_hit_probability(2.0, 2.0, 1.0, 0.5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(exact_hit_probability(2.0, 4.0, 1.0, 0.5), OutOfDomain);
    CHECK_THROWS_AS(exact_hit_probability(2.0, 5.0, 1.0, 0.5), OutOfDomain);
    CHECK_THROWS_AS(exact_hit_probability(2.0, 2.0, 1.0, 1.5), OutOfRange);
}

TEST_CASE("exact hit probability monotonicity") {
    // decreasing in |x|, increasing in delta, always in (0, 1]
    double prev = 1.1;
    for (double x : {1.0, 2.0, 4.0}) {
        const double p = exact_hit_probability(2.0, 1.0, x, 0.5);
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
        CHECK(p < prev);
        prev = p;
    }
    prev = 0.0;
    for (double delta : {0.1, 0.3, 0.7}) {
        const double p = exact_hit_probability(2.0, 1.0, 1.0, delta);
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("escape bound of the exact formula (fixed grid, zero tolerance)") {
    // with delta = |x| e^{-M/a}: P = e^{-M(2/kappa - 1/a)} <= e^{-M/kappa}
    // for kappa <= a; checked on the (M, kappa) grid with a = 2
    const double a = 2.0;
    for (double M : {1.0, 2.0, 4.0})
        for (double kappa : {0.5, 1.0, 2.0}) {
            const double delta = std::exp(-M / a);
            const double p = exact_hit_probability(a, kappa, 1.0, delta);
            CHECK(p <= std::exp(-M / kappa));
        }
}

TEST_CASE("kappa = 0 limit solves the separable ODE") {
    // x' = a/x  =>  X_t = sqrt(x0^2 + 2 a t)
    const double a = 2.0, x0 = 1.0, T = 1.0;
    const BesselPath p = simulate_bessel(a, 0.0, x0, 1e-4, T, 3);
    REQUIRE(p.values.size() > 2);
    const double expect = std::sqrt(x0 * x0 + 2.0 * a * T);
    CHECK(p.values.back() == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("monotone coupling under shared noise") {
    // plain EM map x -> x + (a/x)dt + noise is monotone for x^2 > a dt;
    // couple two starts through identical increments
    const double a = 2.0, kappa = 1.0, dt = 1e-3, T = 1.0;
    const std::size_t n = static_cast<std::size_t>(T / dt);
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(hash_combine(17, s));
        double lo = 0.5, hi = 1.0;
        bool ok = true;
        for (std::size_t k = 0; k < n; ++k) {
            const double noise = std::sqrt(kappa * dt) * rng.normal();
            lo += (a / lo) * dt + noise;
            hi += (a / hi) * dt + noise;
            if (lo > hi + 1e-12) ok = false;
        }
        CHECK(ok);
    }
}

TEST_CASE("sign symmetry under noise negation") {
    // X^x with noise B equals -X^{-x} with noise -B, pathwise
    const double a = 2.0, kappa = 1.0, dt = 1e-3, T = 0.5;
    Rng rng(29);
    std::vector<double> noise;
    for (int k = 0; k < 500; ++k) noise.push_back(rng.normal());
    double xp = 1.0, xn = -1.0;
    for (int k = 0; k < 500; ++k) {
        xp += (a / xp) * dt + std::sqrt(kappa * dt) * noise[k];
        xn += (a / xn) * dt - std::sqrt(kappa * dt) * noise[k];
        CHECK(xp == doctest::Approx(-xn).epsilon(1e-12));
    }
    (void)T;
}

TEST_CASE("level records are detected with interpolated times") {
    // drift-free-ish decay: start above levels, force a known crossing with
    // kappa = 0 and negative drift unavailable, so use a crossing via a > 0
    // from below zero symmetric start
    const BesselPath p = simulate_bessel(2.0, 2.0, 1.0, 1e-3, 2.0, 11,
                                         {0.25, 0.5});
    for (const auto& [lev, t] : p.hit_level_records) {
        CHECK(t >= 0.0);
        CHECK(t <= 2.0);
        CHECK(lev < 1.0);
    }
}

TEST_CASE("markov restart reproduces the marginal law") {
    // restarting at (X_s, fresh noise) matches X_{s+u} in law (KS test)
    const double a = 2.0, kappa = 1.5, dt = 1e-3, s_time = 0.3, u_time = 0.3;
    const std::size_t n = 800;
    std::vector<double> direct, restarted;
    for (std::size_t i = 0; i < n; ++i) {
        const BesselPath full = simulate_bessel(a, kappa, 1.0, dt,
                                                s_time + u_time,
                                                hash_combine(301, i));
        direct.push_back(full.values.back());
        const BesselPath head =
            simulate_bessel(a, kappa, 1.0, dt, s_time, hash_combine(302, i));
        const BesselPath tail =
            simulate_bessel(a, kappa, head.values.back(), dt, u_time,
                            hash_combine(303, i));
        restarted.push_back(tail.values.back());
    }
    std::sort(direct.begin(), direct.end());
    std::sort(restarted.begin(), restarted.end());
    double dstat = 0.0;
    std::size_t i = 0, j = 0;
    while (i < direct.size() && j < restarted.size()) {
        if (direct[i] <= restarted[j])
            ++i;
        else
            ++j;
        dstat = std::max(dstat, std::abs(static_cast<double>(i) -
                                         static_cast<double>(j)) /
                                    static_cast<double>(n));
    }
    CHECK(dstat < 1.95 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("stay-small bound evaluates and vanishes as eps -> 0") {
    const double v1 = stay_small_bound(0.2, 1.0, 1.0);
    CHECK(v1 > 0.0);
    CHECK(v1 < 1e-20); // exp(-(2t/eps - eps)^2 / 2kt) dominates
    CHECK(stay_small_bound(0.05, 1.0, 1.0) < v1);
    CHECK_THROWS_AS(stay_small_bound(2.0, 1.0, 1.0), OutOfDomain);
    CHECK_THROWS_AS(stay_small_bound(0.2, 1.0, 5.0), OutOfDomain);
}

TEST_CASE("stay-small bound beats the MC estimate") {
    // P[max |X| < eps on [0,1]] is essentially zero for a = 2: the drift
    // expels the path; MC frequency must satisfy p_hat <= bound + 3 sigma
    const double eps = 0.2, T = 1.0, kappa = 1.0;
    const std::size_t paths = 2000;
    std::size_t stayed = 0;
    for (std::size_t s = 0; s < paths; ++s) {
        const BesselPath p =
            simulate_bessel(2.0, kappa, 0.05, 1e-3, T, hash_combine(41, s));
        bool small = true;
        for (double v : p.values)
            if (std::abs(v) >= eps) {
                small = false;
                break;
            }
        if (small) ++stayed;
    }
    const double p_hat = static_cast<double>(stayed) / paths;
    const double bound = stay_small_bound(eps, T, kappa);
    const double sigma = std::sqrt(p_hat * (1.0 - p_hat) / paths);
    CHECK(p_hat <= bound + 3.0 * sigma + 1e-12);
}

TEST_CASE("stay-small bound is monotone in kappa near zero") {
    // eps large enough that the exponential stays representable
    const double eps = 0.5, t = 1.0;
    double prev = 0.0;
    for (double kappa : {0.25, 0.5, 1.0}) {
        const double b = stay_small_bound(eps, t, kappa);
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("q drift evaluation") {
    CHECK(q_drift(M_PI / 2.0) == doctest::Approx(0.0));
    CHECK(q_drift(0.1) == doctest::Approx(10.0)); // 1/x wins over 2cot
    CHECK(q_drift(1.5) ==
          doctest::Approx(std::min(2.0 / std::tan(1.5), 1.0 / 1.5)));
}

TEST_CASE("Z stays near the drift-ODE solution for tiny kappa") {
    const BesselPath z = simulate_Z(1e-8, 1.0, 1e-3, 13);
    // drift ODE from pi/2: q = 2cot pushes toward pi/2... at pi/2 q = 0,
    // so the solution is constant
    for (double v : z.values) CHECK(std::abs(v - M_PI / 2.0) < 1e-3);
}

TEST_CASE("coupled comparison: Z <= Theta pathwise") {
    std::size_t violations = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const CoupledZTheta c =
            simulate_Z_theta_coupled(0.5, 0.5, 5e-4, hash_combine(303, s));
        for (std::size_t k = 0; k < c.times.size(); ++k)
            if (c.z[k] > c.theta[k] + 1e-12) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("bessel hit experiment recovers the exact probability") {
    const HitExperimentResult r =
        bessel_hit_experiment(2.0, 2.0, 1.0, 0.5, 20000, 1e-4, 99);
    CHECK(r.p_exact == doctest::Approx(0.5));
    CHECK(r.pass);
    CHECK(std::abs(r.p_hat - 0.5) <= 3.0 * r.sigma);
}
