#include "loewner/bessel.hpp"

#include <algorithm>
#include <cmath>

#include "loewner/errors.hpp"
#include "loewner/parallel.hpp"
#include "loewner/rng.hpp"

namespace loewner {

namespace {

// Advances one EM step of size h; recursion handles the reject-and-halve
// rule near the origin. Returns the sign-preserving new value, or records a
// zero hit (crossing time linearly interpolated within the substep).
double bessel_step(double x, double a, double kappa, double h, Rng& rng,
                   int depth, double t, std::optional<double>& hit_zero) {
    const double prop = x + (a / x) * h + std::sqrt(kappa * h) * rng.normal();
    const bool crosses = (x > 0.0 && prop <= 0.0) || (x < 0.0 && prop >= 0.0);
    if (!crosses) return prop;
    if (!(a > 0.0) || depth >= 20) {
        const double frac = x / (x - prop); // |X| hits 0 inside the substep
        hit_zero = t + frac * h;
        return 0.0;
    }
    double mid = bessel_step(x, a, kappa, 0.5 * h, rng, depth + 1, t, hit_zero);
    if (hit_zero) return 0.0;
    return bessel_step(mid, a, kappa, 0.5 * h, rng, depth + 1, t + 0.5 * h,
                       hit_zero);
}

} // namespace

BesselPath simulate_bessel(double a, double kappa, double x0, double dt,
                           double T, std::uint64_t seed,
                           const std::vector<double>& levels) {
    if (x0 == 0.0) throw OutOfRange("x0 must be nonzero");
    if (!(dt > 0.0) || !(T > 0.0)) throw OutOfRange("need dt > 0 and T > 0");
    if (kappa < 0.0) throw OutOfRange("kappa must be >= 0");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0)) throw OutOfRange("levels must be positive");
        if (i > 0 && levels[i] < levels[i - 1])
            throw OutOfRange("levels must be sorted ascending");
    }

    Rng rng(seed);
    BesselPath path;
    path.a = a;
    path.kappa = kappa;
    path.x0 = x0;
    path.times.push_back(0.0);
    path.values.push_back(x0);

    const std::size_t n = static_cast<std::size_t>(std::ceil(T / dt));
    double x = x0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double t0 = static_cast<double>(k - 1) * dt;
        const double h = std::min(dt, T - t0);
        if (h <= 0.0) break;
        const double x_prev = x;
        std::optional<double> hit;
        x = bessel_step(x, a, kappa, h, rng, 0, t0, hit);
        const double t1 = t0 + h;
        // first passage through each level, interpolated within the step
        for (double lev : levels) {
            if (path.hit_level_records.count(lev)) continue;
            if (std::abs(x_prev) > lev && (hit || std::abs(x) <= lev)) {
                const double target = x_prev > 0.0 ? lev : -lev;
                const double x_end = hit ? 0.0 : x;
                const double frac = (x_prev - target) / (x_prev - x_end);
                path.hit_level_records[lev] = t0 + std::clamp(frac, 0.0, 1.0) * h;
            }
        }
        if (hit) {
            path.hit_zero_at = hit;
            path.times.push_back(*hit);
            path.values.push_back(0.0);
            return path;
        }
        path.times.push_back(t1);
        path.values.push_back(x);
    }
    return path;
}

double exact_hit_probability(double a, double kappa, double x, double delta) {
    if (x == 0.0) throw OutOfRange("x must be nonzero");
    if (!(kappa > 0.0) || kappa >= 2.0 * a)
        throw OutOfDomain("exact hit probability requires 0 < kappa < 2a");
    if (!(delta > 0.0) || delta > std::abs(x))
        throw OutOfRange("delta must lie in (0, |x|]");
    return std::pow(delta / std::abs(x), 2.0 * a / kappa - 1.0);
}

double stay_small_bound(double eps, double t, double kappa) {
    if (!(eps > 0.0)) throw OutOfRange("eps must be > 0");
    if (!(t > eps * eps / 2.0))
        throw OutOfDomain("bound requires t > eps^2 / 2");
    if (!(kappa > 0.0) || kappa > 4.0)
        throw OutOfDomain("bound stated for kappa in (0, 4]");
    const double z = 2.0 * t / eps - eps;
    return std::sqrt(kappa * t / (2.0 * M_PI)) * (eps / (2.0 * t - eps * eps)) *
           std::exp(-z * z / (2.0 * kappa * t));
}

double q_drift(double x) {
    if (!(x > 0.0 && x < M_PI)) throw OutOfRange("q(x) defined on (0, pi)");
    return std::min(2.0 / std::tan(x), 1.0 / x);
}

BesselPath simulate_Z(double kappa, double T, double dt, std::uint64_t seed) {
    if (!(dt > 0.0) || !(T > 0.0)) throw OutOfRange("need dt > 0 and T > 0");
    if (!(kappa >= 0.0)) throw OutOfRange("kappa must be >= 0");
    Rng rng(seed);
    BesselPath path;
    path.a = 1.0; // near 0 the drift q(x) = 1/x is Bessel with a = 1
    path.kappa = kappa;
    path.x0 = M_PI / 2.0;
    path.times.push_back(0.0);
    path.values.push_back(M_PI / 2.0);
    const std::size_t n = static_cast<std::size_t>(std::ceil(T / dt));
    double z = M_PI / 2.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double h = std::min(dt, T - static_cast<double>(k - 1) * dt);
        if (h <= 0.0) break;
        double prop = z + q_drift(z) * h + std::sqrt(kappa * h) * rng.normal();
        // reflect tiny excursions; Z is compared against Theta in (0, pi)
        if (prop <= 0.0) prop = std::min(std::abs(prop), z);
        if (prop >= M_PI) prop = std::max(2.0 * M_PI - prop, z);
        z = prop;
        path.times.push_back(static_cast<double>(k - 1) * dt + h);
        path.values.push_back(z);
    }
    return path;
}

CoupledZTheta simulate_Z_theta_coupled(double kappa, double T, double dt,
                                       std::uint64_t seed) {
    if (!(dt > 0.0) || !(T > 0.0)) throw OutOfRange("need dt > 0 and T > 0");
    Rng rng(seed);
    CoupledZTheta out;
    const std::size_t n = static_cast<std::size_t>(std::ceil(T / dt));
    out.times.reserve(n + 1);
    out.z.reserve(n + 1);
    out.theta.reserve(n + 1);
    double z = M_PI / 2.0, theta = M_PI / 2.0;
    out.times.push_back(0.0);
    out.z.push_back(z);
    out.theta.push_back(theta);
    for (std::size_t k = 1; k <= n; ++k) {
        const double h = std::min(dt, T - static_cast<double>(k - 1) * dt);
        if (h <= 0.0) break;
        const double noise = std::sqrt(kappa * h) * rng.normal();
        z += q_drift(z) * h + noise;
        theta += 2.0 / std::tan(theta) * h + noise;
        z = std::clamp(z, 1e-12, M_PI - 1e-12);
        theta = std::clamp(theta, 1e-12, M_PI - 1e-12);
        out.times.push_back(static_cast<double>(k - 1) * dt + h);
        out.z.push_back(z);
        out.theta.push_back(theta);
    }
    return out;
}

HitExperimentResult bessel_hit_experiment(double a, double kappa, double x0,
                                          double delta, std::size_t samples,
                                          double dt, std::uint64_t seed,
                                          double escape_factor,
                                          std::size_t workers) {
    if (!(delta > 0.0) || delta >= std::abs(x0))
        throw OutOfRange("delta must lie in (0, |x0|)");
    if (samples == 0) throw OutOfRange("need samples >= 1");
    const double p_exact = exact_hit_probability(a, kappa, x0, delta);
    const double exponent = 2.0 * a / kappa - 1.0;
    const double x_escape = delta * escape_factor;

    std::vector<unsigned char> hit(samples, 0);
    parallel_for(samples, workers, [&](std::size_t i) {
        Rng rng(seed, i);
        double x = std::abs(x0);
        // a.s. finite: the walk either dips to delta or escapes
        for (std::size_t iter = 0; iter < 100'000'000; ++iter) {
            const double scale = x / (2.0 * delta);
            const double h = dt * std::max(1.0, scale * scale);
            const double prop =
                x + (a / x) * h + std::sqrt(kappa * h) * rng.normal();
            if (prop <= delta) {
                hit[i] = 1;
                return;
            }
            // Brownian-bridge correction for intra-step crossings; without
            // it the discrete first-passage indicator is biased by O(sqrt h).
            const double bridge_exp =
                -2.0 * (x - delta) * (prop - delta) / (kappa * h);
            if (bridge_exp > -40.0 && rng.uniform() < std::exp(bridge_exp)) {
                hit[i] = 1;
                return;
            }
            x = prop;
            if (x >= x_escape) return;
        }
    });

    HitExperimentResult res;
    res.samples = samples;
    for (unsigned char h : hit) res.hits += h;
    res.p_hat = static_cast<double>(res.hits) / static_cast<double>(samples);
    res.p_exact = p_exact;
    res.sigma = std::sqrt(p_exact * (1.0 - p_exact) /
                          static_cast<double>(samples));
    res.escape_bias_bound = std::pow(1.0 / escape_factor, exponent);
    res.pass = std::abs(res.p_hat - res.p_exact) <= 3.0 * res.sigma;
    return res;
}

} // namespace loewner
