#include "loewner/driver.hpp"

#include <algorithm>
#include <cmath>

#include "loewner/errors.hpp"
#include "loewner/rng.hpp"

namespace loewner {

double Driver::value_at(double t) const {
    if (t <= 0.0) return values.front();
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times.begin());
    const double t0 = times[k - 1], t1 = times[k];
    const double w0 = values[k - 1], w1 = values[k];
    const double s = (t - t0) / (t1 - t0);
    return w0 + s * (w1 - w0);
}

double phi_modulus(double delta, double c3) {
    if (!(delta > 0.0) || delta >= 1.0)
        throw OutOfRange("phi(delta) requires delta in (0,1), got delta=" +
                         std::to_string(delta));
    return c3 * std::sqrt(delta * std::log(1.0 / delta));
}

double psi_bound(int n, double c1, double c2) {
    if (n < 1) throw OutOfRange("psi(n) requires n >= 1");
    return c1 * std::pow(1.0 + std::log(static_cast<double>(n)), c2);
}

Driver make_driver(std::vector<double> times, std::vector<double> values,
                   Mode mode) {
    if (times.size() != values.size())
        throw LengthMismatch("times and values must have equal length");
    if (times.empty()) throw LengthMismatch("driver needs at least one knot");
    if (times.front() != 0.0)
        throw NonMonotoneTimes("times must start at 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw NonMonotoneTimes("times must be strictly increasing");
    if (values.front() != 0.0)
        throw NonzeroOrigin("driver must start at W_0 = 0");
    Driver d;
    d.times = std::move(times);
    d.values = std::move(values);
    d.mode = mode;
    return d;
}

Driver sample_brownian_driver(double kappa, double T, std::size_t n_steps,
                              std::uint64_t seed, Mode mode) {
    if (kappa < 0.0) throw OutOfRange("kappa must be >= 0");
    if (!(T > 0.0)) throw OutOfRange("T must be > 0");
    if (n_steps < 1) throw OutOfRange("n_steps must be >= 1");
    const double dt = T / static_cast<double>(n_steps);
    const double sigma = std::sqrt(kappa * dt);
    Rng rng(seed);
    Driver d;
    d.mode = mode;
    d.times.resize(n_steps + 1);
    d.values.resize(n_steps + 1);
    d.times[0] = 0.0;
    d.values[0] = 0.0;
    double w = 0.0;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        w += sigma * rng.normal();
        d.times[k] = static_cast<double>(k) * dt;
        d.values[k] = w;
    }
    d.times[n_steps] = T;
    return d;
}

EnergyValue dirichlet_energy(const Driver& d) {
    double e = 0.0;
    for (std::size_t k = 1; k < d.times.size(); ++k) {
        const double dt = d.times[k] - d.times[k - 1];
        if (dt <= 0.0) throw DegenerateStep("zero-length capacity step");
        const double dw = d.values[k] - d.values[k - 1];
        e += dw * dw / (2.0 * dt);
    }
    return EnergyValue{e, false};
}

Driver concat_drivers(const Driver& d1, const Driver& d2) {
    if (d1.mode != d2.mode)
        throw ModeMismatch("cannot concatenate drivers of different modes");
    Driver out = d1;
    const double t_off = d1.times.back();
    const double w_off = d1.values.back();
    for (std::size_t k = 1; k < d2.times.size(); ++k) {
        out.times.push_back(t_off + d2.times[k]);
        out.values.push_back(w_off + d2.values[k]);
    }
    return out;
}

Driver truncate_driver(const Driver& d, double t_new) {
    if (t_new < 0.0 || t_new > d.times.back())
        throw OutOfRange("truncation time outside [0, T]");
    Driver out;
    out.mode = d.mode;
    out.times.push_back(0.0);
    out.values.push_back(0.0);
    for (std::size_t k = 1; k < d.times.size() && d.times[k] < t_new; ++k) {
        out.times.push_back(d.times[k]);
        out.values.push_back(d.values[k]);
    }
    if (t_new > 0.0) {
        out.times.push_back(t_new);
        out.values.push_back(d.value_at(t_new));
    }
    return out;
}

TightnessReport modulus_membership_H(const Driver& d, int n, double c3) {
    if (std::abs(d.times.back() - 1.0) > 1e-12)
        throw BadHorizon("H(n) check requires a driver on [0, 1]");
    if (n < 3) throw OutOfRange("H(n) check requires n >= 3 so that 2/n < 1");
    const double delta = 2.0 / static_cast<double>(n);
    const double phi = phi_modulus(delta, c3);

    // For a piecewise-linear W the window sup is attained with one end at a
    // knot; scan knots inside each window plus the interpolated endpoints.
    double worst = 0.0;
    const std::size_t m = d.times.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double ti = d.times[i], wi = d.values[i];
        for (std::size_t j = i + 1; j < m && d.times[j] <= ti + delta; ++j)
            worst = std::max(worst, std::abs(d.values[j] - wi));
        if (ti + delta <= d.times.back())
            worst = std::max(worst, std::abs(d.value_at(ti + delta) - wi));
        if (ti - delta >= 0.0)
            worst = std::max(worst, std::abs(d.value_at(ti - delta) - wi));
    }

    TightnessReport rep;
    rep.n = n;
    rep.c3 = c3;
    rep.worst_modulus_ratio = worst / phi;
    rep.in_H = worst <= phi;
    return rep;
}

Driver resample_uniform(const Driver& d, std::size_t n_steps) {
    if (n_steps < 1) throw OutOfRange("n_steps must be >= 1");
    const double T = d.times.back();
    if (T <= 0.0) return d;
    Driver out;
    out.mode = d.mode;
    out.times.resize(n_steps + 1);
    out.values.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = T * static_cast<double>(k) / static_cast<double>(n_steps);
        out.times[k] = t;
        out.values[k] = d.value_at(t);
    }
    out.values[0] = 0.0;
    return out;
}

} // namespace loewner
