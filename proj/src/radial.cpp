#include "loewner/radial.hpp"

#include <algorithm>
#include <cmath>

#include "loewner/errors.hpp"
#include "loewner/rng.hpp"

namespace loewner {

namespace {

// Right-hand side of the radial Loewner equation.
Complex radial_rhs(Complex z, double omega) {
    const Complex u = std::polar(1.0, omega);
    return z * (u + z) / (u - z);
}

struct FlowGuard {
    double max_excursion = 1e-9;
    void renormalize(Complex& z, bool on_circle) const {
        const double r = std::abs(z);
        if (on_circle) {
            if (r > 0.0) z /= r;
            return;
        }
        if (r > 1.0) {
            if (r - 1.0 > max_excursion)
                throw BranchFailure("radial flow left the closed unit disk");
            z /= r;
        }
    }
};

// One adaptive RK4 leg over [t0, t1] (t1 > t0) of dz/dt = sign * F(z, w(t))
// with F the radial Loewner field; sign = -1 integrates the reverse flow.
// `omega` must be callable at any time in the leg. Steps that overshoot the
// closed disk or collapse through the singularity are rejected and halved.
template <typename OmegaFn>
Complex integrate_leg(Complex z, double t0, double t1, int field_sign,
                      const OmegaFn& omega, const RadialOptions& opts,
                      bool on_circle, double* swallowed_at) {
    const FlowGuard guard;
    const double sgn = field_sign > 0 ? 1.0 : -1.0;
    double t = t0;
    std::size_t iters = 0;
    while (t < t1) {
        const double d = std::abs(std::polar(1.0, omega(t)) - z);
        if (d < opts.swallow_radius) {
            if (swallowed_at) {
                *swallowed_at = t;
                return z;
            }
            throw SingularStep("flow reached the driving singularity");
        }
        double h = std::min(t1 - t, opts.substep_alpha * d * d);
        Complex z_new;
        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            if (++iters > 50'000'000)
                throw SingularStep("radial integrator stalled near singularity");
            const Complex k1 = sgn * radial_rhs(z, omega(t));
            const Complex k2 =
                sgn * radial_rhs(z + 0.5 * h * k1, omega(t + 0.5 * h));
            const Complex k3 =
                sgn * radial_rhs(z + 0.5 * h * k2, omega(t + 0.5 * h));
            const Complex k4 = sgn * radial_rhs(z + h * k3, omega(t + h));
            z_new = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const double d_new = std::abs(std::polar(1.0, omega(t + h)) - z_new);
            const bool in_disk = std::abs(z_new) <= 1.0 + 1e-9;
            const bool no_collapse = d_new > 0.25 * d;
            if (in_disk && no_collapse) {
                accepted = true;
                t += h;
                break;
            }
            h *= 0.5;
            if (!(h > 0.0)) break;
        }
        if (!accepted) {
            // the flow is pinned against the singularity at this substep
            if (swallowed_at) {
                *swallowed_at = t;
                return z;
            }
            throw SingularStep("radial step rejected repeatedly");
        }
        z = z_new;
        guard.renormalize(z, on_circle);
    }
    return z;
}

} // namespace

Complex radial_tip(const Driver& d, double t, const RadialOptions& opts) {
    if (d.mode != Mode::radial)
        throw ModeMismatch("radial solver requires a radial driver");
    if (t < 0.0 || t > d.horizon() + 1e-12)
        throw OutOfRange("tip time outside [0, T]");
    if (t == 0.0) return Complex(1.0, 0.0);

    // Step size of the grid interval containing t fixes the seeding offset.
    auto it = std::lower_bound(d.times.begin(), d.times.end(), t);
    std::size_t k = std::max<std::size_t>(1, it - d.times.begin());
    k = std::min(k, d.times.size() - 1);
    const double dt_local = d.times[k] - d.times[k - 1];
    const double eps = opts.c_eps * std::sqrt(dt_local);

    // Reverse flow: solve in s over [0, t] with driver time tau = t - s.
    const double omega_t = d.value_at(t);
    Complex z = std::polar(1.0 - eps, omega_t);
    auto omega_rev = [&](double s) { return d.value_at(t - s); };
    z = integrate_leg(z, 0.0, t, -1, omega_rev, opts, false, nullptr);
    return z;
}

Trace radial_forward(const Driver& d, const RadialOptions& opts) {
    if (d.mode != Mode::radial)
        throw ModeMismatch("radial solver requires a radial driver");
    Trace g;
    g.mode = Mode::radial;
    g.cap_times = d.times;
    g.points.resize(d.times.size());
    g.points[0] = Complex(1.0, 0.0);
    for (std::size_t k = 1; k < d.times.size(); ++k)
        g.points[k] = radial_tip(d, d.times[k], opts);
    return g;
}

FlowPoint radial_gt_eval(const Driver& d, Complex z, double t,
                         const RadialOptions& opts) {
    if (d.mode != Mode::radial)
        throw ModeMismatch("radial solver requires a radial driver");
    if (std::abs(z) > 1.0 + 1e-9)
        throw BadPoint("point must lie in the closed unit disk");
    if (std::abs(z - Complex(1.0, 0.0)) < 1e-14)
        throw BadPoint("z = 1 is the curve base point");
    if (t < 0.0 || t > d.horizon() + 1e-12)
        throw OutOfRange("evaluation time outside [0, T]");

    const bool on_circle = std::abs(std::abs(z) - 1.0) < 1e-12;
    FlowPoint out;
    double swallowed_at = -1.0;
    auto omega = [&](double s) { return d.value_at(s); };
    out.value =
        integrate_leg(z, 0.0, t, +1, omega, opts, on_circle, &swallowed_at);
    if (swallowed_at >= 0.0) out.swallowed_at = swallowed_at;
    return out;
}

LogCapacityReport log_capacity(const Driver& d, double t,
                               const RadialOptions& opts) {
    LogCapacityReport rep;
    rep.value = t;
    const double h = 1e-6;
    const FlowPoint fp = radial_gt_eval(d, Complex(h, 0.0), t, opts);
    if (fp.swallowed())
        throw SingularStep("derivative probe swallowed (should not happen)");
    rep.numeric_value = std::log(std::abs(fp.value) / h);
    rep.discrepancy = std::abs(rep.numeric_value - rep.value);
    return rep;
}

namespace {

double theta_drift(double theta, double kappa, ThetaLaw law) {
    const double c = law == ThetaLaw::radial ? 2.0 : (kappa - 4.0);
    return c / std::tan(theta);
}

// Guarded EM step: reject-and-halve when a proposal exits (0, pi).
double guarded_step(double theta, double h, double kappa, ThetaLaw law,
                    Rng& rng, int depth, bool& hard_stop) {
    const double prop = theta + theta_drift(theta, kappa, law) * h +
                        std::sqrt(kappa * h) * rng.normal();
    if (prop > 0.0 && prop < M_PI) return prop;
    if (depth >= 20) {
        hard_stop = true;
        return theta;
    }
    double mid =
        guarded_step(theta, 0.5 * h, kappa, law, rng, depth + 1, hard_stop);
    if (hard_stop) return mid;
    return guarded_step(mid, 0.5 * h, kappa, law, rng, depth + 1, hard_stop);
}

} // namespace

ThetaPath simulate_theta(double kappa, double T, std::size_t n,
                         double delta_stop, std::uint64_t seed, ThetaLaw law) {
    if (!(kappa > 0.0)) throw OutOfRange("kappa must be > 0");
    if (!(T > 0.0) || n < 1) throw OutOfRange("need T > 0 and n >= 1");
    if (delta_stop < 0.0 || delta_stop >= 1.0)
        throw OutOfRange("delta_stop must lie in [0, 1)");
    Rng rng(seed);
    const double h = T / static_cast<double>(n);
    ThetaPath path;
    path.kappa = kappa;
    path.origin = ThetaPath::Origin::simulated_sde;
    path.delta_stop = delta_stop;
    path.times.reserve(n + 1);
    path.values.reserve(n + 1);
    path.times.push_back(0.0);
    path.values.push_back(M_PI / 2.0);
    double theta = M_PI / 2.0;
    for (std::size_t k = 1; k <= n; ++k) {
        bool hard_stop = false;
        theta = guarded_step(theta, h, kappa, law, rng, 0, hard_stop);
        const double t = static_cast<double>(k) * h;
        path.times.push_back(t);
        path.values.push_back(theta);
        if (hard_stop || std::sin(theta) <= delta_stop) {
            path.tau_delta = t;
            break;
        }
    }
    return path;
}

ThetaPath theta_from_trace(const Driver& d, double delta_stop) {
    if (d.mode != Mode::radial)
        throw ModeMismatch("theta extraction requires a radial driver");
    ThetaPath path;
    path.kappa = 0.0; // not derivable from a deterministic driver
    path.origin = ThetaPath::Origin::extracted_from_trace;
    path.delta_stop = delta_stop;
    path.times.push_back(0.0);
    path.values.push_back(M_PI / 2.0);

    // Exact angle dynamics in capacity time: theta' = cot(theta)/2 - w'/2,
    // integrated with RK4 within each linear driver segment. Output times
    // are converted to the SDE clock (capacity / 4).
    double theta = M_PI / 2.0;
    for (std::size_t k = 1; k < d.times.size(); ++k) {
        const double dt = d.times[k] - d.times[k - 1];
        const double slope = (d.values[k] - d.values[k - 1]) / dt;
        const int substeps = 8;
        const double h = dt / substeps;
        auto rhs = [&](double th) {
            return 0.5 / std::tan(th) - 0.5 * slope;
        };
        for (int s = 0; s < substeps; ++s) {
            const double k1 = rhs(theta);
            const double k2 = rhs(theta + 0.5 * h * k1);
            const double k3 = rhs(theta + 0.5 * h * k2);
            const double k4 = rhs(theta + h * k3);
            theta += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!(theta > 0.0 && theta < M_PI) || std::sin(theta) < 1e-8)
                throw TargetSwallowed("target point -1 swallowed");
        }
        const double t_sde = d.times[k] / 4.0;
        path.times.push_back(t_sde);
        path.values.push_back(theta);
        if (std::sin(theta) <= delta_stop) {
            path.tau_delta = t_sde;
            break;
        }
    }
    return path;
}

RNWeight rn_weight(const ThetaPath& theta, double kappa, double t,
                   double delta) {
    if (!(kappa > 0.0)) throw OutOfRange("kappa must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw OutOfRange("delta must lie in (0, 1)");
    const double t_max =
        theta.tau_delta ? std::min(*theta.tau_delta, theta.horizon())
                        : theta.horizon();
    if (t > t_max + 1e-12)
        throw PastStoppingTime("weight requested past tau_delta ^ T");

    // Trapezoidal integral of 1/sin^2(theta) up to t, with an interpolated
    // final node when t is interior to a grid step.
    double integral = 0.0;
    double theta_t = theta.values.front();
    auto inv_sin2 = [](double th) {
        const double s = std::sin(th);
        return 1.0 / (s * s);
    };
    for (std::size_t k = 1; k < theta.times.size(); ++k) {
        const double t0 = theta.times[k - 1], t1 = theta.times[k];
        if (t <= t0) break;
        if (t >= t1) {
            integral += 0.5 * (t1 - t0) *
                        (inv_sin2(theta.values[k - 1]) + inv_sin2(theta.values[k]));
            theta_t = theta.values[k];
        } else {
            const double s = (t - t0) / (t1 - t0);
            theta_t = theta.values[k - 1] +
                      s * (theta.values[k] - theta.values[k - 1]);
            integral +=
                0.5 * (t - t0) * (inv_sin2(theta.values[k - 1]) + inv_sin2(theta_t));
            break;
        }
    }

    const double p = 6.0 / kappa - 1.0;
    RNWeight w;
    w.t = t;
    w.integral_term = integral;
    w.stopped_at_tau_delta =
        theta.tau_delta.has_value() && t >= *theta.tau_delta - 1e-12;
    w.value = std::pow(std::abs(std::sin(theta_t)), p) *
              std::exp(p * ((kappa - 2.0) * t / 2.0 + integral));
    return w;
}

} // namespace loewner
