#include "loewner/chordal.hpp"

#include <algorithm>
#include <cmath>

#include "loewner/errors.hpp"
#include "loewner/geometry.hpp"

namespace loewner {

namespace {

constexpr double kTipTol = 1e-12;  // |g - lambda*| capture radius at the tip
constexpr double kSlitTol = 1e-9;  // horizontal capture band of a slit

// Square root with image in the closed upper half-plane. For a real
// radicand >= 0 the sign follows sign_hint = sign(Re(preimage - base)),
// which keeps the two real half-lines fixed setwise.
Complex sqrt_upper(Complex zeta, double sign_hint) {
    if (zeta.imag() != 0.0) {
        Complex s = std::sqrt(zeta);
        return s.imag() < 0.0 ? -s : s;
    }
    const double x = zeta.real();
    if (x < 0.0) return Complex(0.0, std::sqrt(-x));
    const double r = std::sqrt(x);
    return sign_hint < 0.0 ? Complex(-r, 0.0) : Complex(r, 0.0);
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

// g^{-1} of one slit step. Never swallows; maps H-bar into H-bar.
Complex inverse_step(const SlitStep& st, Complex w) {
    const Complex e = w - st.lambda_star;
    const Complex zeta = e * e - 4.0 * st.dt;
    return st.lambda_star + sqrt_upper(zeta, sign_of(e.real()));
}

struct StepImage {
    Complex value;
    bool swallowed = false;
    double tau = 0.0; // capacity elapsed within the step at swallowing
};

// Forward image of v under one slit step of capacity dt (dt may be a partial
// step). Swallowing happens only on the closed slit segment itself.
StepImage forward_step(double dt, double lambda_star, Complex v) {
    const Complex d = v - lambda_star;
    const double x = d.real(), y = d.imag();
    const double tip = 2.0 * std::sqrt(dt);
    StepImage out;
    if (std::abs(d) < kTipTol) {
        out.swallowed = true;
        out.tau = (y * y) / 4.0;
        return out;
    }
    if (std::abs(x) <= kSlitTol && y >= 0.0 && y <= tip + kSlitTol) {
        out.swallowed = true;
        out.tau = std::min(y, tip) * std::min(y, tip) / 4.0;
        return out;
    }
    const Complex zeta = d * d + 4.0 * dt;
    out.value = lambda_star + sqrt_upper(zeta, sign_of(x));
    return out;
}

double frozen_value(const Driver& d, std::size_t k, Freezing freezing) {
    return freezing == Freezing::midpoint
               ? 0.5 * (d.values[k - 1] + d.values[k])
               : d.values[k - 1];
}

} // namespace

SlitChain build_slit_chain(const Driver& d, Freezing freezing) {
    if (d.mode != Mode::chordal)
        throw ModeMismatch("chordal solver requires a chordal driver");
    SlitChain chain;
    chain.times = d.times;
    chain.steps.reserve(d.steps());
    for (std::size_t k = 1; k < d.times.size(); ++k) {
        SlitStep st;
        st.dt = d.times[k] - d.times[k - 1];
        st.lambda_star = frozen_value(d, k, freezing);
        chain.steps.push_back(st);
    }
    return chain;
}

Trace chordal_forward(const Driver& d, Freezing freezing) {
    const SlitChain chain = build_slit_chain(d, freezing);
    Trace g;
    g.mode = Mode::chordal;
    g.cap_times = chain.times;
    g.points.resize(chain.times.size());
    g.points[0] = Complex(0.0, 0.0);
    const std::size_t n = chain.steps.size();
    for (std::size_t k = 1; k <= n; ++k) {
        Complex w(chain.steps[k - 1].lambda_star, 0.0);
        for (std::size_t j = k; j >= 1; --j) w = inverse_step(chain.steps[j - 1], w);
        g.points[k] = Complex(w.real(), std::max(0.0, w.imag()));
    }
    return g;
}

FlowPoint chordal_gt_eval(const Driver& d, Complex z, double t,
                          Freezing freezing) {
    if (z.imag() < 0.0) throw BadPoint("point must lie in the closed H");
    if (std::abs(z) == 0.0) throw BadPoint("z = 0 is the curve base point");
    if (t < 0.0 || t > d.times.back() + 1e-12)
        throw OutOfRange("evaluation time outside [0, T]");
    const SlitChain chain = build_slit_chain(d, freezing);
    FlowPoint out;
    out.value = z;
    double elapsed = 0.0;
    for (std::size_t k = 0; k < chain.steps.size() && elapsed < t; ++k) {
        const double dt = std::min(chain.steps[k].dt, t - elapsed);
        const StepImage img =
            forward_step(dt, chain.steps[k].lambda_star, out.value);
        if (img.swallowed) {
            out.swallowed_at = elapsed + img.tau;
            return out;
        }
        out.value = img.value;
        elapsed += dt;
    }
    return out;
}

namespace {

// Shared driver of fhat_eval / fhat_derivative: runs the inverse chain of the
// driver truncated at t on w + lambda_t, accumulating the chain-rule product.
void fhat_impl(const Driver& d, Complex w, double t, Freezing freezing,
               Complex& value, Complex& derivative) {
    if (!(w.imag() > 0.0))
        throw BadPoint("fhat evaluation requires Im w > 0");
    const Driver dt_trunc = truncate_driver(d, t);
    const SlitChain chain = build_slit_chain(dt_trunc, freezing);
    Complex u = w + Complex(dt_trunc.values.back(), 0.0);
    Complex deriv(1.0, 0.0);
    for (std::size_t j = chain.steps.size(); j >= 1; --j) {
        const SlitStep& st = chain.steps[j - 1];
        const Complex e = u - st.lambda_star;
        const Complex next = inverse_step(st, u);
        const Complex denom = next - st.lambda_star;
        if (std::abs(denom) == 0.0)
            throw BranchFailure("fhat chain hit a slit base");
        deriv *= e / denom;
        u = next;
        if (u.imag() < -1e-9)
            throw BranchFailure("fhat composition left the half-plane");
    }
    value = u;
    derivative = deriv;
}

} // namespace

Complex fhat_eval(const Driver& d, Complex w, double t, Freezing freezing) {
    Complex value, deriv;
    fhat_impl(d, w, t, freezing, value, deriv);
    return value;
}

Complex fhat_derivative(const Driver& d, Complex w, double t,
                        Freezing freezing) {
    Complex value, deriv;
    fhat_impl(d, w, t, freezing, value, deriv);
    return deriv;
}

TightnessReport membership_L(const Driver& d, int n, double c1, double c2,
                             double beta, int y_grid, int t_grid_cap) {
    if (std::abs(d.times.back() - 1.0) > 1e-12)
        throw BadHorizon("L(n) check requires a driver on [0, 1]");
    if (n < 2) throw OutOfRange("L(n) check requires n >= 2");
    if (y_grid < 2) throw OutOfRange("y_grid must be >= 2");
    const double psi = psi_bound(n, c1, c2);
    const double y_max = 1.0 / std::sqrt(static_cast<double>(n));
    const double y_min = y_max / static_cast<double>(y_grid);
    const SlitChain chain = build_slit_chain(d);

    // t grid: knot times, strided down to at most t_grid_cap entries.
    const std::size_t n_knots = d.times.size();
    const std::size_t stride =
        std::max<std::size_t>(1, (n_knots - 1 + t_grid_cap - 1) / t_grid_cap);

    TightnessReport rep;
    rep.n = n;
    rep.c1 = c1;
    rep.c2 = c2;
    rep.beta = beta;
    rep.y_grid = y_grid;
    double worst = 0.0;
    const double log_ratio = std::log(y_min / y_max);
    for (std::size_t k = 0; k < n_knots; k += stride) {
        const std::size_t m = std::min(k, chain.steps.size());
        rep.t_grid += 1;
        const double lambda_t = d.values[std::min(k, n_knots - 1)];
        for (int j = 0; j < y_grid; ++j) {
            const double y =
                y_max * std::exp(log_ratio * static_cast<double>(j) /
                                 static_cast<double>(y_grid - 1));
            Complex u = Complex(0.0, y) + Complex(lambda_t, 0.0);
            Complex deriv(1.0, 0.0);
            for (std::size_t s = m; s >= 1; --s) {
                const SlitStep& st = chain.steps[s - 1];
                const Complex e = u - st.lambda_star;
                const Complex next = inverse_step(st, u);
                deriv *= e / (next - st.lambda_star);
                u = next;
            }
            const double ratio = std::abs(deriv) * std::pow(y, beta) / psi;
            worst = std::max(worst, ratio);
        }
    }
    rep.worst_modulus_ratio = worst;
    rep.in_L = worst <= 1.0 ? TightnessReport::LStatus::yes
                            : TightnessReport::LStatus::no;
    return rep;
}

Driver unzip_curve(const std::vector<Complex>& polyline, bool check_simple) {
    if (polyline.size() < 2)
        throw DegenerateSegment("polyline needs at least one segment");
    if (std::abs(polyline.front()) > 1e-9)
        throw BadPoint("polyline must start at 0");
    for (std::size_t k = 1; k < polyline.size(); ++k)
        if (!(polyline[k].imag() > 0.0))
            throw NotInUpperHalfPlane(
                "interior polyline vertices must have Im > 0");
    if (check_simple && polyline_self_intersects(polyline, Mode::chordal))
        throw NotSimple("polyline is not simple");

    std::vector<Complex> u(polyline.begin() + 1, polyline.end());
    Driver out;
    out.mode = Mode::chordal;
    out.times.push_back(0.0);
    out.values.push_back(0.0);
    double t = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double x = u[k].real();
        const double y = u[k].imag();
        if (!(y > 0.0)) {
            if (k == 0) throw DegenerateSegment("zero-height unzip step");
            throw NotSimple("vertex swallowed during unzipping");
        }
        t += y * y / 4.0;
        out.times.push_back(t);
        out.values.push_back(x);
        for (std::size_t j = k + 1; j < u.size(); ++j) {
            const Complex e = u[j] - x;
            const Complex zeta = e * e + Complex(y * y, 0.0);
            u[j] = x + sqrt_upper(zeta, sign_of(e.real()));
        }
    }
    return out;
}

double hcap_of_polyline(const std::vector<Complex>& polyline,
                        bool check_simple) {
    const Driver d = unzip_curve(polyline, check_simple);
    return 2.0 * d.times.back();
}

} // namespace loewner
