#ifndef LOEWNER_CHORDAL_HPP
#define LOEWNER_CHORDAL_HPP

#include <optional>
#include <vector>

#include "loewner/driver.hpp"
#include "loewner/trace.hpp"

namespace loewner {

// Driver-freezing convention for the per-step elementary maps.
enum class Freezing { midpoint, left_endpoint };

// One vertical-slit step: over a capacity increment dt the driver is frozen
// at lambda_star, so the step map is
//   g(z)      = lambda_star + sqrt((z - lambda_star)^2 + 4 dt)
//   g^{-1}(w) = lambda_star + sqrt((w - lambda_star)^2 - 4 dt)
// with the upper-half-plane branch (Im >= 0; sign(Re(. - lambda_star)) for
// real radicands, keeping the two real half-lines fixed setwise).
struct SlitStep {
    double dt = 0.0;
    double lambda_star = 0.0;
};

struct SlitChain {
    std::vector<SlitStep> steps;
    std::vector<double> times; // cumulative capacity grid, times[0] = 0
    double hcap() const { return 2.0 * times.back(); }
};

SlitChain build_slit_chain(const Driver& d,
                           Freezing freezing = Freezing::midpoint);

// Result of tracking a point through the flow: either the forward image or
// the swallowing time T_z. A point is swallowed in a step when it lies on
// that step's closed slit (|Re d| within slit_tol of the base line and below
// the tip) or within 1e-12 of the driving point.
struct FlowPoint {
    Complex value{0.0, 0.0};
    std::optional<double> swallowed_at;
    bool swallowed() const { return swallowed_at.has_value(); }
};

// Forward Loewner transform: the trace of the hull grown by d, with tips
//   gamma(t_k) = G_1^{-1} o ... o G_k^{-1}(lambda*_k).
// Exact per-step maps; total cost O(n^2).
Trace chordal_forward(const Driver& d, Freezing freezing = Freezing::midpoint);

// Forward image g_t(z) under the same slit chain, or the swallowing time.
FlowPoint chordal_gt_eval(const Driver& d, Complex z, double t,
                          Freezing freezing = Freezing::midpoint);

// Centered inverse map fhat_t(w) = f_t(w + lambda_t) and its derivative
// (chain-rule product of (e_j)/sqrt(e_j^2 - 4 dt_j) over the chain).
Complex fhat_eval(const Driver& d, Complex w, double t,
                  Freezing freezing = Freezing::midpoint);
Complex fhat_derivative(const Driver& d, Complex w, double t,
                        Freezing freezing = Freezing::midpoint);

// L(n) membership: |fhat'_{lambda,t}(iy)| <= psi(n) y^{-beta} checked on a
// finite (t, y) grid; t runs over (a subsample of) the driver knots, y over
// a geometric grid in [1/(sqrt(n)*y_grid), 1/sqrt(n)].
TightnessReport membership_L(const Driver& d, int n, double c1, double c2,
                             double beta, int y_grid, int t_grid_cap = 129);

// Inverse Loewner transform by vertical-slit unzipping. The input is a
// simple polyline 0 = z_0, z_1, ..., z_m in the closed upper half-plane with
// Im z_k > 0 for k >= 1. Each step removes the vertical slit through the
// current first vertex u = x + iy (capacity increment y^2/4, driver knot x)
// and maps the remaining vertices by z -> x + sqrt((z - x)^2 + y^2).
Driver unzip_curve(const std::vector<Complex>& polyline,
                   bool check_simple = true);

// 2 x (total capacity of the unzipped polyline) = sum_k y_k^2 / 2.
double hcap_of_polyline(const std::vector<Complex>& polyline,
                        bool check_simple = true);

} // namespace loewner

#endif
