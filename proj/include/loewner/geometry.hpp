#ifndef LOEWNER_GEOMETRY_HPP
#define LOEWNER_GEOMETRY_HPP

#include <optional>
#include <vector>

#include "loewner/trace.hpp"

namespace loewner {

// Finite point set in the closed reference domain, compared under d_D.
struct PointCloud {
    std::vector<Complex> points;
    Mode mode = Mode::radial;
    enum class Source { trace, hull_sample } source = Source::trace;
    // Bias added to reported Hausdorff values when the cloud was downsampled.
    double downsample_radius = 0.0;
};

// Return/escape event R_n^N (radial) or E_n^N (chordal).
struct ReturnEventSpec {
    int n = 1;
    int N = 2;
    Mode mode = Mode::radial;
};

struct ReturnEventResult {
    enum class Status { hit, no_return_by_horizon, not_yet_entered } status;
    // Radial: tau_N, first time |gamma| < e^{-N}. Chordal: sigma_N, first
    // time |gamma| > N. Present unless status == not_yet_entered.
    std::optional<double> entry_time;
    // First time after entry_time at which the return/escape condition holds.
    std::optional<double> violation_time;
    bool hit() const { return status == Status::hit; }
};

// Moebius map H -> D with 0 -> 1 and 2i -> 0: phi_H(z) = (2i - z)/(2i + z).
// Non-finite input is treated as the boundary point at infinity (-> -1).
Complex phi_H(Complex z);

// d_D(z, w): Euclidean in disk mode, |phi_H(z) - phi_H(w)| in chordal mode.
double d_D_metric(Complex z, Complex w, Mode mode);

// Two-sided Hausdorff distance under d_D, brute force O(|A||B|). Clouds
// larger than 10^4 points are stride-downsampled; the downsampling radius is
// added to the returned value.
double hausdorff_distance(const PointCloud& a, const PointCloud& b);

PointCloud cloud_from_trace(const Trace& g);

// d_X: sup over the merged capacity grid of d_D(g1(t ^ T1), g2(t ^ T2)).
double sup_metric(const Trace& g1, const Trace& g2);

// d-degree: discrete Frechet distance under d_D over monotone alignments of
// the two traces resampled on their merged capacity grid. By construction
// unparam_metric <= sup_metric on every pair (the diagonal alignment).
double unparam_metric(const Trace& g1, const Trace& g2);

// Exact segment-segment intersection sweep, excluding shared endpoints of
// adjacent segments; also flags interior vertices returning to the domain
// boundary (R in chordal mode, the unit circle in radial mode).
bool self_intersects(const Trace& g);
bool polyline_self_intersects(const std::vector<Complex>& pts, Mode mode);

ReturnEventResult return_event_hit(const Trace& g, const ReturnEventSpec& spec);

struct ConcatReport {
    // Sup distance between forward(concat(d1,d2)) and the pointwise
    // fhat_{T1} images of forward(d2) appended to forward(d1).
    double identity_discrepancy = 0.0;
    // Self-convergence: sup distance between the concatenated trace at the
    // working resolution and at twice the resolution, on shared times.
    double refinement_discrepancy = 0.0;
    bool pass = false;
    double tol = 0.0;
};

// Consistency check of conformal concatenation against the centered
// inverse-map route, chordal mode.
ConcatReport concat_consistency(const Driver& d1, const Driver& d2, double tol);

} // namespace loewner

#endif
