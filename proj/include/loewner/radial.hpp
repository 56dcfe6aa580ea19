#ifndef LOEWNER_RADIAL_HPP
#define LOEWNER_RADIAL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "loewner/chordal.hpp"
#include "loewner/driver.hpp"
#include "loewner/trace.hpp"

namespace loewner {

// Numerical knobs of the radial integrators.
struct RadialOptions {
    // Reverse-flow tip seeding offset: z(0) = e^{i w(t)} (1 - c_eps*sqrt(dt)).
    double c_eps = 0.1;
    // Substep ceiling h <= alpha * d^2 near the singularity (d = distance to
    // the driving point; the flow speed there is ~ 2/d).
    double substep_alpha = 0.1;
    double swallow_radius = 1e-9;
};

// Comparison process Theta between radial and chordal SLE started from the
// symmetric configuration.
//
// Time convention: ThetaPath lives on the clock of the SDE
//     dTheta = 2 cot(Theta) dt + sqrt(kappa) dB,  Theta_0 = pi/2,
// which runs at one quarter of the logarithmic-capacity clock of the radial
// Loewner equation used elsewhere in this library (capacity time = 4 * SDE
// time). theta_from_trace performs that conversion.
struct ThetaPath {
    std::vector<double> times;
    std::vector<double> values;
    double kappa = 0.0;
    enum class Origin { simulated_sde, extracted_from_trace } origin =
        Origin::simulated_sde;
    // Stopping data: first grid time with sin(theta) <= delta_stop, if any.
    std::optional<double> tau_delta;
    double delta_stop = 0.0;

    double horizon() const { return times.back(); }
};

// Which law drives the Theta SDE. The radial law has drift 2 cot(theta); the
// chordal law (the denominator measure of the Radon-Nikodym weight) has
// drift (kappa - 4) cot(theta), with the same noise scale.
enum class ThetaLaw { radial, chordal };

struct RNWeight {
    double value = 1.0;
    double t = 0.0;
    double integral_term = 0.0; // trapezoidal int_0^t ds / sin^2(theta_s)
    bool stopped_at_tau_delta = false;
};

struct LogCapacityReport {
    double value = 0.0;           // capacity-parameterization contract: = t
    double numeric_value = 0.0;   // from the flow derivative at 0
    double discrepancy = 0.0;
};

// Forward radial trace via regularized reverse-flow RK4 integration of
//   dz/ds = -z (e^{i w(t-s)} + z) / (e^{i w(t-s)} - z).
Trace radial_forward(const Driver& d, const RadialOptions& opts = {});

// Single tip gamma(t); exposed for convergence studies.
Complex radial_tip(const Driver& d, double t, const RadialOptions& opts = {});

// Forward flow image g_t(z) for z in the closed disk, or swallowing time.
FlowPoint radial_gt_eval(const Driver& d, Complex z, double t,
                         const RadialOptions& opts = {});

LogCapacityReport log_capacity(const Driver& d, double t,
                               const RadialOptions& opts = {});

// Euler-Maruyama for the Theta SDE on a uniform grid with n steps, with a
// reject-and-halve guard at the (0, pi) boundary. The path is truncated at
// the first grid point with sin(theta) <= delta_stop.
ThetaPath simulate_theta(double kappa, double T, std::size_t n,
                         double delta_stop, std::uint64_t seed,
                         ThetaLaw law = ThetaLaw::radial);

// Theta extracted from a radial driver by tracking the boundary point -1:
// e^{2 i theta_t} = g_t(-1) / e^{i w_t}, with continuous angle unwrapping.
// Output times are on the SDE clock (capacity / 4).
ThetaPath theta_from_trace(const Driver& d, double delta_stop = 0.0);

// Radon-Nikodym weight d(radial)/d(chordal) at SDE time t <= tau_delta ^ T:
//   |sin theta_t|^p * exp(p [ (kappa-2) t / 2 + int_0^t ds / sin^2 theta ]),
// with p = 6/kappa - 1. The exponent constants are pinned by requiring the
// weight to be a genuine martingale under both flows of this library's
// radial Loewner normalization (see also tests/test_radial.cpp).
RNWeight rn_weight(const ThetaPath& theta, double kappa, double t,
                   double delta);

} // namespace loewner

#endif
