#ifndef LOEWNER_HARNESS_HPP
#define LOEWNER_HARNESS_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "loewner/driver.hpp"
#include "loewner/radial.hpp"

namespace loewner {

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

// Wilson score interval (preferred over Wald for small-p cells).
WilsonInterval wilson_ci(std::size_t hits, std::size_t n, double z = 1.96);

// Rare events probed across a kappa grid.
struct ConeEvent {
    double theta; // trace leaves the cone {theta <= arg z <= pi - theta}
};
struct ReturnEvent {
    int n;
    int N;
    Mode mode;
};
struct TargetBallEvent {
    double r; // radial trace enters r*D before the horizon
};
using RareEvent = std::variant<ConeEvent, ReturnEvent, TargetBallEvent>;

struct RateCell {
    double kappa = 0.0;
    std::size_t samples = 0;
    std::size_t hits = 0;
    std::size_t not_yet = 0; // finite-horizon indeterminate (return events)
    double p_hat = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    double klogp = 0.0;      // meaningful only when flag == "ok"
    std::string flag;        // "ok" or "zero-hits"
};

struct RateConfig {
    std::vector<double> kappa_grid; // positive, decreasing
    std::size_t samples = 1000;
    std::size_t n_steps = 256;
    std::uint64_t seed = 1;
    double horizon_override = 0.0; // 0 = event-specific default
    std::size_t workers = 0;       // 0 = library default
    std::size_t cell_offset = 0;   // substream base (manifest re-verification)
};

// Default finite-horizon surrogates for the (infinite-time) events:
// cone/target-ball run to T = 1; returns run to N^2 (chordal), N + 3
// (radial), so the trace diameter comfortably exceeds the outer scale.
double default_event_horizon(const RareEvent& ev);

std::vector<RateCell> rate_experiment(const RareEvent& ev, const RateConfig& cfg);

// Affine fit of the kappa*log(p_hat) series in kappa over cells with hits;
// the intercept is the desk-scale proxy for the kappa -> 0 rate.
struct RateExtrapolation {
    bool valid = false;         // needs >= 2 cells with hits
    double intercept = 0.0;
    double slope = 0.0;
    std::vector<double> residuals; // per used cell, fit - observed
};

RateExtrapolation extrapolate_rate(const std::vector<RateCell>& cells);

struct ReturnProbRow {
    double kappa = 0.0;
    int n = 0, N = 0;
    std::size_t samples = 0, hits = 0, not_yet = 0;
    double p_hat = 0.0, ci_lo = 0.0, ci_hi = 0.0;
};

struct ReturnProbResult {
    std::vector<ReturnProbRow> rows;
    double slope = 0.0;       // fitted d log p / d log(N/n)
    bool slope_valid = false; // needs >= 2 cells with hits
    double slope_bound = 0.0; // -(8/kappa - 1) + slack
    bool pass = false;
};

ReturnProbResult return_prob_experiment(Mode mode, int n,
                                        const std::vector<int>& N_list,
                                        double kappa, std::size_t samples,
                                        double horizon_T, std::size_t n_steps,
                                        std::uint64_t seed, double slack = 0.5,
                                        std::size_t workers = 0,
                                        std::size_t cell_offset = 0);

struct RnCheckRow {
    std::size_t sample = 0;
    double t = 0.0;         // tau_delta ^ T, the evaluation time
    double tau_delta = -1.0; // -1 when the path never stopped
    double weight = 1.0;
};

struct RnCheckResult {
    std::vector<RnCheckRow> rows;
    double mean = 0.0;
    double stddev = 0.0;
    double std_error = 0.0;
    bool pass = false; // |mean - 1| <= 3 std_error
};

// Mean of the Radon-Nikodym weight over chordal-law Theta paths stopped at
// tau_delta ^ T; a bounded martingale, so the true mean is exactly 1.
RnCheckResult rn_martingale_check(double kappa, double T, double delta,
                                  std::size_t samples, std::uint64_t seed,
                                  std::size_t path_steps = 20000,
                                  std::size_t workers = 0);

struct TightnessConstants {
    double c1 = 1.0, c2 = 1.0, c3 = 1.0, beta = 0.5;
};

struct TightnessRow {
    double kappa = 0.0;
    int n = 0;
    std::size_t samples = 0;
    std::size_t h_violations = 0;
    long l_violations = -1; // -1 when the L check was not evaluated
    double freq_h = 0.0;
    double freq_l = 0.0;
    // (n/2)^(1 - 1/(2 kappa)) evaluated at c = 1; shape comparison only,
    // the true constant is unknown.
    double asymptotic_bound_c1 = 0.0;
};

std::vector<TightnessRow> tightness_experiment(
    const std::vector<double>& kappa_grid, const std::vector<int>& n_list,
    const TightnessConstants& consts, std::size_t samples, std::uint64_t seed,
    bool eval_L, std::size_t n_steps = 0 /* 0 = max(256, 4n) */,
    std::size_t workers = 0, std::size_t cell_offset = 0);

} // namespace loewner

#endif
