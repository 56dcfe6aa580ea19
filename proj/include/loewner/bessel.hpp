#ifndef LOEWNER_BESSEL_HPP
#define LOEWNER_BESSEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace loewner {

// Sampled path of dX = (a/X) dt + sqrt(kappa) dB, X_0 = x0 != 0.
struct BesselPath {
    double a = 2.0;
    double kappa = 0.0;
    double x0 = 1.0;
    std::vector<double> times;
    std::vector<double> values;
    std::optional<double> hit_zero_at;
    // first-passage times of |X| down to each requested level
    std::map<double, double> hit_level_records;
};

// Euler-Maruyama on a uniform grid. Near zero (a > 0) a step that would
// cross the origin is retried on halved substeps up to 20 times before a
// zero hit is declared; first-passage times are linearly interpolated
// within the crossing step. The path stops at a zero hit.
BesselPath simulate_bessel(double a, double kappa, double x0, double dt,
                           double T, std::uint64_t seed,
                           const std::vector<double>& levels = {});

// P[tau_delta < infinity] = (delta/|x|)^(2a/kappa - 1), valid for kappa in
// (0, 2a) and 0 < delta <= |x|.
double exact_hit_probability(double a, double kappa, double x, double delta);

// Gaussian-tail bound on P[max_{[0,t]} |X| < eps], uniform in the start:
// sqrt(kappa t / 2 pi) * (eps / (2t - eps^2)) * exp(-(2t/eps - eps)^2 / 2kt).
double stay_small_bound(double eps, double t, double kappa);

// Drift of the comparison process Z: q(x) = min(2 cot x, 1/x).
double q_drift(double x);

// Euler-Maruyama for dZ = q(Z) dt + sqrt(kappa) dB, Z_0 = pi/2.
BesselPath simulate_Z(double kappa, double T, double dt, std::uint64_t seed);

// Comparison run with shared noise: plain EM of Z (drift q) and Theta
// (drift 2 cot) on the same grid and increments; q <= 2 cot on (0, pi)
// forces Z <= Theta pathwise.
struct CoupledZTheta {
    std::vector<double> times;
    std::vector<double> z;
    std::vector<double> theta;
};
CoupledZTheta simulate_Z_theta_coupled(double kappa, double T, double dt,
                                       std::uint64_t seed);

// First-passage Bernoulli sampler behind the bessel-check CLI: does |X|
// reach delta before escaping to escape_factor * delta? The base step dt
// applies near delta; far from the origin the step grows quadratically with
// |X|/(2 delta) (diffusive scaling), keeping relative resolution uniform.
// The escape cap contributes a bias of at most (1/escape_factor)^(2a/k - 1).
struct HitExperimentResult {
    double p_hat = 0.0;
    double p_exact = 0.0;
    double sigma = 0.0; // binomial
    std::size_t hits = 0;
    std::size_t samples = 0;
    double escape_bias_bound = 0.0;
    bool pass = false; // |p_hat - p_exact| <= 3 sigma
};
HitExperimentResult bessel_hit_experiment(double a, double kappa, double x0,
                                          double delta, std::size_t samples,
                                          double dt, std::uint64_t seed,
                                          double escape_factor = 5000.0,
                                          std::size_t workers = 0);

} // namespace loewner

#endif
