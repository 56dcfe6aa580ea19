#ifndef LOEWNER_DRIVER_HPP
#define LOEWNER_DRIVER_HPP

#include <cstdint>
#include <vector>

namespace loewner {

enum class Mode { chordal, radial };

// A driving function sampled on a capacity-time grid, interpreted as the
// piecewise-linear interpolation of its knots.
//
// Invariants: times strictly increasing with times[0] = 0, values[0] = 0,
// equal lengths >= 1. The single-knot driver {0}/{0} is the empty driver
// (trivial hull).
struct Driver {
    std::vector<double> times;
    std::vector<double> values;
    Mode mode = Mode::chordal;

    double horizon() const { return times.back(); }
    std::size_t steps() const { return times.size() - 1; }
    bool empty() const { return times.size() == 1; }

    // Piecewise-linear evaluation, clamped to [0, T].
    double value_at(double t) const;
};

// Nonnegative energy with an explicit infinity marker (no float sentinel).
struct EnergyValue {
    double value = 0.0;
    bool is_infinite = false;
};

// Outcome of the H(n) / L(n) regularity checks. `in_L` is tri-state since
// the derivative check is optional in sweeps.
struct TightnessReport {
    int n = 0;
    bool in_H = false;
    enum class LStatus { yes, no, not_evaluated } in_L = LStatus::not_evaluated;
    // max |delta W| / phi(2/n) for the H check; max |fhat'| * y^beta / psi(n)
    // for the L check (whichever the report describes).
    double worst_modulus_ratio = 0.0;
    double c1 = 1.0, c2 = 1.0, c3 = 1.0, beta = 0.5;
    int t_grid = 0, y_grid = 0; // density of the discrete L-check grid
};

// phi(delta) = c3 * sqrt(delta * log(1/delta)), defined for delta in (0, 1).
double phi_modulus(double delta, double c3);

// psi(n) = c1 * (1 + log n)^c2.
double psi_bound(int n, double c1, double c2);

Driver make_driver(std::vector<double> times, std::vector<double> values,
                   Mode mode);

// Cumulative sums of i.i.d. Normal(0, kappa*dt) increments on the uniform
// grid with dt = T/n_steps. kappa = 0 degenerates to the zero driver.
Driver sample_brownian_driver(double kappa, double T, std::size_t n_steps,
                              std::uint64_t seed, Mode mode = Mode::chordal);

// Sum_k (dW_k)^2 / (2 dt_k), exact for the piecewise-linear interpolation.
EnergyValue dirichlet_energy(const Driver& d);

// Driver of the conformal concatenation: d1 followed by d1(T1) + d2(. - T1).
Driver concat_drivers(const Driver& d1, const Driver& d2);

// Restriction to [0, T'] with a linearly interpolated final knot.
Driver truncate_driver(const Driver& d, double t_new);

// Weak Holder-1/2 membership check on [0,1]:
//   sup over |t-s| <= 2/n of |W_t - W_s|  <=  phi(2/n).
// The discrete sup is exact for piecewise-linear drivers (it scans all knot
// pairs inside the window plus window endpoints anchored at knots).
TightnessReport modulus_membership_H(const Driver& d, int n, double c3);

// Linear resampling onto a uniform grid with n_steps steps (same function
// when the original knots are a subset of the new grid).
Driver resample_uniform(const Driver& d, std::size_t n_steps);

} // namespace loewner

#endif
