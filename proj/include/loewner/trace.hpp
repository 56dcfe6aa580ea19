#ifndef LOEWNER_TRACE_HPP
#define LOEWNER_TRACE_HPP

#include <complex>
#include <vector>

#include "loewner/driver.hpp"

namespace loewner {

using Complex = std::complex<double>;

// Discretized curve with capacity timestamps. Chordal traces live in the
// closed upper half-plane and start at 0 (hcap(gamma[0,t]) = 2t); radial
// traces live in the closed unit disk and start at 1 (cap(gamma[0,t]) = t).
struct Trace {
    std::vector<Complex> points;
    std::vector<double> cap_times;
    Mode mode = Mode::chordal;

    double horizon() const { return cap_times.back(); }
    std::size_t segments() const { return points.size() - 1; }

    // Linear interpolation in capacity time, clamped to [0, T].
    Complex at(double t) const;
};

// Validates the start-point/containment invariants; throws on violation.
void validate_trace(const Trace& g);

} // namespace loewner

#endif
