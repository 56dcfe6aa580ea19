#include "loewner/trace.hpp"

#include <algorithm>
#include <cmath>

#include "loewner/errors.hpp"

namespace loewner {

Complex Trace::at(double t) const {
    if (t <= cap_times.front()) return points.front();
    if (t >= cap_times.back()) return points.back();
    auto it = std::upper_bound(cap_times.begin(), cap_times.end(), t);
    std::size_t k = static_cast<std::size_t>(it - cap_times.begin());
    const double t0 = cap_times[k - 1], t1 = cap_times[k];
    const double s = (t - t0) / (t1 - t0);
    return points[k - 1] + s * (points[k] - points[k - 1]);
}

void validate_trace(const Trace& g) {
    if (g.points.empty() || g.points.size() != g.cap_times.size())
        throw LengthMismatch("trace points/cap_times size mismatch");
    if (g.cap_times.front() != 0.0)
        throw NonMonotoneTimes("trace must start at capacity time 0");
    for (std::size_t k = 1; k < g.cap_times.size(); ++k)
        if (!(g.cap_times[k] > g.cap_times[k - 1]))
            throw NonMonotoneTimes("trace capacity times must increase");
    const double tol = 1e-9;
    if (g.mode == Mode::chordal) {
        if (std::abs(g.points.front()) > tol)
            throw BadPoint("chordal trace must start at 0");
        for (const auto& p : g.points)
            if (p.imag() < -tol)
                throw BadPoint("chordal trace leaves the upper half-plane");
    } else {
        if (std::abs(g.points.front() - Complex(1.0, 0.0)) > tol)
            throw BadPoint("radial trace must start at 1");
        for (const auto& p : g.points)
            if (std::abs(p) > 1.0 + tol)
                throw BadPoint("radial trace leaves the closed unit disk");
    }
}

} // namespace loewner
