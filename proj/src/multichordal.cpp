#include "loewner/multichordal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loewner/chordal.hpp"
#include "loewner/errors.hpp"
#include "loewner/rng.hpp"

namespace loewner {

LinkPattern validate_link_pattern(std::vector<std::pair<int, int>> pairs) {
    if (pairs.empty()) throw NotAPartition("pattern needs at least one pair");
    const int n = static_cast<int>(pairs.size());
    std::vector<int> seen(2 * n + 1, 0);
    for (auto& pr : pairs) {
        if (pr.first > pr.second) std::swap(pr.first, pr.second);
        for (int idx : {pr.first, pr.second}) {
            if (idx < 1 || idx > 2 * n)
                throw NotAPartition("index " + std::to_string(idx) +
                                    " outside {1,...," + std::to_string(2 * n) +
                                    "}");
            if (seen[idx]++)
                throw NotAPartition("index " + std::to_string(idx) +
                                    " appears twice");
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const auto [a, b] = pairs[i];
            const auto [c, d] = pairs[j];
            const bool crossing = (a < c && c < b && b < d) ||
                                  (c < a && a < d && d < b);
            if (crossing)
                throw CrossingPairs("pairs {" + std::to_string(a) + "," +
                                    std::to_string(b) + "} and {" +
                                    std::to_string(c) + "," +
                                    std::to_string(d) + "} cross");
        }
    std::sort(pairs.begin(), pairs.end());
    LinkPattern p;
    p.n = n;
    p.pairs = std::move(pairs);
    return p;
}

double poisson_excursion_kernel(double x, double y) {
    if (x == y) throw CoincidentPoints("kernel requires x != y");
    const double d = y - x;
    return 1.0 / (d * d);
}

Complex mobius_to_pair(Complex z, double xa, double xb) {
    // m(z) = (xb z + xa) / (z + 1); m(0) = xa, m(inf) = xb, det = xb - xa > 0
    return (xb * z + xa) / (z + 1.0);
}

Complex mobius_from_pair(Complex w, double xa, double xb) {
    return (xa - w) / (w - xb);
}

bool polylines_intersect(const std::vector<Complex>& a,
                         const std::vector<Complex>& b) {
    auto cross = [](Complex o, Complex p, Complex q) {
        return (p.real() - o.real()) * (q.imag() - o.imag()) -
               (p.imag() - o.imag()) * (q.real() - o.real());
    };
    auto on_seg = [](Complex p, Complex q, Complex r) {
        return std::min(p.real(), r.real()) <= q.real() &&
               q.real() <= std::max(p.real(), r.real()) &&
               std::min(p.imag(), r.imag()) <= q.imag() &&
               q.imag() <= std::max(p.imag(), r.imag());
    };
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            const Complex p1 = a[i], p2 = a[i + 1], q1 = b[j], q2 = b[j + 1];
            const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
            const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
            if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
                ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
                return true;
            if ((d1 == 0 && on_seg(q1, p1, q2)) ||
                (d2 == 0 && on_seg(q1, p2, q2)) ||
                (d3 == 0 && on_seg(p1, q1, p2)) ||
                (d4 == 0 && on_seg(p1, q2, p2)))
                return true;
        }
    return false;
}

PartialPotential partial_potential(const ChordEnsemble& e,
                                   std::size_t resolution) {
    PartialPotential out;
    out.loop_term_omitted = true;
    for (std::size_t j = 0; j < e.chords.size(); ++j) {
        const auto [ai, bi] = e.pattern.pairs[j];
        const double xa = e.marked_points[ai - 1];
        const double xb = e.marked_points[bi - 1];

        // back to (H; 0, inf), dropping the far tail where the target-point
        // pole makes vertices numerically unusable
        std::vector<Complex> std_poly;
        std_poly.reserve(e.chords[j].points.size());
        for (const auto& w : e.chords[j].points) {
            const Complex z = mobius_from_pair(w, xa, xb);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
            if (std::abs(z) > 1e8) break;
            std_poly.push_back(z);
        }
        if (!std_poly.empty()) std_poly.front() = Complex(0.0, 0.0);
        if (std_poly.size() > resolution + 1) {
            std::vector<Complex> thin;
            const std::size_t m = std_poly.size();
            thin.reserve(resolution + 1);
            for (std::size_t k = 0; k <= resolution; ++k)
                thin.push_back(std_poly[k * (m - 1) / resolution]);
            std_poly = std::move(thin);
        }

        const Driver drv = unzip_curve(std_poly);
        out.chord_energies.push_back(dirichlet_energy(drv).value);
        out.log_kernels.push_back(std::log(poisson_excursion_kernel(xa, xb)));
    }
    double v = 0.0;
    for (std::size_t j = 0; j < out.chord_energies.size(); ++j)
        v += out.chord_energies[j] / 12.0 - out.log_kernels[j] / 4.0;
    out.value = v;

    // disjointness diagnosis: reported, not fatal
    for (std::size_t i = 0; i < e.chords.size(); ++i)
        for (std::size_t j = i + 1; j < e.chords.size(); ++j)
            if (polylines_intersect(e.chords[i].points, e.chords[j].points))
                out.crossing_pairs.emplace_back(static_cast<int>(i),
                                                static_cast<int>(j));
    return out;
}

ChordEnsemble sample_independent_chords(const LinkPattern& pattern,
                                        const std::vector<double>& marked_points,
                                        double kappa, std::size_t n_steps,
                                        std::uint64_t seed, double horizon_T) {
    if (static_cast<int>(marked_points.size()) != 2 * pattern.n)
        throw LengthMismatch("need exactly 2n marked points");
    for (std::size_t i = 1; i < marked_points.size(); ++i)
        if (!(marked_points[i] > marked_points[i - 1]))
            throw OutOfRange("marked points must be strictly increasing");

    ChordEnsemble e;
    e.pattern = pattern;
    e.marked_points = marked_points;
    for (int j = 0; j < pattern.n; ++j) {
        const double xa = marked_points[pattern.pairs[j].first - 1];
        const double xb = marked_points[pattern.pairs[j].second - 1];
        const std::uint64_t sub = hash_combine(seed, static_cast<std::uint64_t>(j));
        const Driver d = sample_brownian_driver(kappa, horizon_T, n_steps, sub);
        const Trace std_trace = chordal_forward(d);
        Trace chord;
        chord.mode = Mode::chordal;
        chord.cap_times = std_trace.cap_times;
        chord.points.reserve(std_trace.points.size());
        for (const auto& z : std_trace.points)
            chord.points.push_back(mobius_to_pair(z, xa, xb));
        e.chords.push_back(std::move(chord));
    }
    for (std::size_t i = 0; i < e.chords.size(); ++i)
        for (std::size_t j = i + 1; j < e.chords.size(); ++j)
            if (polylines_intersect(e.chords[i].points, e.chords[j].points)) {
                e.pairwise_disjoint = false;
                e.crossing_pairs.emplace_back(static_cast<int>(i),
                                              static_cast<int>(j));
            }
    return e;
}

} // namespace loewner
