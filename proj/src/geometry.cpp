#include "loewner/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loewner/chordal.hpp"
#include "loewner/errors.hpp"

namespace loewner {

namespace {

constexpr std::size_t kHausdorffCap = 10000;

double cross(Complex o, Complex a, Complex b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) -
           (a.imag() - o.imag()) * (b.real() - o.real());
}

bool on_segment(Complex p, Complex q, Complex r) {
    return std::min(p.real(), r.real()) <= q.real() &&
           q.real() <= std::max(p.real(), r.real()) &&
           std::min(p.imag(), r.imag()) <= q.imag() &&
           q.imag() <= std::max(p.imag(), r.imag());
}

// Standard orientation-based segment intersection test.
bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(q1, p1, q2)) return true;
    if (d2 == 0 && on_segment(q1, p2, q2)) return true;
    if (d3 == 0 && on_segment(p1, q1, p2)) return true;
    if (d4 == 0 && on_segment(p1, q2, p2)) return true;
    return false;
}

// Adjacent segments share vertex b; they violate simplicity only when one
// re-enters the other beyond the shared point.
bool adjacent_overlap(Complex a, Complex b, Complex c) {
    if (cross(a, b, c) != 0.0) return false;
    // collinear: bad iff c falls back onto [a, b] or past-b continues onto a
    const Complex u = b - a, v = c - b;
    const double dot = u.real() * v.real() + u.imag() * v.imag();
    return dot < 0.0 && std::abs(c - b) > 0.0;
}

double seg_min_distance_to_origin(Complex a, Complex b) {
    const Complex d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(a);
    double t = -(a.real() * d.real() + a.imag() * d.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(a + t * d);
}

std::vector<double> merged_times(const Trace& g1, const Trace& g2) {
    std::vector<double> ts;
    ts.reserve(g1.cap_times.size() + g2.cap_times.size());
    ts.insert(ts.end(), g1.cap_times.begin(), g1.cap_times.end());
    ts.insert(ts.end(), g2.cap_times.begin(), g2.cap_times.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

} // namespace

Complex phi_H(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        return Complex(-1.0, 0.0);
    if (z.imag() < -1e-12) throw LowerHalfPlane("phi_H requires Im z >= 0");
    const Complex two_i(0.0, 2.0);
    return (two_i - z) / (two_i + z);
}

double d_D_metric(Complex z, Complex w, Mode mode) {
    if (mode == Mode::radial) {
        if (std::abs(z) > 1.0 + 1e-9 || std::abs(w) > 1.0 + 1e-9)
            throw DomainViolation("points must lie in the closed unit disk");
        return std::abs(z - w);
    }
    return std::abs(phi_H(z) - phi_H(w));
}

PointCloud cloud_from_trace(const Trace& g) {
    PointCloud c;
    c.mode = g.mode;
    c.source = PointCloud::Source::trace;
    c.points = g.points;
    return c;
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
    if (a.points.empty() || b.points.empty())
        throw EmptySet("Hausdorff distance of an empty cloud");
    if (a.mode != b.mode) throw ModeMismatch("cloud modes differ");

    auto downsample = [](const PointCloud& c, double& radius) {
        if (c.points.size() <= kHausdorffCap) {
            radius = 0.0;
            return c.points;
        }
        const std::size_t stride =
            (c.points.size() + kHausdorffCap - 1) / kHausdorffCap;
        std::vector<Complex> kept;
        kept.reserve(c.points.size() / stride + 1);
        for (std::size_t i = 0; i < c.points.size(); i += stride)
            kept.push_back(c.points[i]);
        radius = 0.0;
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            if (i % stride == 0) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : kept)
                best = std::min(best, std::abs(c.points[i] - q));
            radius = std::max(radius, best);
        }
        return kept;
    };

    double ra = 0.0, rb = 0.0;
    const std::vector<Complex> pa = downsample(a, ra);
    const std::vector<Complex> pb = downsample(b, rb);

    auto directed = [&](const std::vector<Complex>& from,
                        const std::vector<Complex>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to)
                best = std::min(best, d_D_metric(p, q, a.mode));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(pa, pb), directed(pb, pa)) + ra + rb;
}

double sup_metric(const Trace& g1, const Trace& g2) {
    if (g1.mode != g2.mode) throw ModeMismatch("trace modes differ");
    double worst = 0.0;
    for (double t : merged_times(g1, g2))
        worst = std::max(worst, d_D_metric(g1.at(t), g2.at(t), g1.mode));
    return worst;
}

double unparam_metric(const Trace& g1, const Trace& g2) {
    if (g1.mode != g2.mode) throw ModeMismatch("trace modes differ");
    const std::vector<double> ts = merged_times(g1, g2);
    const std::size_t m = ts.size();
    std::vector<Complex> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = g1.at(ts[i]);
        b[i] = g2.at(ts[i]);
    }
    // Discrete Frechet DP (Eiter-Mannila) on the resampled vertex sequences.
    std::vector<double> prev(m), cur(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double d = d_D_metric(a[0], b[j], g1.mode);
        prev[j] = j == 0 ? d : std::max(prev[j - 1], d);
    }
    for (std::size_t i = 1; i < m; ++i) {
        cur[0] = std::max(prev[0], d_D_metric(a[i], b[0], g1.mode));
        for (std::size_t j = 1; j < m; ++j) {
            const double reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
            cur[j] = std::max(reach, d_D_metric(a[i], b[j], g1.mode));
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

bool polyline_self_intersects(const std::vector<Complex>& pts, Mode mode) {
    const std::size_t n = pts.size();
    if (n < 3) return false;
    const double btol = 1e-12;
    // interior vertex returning to the boundary
    for (std::size_t k = 1; k < n; ++k) {
        if (mode == Mode::chordal && pts[k].imag() <= btol) return true;
        if (mode == Mode::radial && k + 1 < n && std::abs(pts[k]) >= 1.0 - btol)
            return true;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double ix_lo = std::min(pts[i].real(), pts[i + 1].real());
        const double ix_hi = std::max(pts[i].real(), pts[i + 1].real());
        const double iy_lo = std::min(pts[i].imag(), pts[i + 1].imag());
        const double iy_hi = std::max(pts[i].imag(), pts[i + 1].imag());
        for (std::size_t j = i + 1; j + 1 < n; ++j) {
            if (j == i + 1) {
                if (adjacent_overlap(pts[i], pts[i + 1], pts[j + 1])) return true;
                continue;
            }
            // bounding-box prefilter
            if (std::max(pts[j].real(), pts[j + 1].real()) < ix_lo ||
                std::min(pts[j].real(), pts[j + 1].real()) > ix_hi ||
                std::max(pts[j].imag(), pts[j + 1].imag()) < iy_lo ||
                std::min(pts[j].imag(), pts[j + 1].imag()) > iy_hi)
                continue;
            if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]))
                return true;
        }
    }
    return false;
}

bool self_intersects(const Trace& g) {
    if (g.points.size() < 3) return false;
    return polyline_self_intersects(g.points, g.mode);
}

ReturnEventResult return_event_hit(const Trace& g,
                                   const ReturnEventSpec& spec) {
    if (spec.N <= spec.n) throw OutOfRange("return event requires N > n");
    if (g.mode != spec.mode) throw ModeMismatch("trace/spec mode mismatch");
    ReturnEventResult res;
    res.status = ReturnEventResult::Status::not_yet_entered;

    const std::size_t m = g.points.size();
    if (spec.mode == Mode::radial) {
        const double r_in = std::exp(-static_cast<double>(spec.N));
        const double r_out = std::exp(-static_cast<double>(spec.n));
        for (std::size_t k = 0; k + 1 < m; ++k) {
            if (!res.entry_time) {
                if (seg_min_distance_to_origin(g.points[k], g.points[k + 1]) <
                    r_in)
                    res.entry_time = g.cap_times[k + 1];
            } else if (std::max(std::abs(g.points[k]),
                                std::abs(g.points[k + 1])) > r_out) {
                res.status = ReturnEventResult::Status::hit;
                res.violation_time = g.cap_times[k + 1];
                return res;
            }
        }
    } else {
        const double r_out = static_cast<double>(spec.N);
        const double r_in = static_cast<double>(spec.n);
        for (std::size_t k = 0; k + 1 < m; ++k) {
            if (!res.entry_time) {
                if (std::max(std::abs(g.points[k]), std::abs(g.points[k + 1])) >
                    r_out)
                    res.entry_time = g.cap_times[k + 1];
            } else if (seg_min_distance_to_origin(g.points[k],
                                                  g.points[k + 1]) < r_in) {
                res.status = ReturnEventResult::Status::hit;
                res.violation_time = g.cap_times[k + 1];
                return res;
            }
        }
    }
    if (res.entry_time)
        res.status = ReturnEventResult::Status::no_return_by_horizon;
    return res;
}

ConcatReport concat_consistency(const Driver& d1, const Driver& d2,
                                double tol) {
    if (d1.mode != Mode::chordal || d2.mode != Mode::chordal)
        throw ModeMismatch("concat consistency check is chordal-only");
    ConcatReport rep;
    rep.tol = tol;

    const Driver dc = concat_drivers(d1, d2);
    const Trace full = chordal_forward(dc);
    const Trace head = chordal_forward(d1);
    const Trace tail = chordal_forward(d2);
    const double T1 = d1.horizon();

    // Identity route: gamma(T1 + s) vs fhat_{T1}(eta(s)) vertex by vertex.
    double worst = 0.0;
    for (std::size_t k = 0; k < head.points.size(); ++k)
        worst = std::max(worst, std::abs(full.points[k] - head.points[k]));
    for (std::size_t k = 1; k < tail.points.size(); ++k) {
        const Complex mapped = fhat_eval(d1, tail.points[k], T1);
        const Complex direct = full.points[head.points.size() - 1 + k];
        worst = std::max(worst, std::abs(mapped - direct));
    }
    rep.identity_discrepancy = worst;

    // Refinement route: concat trace at 2x resolution, compared at the
    // coarse capacity times.
    const Driver dc_fine = resample_uniform(dc, 2 * dc.steps());
    const Trace fine = chordal_forward(dc_fine);
    double worst_ref = 0.0;
    for (std::size_t k = 0; k < full.points.size(); ++k)
        worst_ref = std::max(
            worst_ref, std::abs(full.points[k] - fine.at(full.cap_times[k])));
    rep.refinement_discrepancy = worst_ref;

    rep.pass = rep.identity_discrepancy <= tol;
    return rep;
}

} // namespace loewner
