#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/multichordal.hpp"
#include "loewner/rng.hpp"

using namespace loewner;

namespace {

// all pair partitions of {1..2n}, built recursively
void enumerate_partitions(std::vector<int>& free_idx,
                          std::vector<std::pair<int, int>>& current,
                          std::vector<std::vector<std::pair<int, int>>>& out) {
    if (free_idx.empty()) {
        out.push_back(current);
        return;
    }
    const int first = free_idx.front();
    for (std::size_t j = 1; j < free_idx.size(); ++j) {
        std::vector<int> rest;
        for (std::size_t k = 1; k < free_idx.size(); ++k)
            if (k != j) rest.push_back(free_idx[k]);
        current.emplace_back(first, free_idx[j]);
        enumerate_partitions(rest, current, out);
        current.pop_back();
    }
}

// independent brute-force crossing enumerator (the oracle)
bool crosses_brute(const std::vector<std::pair<int, int>>& pairs) {
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            if (i == j) continue;
            const int a = pairs[i].first, b = pairs[i].second;
            // count endpoints of pair j strictly inside (a, b)
            int inside = 0;
            if (pairs[j].first > a && pairs[j].first < b) ++inside;
            if (pairs[j].second > a && pairs[j].second < b) ++inside;
            if (inside == 1) return true;
        }
    return false;
}

// semicircle chord between xa and xb, discretized
Trace semicircle_chord(double xa, double xb, std::size_t m) {
    Trace g;
    g.mode = Mode::chordal;
    const double c = 0.5 * (xa + xb), r = 0.5 * (xb - xa);
    for (std::size_t k = 0; k <= m; ++k) {
        const double phi = M_PI * (1.0 - static_cast<double>(k) / m);
        g.points.push_back(Complex(c + r * std::cos(phi), r * std::sin(phi)));
        g.cap_times.push_back(static_cast<double>(k) / m);
    }
    g.points.front() = Complex(xa, 0.0);
    g.points.back() = Complex(xb, 0.0);
    return g;
}

ChordEnsemble wiggle_ensemble(double amplitude, std::size_t m = 96) {
    ChordEnsemble e;
    e.pattern = validate_link_pattern({{1, 2}});
    e.marked_points = {-1.0, 1.0};
    Trace g = semicircle_chord(-1.0, 1.0, m);
    for (std::size_t k = 1; k + 1 < g.points.size(); ++k) {
        const double s = static_cast<double>(k) / m;
        g.points[k] += Complex(0.0, amplitude * std::sin(8.0 * M_PI * s) *
                                        std::sin(M_PI * s));
    }
    e.chords.push_back(g);
    return e;
}

} // namespace

TEST_CASE("link pattern validation") {
    CHECK_NOTHROW(validate_link_pattern({{1, 2}, {3, 4}}));
    CHECK_NOTHROW(validate_link_pattern({{1, 4}, {2, 3}})); // nested
    CHECK_THROWS_AS(validate_link_pattern({{1, 3}, {2, 4}}), CrossingPairs);
    CHECK_THROWS_AS(validate_link_pattern({{1, 2}, {2, 3}}), NotAPartition);
    CHECK_THROWS_AS(validate_link_pattern({{1, 2}, {3, 5}}), NotAPartition);
}

TEST_CASE("planar pattern counts match the Catalan numbers") {
    const std::vector<std::size_t> catalan{1, 2, 5, 14, 42};
    for (int n = 1; n <= 5; ++n) {
        std::vector<int> idx;
        for (int i = 1; i <= 2 * n; ++i) idx.push_back(i);
        std::vector<std::vector<std::pair<int, int>>> all;
        std::vector<std::pair<int, int>> cur;
        enumerate_partitions(idx, cur, all);
        std::size_t valid = 0;
        for (const auto& pairs : all) {
            bool ok_impl = true;
            try {
                validate_link_pattern(pairs);
            } catch (const CrossingPairs&) {
                ok_impl = false;
            }
            // implementation agrees with the brute-force oracle
            CHECK(ok_impl == !crosses_brute(pairs));
            if (ok_impl) ++valid;
        }
        CHECK(valid == catalan[n - 1]);
    }
}

TEST_CASE("poisson excursion kernel conventions") {
    CHECK(poisson_excursion_kernel(0.0, 1.0) == doctest::Approx(1.0));
    CHECK(poisson_excursion_kernel(0.3, -1.2) ==
          poisson_excursion_kernel(-1.2, 0.3));
    // scaling P(rx, ry) = r^-2 P(x, y)
    CHECK(poisson_excursion_kernel(2.0 * 0.3, 2.0 * 1.1) ==
          doctest::Approx(poisson_excursion_kernel(0.3, 1.1) / 4.0));
    CHECK_THROWS_AS(poisson_excursion_kernel(0.5, 0.5), CoincidentPoints);
}

TEST_CASE("geodesic chord has vanishing energy term under refinement") {
    // the semicircle maps back to a vertical ray: unzip driver ~ 0
    double prev = 1e9;
    for (std::size_t m : {48, 96, 192}) {
        ChordEnsemble e;
        e.pattern = validate_link_pattern({{1, 2}});
        e.marked_points = {-1.0, 1.0};
        e.chords.push_back(semicircle_chord(-1.0, 1.0, m));
        const PartialPotential pot = partial_potential(e, 4096);
        CHECK(pot.loop_term_omitted);
        REQUIRE(pot.chord_energies.size() == 1);
        CHECK(pot.chord_energies[0] < prev + 1e-12);
        prev = pot.chord_energies[0];
    }
    CHECK(prev < 0.05);
}

TEST_CASE("wiggly chord has strictly larger potential than its geodesic") {
    const PartialPotential smooth = partial_potential(wiggle_ensemble(0.0));
    const PartialPotential wavy = partial_potential(wiggle_ensemble(0.06));
    CHECK(wavy.chord_energies[0] > smooth.chord_energies[0]);
    CHECK(wavy.log_kernels[0] == smooth.log_kernels[0]); // same endpoints
    CHECK(wavy.value > smooth.value);
}

TEST_CASE("partial potential is Moebius-scaling covariant") {
    // scaling all marked points and chords by r shifts each kernel term by
    // log r^-2 and leaves the energy terms invariant
    const double r = 3.0;
    const ChordEnsemble base = wiggle_ensemble(0.04);
    ChordEnsemble scaled = base;
    for (auto& x : scaled.marked_points) x *= r;
    for (auto& chord : scaled.chords)
        for (auto& z : chord.points) z *= r;
    const PartialPotential p0 = partial_potential(base);
    const PartialPotential p1 = partial_potential(scaled);
    CHECK(p1.chord_energies[0] ==
          doctest::Approx(p0.chord_energies[0]).epsilon(1e-9));
    CHECK(p1.log_kernels[0] ==
          doctest::Approx(p0.log_kernels[0] - 2.0 * std::log(r)));
    CHECK(p1.value == doctest::Approx(p0.value + 0.5 * std::log(r)));
}

TEST_CASE("independent chord sampling") {
    const LinkPattern pat = validate_link_pattern({{1, 2}, {3, 4}});
    const std::vector<double> pts{-2.0, -1.0, 1.0, 2.0};
    const ChordEnsemble a = sample_independent_chords(pat, pts, 1.0, 64, 5);
    const ChordEnsemble b = sample_independent_chords(pat, pts, 1.0, 64, 5);
    REQUIRE(a.chords.size() == 2);
    // determinism under a fixed seed
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < a.chords[j].points.size(); ++k)
            CHECK(a.chords[j].points[k] == b.chords[j].points[k]);
    // chords start at their lower marked points
    CHECK(std::abs(a.chords[0].points.front() - Complex(-2.0, 0.0)) < 1e-9);
    CHECK(std::abs(a.chords[1].points.front() - Complex(1.0, 0.0)) < 1e-9);

    CHECK_THROWS_AS(sample_independent_chords(pat, {-2.0, -1.0, 1.0}, 1.0, 8, 1),
                    LengthMismatch);
}

TEST_CASE("n=1 sampling reduces to a single chordal trace") {
    const LinkPattern pat = validate_link_pattern({{1, 2}});
    const ChordEnsemble e =
        sample_independent_chords(pat, {0.0, 5.0}, 2.0, 32, 9);
    REQUIRE(e.chords.size() == 1);
    CHECK(e.pairwise_disjoint); // nothing to cross
    CHECK(e.crossing_pairs.empty());
}

TEST_CASE("disjointness frequency is monotone in kappa (MC trend)") {
    const LinkPattern pat = validate_link_pattern({{1, 2}, {3, 4}});
    const std::vector<double> pts{-2.0, -1.0, 1.0, 2.0};
    const std::size_t reps = 60;
    auto disjoint_freq = [&](double kappa) {
        std::size_t ok = 0;
        for (std::size_t s = 0; s < reps; ++s) {
            const ChordEnsemble e = sample_independent_chords(
                pat, pts, kappa, 96, hash_combine(400, s));
            if (e.pairwise_disjoint) ++ok;
        }
        return static_cast<double>(ok) / reps;
    };
    CHECK(disjoint_freq(0.5) >= disjoint_freq(4.0));
}
