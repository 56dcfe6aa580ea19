#ifndef LOEWNER_MULTICHORDAL_HPP
#define LOEWNER_MULTICHORDAL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "loewner/trace.hpp"

namespace loewner {

// Planar pair partition of {1, ..., 2n}.
struct LinkPattern {
    int n = 0;
    std::vector<std::pair<int, int>> pairs; // each normalized a < b
};

// n chords in H attached to 2n increasing real marked points following a
// link pattern. Chord j runs from x_{a_j} to x_{b_j}; disjointness is
// recorded, never assumed.
struct ChordEnsemble {
    LinkPattern pattern;
    std::vector<double> marked_points;
    std::vector<Trace> chords;
    bool pairwise_disjoint = true;
    std::vector<std::pair<int, int>> crossing_pairs;
};

// Computable part of the multichordal Loewner potential: the Brownian-loop
// interaction term has no closed form and is omitted outright; the flag
// makes the omission machine-visible.
struct PartialPotential {
    double value = 0.0;
    std::vector<double> chord_energies; // Dirichlet energies of the unzips
    std::vector<double> log_kernels;    // log P(x_a, x_b) per chord
    bool loop_term_omitted = true;
    std::vector<std::pair<int, int>> crossing_pairs;
};

LinkPattern validate_link_pattern(std::vector<std::pair<int, int>> pairs);

// Half-plane convention P(x, y) = (y - x)^{-2}; the absorbed normalization
// constant cancels in every downstream difference of log P.
double poisson_excursion_kernel(double x, double y);

// Moebius transport (H; 0, infinity) -> (H; xa, xb), xa < xb.
Complex mobius_to_pair(Complex z, double xa, double xb);
Complex mobius_from_pair(Complex w, double xa, double xb);

// sum_j [ (1/12) I(gamma_j) - (1/4) log P(x_{a_j}, x_{b_j}) ], where I is the
// Dirichlet energy of the unzipped chord mapped back to (H; 0, infinity).
// `resolution` caps the number of polyline vertices per chord before
// unzipping.
PartialPotential partial_potential(const ChordEnsemble& e,
                                   std::size_t resolution = 512);

// Independent chordal samples transported between their endpoint pairs;
// a posteriori disjointness check. horizon_T is the capacity horizon of each
// standard-coordinates solve before transport.
ChordEnsemble sample_independent_chords(const LinkPattern& pattern,
                                        const std::vector<double>& marked_points,
                                        double kappa, std::size_t n_steps,
                                        std::uint64_t seed,
                                        double horizon_T = 4.0);

// Segment-sweep intersection test between two polylines.
bool polylines_intersect(const std::vector<Complex>& a,
                         const std::vector<Complex>& b);

} // namespace loewner

#endif
