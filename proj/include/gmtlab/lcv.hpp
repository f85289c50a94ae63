#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmtlab/lattice.hpp"

namespace gmtlab {

/// Two support points of the closed triple whose midpoint is at distance
/// >= delta l(Q) from the support.
struct LcvWitness {
    std::size_t i = 0, j = 0;
    std::vector<double> midpoint;
    double clearance = 0.0;  ///< distance from the midpoint to the nearest support point
};

enum class LcvVerdict {
    vacuous,          ///< fewer than two support points in the closed triple
    flagged,          ///< delta-non-LCV, witness attached
    clear,            ///< every pair scanned, no witness
    no_witness_found  ///< sampled scan found nothing; not a proof of LCV
};

std::string to_string(LcvVerdict v);

struct LcvCube {
    CubeAddress cube;
    LcvVerdict verdict = LcvVerdict::vacuous;
    std::size_t points = 0;  ///< support points in the closed triple
    std::optional<LcvWitness> witness;
};

struct LcvReport {
    double delta = 0.0;
    std::vector<LcvCube> cubes;        ///< every populated cube of the window
    std::vector<CubeAddress> flagged;  ///< sorted
    std::size_t sampled = 0;           ///< cubes scanned in sampled mode
};

/// Support points in the closed triple [corner - l, corner + 2l]^d.
std::vector<std::size_t> closed_triple_points(const DiscreteMeasure& mu, const DyadicLattice& lattice,
                                              const CubeAddress& q);

/// Scans the populated cubes of the window. All pairs when count^2 <= pair_budget,
/// otherwise all pairs among a farthest-point sample of about sqrt(2 pair_budget)
/// points. The first witness in scan order is reported.
LcvReport non_lcv_cubes(const DiscreteMeasure& mu, const DyadicLattice& lattice, double delta,
                        std::size_t pair_budget = 40'000);

/// Whether the witness still certifies the flag: both points in the closed
/// triple and no support point within delta l(Q) of the midpoint.
bool witness_valid(const DiscreteMeasure& mu, const DyadicLattice& lattice, const CubeAddress& q,
                   const LcvWitness& w, double delta);

/// Deterministic farthest-point sample of k indices from `pool`, starting at
/// the coordinate-smallest point.
std::vector<std::size_t> farthest_point_sample(const DiscreteMeasure& mu, const std::vector<std::size_t>& pool,
                                               std::size_t k);

/// Whether Q is contained in P (same lattice, level(Q) <= level(P)).
bool cube_contains(const CubeAddress& p, const CubeAddress& q);

/// sum of l(Q)^s over family members contained in P, divided by l(P)^s.
double carleson_packing(const std::vector<CubeAddress>& family, const CubeAddress& p, double s);

struct PackingReport {
    double constant = 0.0;
    std::optional<CubeAddress> argmax;
    std::vector<double> ratios;  ///< aligned with the tops
};

/// Sup of carleson_packing over the given tops.
PackingReport carleson_constant(const std::vector<CubeAddress>& family, const std::vector<CubeAddress>& tops,
                                double s);

/// level, c0.., verdict, points, i, j, midpoint coordinates, clearance.
std::string lcv_csv(const LcvReport& report, int dim);

}  // namespace gmtlab
