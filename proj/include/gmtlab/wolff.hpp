#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "gmtlab/kernel.hpp"
#include "gmtlab/lattice.hpp"
#include "gmtlab/measure.hpp"

namespace gmtlab {

inline constexpr std::size_t kNoExclusion = static_cast<std::size_t>(-1);

struct WolffParams {
    double p = 2.0;
    double s = 1.0;
    double r_max = std::numeric_limits<double>::infinity();
};

/// W_p(mu)(x) = int_0^{r_max} (mu(B(x,r)) / r^s)^p dr/r, evaluated piecewise in
/// closed form between the jump radii. `exclude` drops one support index (the
/// atom at x itself). +infinity when an atom of positive mass sits at x.
double wolff_potential(const DiscreteMeasure& mu, const WolffParams& params, const double* x,
                       std::size_t exclude = kNoExclusion);

/// W_p at every support point; each point's own atom is excluded when `self_exclusion`.
std::vector<double> wolff_at_support(const DiscreteMeasure& mu, const WolffParams& params, bool self_exclusion = true);

/// sum_i w_i W_p(mu)(x_i).
double wolff_integral(const DiscreteMeasure& mu, const WolffParams& params, bool self_exclusion = true);

/// sum over populated cubes of density(3Q)^p * mu(3Q).
double dyadic_wolff_sum(const DensityTable& table, double p);
double dyadic_wolff_sum(const DiscreteMeasure& mu, const DyadicLattice& lattice, double p, double s);

/// Support indices whose level-k cube is q.
std::vector<std::size_t> points_in_cube(const DiscreteMeasure& mu, const DyadicLattice& lattice, const CubeAddress& q);

struct MpvEntry {
    CubeAddress cube;
    double mass = 0.0;      ///< mu(Q)
    double integral = 0.0;  ///< int_Q W_2(chi_Q mu) dmu with r_max = diam Q
    double ratio = 0.0;
};

struct MpvReport {
    bool vacuous = true;
    bool self_exclusion = true;
    double sup = 0.0;
    std::optional<CubeAddress> witness;
    std::vector<MpvEntry> entries;  ///< nonempty test cubes only
};

/// Ratio int_Q W_2(chi_Q mu) dmu / mu(Q) per test cube (s is the Wolff exponent).
MpvReport mpv_condition_test(const DiscreteMeasure& mu, const DyadicLattice& lattice,
                             const std::vector<CubeAddress>& cubes, double s, bool self_exclusion = true);

/// Geometric grid from min_spacing/2 doubling to the first value >= diameter.
std::vector<double> default_epsilon_grid(const DiscreteMeasure& nu);

struct TruncatedBoundEntry {
    double epsilon = 0.0;
    double lhs = 0.0;
    double ratio = 0.0;
};

struct TruncatedBoundReport {
    std::vector<TruncatedBoundEntry> entries;
    double rhs = 0.0;        ///< int W_2(nu) dnu, self-excluded
    double max_lhs = 0.0;
    double max_ratio = 0.0;  ///< 0 when lhs and rhs both vanish
    bool violation = false;  ///< rhs = 0 while some lhs > 0
};

/// LHS(eps) = sum_i w_i |sum_{j: |x_i - x_j| > eps} K(x_i - x_j) w_j|^2 against
/// RHS = sum_i w_i W_2(nu)(x_i) with s = K.s().
TruncatedBoundReport truncated_bound_check(const DiscreteMeasure& nu, const KernelSpec& K,
                                           std::vector<double> epsilon_grid = {});

struct TripleSumReport {
    double pairing = 0.0;      ///< |sum over U1 of K(x-y).K(x-z) w w w|
    double restricted = 0.0;   ///< sum over U1 of |x-y|^{-2s} w w w
    double enlarged = 0.0;     ///< same over all triples with |x-y| >= |x-z|
    double wolff = 0.0;        ///< sum_i w_i W_2(nu)(x_i), self-excluded
    double constant = 0.0;     ///< 2^s, the pointwise constant on U1
    std::size_t triples = 0;   ///< |U1|
    std::size_t violations = 0;  ///< triples with |K(x-y).K(x-z)| > constant |x-y|^{-2s}
};

/// Direct enumeration of the U1 step for a given eps: triples of distinct
/// indices x != y, x != z with |x-y| >= |x-z| > eps and |y-z| < |x-z|.
/// Only for small measures (N <= 64).
TripleSumReport u1_triple_sums(const DiscreteMeasure& nu, const KernelSpec& K, double epsilon);

}  // namespace gmtlab
