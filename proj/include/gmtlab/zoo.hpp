#pragma once

#include <cstddef>

#include "gmtlab/measure.hpp"

namespace gmtlab {

/// Generators refuse to build more points than this.
inline constexpr std::size_t kZooPointCap = 4'000'000;

/// Grid on the coordinate s-plane through the origin: round(L/h) points per
/// axis at -L/2 + (k + 1/2) h, each of weight h^s.
DiscreteMeasure plane_measure(int d, int s, double h, double L);

/// 2^d-corner self-similar set in [0,1]^d at depth n: cell centers, weights 2^{-dn}.
DiscreteMeasure cantor_measure(int d, double lambda, int levels);

/// d * log 2 / log(1/lambda).
double cantor_dimension(int d, double lambda);

/// Arcsine law on [-1,1] x {0} in R^2 at the quantiles -cos((k - 1/2) pi / N).
DiscreteMeasure arcsine_measure(std::size_t n);

/// Equal-area concentric rings covering the unit disc; weights are cell areas.
DiscreteMeasure disc_lebesgue(std::size_t n_target);

/// Points (k + 1/2)/N on [0,1] x {0}^{d-1}, weights 1/N.
DiscreteMeasure segment_measure(std::size_t n, int d = 1);

}  // namespace gmtlab
