#pragma once

#include <optional>
#include <vector>

#include "gmtlab/measure.hpp"

namespace gmtlab {

struct GrowthWitness {
    std::vector<double> center;
    double radius = 0.0;
    double ratio = 0.0;
};

/// Extreme value of a ball-mass ratio over a finite set of balls.
struct GrowthReport {
    double constant = 0.0;
    std::optional<GrowthWitness> witness;
    double r_min = 0.0;
    double r_max = 0.0;
    std::size_t balls_tested = 0;
};

/// Geometric radius grid r_min * 2^{j/4}, j = 0, 1, ..., up to r_max.
std::vector<double> radius_grid(double r_min, double r_max);

/// Support points plus the midpoint of each point and its nearest neighbour.
std::vector<double> default_centers(const DiscreteMeasure& mu);

/// Default window: [2 * min spacing, diameter].
std::pair<double, double> default_window(const DiscreteMeasure& mu);

/// max over the centers and the radius grid of mu(B(x,r)) / r^s. A lower bound
/// for the true niceness constant. `centers` is flat (k*dim values); pass an
/// empty vector for default_centers.
GrowthReport niceness_constant(const DiscreteMeasure& mu, double s, std::vector<double> centers,
                               double r_min, double r_max);

struct AdRegularityReport {
    bool vacuous = false;
    bool pass = false;
    GrowthReport lower;  ///< min ratio over support centers
    GrowthReport upper;  ///< niceness over the same window
};

/// Lower-density check over support centers; passes iff min ratio >= 1/Lambda
/// and the niceness constant over the same window is <= Lambda.
AdRegularityReport ad_regularity_check(const DiscreteMeasure& mu, double s, double lambda,
                                       double r_min, double r_max);

struct ReasonableReport {
    bool pass = false;
    GrowthReport report;  ///< constant = max of mu(B)/(r^s (R max(1,1/r))^beta)
};

/// Checks mu(B(x,r)) <= Lambda r^s (R max(1, 1/r))^beta over the tested balls
/// with B(x,r) inside B(0,R). The exponent beta is a caller input.
ReasonableReport reasonable_growth_check(const DiscreteMeasure& mu, double s, double lambda,
                                         double beta, double R, std::vector<double> centers,
                                         double r_min, double r_max);

}  // namespace gmtlab
