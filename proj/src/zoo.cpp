#include "gmtlab/zoo.hpp"

#include <cmath>
#include <numbers>

namespace gmtlab {

namespace {

void check_cap(double count) {
    if (count > static_cast<double>(kZooPointCap))
        throw ResourceLimit("generator would exceed the point cap of " + std::to_string(kZooPointCap));
}

}  // namespace

DiscreteMeasure plane_measure(int d, int s, double h, double L) {
    if (d < 1 || s < 1 || s > d) throw InvalidArgument("plane measure needs 1 <= s <= d");
    if (!(h > 0.0) || !(h <= L)) throw InvalidArgument("plane measure needs 0 < h <= L");
    const auto per_axis = static_cast<std::size_t>(std::llround(L / h));
    check_cap(std::pow(static_cast<double>(per_axis), s));
    std::size_t count = 1;
    for (int k = 0; k < s; ++k) count *= per_axis;
    std::vector<double> coords(count * d, 0.0);
    const double w = std::pow(h, s);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t rest = i;
        for (int k = s - 1; k >= 0; --k) {
            coords[i * d + k] = 0.5 * h * (2.0 * static_cast<double>(rest % per_axis) + 1.0 - static_cast<double>(per_axis));
            rest /= per_axis;
        }
    }
    return DiscreteMeasure(d, std::move(coords), std::vector<double>(count, w));
}

DiscreteMeasure cantor_measure(int d, double lambda, int levels) {
    if (d < 1) throw InvalidArgument("cantor measure needs d >= 1");
    if (!(lambda > 0.0 && lambda < 0.5)) throw InvalidArgument("cantor contraction must lie in (0, 1/2)");
    if (levels < 1) throw InvalidArgument("cantor measure needs at least one level");
    check_cap(std::pow(2.0, d * levels));
    const std::size_t corners = std::size_t{1} << d;
    // Lower corners of the current cells; the side shrinks by lambda per level.
    std::vector<double> lo(d, 0.0);
    double side = 1.0;
    for (int level = 0; level < levels; ++level) {
        const std::size_t cells = lo.size() / d;
        std::vector<double> next(cells * corners * d);
        for (std::size_t c = 0; c < cells; ++c)
            for (std::size_t corner = 0; corner < corners; ++corner)
                for (int k = 0; k < d; ++k)
                    next[(c * corners + corner) * d + k] =
                        lo[c * d + k] + ((corner >> k) & 1u ? (1.0 - lambda) * side : 0.0);
        lo = std::move(next);
        side *= lambda;
    }
    for (double& x : lo) x += 0.5 * side;
    const std::size_t n = lo.size() / d;
    return DiscreteMeasure(d, std::move(lo), std::vector<double>(n, std::ldexp(1.0, -d * levels)));
}

double cantor_dimension(int d, double lambda) { return d * std::log(2.0) / std::log(1.0 / lambda); }

DiscreteMeasure arcsine_measure(std::size_t n) {
    if (n < 2) throw InvalidArgument("arcsine measure needs N >= 2");
    check_cap(static_cast<double>(n));
    std::vector<double> coords(2 * n, 0.0);
    for (std::size_t k = 1; k <= n; ++k)
        coords[2 * (k - 1)] = -std::cos((static_cast<double>(k) - 0.5) * std::numbers::pi / static_cast<double>(n));
    return DiscreteMeasure(2, std::move(coords), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure disc_lebesgue(std::size_t n_target) {
    if (n_target < 1) throw InvalidArgument("disc quadrature needs N >= 1");
    check_cap(2.0 * static_cast<double>(n_target));
    const double pi = std::numbers::pi;
    // Ring k spans radii sqrt((k-1)/n) .. sqrt(k/n), so every ring has area pi/n.
    const long rings = std::max(1L, std::lround(std::sqrt(static_cast<double>(n_target) / (2.0 * pi))));
    std::vector<double> coords, weights;
    for (long k = 1; k <= rings; ++k) {
        const long m = std::max(1L, std::lround(static_cast<double>(n_target) * (2.0 * k - 1.0) /
                                               static_cast<double>(rings * rings)));
        // A single-point ring can only keep the rotational symmetry at the centre.
        const double r = m == 1 ? 0.0 : std::sqrt((k - 0.5) / static_cast<double>(rings));
        const double shift = 0.5 * static_cast<double>(k % 2);
        for (long j = 0; j < m; ++j) {
            const double th = 2.0 * pi * (static_cast<double>(j) + shift) / static_cast<double>(m);
            coords.push_back(r * std::cos(th));
            coords.push_back(r * std::sin(th));
            weights.push_back(pi / static_cast<double>(rings * m));
        }
    }
    return DiscreteMeasure(2, std::move(coords), std::move(weights));
}

DiscreteMeasure segment_measure(std::size_t n, int d) {
    if (n < 2) throw InvalidArgument("segment measure needs N >= 2");
    if (d < 1) throw InvalidArgument("segment measure needs d >= 1");
    check_cap(static_cast<double>(n));
    std::vector<double> coords(n * d, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        coords[k * d] = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    return DiscreteMeasure(d, std::move(coords), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

}  // namespace gmtlab
