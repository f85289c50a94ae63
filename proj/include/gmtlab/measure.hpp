#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "gmtlab/common.hpp"
#include "gmtlab/kdtree.hpp"

namespace gmtlab {

/// What to do when two input points share a location.
enum class Duplicates { reject, merge };

/// Finite weighted point cloud in R^d. Immutable after construction.
///
/// Points with zero weight are kept and count as support points.
class DiscreteMeasure {
public:
    DiscreteMeasure() : DiscreteMeasure(1, {}, {}) {}
    /// `coords` holds n*dim values, point-major.
    DiscreteMeasure(int dim, std::vector<double> coords, std::vector<double> weights,
                    Duplicates duplicates = Duplicates::reject);

    DiscreteMeasure(const DiscreteMeasure& other);
    DiscreteMeasure& operator=(const DiscreteMeasure& other);
    DiscreteMeasure(DiscreteMeasure&&) noexcept = default;
    DiscreteMeasure& operator=(DiscreteMeasure&&) noexcept = default;
    ~DiscreteMeasure();

    int dim() const { return dim_; }
    std::size_t size() const { return weights_.size(); }
    bool empty() const { return weights_.empty(); }
    const double* point(std::size_t i) const { return &coords_[i * static_cast<std::size_t>(dim_)]; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> coords() const { return coords_; }
    std::span<const double> weights() const { return weights_; }
    double total_mass() const { return total_mass_; }
    const KdTree& index() const { return *index_; }

    /// Smallest distance between two distinct points (infinity if size() < 2).
    double min_spacing() const;
    /// Largest distance between two points (0 if size() < 2).
    double diameter() const;

    /// Sub-measure on the given indices (kept in the given order).
    DiscreteMeasure restricted(std::span<const std::size_t> indices) const;
    /// The push-forward under x -> lambda*x with weights multiplied by mass_factor.
    DiscreteMeasure scaled(double lambda, double mass_factor) const;

    /// Fingerprint of dimension, coordinates and weights.
    std::uint64_t fingerprint() const;

private:
    void build_index();

    int dim_;
    std::vector<double> coords_;
    std::vector<double> weights_;
    double total_mass_ = 0.0;
    std::unique_ptr<KdTree> index_;

    struct GeometryCache {
        std::once_flag spacing_once, diameter_once;
        double min_spacing = 0.0, diameter = 0.0;
    };
    std::unique_ptr<GeometryCache> cache_;
};

/// mu(B(x, r)) for the open ball, summed in index order.
double ball_mass(const DiscreteMeasure& mu, const double* x, double r);

/// Same value by a linear scan; used to audit the spatial index.
double ball_mass_bruteforce(const DiscreteMeasure& mu, const double* x, double r);

/// Riesz-type energy sum_{i != j} w_i w_j |x_i - x_j|^{-(s-1)}.
/// Throws CoincidentPoints if two distinct indices share a location.
double energy(const DiscreteMeasure& mu, double s);

/// Per-coordinate energies E_k = sum_{i != j} w_i w_j (x_ik - x_jk)^2 / |x_i - x_j|^{s+1}.
/// Their sum equals energy(mu, s) up to rounding.
std::vector<double> coordinate_energies(const DiscreteMeasure& mu, double s);

}  // namespace gmtlab
