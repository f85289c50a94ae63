#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gmtlab/kernel.hpp"
#include "gmtlab/measure.hpp"

namespace gmtlab {

enum class TransformAccuracy { direct, tree };

/// T_{mu,delta}(f) at the support points, codim values per point.
///
/// For tree results, |fast_i - direct_i| <= error_bound * A_i where
/// A_i = sum_j |K_delta(x_i - x_j)| |f_j| w_j is the absolute transform.
struct TransformResult {
    int codim = 0;
    std::vector<double> values;
    double delta = 0.0;
    TransformAccuracy accuracy = TransformAccuracy::direct;
    double theta = 0.0;
    double error_bound = 0.0;
    std::size_t far_interactions = 0;
    std::size_t near_interactions = 0;
};

/// values[i] = sum_j K_delta(x_i - x_j) f_j w_j. delta = 0 means the plain
/// kernel off the diagonal; the diagonal never contributes.
TransformResult apply_T(const DiscreteMeasure& mu, const KernelSpec& K, double delta, std::span<const double> f);

/// A_i = sum_j |K_delta(x_i - x_j)| |f_j| w_j.
std::vector<double> apply_abs_T(const DiscreteMeasure& mu, const KernelSpec& K, double delta,
                                std::span<const double> f);

/// sum_j K(x - y_j) f_j w_j at arbitrary points (flat, dim values each).
/// Throws CoincidentPoints if an evaluation point hits an atom with f_j w_j != 0.
std::vector<double> transform_at(const DiscreteMeasure& mu, const KernelSpec& K, std::span<const double> f,
                                 std::span<const double> points);

struct TreeOptions {
    double theta = 0.3;
    /// A cell is used as a monopole only if its certified error is at most
    /// tolerance times a lower bound for its share of A_i.
    double tolerance = 5e-4;
    std::size_t leaf_size = 16;
};

/// Monopole tree code. Custom kernels (no derivative bounds) and degenerate
/// point sets fall back to direct summation.
TransformResult apply_T_fast(const DiscreteMeasure& mu, const KernelSpec& K, double delta,
                             std::span<const double> f, const TreeOptions& options = {});

struct NormEntry {
    double delta = 0.0;
    double norm = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

struct OperatorNormReport {
    std::vector<NormEntry> entries;
    double sup = 0.0;
    double sup_delta = 0.0;
};

struct PowerOptions {
    double rtol = 1e-8;
    int max_iterations = 50000;
    std::uint64_t seed = 20240601;
    /// Block size of the subspace iteration. A block wider than the top
    /// cluster of singular values keeps near-degenerate pairs from stalling.
    int block = 4;
    /// Kernel matrices with at most this many doubles are cached.
    std::size_t cache_limit = 8'000'000;
};

/// delta from min_spacing/2 doubling up to the first value >= diameter.
std::vector<double> default_delta_grid(const DiscreteMeasure& mu);

/// L^2(mu) -> L^2(mu) norm of T_{mu,delta} by block power iteration on T*T
/// with a Rayleigh-Ritz step. `residual` is that of the top Ritz pair.
/// Throws ConvergenceError if it stays above rtol.
NormEntry operator_norm_at(const DiscreteMeasure& mu, const KernelSpec& K, double delta,
                           const PowerOptions& options = {});

OperatorNormReport operator_norm(const DiscreteMeasure& mu, const KernelSpec& K, std::vector<double> delta_grid,
                                 const PowerOptions& options = {});

/// sum_{i != j} K(x_i - x_j) (f_j phi_i - phi_j f_i)/2 w_i w_j.
std::vector<double> bilinear_pairing(const DiscreteMeasure& mu, const KernelSpec& K, std::span<const double> f,
                                     std::span<const double> phi);

/// Pairings against a fixed phi through its field: pair(f, phi) = -<f, T(phi)>_mu,
/// with T(phi) the diagonal-excluded transform. One O(N^2) setup, O(N) per f.
class PairingField {
public:
    PairingField(const DiscreteMeasure& mu, const KernelSpec& K, std::span<const double> phi);
    std::vector<double> pair(std::span<const double> f) const;
    const std::vector<double>& field() const { return field_; }

private:
    const DiscreteMeasure* mu_;
    int codim_;
    std::vector<double> field_;
};

struct DefectReport {
    double defect = 0.0;
    std::size_t argmax = 0;
    std::vector<double> pairing;  ///< pairing vector of the maximiser
    std::vector<double> values;   ///< |pairing| per dictionary element
};

/// max over the dictionary of |pairing(f, 1_{B(0,R)})|; a lower bound for the
/// supremum defect. Every f must have mu-mean zero up to rounding.
DefectReport reflectionless_defect(const DiscreteMeasure& mu, const KernelSpec& K,
                                   const std::vector<std::vector<double>>& dictionary,
                                   double R = std::numeric_limits<double>::infinity());

/// Smooth mean-zero dictionary. For each center c (flat array, dim values each)
/// it emits g(x) = (1 - |x-c|^2/r^2)_+^3 and, when `modulated`, g(x)(x-c)_0/r.
/// Each g is made mu-mean-zero by subtracting a multiple of the anchor bump of
/// radius anchor_r at `anchor`; g is skipped when the anchor carries no mass.
std::vector<std::vector<double>> bump_dictionary(const DiscreteMeasure& mu, std::span<const double> centers, double r,
                                                 std::span<const double> anchor, double anchor_r,
                                                 bool modulated = true);

/// Centers rho e^{2 pi i k/n} in the first two coordinates, for each rho.
std::vector<double> ring_centers(int dim, std::size_t n, std::span<const double> radii);

/// Rounding-level test for a mu-mean-zero function: |sum f w| <= 1e-12 sum |f| w.
bool has_mean_zero(const DiscreteMeasure& mu, std::span<const double> f);

}  // namespace gmtlab
