#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmtlab/kernel.hpp"
#include "gmtlab/lattice.hpp"
#include "gmtlab/transform.hpp"

namespace gmtlab {

enum class Profile { radial_hat, tensor_hat, coordinate_modulated };

std::string to_string(Profile p);
Profile profile_from_string(const std::string& name);

/// psi = c1 b1 - c2 b2 with two disjoint bumps of the same profile and radius,
/// both inside the ball B(center, radius).
///
/// Bumps at y with radius r:
///   radial_hat            max(0, 1 - |x-y|/r)                      Lip 1/r
///   tensor_hat            prod_k max(0, 1 - |x_k-y_k|/r)           Lip sqrt(d)/r
///   coordinate_modulated  max(0, 1 - |x-y|/r) (x_axis - y_axis)/r  Lip 2/r
/// With disjoint convex supports Lip(psi) = max(|c1|, |c2|) Lip(b), which is
/// the certified lip_bound.
struct TestFunction {
    Profile profile = Profile::radial_hat;
    int axis = 0;
    int dim = 1;
    std::vector<double> center;
    double radius = 0.0;  ///< A l(Q)
    double side = 0.0;    ///< l(Q)
    std::vector<double> bump1, bump2;
    double bump_radius = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double lip_bound = 0.0;
    /// No placement charged both bumps; psi vanishes on the support.
    bool degenerate = false;

    double operator()(const double* x) const;
    /// Values at every support point of mu.
    std::vector<double> on_support(const DiscreteMeasure& mu) const;
    /// Support points where psi can be nonzero, sorted.
    std::vector<std::size_t> support_indices(const DiscreteMeasure& mu) const;
};

/// Lipschitz constant and Euclidean reach of a single bump of radius r.
double bump_lipschitz(Profile p, int dim, double r);
double bump_reach(Profile p, int dim, double r);

struct TestFunctionAudit {
    bool support_ok = false;
    bool mean_ok = false;
    bool lipschitz_ok = false;
    double mean = 0.0;
    double max_quotient = 0.0;  ///< largest |psi(x)-psi(y)|/|x-y| over the audited pairs
    std::size_t pairs = 0;
    bool ok() const { return support_ok && mean_ok && lipschitz_ok; }
};

/// Support inside the ball, |sum psi w| <= 1e-12 total mass, and the
/// difference quotient over support pairs (all pairs when there are at most
/// max_pairs, else max_pairs random ones) at most lip_bound.
TestFunctionAudit audit_test_function(const DiscreteMeasure& mu, const TestFunction& f,
                                      std::size_t max_pairs = 10'000, std::uint64_t seed = 1);

/// Explicit placement. The bumps must be disjoint and inside B(center, A side).
/// Throws InvalidArgument otherwise, or if the audit fails.
TestFunction make_test_function(const DiscreteMeasure& mu, std::span<const double> center, double side, double A,
                                Profile profile, int axis, std::span<const double> y1, std::span<const double> y2,
                                double r);

/// Seeded placement at the cube Q. Bump centers are support points near x_Q
/// (chosen from a coordinate-sorted list, so the result does not depend on the
/// order of the points); radii are l(Q) 2^u with u in [-2, 2]. Retries up to
/// max_attempts placements and returns a degenerate function if none charges
/// both bumps. Requires A > 100 sqrt(d) and mu(B(x_Q, A l(Q))) > 0.
TestFunction make_test_function(const DiscreteMeasure& mu, const DyadicLattice& lattice, const CubeAddress& q,
                                double A, Profile profile, int axis, std::uint64_t seed, int max_attempts = 64);

/// n functions cycling through radial, tensor and the d modulated profiles.
/// Element j depends only on (seed, j), so dictionaries are nested in n.
std::vector<TestFunction> make_dictionary(const DiscreteMeasure& mu, const DyadicLattice& lattice,
                                          const CubeAddress& q, double A, std::size_t n, std::uint64_t seed);

std::string test_function_json(const TestFunction& f);
std::string dictionary_json(const std::vector<TestFunction>& dictionary);

struct OscillationResult {
    double value = 0.0;  ///< Theta lower bound
    std::size_t best = 0;
    std::vector<double> values;  ///< |<T(f mu), 1>| per dictionary element
};

/// max over the dictionary of |<T(f mu), 1>_mu| (Euclidean norm over kernel
/// components). A lower bound for the oscillation coefficient.
OscillationResult oscillation_lower(const DiscreteMeasure& mu, const PairingField& field,
                                    const std::vector<TestFunction>& dictionary);
OscillationResult oscillation_lower(const DiscreteMeasure& mu, const KernelSpec& K,
                                    const std::vector<TestFunction>& dictionary);

struct ThetaRatio {
    bool vacuous = false;  ///< mu(3Q) = 0
    double theta = 0.0;
    double mass = 0.0;     ///< mu(3Q)
    double density = 0.0;  ///< D(3Q) = mu(3Q)/l(Q)^s
    double ratio = 0.0;    ///< theta / (D(3Q) mu(3Q))
};

ThetaRatio theta_density_ratio(const DiscreteMeasure& mu, const PairingField& field, double s,
                               const DyadicLattice& lattice, const CubeAddress& q,
                               const std::vector<TestFunction>& dictionary);
ThetaRatio theta_density_ratio(const DiscreteMeasure& mu, const KernelSpec& K, const DyadicLattice& lattice,
                               const CubeAddress& q, const std::vector<TestFunction>& dictionary);

struct ThetaRow {
    CubeAddress cube;
    ThetaRatio ratio;
};

/// Theta lower bounds and ratios over the given cubes, n dictionary functions each.
std::vector<ThetaRow> theta_table(const DiscreteMeasure& mu, const KernelSpec& K, const DyadicLattice& lattice,
                                  const std::vector<CubeAddress>& cubes, double A, std::size_t n,
                                  std::uint64_t seed);
std::string theta_csv(const std::vector<ThetaRow>& rows, int dim);

/// One psi_Q per populated cube, with rho_Q = mu(B(x_Q, 3A l(Q))) and the
/// sparse values of psi_Q on the support.
struct RieszSystem {
    double A = 0.0;
    std::vector<CubeAddress> cubes;
    std::vector<TestFunction> psi;
    std::vector<double> rho;
    std::vector<double> inner_mass;  ///< mu(B(x_Q, A l(Q)))
    std::vector<double> psi_norm2;   ///< ||psi_Q||^2 in L^2(mu)
    std::vector<std::vector<std::size_t>> index;
    std::vector<std::vector<double>> values;
};

RieszSystem build_riesz_system(const DiscreteMeasure& mu, const DyadicLattice& lattice, double A,
                               std::uint64_t seed, Profile profile = Profile::radial_hat);

/// Constants, coordinate functions and m random plane waves cos(w.x + phase)
/// with |w| log-uniform between 1/diameter and 1/min spacing.
std::vector<std::vector<double>> riesz_samples(const DiscreteMeasure& mu, std::size_t m, std::uint64_t seed);

struct RieszReport {
    double constant = 0.0;       ///< max over samples of LHS/||f||^2
    std::size_t argmax = 0;
    std::vector<double> ratios;  ///< per sample (0 for f = 0)
    std::size_t cubes = 0;
    /// |<f,psi_Q>|^2/rho_Q > ||f||^2 ||psi_Q||^2/rho_Q, counted over (f, Q).
    std::size_t cs_violations = 0;
    /// ||psi_Q||^2/rho_Q > (2A)^2 mu(B(x_Q, A l(Q)))/rho_Q, using ||psi||_inf <= 2A.
    std::size_t sup_bound_violations = 0;
};

/// sum_Q |<f, psi_Q>|^2 / rho_Q over the system for each f.
RieszReport riesz_system_constant(const DiscreteMeasure& mu, const RieszSystem& system,
                                  const std::vector<std::vector<double>>& samples);

/// f = sum_Q a_Q psi_Q / sqrt(rho_Q).
std::vector<double> riesz_synthesis(const DiscreteMeasure& mu, const RieszSystem& system, std::span<const double> a);

/// ||sum_Q a_Q psi_Q / sqrt(rho_Q)||^2_{L^2(mu)} / ||a||^2 (0 for a = 0).
double dual_riesz_check(const DiscreteMeasure& mu, const RieszSystem& system, std::span<const double> a);

/// Largest eigenvalue of the normalised Gram matrix <psi_Q, psi_Q'>/sqrt(rho_Q rho_Q'),
/// i.e. the best constant for this choice of psi_Q, by power iteration.
double riesz_gram_norm(const DiscreteMeasure& mu, const RieszSystem& system, double rtol = 1e-12,
                       int max_iterations = 5000);

std::string riesz_csv(const RieszSystem& system, int dim);

struct OverlapReport {
    std::size_t max_count = 0;
    int level = 0;
    std::size_t point = 0;
    /// Lattice points within A + sqrt(d)/2 of a point, bounded by volume.
    double bound = 0.0;
};

/// Number of level-k cubes Q with y in B(x_Q, A l(Q)), maximised over the
/// support and the window levels. Exact lattice-point count.
std::size_t overlap_count_at(const DyadicLattice& lattice, const double* y, int level, double A);
OverlapReport overlap_count(const DiscreteMeasure& mu, const DyadicLattice& lattice, double A);

}  // namespace gmtlab
