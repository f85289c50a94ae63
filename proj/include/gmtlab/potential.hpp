#pragma once

#include <vector>

#include "gmtlab/kernel.hpp"
#include "gmtlab/measure.hpp"

namespace gmtlab {

enum class Mollifier {
    cone,    ///< c (1 - |x|/rho)_+
    smooth,  ///< c (1 - |x|^2/rho^2)_+^3
};

/// Mass of the unit-mass mollifier of scale rho inside B(0, r), closed form.
double mollifier_mass(Mollifier kind, int d, double rho, double r);
/// Mollifier density at |x| = r.
double mollifier_density(Mollifier kind, int d, double rho, double r);

struct DivergenceOptions {
    double rho = 1.0;
    double h = 0.125;
    Mollifier mollifier = Mollifier::cone;
    /// Grid margin around the support bounding box, in units of rho.
    double margin = 1.5;
    std::size_t max_grid_points = 20'000'000;
};

struct DivergenceReport {
    double max_residual = 0.0;
    std::vector<double> argmax;  ///< grid point of the largest residual
    double b = 0.0;              ///< calibrated constant
    double b_analytic = 0.0;     ///< surface area of the unit sphere S^{d-1}
    std::size_t grid_points = 0;
};

/// Calibrates b on a unit atom at the origin: least squares fit of
/// div_h(psi * K) against psi over the same grid layout.
double calibrate_divergence_constant(int d, const DivergenceOptions& options);

/// Max over the grid of |div_h(psi_rho * R(mu)) - b (psi_rho * mu)|, where the
/// mollified field uses the shell theorem (psi * K)(v) = K(v) Psi(|v|) and
/// div_h is the centered difference with step h. Needs K riesz with s = d - 1.
/// Grid nodes are h Z^d inside the support box widened by margin * rho.
DivergenceReport riesz_divergence_check(const DiscreteMeasure& mu, const KernelSpec& K,
                                        const DivergenceOptions& options);

struct PvPlan {
    double tau = 0.1;    ///< inner radius of the annulus
    double outer = 100;  ///< outer radius of the annulus
    double tolerance = 1e-10;
};

struct PvReport {
    std::vector<double> residual;  ///< per component
    double error_estimate = 0.0;
};

/// The annulus integral over tau < |x| < outer of
/// (R(x0) - R(x0 + x)) / |x|^{2d+1-s}, where R(y) = sum_j w_j K(x_j - y).
/// Opposite points are paired, so the integrand is even and the odd part
/// cancels exactly. d in {1, 2}, K riesz with s in (d-1, d), dist(x0, supp) >= 1.
PvReport pv_fractional_check(const DiscreteMeasure& mu, const KernelSpec& K, const std::vector<double>& x0,
                             const PvPlan& plan = {});

}  // namespace gmtlab
