#include "gmtlab/potential.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

namespace gmtlab {

namespace {

double sphere_area(int d) {
    // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// Integral of the unnormalised radial profile t^{d-1} p(t) over [0, u], with rho = 1.
double profile_moment(Mollifier kind, int d, double u) {
    if (kind == Mollifier::cone) return std::pow(u, d) / d - std::pow(u, d + 1) / (d + 1);
    const double u2 = u * u;
    return std::pow(u, d) * (1.0 / d - 3.0 * u2 / (d + 2) + 3.0 * u2 * u2 / (d + 4) - u2 * u2 * u2 / (d + 6));
}

double profile(Mollifier kind, double u) {
    if (u >= 1.0) return 0.0;
    if (kind == Mollifier::cone) return 1.0 - u;
    const double t = 1.0 - u * u;
    return t * t * t;
}

void check_options(const DivergenceOptions& o) {
    if (!(o.rho > 0.0)) throw InvalidArgument("mollifier scale rho must be > 0");
    if (!(o.h > 0.0)) throw InvalidArgument("grid spacing must be > 0");
    if (o.h > 0.25 * o.rho) throw InvalidArgument("grid too coarse: need h <= rho/4");
    if (!(o.margin >= 0.0)) throw InvalidArgument("grid margin must be >= 0");
}

struct Grid {
    int d;
    double h;
    std::vector<long long> lo, count;
    std::size_t size = 1;
    void point(std::size_t idx, double* x) const {
        for (int k = 0; k < d; ++k) {
            x[k] = h * static_cast<double>(lo[k] + static_cast<long long>(idx % count[k]));
            idx /= count[k];
        }
    }
};

Grid make_grid(int d, const std::vector<double>& box_lo, const std::vector<double>& box_hi,
               const DivergenceOptions& o) {
    Grid g{d, o.h, std::vector<long long>(d), std::vector<long long>(d)};
    const double pad = o.margin * o.rho;
    for (int k = 0; k < d; ++k) {
        const double a = std::floor((box_lo[k] - pad) / o.h), b = std::ceil((box_hi[k] + pad) / o.h);
        g.lo[k] = static_cast<long long>(a);
        g.count[k] = static_cast<long long>(b - a) + 1;
        if (static_cast<double>(g.size) * static_cast<double>(g.count[k]) > static_cast<double>(o.max_grid_points))
            throw ResourceLimit("divergence grid exceeds max_grid_points");
        g.size *= static_cast<std::size_t>(g.count[k]);
    }
    return g;
}

// Residual field on a grid. b <= 0 means: return the least squares fit instead.
struct DivergenceScan {
    std::vector<double> div, dens;
};

DivergenceScan scan_divergence(const DiscreteMeasure& mu, const Grid& g, const DivergenceOptions& o) {
    const int d = mu.dim();
    const double rho = o.rho;
    DivergenceScan out{std::vector<double>(g.size), std::vector<double>(g.size)};
    // Mollified field at y: sum_j w_j K(y - x_j) Psi(|y - x_j|), with K(v) = v/|v|^d.
    auto field = [&](const double* y, int comp) {
        CompensatedSum acc;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double* xj = mu.point(j);
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) r2 += (y[k] - xj[k]) * (y[k] - xj[k]);
            if (r2 == 0.0) continue;
            const double r = std::sqrt(r2);
            acc.add(mu.weight(j) * (y[comp] - xj[comp]) / std::pow(r, d) * mollifier_mass(o.mollifier, d, rho, r));
        }
        return acc.value();
    };
    parallel_for(g.size, [&](std::size_t idx) {
        std::vector<double> x(d), y(d);
        g.point(idx, x.data());
        CompensatedSum div;
        for (int k = 0; k < d; ++k) {
            y = x;
            y[k] = x[k] + g.h;
            const double fp = field(y.data(), k);
            y[k] = x[k] - g.h;
            const double fm = field(y.data(), k);
            div.add((fp - fm) / (2.0 * g.h));
        }
        CompensatedSum dens;
        for (std::size_t j = 0; j < mu.size(); ++j)
            dens.add(mu.weight(j) * mollifier_density(o.mollifier, d, rho, distance(x.data(), mu.point(j), d)));
        out.div[idx] = div.value();
        out.dens[idx] = dens.value();
    });
    return out;
}

}  // namespace

double mollifier_mass(Mollifier kind, int d, double rho, double r) {
    if (r <= 0.0) return 0.0;
    if (r >= rho) return 1.0;
    return profile_moment(kind, d, r / rho) / profile_moment(kind, d, 1.0);
}

double mollifier_density(Mollifier kind, int d, double rho, double r) {
    const double c = 1.0 / (sphere_area(d) * std::pow(rho, d) * profile_moment(kind, d, 1.0));
    return c * profile(kind, r / rho);
}

double calibrate_divergence_constant(int d, const DivergenceOptions& options) {
    check_options(options);
    const DiscreteMeasure atom(d, std::vector<double>(d, 0.0), {1.0});
    const std::vector<double> zero(d, 0.0);
    const Grid g = make_grid(d, zero, zero, options);
    const DivergenceScan s = scan_divergence(atom, g, options);
    CompensatedSum num, den;
    for (std::size_t i = 0; i < g.size; ++i) {
        num.add(s.div[i] * s.dens[i]);
        den.add(s.dens[i] * s.dens[i]);
    }
    return num.value() / den.value();
}

DivergenceReport riesz_divergence_check(const DiscreteMeasure& mu, const KernelSpec& K,
                                        const DivergenceOptions& options) {
    check_options(options);
    const int d = mu.dim();
    if (K.variant() != KernelVariant::riesz || K.dim() != d) throw InvalidArgument("divergence check needs the riesz kernel on R^d");
    if (std::fabs(K.s() - (d - 1)) > 1e-12) throw InvalidArgument("divergence identity needs s = d - 1");
    DivergenceReport rep;
    rep.b_analytic = sphere_area(d);
    rep.b = calibrate_divergence_constant(d, options);
    if (mu.empty()) return rep;
    std::vector<double> lo(d, INFINITY), hi(d, -INFINITY);
    for (std::size_t j = 0; j < mu.size(); ++j)
        for (int k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], mu.point(j)[k]);
            hi[k] = std::max(hi[k], mu.point(j)[k]);
        }
    const Grid g = make_grid(d, lo, hi, options);
    const DivergenceScan s = scan_divergence(mu, g, options);
    rep.grid_points = g.size;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < g.size; ++i) {
        const double res = std::fabs(s.div[i] - rep.b * s.dens[i]);
        if (res > rep.max_residual) {
            rep.max_residual = res;
            arg = i;
        }
    }
    rep.argmax.resize(d);
    g.point(arg, rep.argmax.data());
    return rep;
}

PvReport pv_fractional_check(const DiscreteMeasure& mu, const KernelSpec& K, const std::vector<double>& x0,
                             const PvPlan& plan) {
    const int d = mu.dim();
    if (d != 1 && d != 2) throw InvalidArgument("pv check supports d = 1 and d = 2");
    if (K.variant() != KernelVariant::riesz || K.dim() != d) throw InvalidArgument("pv check needs the riesz kernel on R^d");
    const double s = K.s();
    if (!(s > d - 1 && s < d)) throw InvalidArgument("pv check needs s in (d-1, d)");
    if (static_cast<int>(x0.size()) != d) throw InvalidArgument("x0 has the wrong dimension");
    if (!(plan.tau > 0.0 && plan.outer > plan.tau)) throw InvalidArgument("need 0 < tau < outer");
    if (!(plan.tolerance > 0.0)) throw InvalidArgument("quadrature tolerance must be > 0");

    std::vector<std::size_t> atoms;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (distance(mu.point(j), x0.data(), d) < 1.0)
            throw InvalidArgument("x0 lies within unit distance of the support; rescale first");
        if (mu.weight(j) != 0.0) atoms.push_back(j);
    }
    PvReport rep;
    rep.residual.assign(d, 0.0);
    if (atoms.empty()) return rep;

    // The integral is linear in mu and the riesz kernel commutes with rotations, so an
    // atom at x0 + a contributes w I(|a|) a/|a|, where I(rho) is the first component of
    // the integral for a unit atom at rho e_1 (its other component vanishes by reflection).
    const double p = 2.0 * d + 1.0 - s;
    boost::math::quadrature::tanh_sinh<double> ts;
    auto axial = [&](double rho, double& err) {
        // First component of R at v for a unit atom at rho e_1.
        auto R = [&](double v0, double v1) {
            const double a = rho - v0, b = -v1;
            const double r2 = a * a + b * b;
            return r2 == 0.0 ? 0.0 : a * std::pow(r2, -0.5 * (s + 1.0));
        };
        const double r0 = R(0.0, 0.0);
        // Opposite points paired: 2R(x0) - R(x0 + x) - R(x0 - x), over |x|^p.
        auto paired = [&](double c, double sn, double r) {
            const double v = (2.0 * r0 - R(r * c, r * sn) - R(-r * c, -r * sn)) / std::pow(r, p);
            // Quadrature nodes can land on the atom to within rounding; that set has measure zero.
            return std::isfinite(v) ? v : 0.0;
        };
        std::vector<double> radial{plan.tau, plan.outer};
        if (rho > plan.tau && rho < plan.outer) radial.insert(radial.begin() + 1, rho);
        CompensatedSum total;
        err = 0.0;
        for (std::size_t t = 0; t + 1 < radial.size(); ++t) {
            double e = 0.0;
            if (d == 1) {
                total.add(ts.integrate([&](double r) { return paired(1.0, 0.0, r); }, radial[t], radial[t + 1],
                                       plan.tolerance, &e));
            } else {
                // Half circle; the paired integrand is pi-periodic in the angle.
                total.add(ts.integrate(
                    [&](double r) {
                        double e2 = 0.0;
                        return r * ts.integrate([&](double th) { return paired(std::cos(th), std::sin(th), r); },
                                                0.0, std::numbers::pi, plan.tolerance, &e2);
                    },
                    radial[t], radial[t + 1], plan.tolerance, &e));
            }
            err += e;
        }
        return total.value();
    };

    std::vector<std::pair<double, double>> cache;  // (rho, I(rho))
    CompensatedSum err_total;
    std::vector<CompensatedSum> acc(d);
    for (std::size_t j : atoms) {
        double a[2] = {0.0, 0.0};
        for (int k = 0; k < d; ++k) a[k] = mu.point(j)[k] - x0[k];
        const double rho = std::hypot(a[0], a[1]);
        auto it = std::find_if(cache.begin(), cache.end(), [rho](const auto& e) { return e.first == rho; });
        if (it == cache.end()) {
            double err = 0.0;
            cache.emplace_back(rho, axial(rho, err));
            err_total.add(err);
            it = cache.end() - 1;
        }
        for (int k = 0; k < d; ++k) acc[k].add(mu.weight(j) * it->second * (a[k] / rho));
    }
    for (int k = 0; k < d; ++k) rep.residual[k] = acc[k].value();
    rep.error_estimate = err_total.value();
    return rep;
}

}  // namespace gmtlab
