#include "gmtlab/wolff.hpp"

#include <algorithm>
#include <cmath>

namespace gmtlab {

namespace {

void check_params(const WolffParams& w) {
    if (!(w.p > 0.0)) throw InvalidArgument("Wolff exponent p must be > 0");
    if (!(w.s > 0.0)) throw InvalidArgument("Wolff s must be > 0");
    if (!(w.r_max > 0.0)) throw InvalidArgument("r_max must be > 0");
}

// int_a^b r^{-sp} dr / r, with b = inf allowed.
double piece(double a, double b, double sp) {
    if (std::isinf(b)) return std::pow(a, -sp) / sp;
    // a^{-sp} (1 - (a/b)^{sp}) / sp without cancellation.
    return -std::pow(a, -sp) * std::expm1(sp * std::log(a / b)) / sp;
}

}  // namespace

double wolff_potential(const DiscreteMeasure& mu, const WolffParams& params, const double* x, std::size_t exclude) {
    check_params(params);
    const std::size_t n = mu.size();
    const int d = mu.dim();
    std::vector<std::pair<double, double>> dist;
    dist.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == exclude || mu.weight(j) == 0.0) continue;
        const double r = distance(mu.point(j), x, d);
        if (r == 0.0) return std::numeric_limits<double>::infinity();
        if (r < params.r_max) dist.emplace_back(r, mu.weight(j));
    }
    std::sort(dist.begin(), dist.end());
    const double sp = params.s * params.p;
    CompensatedSum total, mass;
    // On (rho_k, rho_{k+1}] the open ball holds every atom with distance <= rho_k.
    for (std::size_t k = 0; k < dist.size(); ++k) {
        mass.add(dist[k].second);
        const double a = dist[k].first;
        const double b = k + 1 < dist.size() ? dist[k + 1].first : params.r_max;
        if (b == a) continue;
        const double m = mass.value();
        total.add(std::pow(m, params.p) * piece(a, b, sp));
    }
    return total.value();
}

std::vector<double> wolff_at_support(const DiscreteMeasure& mu, const WolffParams& params, bool self_exclusion) {
    check_params(params);
    std::vector<double> out(mu.size());
    parallel_for(mu.size(), [&](std::size_t i) {
        out[i] = wolff_potential(mu, params, mu.point(i), self_exclusion ? i : kNoExclusion);
    });
    return out;
}

double wolff_integral(const DiscreteMeasure& mu, const WolffParams& params, bool self_exclusion) {
    const std::vector<double> w = wolff_at_support(mu, params, self_exclusion);
    CompensatedSum acc;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.weight(i) != 0.0) acc.add(mu.weight(i) * w[i]);
    return acc.value();
}

double dyadic_wolff_sum(const DensityTable& table, double p) {
    if (!(p > 0.0)) throw InvalidArgument("p must be > 0");
    CompensatedSum acc;
    for (std::size_t i = 0; i < table.size(); ++i)
        acc.add(std::pow(table.value(i).density, p) * table.value(i).mass);
    return acc.value();
}

double dyadic_wolff_sum(const DiscreteMeasure& mu, const DyadicLattice& lattice, double p, double s) {
    return dyadic_wolff_sum(populated_cubes(mu, lattice, s), p);
}

std::vector<std::size_t> points_in_cube(const DiscreteMeasure& mu, const DyadicLattice& lattice,
                                        const CubeAddress& q) {
    const int d = mu.dim();
    if (d != lattice.dim() || q.dim != d) throw InvalidArgument("cube and measure dimensions differ");
    std::vector<double> lo = lattice.lower_corner(q), hi(d);
    const double side = DyadicLattice::side(q.level);
    for (int k = 0; k < d; ++k) {
        // Widen by a few ulps, then decide membership exactly as cube_of_point does.
        const double pad = 4.0 * std::numeric_limits<double>::epsilon() * (std::fabs(lo[k]) + side);
        hi[k] = lo[k] + side + pad;
        lo[k] -= pad;
    }
    std::vector<std::size_t> out;
    for (std::size_t i : mu.index().box(lo.data(), hi.data(), true))
        if (lattice.cube_of_point(mu.point(i), q.level) == q) out.push_back(i);
    return out;
}

MpvReport mpv_condition_test(const DiscreteMeasure& mu, const DyadicLattice& lattice,
                             const std::vector<CubeAddress>& cubes, double s, bool self_exclusion) {
    MpvReport rep;
    rep.self_exclusion = self_exclusion;
    for (const CubeAddress& q : cubes) {
        const std::vector<std::size_t> idx = points_in_cube(mu, lattice, q);
        if (idx.empty()) continue;
        const DiscreteMeasure sub = mu.restricted(idx);
        if (!(sub.total_mass() > 0.0)) continue;
        WolffParams w{2.0, s, DyadicLattice::side(q.level) * std::sqrt(static_cast<double>(mu.dim()))};
        MpvEntry e{q, sub.total_mass(), wolff_integral(sub, w, self_exclusion), 0.0};
        e.ratio = e.integral / e.mass;
        if (rep.vacuous || e.ratio > rep.sup) {
            rep.sup = e.ratio;
            rep.witness = q;
        }
        rep.vacuous = false;
        rep.entries.push_back(e);
    }
    return rep;
}

std::vector<double> default_epsilon_grid(const DiscreteMeasure& nu) {
    if (nu.size() < 2) throw InvalidArgument("epsilon grid needs at least two points");
    std::vector<double> out;
    const double top = nu.diameter();
    for (double e = 0.5 * nu.min_spacing();; e *= 2.0) {
        out.push_back(e);
        if (e >= top) break;
    }
    return out;
}

TruncatedBoundReport truncated_bound_check(const DiscreteMeasure& nu, const KernelSpec& K,
                                           std::vector<double> epsilon_grid) {
    if (nu.empty()) throw InvalidArgument("truncated bound check needs a nonempty measure");
    if (K.dim() != nu.dim()) throw InvalidArgument("kernel and measure dimensions differ");
    TruncatedBoundReport rep;
    if (nu.size() == 1) {
        // Single atom: no pairs, both sides vanish.
        for (double e : epsilon_grid) rep.entries.push_back({e, 0.0, 0.0});
        return rep;
    }
    if (epsilon_grid.empty()) epsilon_grid = default_epsilon_grid(nu);
    for (double e : epsilon_grid)
        if (!(e > 0.0)) throw InvalidArgument("epsilon values must be > 0");
    std::vector<std::size_t> order(epsilon_grid.size());
    for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return epsilon_grid[a] > epsilon_grid[b]; });

    const std::size_t n = nu.size(), n_eps = epsilon_grid.size();
    const int d = nu.dim(), m = K.codim();
    // rows[i * n_eps + t] = w_i |truncated field at x_i|^2 for epsilon_grid[t].
    std::vector<double> rows(n * n_eps, 0.0);
    parallel_for(n, [&](std::size_t i) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && nu.weight(j) != 0.0) dist.emplace_back(distance(nu.point(i), nu.point(j), d), j);
        // Farthest first, so each epsilon sees a prefix.
        std::sort(dist.begin(), dist.end(), [](const auto& a, const auto& b) {
            return a.first > b.first || (a.first == b.first && a.second < b.second);
        });
        std::vector<CompensatedSum> field(m);
        std::vector<double> diff(d), kv(m);
        std::size_t next = 0;
        for (std::size_t t : order) {
            const double eps = epsilon_grid[t];
            while (next < dist.size() && dist[next].first > eps) {
                const std::size_t j = dist[next++].second;
                double r2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    diff[k] = nu.point(i)[k] - nu.point(j)[k];
                    r2 += diff[k] * diff[k];
                }
                if (r2 == 0.0) throw CoincidentPoints(std::min(i, j), std::max(i, j));
                K.eval_unchecked(diff.data(), r2, kv.data());
                for (int k = 0; k < m; ++k) field[k].add(kv[k] * nu.weight(j));
            }
            double n2 = 0.0;
            for (int k = 0; k < m; ++k) n2 += field[k].value() * field[k].value();
            rows[i * n_eps + t] = nu.weight(i) * n2;
        }
    });
    rep.rhs = wolff_integral(nu, WolffParams{2.0, K.s()}, true);
    for (std::size_t t = 0; t < n_eps; ++t) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < n; ++i) acc.add(rows[i * n_eps + t]);
        TruncatedBoundEntry e{epsilon_grid[t], acc.value(), 0.0};
        if (rep.rhs > 0.0)
            e.ratio = e.lhs / rep.rhs;
        else if (e.lhs > 0.0)
            rep.violation = true;
        rep.max_lhs = std::max(rep.max_lhs, e.lhs);
        rep.max_ratio = std::max(rep.max_ratio, e.ratio);
        rep.entries.push_back(e);
    }
    return rep;
}

TripleSumReport u1_triple_sums(const DiscreteMeasure& nu, const KernelSpec& K, double epsilon) {
    const std::size_t n = nu.size();
    if (n > 64) throw ResourceLimit("triple enumeration is limited to 64 points");
    if (K.dim() != nu.dim()) throw InvalidArgument("kernel and measure dimensions differ");
    const int d = nu.dim(), m = K.codim();
    const double s = K.s();
    TripleSumReport rep;
    rep.constant = std::pow(2.0, s);
    std::vector<CompensatedSum> pairing(m);
    CompensatedSum restricted, enlarged;
    std::vector<double> a(d), b(d), ka(m), kb(m);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            const double rxy = distance(nu.point(x), nu.point(y), d);
            for (std::size_t z = 0; z < n; ++z) {
                if (z == x) continue;
                const double rxz = distance(nu.point(x), nu.point(z), d);
                if (rxy < rxz) continue;
                const double www = nu.weight(x) * nu.weight(y) * nu.weight(z);
                const double bound = std::pow(rxy, -2.0 * s);
                enlarged.add(bound * www);
                if (!(rxz > epsilon) || !(distance(nu.point(y), nu.point(z), d) < rxz)) continue;
                for (int k = 0; k < d; ++k) {
                    a[k] = nu.point(x)[k] - nu.point(y)[k];
                    b[k] = nu.point(x)[k] - nu.point(z)[k];
                }
                K.eval(a.data(), ka.data());
                K.eval(b.data(), kb.data());
                // Real inner product of the two kernel values.
                double dot = 0.0;
                for (int k = 0; k < m; ++k) {
                    dot += ka[k] * kb[k];
                    pairing[k].add(ka[k] * kb[k] * www);
                }
                restricted.add(bound * www);
                ++rep.triples;
                if (std::fabs(dot) > rep.constant * bound * (1.0 + 1e-12)) ++rep.violations;
            }
        }
    double total = 0.0;
    for (int k = 0; k < m; ++k) total += pairing[k].value();
    rep.pairing = std::fabs(total);
    rep.restricted = restricted.value();
    rep.enlarged = enlarged.value();
    rep.wolff = wolff_integral(nu, WolffParams{2.0, s}, true);
    return rep;
}

}  // namespace gmtlab
