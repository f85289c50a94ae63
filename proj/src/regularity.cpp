#include "gmtlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

namespace gmtlab {

void Graph::add_edge(std::size_t u, std::size_t v) {
    if (u >= size() || v >= size()) throw InvalidArgument("edge endpoint out of range");
    if (u == v) throw InvalidArgument("self loops are not allowed");
    if (std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end()) return;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
}

std::size_t Graph::max_degree() const {
    std::size_t d = 0;
    for (const auto& a : adj_) d = std::max(d, a.size());
    return d;
}

std::vector<int> Graph::bfs(std::size_t src, std::vector<std::size_t>* order) const {
    std::vector<int> dist(size(), -1);
    std::deque<std::size_t> queue{src};
    dist[src] = 0;
    if (order) order->assign(1, src);
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v : adj_[u]) {
            if (dist[v] >= 0) continue;
            dist[v] = dist[u] + 1;
            queue.push_back(v);
            if (order) order->push_back(v);
        }
    }
    return dist;
}

namespace {

void check_nu(const Graph& g, std::span<const double> nu, double M) {
    if (nu.size() != g.size()) throw InvalidArgument("nu must have one value per vertex");
    for (double v : nu)
        if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("nu must be finite and nonnegative");
    if (!(M > 0.0)) throw InvalidArgument("M must be > 0");
}

void collect_seniors(SeniorResult& r) {
    const std::size_t n = r.star.size();
    r.is_senior.assign(n, 0);
    for (std::size_t x = 0; x < n; ++x)
        if (r.star[x] == x) {
            r.is_senior[x] = 1;
            r.seniors.push_back(x);
        }
}

}  // namespace

SeniorResult senior_vertices(const Graph& g, std::span<const double> nu, double M) {
    check_nu(g, nu, M);
    const std::size_t n = g.size();
    SeniorResult r;
    r.star.resize(n);
    r.best.resize(n);
    const double sup = n ? *std::max_element(nu.begin(), nu.end()) : 0.0;
    parallel_for(n, [&](std::size_t x) {
        std::size_t star = x;
        double best = nu[x];
        std::vector<int> dist(n, -1);
        std::vector<std::size_t> ring{x}, next;
        dist[x] = 0;
        for (int k = 1; !ring.empty(); ++k) {
            const double scale = std::exp2(-M * k);
            // Nothing at distance >= k can beat best strictly.
            if (best >= sup * scale) break;
            next.clear();
            for (std::size_t u : ring)
                for (std::size_t v : g.neighbors(u)) {
                    if (dist[v] >= 0) continue;
                    dist[v] = k;
                    next.push_back(v);
                    const double val = nu[v] * scale;
                    if (val > best) {
                        best = val;
                        star = v;
                    }
                }
            ring.swap(next);
        }
        r.star[x] = star;
        r.best[x] = best;
    });
    collect_seniors(r);
    return r;
}

SeniorResult senior_vertices_bruteforce(const Graph& g, std::span<const double> nu, double M) {
    check_nu(g, nu, M);
    const std::size_t n = g.size();
    SeniorResult r;
    r.star.resize(n);
    r.best.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
        std::vector<std::size_t> order;
        const std::vector<int> dist = g.bfs(x, &order);
        std::size_t star = x;
        double best = nu[x];
        for (std::size_t y : order) {
            const double val = nu[y] * std::exp2(-M * dist[y]);
            if (val > best) {
                best = val;
                star = y;
            }
        }
        r.star[x] = star;
        r.best[x] = best;
    }
    collect_seniors(r);
    return r;
}

DominationReport domination_check(const Graph& g, std::span<const double> nu, double M) {
    DominationReport rep;
    rep.seniors = senior_vertices(g, nu, M);
    const SeniorResult& sr = rep.seniors;
    const double q = std::exp2(-M) * static_cast<double>(g.max_degree());
    rep.hypothesis = q < 1.0;
    rep.cluster_factor = rep.hypothesis ? 1.0 / (1.0 - q) : std::numeric_limits<double>::infinity();
    CompensatedSum total, senior_total;
    std::vector<CompensatedSum> clusters(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
        total.add(nu[x]);
        clusters[sr.star[x]].add(nu[x]);
        if (sr.is_senior[x]) senior_total.add(nu[x]);
    }
    rep.total = total.value();
    rep.senior_total = senior_total.value();
    rep.ratio = rep.senior_total > 0.0 ? rep.total / rep.senior_total : 1.0;
    // Pointwise: nu(x) <= 2^{-M d(x, x*)} nu(x*), with the distance recomputed by BFS.
    for (std::size_t z : sr.seniors) {
        const std::vector<int> dist = g.bfs(z);
        std::vector<double> rings;
        for (std::size_t x = 0; x < g.size(); ++x) {
            if (dist[x] < 0) continue;
            if (static_cast<std::size_t>(dist[x]) >= rings.size()) rings.resize(dist[x] + 1, 0.0);
            rings[dist[x]] += 1.0;
            if (sr.star[x] == z && nu[x] > nu[z] * std::exp2(-M * dist[x]) * (1.0 + 1e-12)) ++rep.pointwise_violations;
        }
        CompensatedSum bound;
        for (std::size_t k = 0; k < rings.size(); ++k) bound.add(rings[k] * std::exp2(-M * static_cast<double>(k)));
        const double sum = clusters[z].value();
        rep.cluster_sums.push_back(sum);
        if (sum > nu[z] * bound.value() * (1.0 + 1e-12)) ++rep.cluster_violations;
    }
    return rep;
}

int cube_degree_bound(int d) { return (1 << d) + 2 * d + 1; }

int smallest_cube_M(int d) {
    const int D = cube_degree_bound(d);
    int M = 0;
    while (std::ldexp(static_cast<double>(D), -M) >= 1.0) ++M;
    return M;
}

CubeSeniors cube_senior_vertices(const DensityTable& table, double p, double M, int r_guard) {
    if (!(p > 0.0)) throw InvalidArgument("p must be > 0");
    if (!(M > 0.0)) throw InvalidArgument("M must be > 0");
    const std::size_t n = table.size();
    CubeSeniors out;
    out.nu.resize(n);
    out.star.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.nu[i] = std::pow(table.value(i).density, p) * table.value(i).mass;
    const double sup = n ? *std::max_element(out.nu.begin(), out.nu.end()) : 0.0;
    parallel_for(n, [&](std::size_t i) {
        const double own = out.nu[i];
        std::size_t star = i;
        double best = own;
        int best_d = 0;
        // Cubes farther than R cannot exceed own: sup 2^{-M d} <= own.
        const int R = own > 0.0 ? static_cast<int>(std::ceil(std::log2(sup / own) / M)) : 0;
        table.for_each_within(table.cube(i), R, [&](std::size_t j, int dist) {
            const double val = out.nu[j] * std::exp2(-M * dist);
            if (val > best || (val == best && (dist < best_d || (dist == best_d && j < star)))) {
                best = val;
                star = j;
                best_d = dist;
            }
        });
        out.star[i] = star;
    });
    const DyadicLattice& lat = table.lattice();
    for (std::size_t i = 0; i < n; ++i) {
        if (out.star[i] != i) continue;
        out.seniors.push_back(i);
        const int k = table.cube(i).level;
        out.boundary_suspect.push_back(k - lat.k_min() < r_guard || lat.k_max() - k < r_guard);
    }
    return out;
}

bool is_epsilon_regular(const DensityTable& table, std::size_t i, double epsilon, int R) {
    const double own = table.value(i).density;
    bool ok = true;
    table.for_each_within(table.cube(i), R, [&](std::size_t j, int dist) {
        if (ok && table.value(j).density > std::exp2(epsilon * dist) * own * (1.0 + 1e-12)) ok = false;
    });
    return ok;
}

std::vector<std::size_t> epsilon_regular_cubes(const DensityTable& table, double epsilon, int R) {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
    if (R < 0) throw InvalidArgument("comparison radius must be >= 0");
    std::vector<char> flag(table.size(), 0);
    parallel_for(table.size(), [&](std::size_t i) { flag[i] = is_epsilon_regular(table, i, epsilon, R); });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < table.size(); ++i)
        if (flag[i]) out.push_back(i);
    return out;
}

ChainReport senior_regular_chain_check(const DensityTable& table, double M, double p) {
    ChainReport rep;
    rep.M = M;
    rep.p = p;
    const double s = table.s();
    rep.epsilon = (M + s) / (p + 1.0);
    rep.cubes = table.size();
    const double q = cube_degree_bound(table.lattice().dim()) * std::exp2(-M);
    rep.domination_bound = q < 1.0 ? 1.0 / (1.0 - q) : std::numeric_limits<double>::infinity();
    if (table.empty()) {
        rep.vacuous = true;
        rep.domination_ratio = 1.0;
        rep.regular_constant = 1.0;
        return rep;
    }
    rep.detail = cube_senior_vertices(table, p, M);
    const CubeSeniors& cs = rep.detail;
    rep.seniors = cs.seniors.size();
    for (char b : cs.boundary_suspect) rep.boundary_suspect += b;

    double dmax = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) dmax = std::max(dmax, table.value(i).density);
    // Radius beyond which no populated cube can violate epsilon-regularity of entry i.
    auto exhaustive_radius = [&](std::size_t i) {
        const double own = table.value(i).density;
        return static_cast<int>(std::ceil(std::log2(dmax / own) / rep.epsilon)) + 1;
    };

    std::vector<std::vector<ChainViolation>> found(cs.seniors.size());
    parallel_for(cs.seniors.size(), [&](std::size_t t) {
        const std::size_t i = cs.seniors[t];
        const double own = std::pow(table.value(i).density, p + 1.0);
        table.for_each_within(table.cube(i), exhaustive_radius(i), [&](std::size_t j, int dist) {
            const double lhs = std::pow(table.value(j).density, p + 1.0);
            const double rhs = std::exp2((M + s) * dist) * own;
            if (lhs > rhs * (1.0 + 1e-12)) found[t].push_back({i, j, dist, lhs / rhs});
        });
    });
    for (auto& f : found) rep.violations.insert(rep.violations.end(), f.begin(), f.end());

    std::vector<char> regular(table.size(), 0);
    parallel_for(table.size(), [&](std::size_t i) {
        regular[i] = is_epsilon_regular(table, i, rep.epsilon, exhaustive_radius(i));
    });
    CompensatedSum total, senior_total, regular_total;
    for (std::size_t i = 0; i < table.size(); ++i) {
        total.add(cs.nu[i]);
        if (cs.star[i] == i) senior_total.add(cs.nu[i]);
        if (regular[i]) regular_total.add(cs.nu[i]);
    }
    rep.total = total.value();
    rep.senior_total = senior_total.value();
    rep.regular_total = regular_total.value();
    rep.domination_ratio = rep.senior_total > 0.0 ? rep.total / rep.senior_total : 1.0;
    rep.regular_constant = rep.regular_total > 0.0 ? rep.total / rep.regular_total : 1.0;
    return rep;
}

ChainReport senior_regular_chain_check(const DiscreteMeasure& mu, const DyadicLattice& lattice, double s, double M,
                                       double p) {
    return senior_regular_chain_check(populated_cubes(mu, lattice, s), M, p);
}

std::string seniors_csv(const DensityTable& table, const CubeSeniors& seniors) {
    const int d = table.lattice().dim();
    std::string out = "level";
    for (int k = 0; k < d; ++k) out += ",c" + std::to_string(k);
    out += ",nu,star_level";
    for (int k = 0; k < d; ++k) out += ",star_c" + std::to_string(k);
    out += ",boundary_suspect\n";
    char buf[64];
    for (std::size_t t = 0; t < seniors.seniors.size(); ++t) {
        const std::size_t i = seniors.seniors[t];
        const CubeAddress& q = table.cube(i);
        const CubeAddress& z = table.cube(seniors.star[i]);
        out += std::to_string(q.level);
        for (int k = 0; k < d; ++k) out += "," + std::to_string(q.coords[k]);
        std::snprintf(buf, sizeof buf, ",%.17g,", seniors.nu[i]);
        out += buf;
        out += std::to_string(z.level);
        for (int k = 0; k < d; ++k) out += "," + std::to_string(z.coords[k]);
        out += seniors.boundary_suspect[t] ? ",1\n" : ",0\n";
    }
    return out;
}

}  // namespace gmtlab
