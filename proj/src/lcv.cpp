#include "gmtlab/lcv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace gmtlab {

std::string to_string(LcvVerdict v) {
    switch (v) {
        case LcvVerdict::vacuous: return "vacuous";
        case LcvVerdict::flagged: return "flagged";
        case LcvVerdict::clear: return "clear";
        case LcvVerdict::no_witness_found: return "no_witness_found";
    }
    return "?";
}

std::vector<std::size_t> closed_triple_points(const DiscreteMeasure& mu, const DyadicLattice& lattice,
                                              const CubeAddress& q) {
    const int d = lattice.dim();
    const double side = DyadicLattice::side(q.level);
    std::vector<double> lo = lattice.lower_corner(q), hi(d);
    for (int k = 0; k < d; ++k) {
        hi[k] = lo[k] + 2.0 * side;
        lo[k] -= side;
    }
    return mu.index().box(lo.data(), hi.data(), true);
}

std::vector<std::size_t> farthest_point_sample(const DiscreteMeasure& mu, const std::vector<std::size_t>& pool,
                                               std::size_t k) {
    if (pool.size() <= k) return pool;
    const int d = mu.dim();
    std::size_t first = 0;
    for (std::size_t t = 1; t < pool.size(); ++t)
        if (std::lexicographical_compare(mu.point(pool[t]), mu.point(pool[t]) + d, mu.point(pool[first]),
                                         mu.point(pool[first]) + d))
            first = t;
    std::vector<double> gap(pool.size(), std::numeric_limits<double>::infinity());
    std::vector<std::size_t> out;
    std::size_t cur = first;
    while (out.size() < k) {
        out.push_back(pool[cur]);
        gap[cur] = -1.0;
        std::size_t next = cur;
        double best = -1.0;
        for (std::size_t t = 0; t < pool.size(); ++t) {
            if (gap[t] < 0.0) continue;
            gap[t] = std::min(gap[t], squared_distance(mu.point(pool[t]), mu.point(pool[cur]), d));
            if (gap[t] > best) {
                best = gap[t];
                next = t;
            }
        }
        if (best < 0.0) break;
        cur = next;
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::optional<LcvWitness> scan_pairs(const DiscreteMeasure& mu, const std::vector<std::size_t>& pts, double radius) {
    const int d = mu.dim();
    std::vector<double> m(d);
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const double* x = mu.point(pts[a]);
            const double* y = mu.point(pts[b]);
            for (int k = 0; k < d; ++k) m[k] = 0.5 * (x[k] + y[k]);
            if (mu.index().any_in_ball(m.data(), radius)) continue;
            LcvWitness w;
            w.i = pts[a];
            w.j = pts[b];
            w.midpoint = m;
            w.clearance = mu.index().nearest(m.data()).second;
            return w;
        }
    return std::nullopt;
}

}  // namespace

LcvReport non_lcv_cubes(const DiscreteMeasure& mu, const DyadicLattice& lattice, double delta,
                        std::size_t pair_budget) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    if (pair_budget < 1) throw InvalidArgument("pair budget must be positive");
    if (lattice.dim() != mu.dim()) throw InvalidArgument("lattice and measure dimensions differ");
    LcvReport rep;
    rep.delta = delta;
    if (mu.empty()) return rep;
    const DensityTable table = populated_cubes(mu, lattice, static_cast<double>(mu.dim()));
    rep.cubes.resize(table.size());
    std::vector<char> sampled(table.size(), 0);
    const auto sample_size = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(pair_budget))));
    parallel_for(table.size(), [&](std::size_t c) {
        LcvCube& out = rep.cubes[c];
        out.cube = table.cube(c);
        std::vector<std::size_t> pts = closed_triple_points(mu, lattice, out.cube);
        out.points = pts.size();
        if (pts.size() < 2) return;
        const bool exhaustive = static_cast<double>(pts.size()) * static_cast<double>(pts.size()) <=
                                static_cast<double>(pair_budget);
        if (!exhaustive) {
            pts = farthest_point_sample(mu, pts, std::max<std::size_t>(2, sample_size));
            sampled[c] = 1;
        }
        out.witness = scan_pairs(mu, pts, delta * DyadicLattice::side(out.cube.level));
        if (out.witness)
            out.verdict = LcvVerdict::flagged;
        else
            out.verdict = exhaustive ? LcvVerdict::clear : LcvVerdict::no_witness_found;
    });
    for (std::size_t c = 0; c < rep.cubes.size(); ++c) {
        rep.sampled += sampled[c];
        if (rep.cubes[c].verdict == LcvVerdict::flagged) rep.flagged.push_back(rep.cubes[c].cube);
    }
    std::sort(rep.flagged.begin(), rep.flagged.end());
    return rep;
}

bool witness_valid(const DiscreteMeasure& mu, const DyadicLattice& lattice, const CubeAddress& q,
                   const LcvWitness& w, double delta) {
    const auto pts = closed_triple_points(mu, lattice, q);
    if (!std::binary_search(pts.begin(), pts.end(), w.i) || !std::binary_search(pts.begin(), pts.end(), w.j))
        return false;
    return mu.index().nearest(w.midpoint.data()).second >= delta * DyadicLattice::side(q.level);
}

bool cube_contains(const CubeAddress& p, const CubeAddress& q) {
    if (p.lattice_id != q.lattice_id || p.dim != q.dim || q.level > p.level) return false;
    return q.ancestor(p.level - q.level) == p;
}

double carleson_packing(const std::vector<CubeAddress>& family, const CubeAddress& p, double s) {
    CompensatedSum acc;
    for (const auto& q : family)
        if (cube_contains(p, q)) acc.add(std::exp2(s * (q.level - p.level)));
    return acc.value();
}

PackingReport carleson_constant(const std::vector<CubeAddress>& family, const std::vector<CubeAddress>& tops,
                                double s) {
    PackingReport rep;
    rep.ratios.assign(tops.size(), 0.0);
    if (tops.empty()) return rep;
    int top_level = tops[0].level;
    for (const auto& p : tops) top_level = std::max(top_level, p.level);
    // Push each member's content to all of its ancestors up to the highest top.
    std::unordered_map<CubeAddress, CompensatedSum, CubeAddressHash> content;
    for (const auto& q : family)
        for (int up = 0; q.level + up <= top_level; ++up) content[q.ancestor(up)].add(std::exp2(s * q.level));
    for (std::size_t t = 0; t < tops.size(); ++t) {
        const auto it = content.find(tops[t]);
        if (it == content.end()) continue;
        rep.ratios[t] = it->second.value() / std::exp2(s * tops[t].level);
        if (rep.ratios[t] > rep.constant) {
            rep.constant = rep.ratios[t];
            rep.argmax = tops[t];
        }
    }
    return rep;
}

std::string lcv_csv(const LcvReport& report, int dim) {
    std::ostringstream os;
    os.precision(17);
    os << "level";
    for (int k = 0; k < dim; ++k) os << ",c" << k;
    os << ",verdict,points,i,j";
    for (int k = 0; k < dim; ++k) os << ",m" << k;
    os << ",clearance\n";
    for (const auto& c : report.cubes) {
        os << c.cube.level;
        for (int k = 0; k < dim; ++k) os << ',' << c.cube.coords[k];
        os << ',' << to_string(c.verdict) << ',' << c.points;
        if (c.witness) {
            os << ',' << c.witness->i << ',' << c.witness->j;
            for (int k = 0; k < dim; ++k) os << ',' << c.witness->midpoint[k];
            os << ',' << c.witness->clearance;
        } else {
            os << ",,";
            for (int k = 0; k < dim; ++k) os << ',';
            os << ',';
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace gmtlab
