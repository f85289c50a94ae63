#include "gmtlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_set>

namespace gmtlab {

namespace {

constexpr std::int64_t kBias = std::int64_t{1} << 31;

using Key = unsigned __int128;

Key morton(const std::int64_t* u, int d) {
    Key key = 0;
    for (int b = 0; b < 32; ++b)
        for (int k = 0; k < d; ++k)
            key |= static_cast<Key>((static_cast<std::uint64_t>(u[k]) >> b) & 1u) << (b * d + k);
    return key;
}

// Calls fn for every integer offset with L1 norm <= m, in lexicographic order.
void l1_ball(int d, int m, std::array<std::int64_t, kMaxLatticeDim>& off, int k,
             const std::function<void()>& fn) {
    if (k == d) {
        fn();
        return;
    }
    for (int v = -m; v <= m; ++v) {
        off[k] = v;
        l1_ball(d, m - std::abs(v), off, k + 1, fn);
    }
    off[k] = 0;
}

void check_dim(int d) {
    if (d < 1 || d > kMaxLatticeDim)
        throw InvalidArgument("dyadic lattices support 1 <= d <= " + std::to_string(kMaxLatticeDim));
}

}  // namespace

CubeAddress CubeAddress::parent() const { return ancestor(1); }

CubeAddress CubeAddress::ancestor(int up) const {
    CubeAddress a = *this;
    a.level += up;
    for (int k = 0; k < dim; ++k) a.coords[k] = coords[k] >> up;
    return a;
}

bool operator<(const CubeAddress& a, const CubeAddress& b) {
    if (a.lattice_id != b.lattice_id) return a.lattice_id < b.lattice_id;
    if (a.level != b.level) return a.level < b.level;
    return a.coords < b.coords;
}

std::size_t CubeAddressHash::operator()(const CubeAddress& q) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(q.level + 1024);
    for (int k = 0; k < q.dim; ++k) {
        h ^= static_cast<std::uint64_t>(q.coords[k]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 33));
}

std::string to_string(const CubeAddress& q) {
    std::string out = "(" + std::to_string(q.level) + ";";
    for (int k = 0; k < q.dim; ++k) out += (k ? "," : "") + std::to_string(q.coords[k]);
    return out + ")";
}

DyadicLattice::DyadicLattice(int dim, std::vector<double> offset, int k_min, int k_max, int id)
    : dim_(dim), offset_(std::move(offset)), k_min_(k_min), k_max_(k_max), id_(id) {
    check_dim(dim_);
    if (offset_.empty()) offset_.assign(dim_, 0.0);
    if (static_cast<int>(offset_.size()) != dim_) throw InvalidArgument("lattice offset has wrong dimension");
    if (k_min_ > k_max_) throw InvalidArgument("lattice window needs k_min <= k_max");
    if (k_min_ < -900 || k_max_ > 900) throw InvalidArgument("lattice level out of range");
}

std::pair<int, int> DyadicLattice::default_window(const DiscreteMeasure& mu) {
    if (mu.size() < 2) throw InvalidArgument("default lattice window needs at least two points");
    const int lo = static_cast<int>(std::floor(std::log2(mu.min_spacing()))) - 1;
    const int hi = static_cast<int>(std::ceil(std::log2(mu.diameter()))) + 1;
    return {lo, hi};
}

CubeAddress DyadicLattice::cube_of_point(const double* x, int level) const {
    if (level < k_min_ || level > k_max_) throw InvalidArgument("level outside the lattice window");
    CubeAddress q;
    q.level = level;
    q.dim = dim_;
    q.lattice_id = id_;
    for (int k = 0; k < dim_; ++k) {
        const double c = std::floor(std::ldexp(x[k] - offset_[k], -level));
        if (!(std::fabs(c) < static_cast<double>(kBias - 2)))
            throw ResourceLimit("cube coordinate out of the supported range");
        q.coords[k] = static_cast<std::int64_t>(c);
    }
    return q;
}

std::vector<double> DyadicLattice::lower_corner(const CubeAddress& q) const {
    std::vector<double> out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = offset_[k] + std::ldexp(static_cast<double>(q.coords[k]), q.level);
    return out;
}

std::vector<double> DyadicLattice::center(const CubeAddress& q) const {
    std::vector<double> out(dim_);
    for (int k = 0; k < dim_; ++k)
        out[k] = offset_[k] + std::ldexp(static_cast<double>(q.coords[k]) + 0.5, q.level);
    return out;
}

std::vector<CubeAddress> DyadicLattice::neighbors(const CubeAddress& q) const {
    std::vector<CubeAddress> out;
    if (q.level - 1 >= k_min_) {
        for (unsigned corner = 0; corner < (1u << dim_); ++corner) {
            CubeAddress c = q;
            c.level = q.level - 1;
            for (int k = 0; k < dim_; ++k) c.coords[k] = 2 * q.coords[k] + ((corner >> k) & 1u);
            out.push_back(c);
        }
    }
    if (q.level + 1 <= k_max_) out.push_back(q.parent());
    for (int k = 0; k < dim_; ++k) {
        for (int step : {-1, 1}) {
            CubeAddress c = q;
            c.coords[k] += step;
            out.push_back(c);
        }
    }
    return out;
}

std::optional<int> DyadicLattice::graph_distance(const CubeAddress& a, const CubeAddress& b, int cutoff) const {
    if (!in_window(a) || !in_window(b)) throw InvalidArgument("cube outside the lattice window");
    if (a == b) return 0;
    std::unordered_set<CubeAddress, CubeAddressHash> seen{a};
    std::vector<CubeAddress> frontier{a};
    for (int depth = 1; depth <= cutoff && !frontier.empty(); ++depth) {
        std::vector<CubeAddress> next;
        for (const auto& q : frontier) {
            for (const auto& n : neighbors(q)) {
                if (n == b) return depth;
                if (seen.insert(n).second) next.push_back(n);
            }
        }
        frontier = std::move(next);
    }
    return std::nullopt;
}

int DyadicLattice::distance(const CubeAddress& a, const CubeAddress& b) const {
    if (!in_window(a) || !in_window(b)) throw InvalidArgument("cube outside the lattice window");
    int best = std::numeric_limits<int>::max();
    for (int L = std::max(a.level, b.level); L <= k_max_; ++L) {
        const int vertical = (L - a.level) + (L - b.level);
        if (vertical >= best) break;
        std::int64_t lateral = 0;
        for (int k = 0; k < dim_; ++k)
            lateral += std::abs((a.coords[k] >> (L - a.level)) - (b.coords[k] >> (L - b.level)));
        if (lateral + vertical < best) best = static_cast<int>(std::min<std::int64_t>(lateral + vertical, best));
    }
    return best;
}

DyadicLattice DyadicLattice::rescaled(int e) const {
    std::vector<double> off(offset_);
    for (double& x : off) x = std::ldexp(x, e);
    return DyadicLattice(dim_, std::move(off), k_min_ + e, k_max_ + e, id_);
}

bool in_triple(const DyadicLattice& lattice, const CubeAddress& q, const double* x) {
    const CubeAddress c = lattice.cube_of_point(x, q.level);
    for (int k = 0; k < lattice.dim(); ++k)
        if (std::abs(c.coords[k] - q.coords[k]) > 1) return false;
    return true;
}

CubeDensity density(const DiscreteMeasure& mu, const DyadicLattice& lattice, const CubeAddress& q, double s) {
    if (mu.dim() != lattice.dim()) throw InvalidArgument("measure and lattice dimensions differ");
    const int d = lattice.dim();
    const double l = DyadicLattice::side(q.level);
    std::vector<double> lo = lattice.lower_corner(q), hi(d);
    for (int k = 0; k < d; ++k) {
        hi[k] = lo[k] + 2.5 * l;
        lo[k] -= 1.5 * l;
    }
    CompensatedSum acc;
    for (std::size_t i : mu.index().box(lo.data(), hi.data(), true))
        if (in_triple(lattice, q, mu.point(i))) acc.add(mu.weight(i));
    const double mass = acc.value();
    return {mass, mass / std::exp2(q.level * s)};
}

DensityTable::DensityTable(const DyadicLattice& lattice, double s, std::vector<CubeAddress> cubes,
                           std::vector<CubeDensity> values)
    : lattice_(lattice), s_(s), cubes_(std::move(cubes)), values_(std::move(values)) {
    if (cubes_.size() != values_.size()) throw InvalidArgument("density table size mismatch");
    lookup_.reserve(cubes_.size());
    morton_.resize(static_cast<std::size_t>(lattice_.k_max() - lattice_.k_min() + 1));
    const int d = lattice_.dim();
    for (std::size_t i = 0; i < cubes_.size(); ++i) {
        lookup_.emplace(cubes_[i], i);
        std::int64_t u[kMaxLatticeDim];
        for (int k = 0; k < d; ++k) u[k] = cubes_[i].coords[k] + kBias;
        morton_[cubes_[i].level - lattice_.k_min()].emplace_back(morton(u, d), i);
    }
    for (auto& level : morton_) std::sort(level.begin(), level.end());
}

std::optional<std::size_t> DensityTable::find(const CubeAddress& q) const {
    const auto it = lookup_.find(q);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

void DensityTable::descendants(const CubeAddress& anc, int level, std::vector<std::size_t>& out) const {
    const int t = anc.level - level;
    const int d = lattice_.dim();
    if (t <= 0 || t > 31) return;
    std::int64_t v[kMaxLatticeDim];
    for (int k = 0; k < d; ++k) {
        v[k] = anc.coords[k] + (kBias >> t);
        if (v[k] < 0 || v[k] >= (std::int64_t{1} << (32 - t))) return;
    }
    const Key base = morton(v, d);
    const Key lo = base << (d * t);
    const Key hi = (base + 1) << (d * t);
    const auto& keys = morton_[level - lattice_.k_min()];
    auto it = std::lower_bound(keys.begin(), keys.end(), lo,
                               [](const auto& e, Key k) { return e.first < k; });
    for (; it != keys.end() && it->first < hi; ++it) out.push_back(it->second);
}

void DensityTable::for_each_within(const CubeAddress& q, int R,
                                   const std::function<void(std::size_t, int)>& fn) const {
    if (R < 0 || empty()) return;
    const int d = lattice_.dim();
    std::vector<std::size_t> found;
    std::array<std::int64_t, kMaxLatticeDim> off{};
    const int kx = q.level;
    for (int ky = std::max(lattice_.k_min(), kx - R); ky <= std::min(lattice_.k_max(), kx + R); ++ky) {
        for (int L = std::max(kx, ky); L <= lattice_.k_max(); ++L) {
            const int m = R - (L - kx) - (L - ky);
            if (m < 0) break;
            const CubeAddress a = q.ancestor(L - kx);
            l1_ball(d, m, off, 0, [&] {
                CubeAddress b = a;
                for (int k = 0; k < d; ++k) b.coords[k] += off[k];
                if (L == ky) {
                    if (auto i = find(b)) found.push_back(*i);
                } else {
                    descendants(b, ky, found);
                }
            });
        }
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    for (std::size_t i : found) {
        const int dist = lattice_.distance(q, cubes_[i]);
        if (dist <= R) fn(i, dist);
    }
}

std::string DensityTable::to_csv() const {
    std::string out = "level";
    for (int k = 0; k < lattice_.dim(); ++k) out += ",c" + std::to_string(k);
    out += ",mass_3Q,density\n";
    char buf[64];
    for (std::size_t i = 0; i < size(); ++i) {
        out += std::to_string(cubes_[i].level);
        for (int k = 0; k < lattice_.dim(); ++k) out += "," + std::to_string(cubes_[i].coords[k]);
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", values_[i].mass, values_[i].density);
        out += buf;
    }
    return out;
}

DensityTable populated_cubes(const DiscreteMeasure& mu, const DyadicLattice& lattice, double s, std::size_t cap) {
    if (mu.dim() != lattice.dim()) throw InvalidArgument("measure and lattice dimensions differ");
    const int d = lattice.dim();
    int three_d = 1;
    for (int k = 0; k < d; ++k) three_d *= 3;
    std::vector<CubeAddress> cubes;
    std::vector<CubeDensity> values;
    for (int level = lattice.k_min(); level <= lattice.k_max(); ++level) {
        std::vector<std::pair<CubeAddress, std::size_t>> hits;
        hits.reserve(mu.size() * three_d);
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const CubeAddress c = lattice.cube_of_point(mu.point(i), level);
            for (int o = 0; o < three_d; ++o) {
                CubeAddress t = c;
                int rest = o;
                for (int k = 0; k < d; ++k, rest /= 3) t.coords[k] += rest % 3 - 1;
                hits.emplace_back(t, i);
            }
        }
        std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
            return a.first < b.first || (a.first == b.first && a.second < b.second);
        });
        const double scale = std::exp2(level * s);
        for (std::size_t a = 0; a < hits.size();) {
            std::size_t b = a;
            CompensatedSum acc;
            for (; b < hits.size() && hits[b].first == hits[a].first; ++b) acc.add(mu.weight(hits[b].second));
            const double mass = acc.value();
            if (mass > 0.0) {
                cubes.push_back(hits[a].first);
                values.push_back({mass, mass / scale});
                if (cubes.size() > cap)
                    throw ResourceLimit("populated cube count exceeds the cap of " + std::to_string(cap));
            }
            a = b;
        }
    }
    return DensityTable(lattice, s, std::move(cubes), std::move(values));
}

}  // namespace gmtlab
