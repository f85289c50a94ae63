#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gmtlab/measure.hpp"

namespace gmtlab {

/// Cube coordinates are stored inline; lattices support d <= kMaxLatticeDim.
inline constexpr int kMaxLatticeDim = 4;

/// Q = offset + 2^level * (coords + [0,1)^d).
struct CubeAddress {
    int level = 0;
    int dim = 0;
    std::array<std::int64_t, kMaxLatticeDim> coords{};
    int lattice_id = 0;

    CubeAddress parent() const;
    /// Ancestor `up` levels above (up >= 0).
    CubeAddress ancestor(int up) const;

    friend bool operator==(const CubeAddress&, const CubeAddress&) = default;
    /// Orders by lattice, level, then coordinates.
    friend bool operator<(const CubeAddress& a, const CubeAddress& b);
};

struct CubeAddressHash {
    std::size_t operator()(const CubeAddress& q) const noexcept;
};

std::string to_string(const CubeAddress& q);

class DyadicLattice {
public:
    DyadicLattice(int dim, std::vector<double> offset, int k_min, int k_max, int id = 0);

    /// Window [floor(log2(min spacing)) - 1, ceil(log2(diameter)) + 1] for a
    /// measure with at least two points.
    static std::pair<int, int> default_window(const DiscreteMeasure& mu);

    int dim() const { return dim_; }
    int k_min() const { return k_min_; }
    int k_max() const { return k_max_; }
    int id() const { return id_; }
    const std::vector<double>& offset() const { return offset_; }
    bool in_window(const CubeAddress& q) const { return q.level >= k_min_ && q.level <= k_max_; }

    static double side(int level) { return std::ldexp(1.0, level); }
    /// Level-k cube whose half-open box contains x - offset.
    CubeAddress cube_of_point(const double* x, int level) const;
    std::vector<double> lower_corner(const CubeAddress& q) const;
    std::vector<double> center(const CubeAddress& q) const;

    /// Children (if above k_min), parent (if below k_max) and the 2d face neighbours.
    std::vector<CubeAddress> neighbors(const CubeAddress& q) const;

    /// Breadth-first distance in the window graph, nullopt if it exceeds `cutoff`.
    std::optional<int> graph_distance(const CubeAddress& a, const CubeAddress& b, int cutoff) const;

    /// Same distance in closed form: min over L >= max(k, k') of
    /// (L - k) + (L - k') + |A_L(a) - A_L(b)|_1, A_L the level-L ancestor.
    int distance(const CubeAddress& a, const CubeAddress& b) const;

    /// Lattice rescaled by 2^e (offset scaled, window shifted by e).
    DyadicLattice rescaled(int e) const;

private:
    int dim_;
    std::vector<double> offset_;
    int k_min_, k_max_, id_;
};

/// Whether x lies in the half-open triple 3Q, i.e. its level-k cube is within
/// one step of Q in every coordinate.
bool in_triple(const DyadicLattice& lattice, const CubeAddress& q, const double* x);

/// (mu(3Q), mu(3Q) / l(Q)^s) with 3Q half-open, summed in index order.
struct CubeDensity {
    double mass = 0.0;
    double density = 0.0;
};
CubeDensity density(const DiscreteMeasure& mu, const DyadicLattice& lattice, const CubeAddress& q, double s);

/// Populated cubes (mu(3Q) > 0) over the window, sorted by address.
class DensityTable {
public:
    DensityTable(const DyadicLattice& lattice, double s, std::vector<CubeAddress> cubes,
                 std::vector<CubeDensity> values);

    const DyadicLattice& lattice() const { return lattice_; }
    double s() const { return s_; }
    std::size_t size() const { return cubes_.size(); }
    bool empty() const { return cubes_.empty(); }
    const CubeAddress& cube(std::size_t i) const { return cubes_[i]; }
    const CubeDensity& value(std::size_t i) const { return values_[i]; }
    const std::vector<CubeAddress>& cubes() const { return cubes_; }
    std::optional<std::size_t> find(const CubeAddress& q) const;

    /// Calls fn(index, distance) for every populated cube within graph distance
    /// R of q (q itself included when populated). Each cube is reported once.
    void for_each_within(const CubeAddress& q, int R,
                         const std::function<void(std::size_t, int)>& fn) const;

    /// CSV with columns level, c0..c{d-1}, mass_3Q, density.
    std::string to_csv() const;

private:
    void descendants(const CubeAddress& anc, int level, std::vector<std::size_t>& out) const;

    DyadicLattice lattice_;
    double s_;
    std::vector<CubeAddress> cubes_;
    std::vector<CubeDensity> values_;
    std::unordered_map<CubeAddress, std::size_t, CubeAddressHash> lookup_;
    // Per level: (Morton key of biased coords, table index), sorted by key.
    std::vector<std::vector<std::pair<unsigned __int128, std::size_t>>> morton_;
};

/// Default cap on the number of populated cubes.
inline constexpr std::size_t kDefaultCubeCap = 5'000'000;

/// Buckets points per cube and aggregates over the 3^d neighbourhood.
/// Throws ResourceLimit once the table would exceed `cap` cubes.
DensityTable populated_cubes(const DiscreteMeasure& mu, const DyadicLattice& lattice, double s,
                             std::size_t cap = kDefaultCubeCap);

}  // namespace gmtlab
