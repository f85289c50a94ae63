#pragma once

#include <span>
#include <string>
#include <vector>

#include "gmtlab/lattice.hpp"

namespace gmtlab {

/// Finite undirected graph with adjacency lists kept in insertion order.
class Graph {
public:
    explicit Graph(std::size_t n = 0) : adj_(n) {}
    void add_edge(std::size_t u, std::size_t v);
    std::size_t size() const { return adj_.size(); }
    const std::vector<std::size_t>& neighbors(std::size_t u) const { return adj_[u]; }
    std::size_t max_degree() const;
    /// BFS distances from src (-1 when unreachable) and the discovery order.
    std::vector<int> bfs(std::size_t src, std::vector<std::size_t>* order = nullptr) const;

private:
    std::vector<std::vector<std::size_t>> adj_;
};

struct SeniorResult {
    std::vector<std::size_t> star;     ///< x* per vertex
    std::vector<double> best;          ///< nu(x*) 2^{-M d(x, x*)}
    std::vector<std::size_t> seniors;  ///< sorted
    std::vector<char> is_senior;
};

/// x* = argmax_y nu(y) 2^{-M d(x,y)}, ties to the earliest BFS discovery from x
/// (so x itself wins ties). x is senior iff no y has nu(x) < 2^{-M d(x,y)} nu(y).
/// The BFS stops at ring k once the running best is >= sup(nu) 2^{-Mk}.
SeniorResult senior_vertices(const Graph& g, std::span<const double> nu, double M);

/// All-pairs version without pruning.
SeniorResult senior_vertices_bruteforce(const Graph& g, std::span<const double> nu, double M);

struct DominationReport {
    double total = 0.0;
    double senior_total = 0.0;
    double ratio = 0.0;         ///< total / senior_total (1 when both vanish)
    double cluster_factor = 0.0;  ///< sum_k (2^{-M} D)^k, infinite if 2^{-M} D >= 1
    bool hypothesis = false;      ///< 2^{-M} D < 1
    std::vector<double> cluster_sums;  ///< per senior, aligned with seniors
    std::size_t pointwise_violations = 0;
    std::size_t cluster_violations = 0;
    SeniorResult seniors;
};

/// Checks nu(x) <= 2^{-M d(x,x*)} nu(x*) for every x and the cluster bound
/// sum_{x* = z} nu(x) <= nu(z) sum_k 2^{-Mk} #{x : d(x,z) = k}, with the ring
/// counts taken from the graph (each is at most D^k).
DominationReport domination_check(const Graph& g, std::span<const double> nu, double M);

/// Smallest integer M with (2^d + 2d + 1) 2^{-M} < 1.
int smallest_cube_M(int d);
/// Degree bound of the window cube graph.
int cube_degree_bound(int d);

struct CubeSeniors {
    std::vector<double> nu;            ///< D(3Q)^p mu(3Q) per table entry
    std::vector<std::size_t> star;     ///< table index of Q*
    std::vector<std::size_t> seniors;  ///< table indices
    std::vector<char> boundary_suspect;  ///< per senior: within r_guard levels of the window edge
};

/// Seniors of the cube graph over populated cubes with nu(Q) = D(3Q)^p mu(3Q).
/// Unpopulated cubes have nu = 0 and are never senior next to a populated cube.
/// Ties go to the nearer cube, then the earlier table entry (Q itself first).
CubeSeniors cube_senior_vertices(const DensityTable& table, double p, double M, int r_guard = 2);

/// Whether D(3Q') <= 2^{eps d(Q,Q')} D(3Q) (relative slack 1e-12) for every
/// populated Q' within graph distance R of table entry i.
bool is_epsilon_regular(const DensityTable& table, std::size_t i, double epsilon, int R);

/// Table indices of the populated cubes that are epsilon-regular within radius R.
std::vector<std::size_t> epsilon_regular_cubes(const DensityTable& table, double epsilon, int R);

struct ChainViolation {
    std::size_t senior = 0;  ///< table index
    std::size_t other = 0;   ///< offending table index
    int distance = 0;
    double excess = 0.0;     ///< D(3Q')^{p+1} / (2^{(M+s)d} D(3Q)^{p+1})
};

struct ChainReport {
    bool vacuous = false;
    double M = 0.0, p = 0.0, epsilon = 0.0;
    std::size_t cubes = 0;
    std::size_t seniors = 0;
    std::size_t boundary_suspect = 0;
    std::vector<ChainViolation> violations;
    double total = 0.0;          ///< sum of nu over populated cubes
    double senior_total = 0.0;
    double regular_total = 0.0;  ///< over epsilon-regular cubes (exhaustive radius)
    double domination_ratio = 0.0;  ///< total / senior_total
    double domination_bound = 0.0;  ///< 1 / (1 - 2^{-M} D)
    double regular_constant = 0.0;  ///< total / regular_total
    CubeSeniors detail;
};

/// Senior cubes for nu = D^p mu(3Q), each checked to be (M+s)/(p+1)-regular
/// against every populated cube in the window that could violate it.
ChainReport senior_regular_chain_check(const DensityTable& table, double M, double p);
ChainReport senior_regular_chain_check(const DiscreteMeasure& mu, const DyadicLattice& lattice, double s, double M,
                                       double p);

/// CSV with columns level, c0.., nu, star_level, star_c0.., boundary_suspect (seniors only).
std::string seniors_csv(const DensityTable& table, const CubeSeniors& seniors);

}  // namespace gmtlab
