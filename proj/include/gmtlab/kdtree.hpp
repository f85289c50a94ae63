#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace gmtlab {

/// Static kd-tree over a flat coordinate array (n points, dim coordinates each).
///
/// Every query reports indices in increasing order, so sums taken over a
/// query result match a brute-force scan in index order bit for bit.
class KdTree {
public:
    KdTree() = default;
    KdTree(const double* coords, std::size_t n, int dim, std::size_t leaf_size = 16);

    /// Indices i with |p_i - x| < r (open ball), sorted.
    std::vector<std::size_t> ball(const double* x, double r) const;

    /// True iff some point (other than `skip`) satisfies |p_i - x| < r.
    bool any_in_ball(const double* x, double r, std::size_t skip = static_cast<std::size_t>(-1)) const;

    /// Indices with lo <= p_i <= hi (closed) or lo <= p_i < hi (half-open), sorted.
    std::vector<std::size_t> box(const double* lo, const double* hi, bool closed) const;

    /// Nearest point to x, skipping index `skip`. Returns (index, distance);
    /// index is size() when the tree holds no eligible point.
    std::pair<std::size_t, double> nearest(const double* x,
                                           std::size_t skip = static_cast<std::size_t>(-1)) const;

    std::size_t size() const { return n_; }

private:
    struct Node {
        std::size_t begin, end;
        int left = -1, right = -1;
    };
    int build(std::size_t begin, std::size_t end, std::size_t leaf);
    double box_min_d2(int node, const double* x) const;
    const double* lo(int node) const { return &bounds_[static_cast<std::size_t>(node) * 2 * dim_]; }
    const double* hi(int node) const { return lo(node) + dim_; }
    const double* pt(std::size_t i) const { return coords_ + i * static_cast<std::size_t>(dim_); }

    const double* coords_ = nullptr;
    std::size_t n_ = 0;
    int dim_ = 0;
    std::vector<std::size_t> perm_;
    std::vector<Node> nodes_;
    std::vector<double> bounds_;
};

}  // namespace gmtlab
