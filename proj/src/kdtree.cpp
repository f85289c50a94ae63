#include "gmtlab/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "gmtlab/common.hpp"

namespace gmtlab {

KdTree::KdTree(const double* coords, std::size_t n, int dim, std::size_t leaf_size)
    : coords_(coords), n_(n), dim_(dim), perm_(n) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    if (n > 0) build(0, n, std::max<std::size_t>(leaf_size, 1));
}

int KdTree::build(std::size_t begin, std::size_t end, std::size_t leaf) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end});
    bounds_.resize(nodes_.size() * 2 * dim_);
    double* l = &bounds_[static_cast<std::size_t>(id) * 2 * dim_];
    double* h = l + dim_;
    for (int k = 0; k < dim_; ++k) {
        l[k] = std::numeric_limits<double>::infinity();
        h[k] = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = begin; i < end; ++i) {
        const double* p = pt(perm_[i]);
        for (int k = 0; k < dim_; ++k) {
            l[k] = std::min(l[k], p[k]);
            h[k] = std::max(h[k], p[k]);
        }
    }
    if (end - begin <= leaf) return id;
    int axis = 0;
    double widest = -1.0;
    for (int k = 0; k < dim_; ++k) {
        if (h[k] - l[k] > widest) {
            widest = h[k] - l[k];
            axis = k;
        }
    }
    if (widest <= 0.0) return id;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](std::size_t a, std::size_t b) { return pt(a)[axis] < pt(b)[axis]; });
    const int left = build(begin, mid, leaf);
    const int right = build(mid, end, leaf);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

double KdTree::box_min_d2(int node, const double* x) const {
    const double* l = lo(node);
    const double* h = hi(node);
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
        double g = 0.0;
        if (x[k] < l[k])
            g = l[k] - x[k];
        else if (x[k] > h[k])
            g = x[k] - h[k];
        s += g * g;
    }
    return s;
}

std::vector<std::size_t> KdTree::ball(const double* x, double r) const {
    std::vector<std::size_t> out;
    if (n_ == 0 || !(r > 0.0)) return out;
    const double r2 = r * r;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (box_min_d2(id, x) >= r2) continue;
        const Node& nd = nodes_[id];
        if (nd.left < 0) {
            for (std::size_t i = nd.begin; i < nd.end; ++i)
                if (squared_distance(pt(perm_[i]), x, dim_) < r2) out.push_back(perm_[i]);
        } else {
            stack.push_back(nd.left);
            stack.push_back(nd.right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool KdTree::any_in_ball(const double* x, double r, std::size_t skip) const {
    if (n_ == 0 || !(r > 0.0)) return false;
    const double r2 = r * r;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (box_min_d2(id, x) >= r2) continue;
        const Node& nd = nodes_[id];
        if (nd.left < 0) {
            for (std::size_t i = nd.begin; i < nd.end; ++i)
                if (perm_[i] != skip && squared_distance(pt(perm_[i]), x, dim_) < r2) return true;
        } else {
            stack.push_back(nd.left);
            stack.push_back(nd.right);
        }
    }
    return false;
}

std::vector<std::size_t> KdTree::box(const double* qlo, const double* qhi, bool closed) const {
    std::vector<std::size_t> out;
    if (n_ == 0) return out;
    auto inside = [&](const double* p) {
        for (int k = 0; k < dim_; ++k) {
            if (p[k] < qlo[k]) return false;
            if (closed ? p[k] > qhi[k] : p[k] >= qhi[k]) return false;
        }
        return true;
    };
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        const double* l = lo(id);
        const double* h = hi(id);
        bool disjoint = false;
        for (int k = 0; k < dim_ && !disjoint; ++k)
            disjoint = h[k] < qlo[k] || (closed ? l[k] > qhi[k] : l[k] >= qhi[k]);
        if (disjoint) continue;
        const Node& nd = nodes_[id];
        if (nd.left < 0) {
            for (std::size_t i = nd.begin; i < nd.end; ++i)
                if (inside(pt(perm_[i]))) out.push_back(perm_[i]);
        } else {
            stack.push_back(nd.left);
            stack.push_back(nd.right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<std::size_t, double> KdTree::nearest(const double* x, std::size_t skip) const {
    std::size_t best = n_;
    double best_d2 = std::numeric_limits<double>::infinity();
    if (n_ == 0) return {best, best_d2};
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (box_min_d2(id, x) > best_d2) continue;
        const Node& nd = nodes_[id];
        if (nd.left < 0) {
            for (std::size_t i = nd.begin; i < nd.end; ++i) {
                const std::size_t j = perm_[i];
                if (j == skip) continue;
                const double d2 = squared_distance(pt(j), x, dim_);
                if (d2 < best_d2 || (d2 == best_d2 && j < best)) {
                    best_d2 = d2;
                    best = j;
                }
            }
        } else {
            // Visit the nearer child last so it is popped first.
            const double dl = box_min_d2(nd.left, x);
            const double dr = box_min_d2(nd.right, x);
            if (dl < dr) {
                stack.push_back(nd.right);
                stack.push_back(nd.left);
            } else {
                stack.push_back(nd.left);
                stack.push_back(nd.right);
            }
        }
    }
    return {best, std::sqrt(best_d2)};
}

}  // namespace gmtlab
