#include "gmtlab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace gmtlab {

namespace {

void check_f(const DiscreteMeasure& mu, const KernelSpec& K, std::span<const double> f) {
    if (mu.dim() != K.dim()) throw InvalidArgument("kernel and measure dimensions differ");
    if (f.size() != mu.size()) throw InvalidArgument("need one function value per support point");
}

void check_delta(double delta) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be finite and >= 0");
}

// Row i of the direct transform, accumulated in index order.
void direct_row(const DiscreteMeasure& mu, const KernelSpec& K, double delta, std::span<const double> f,
                std::size_t i, double* out) {
    const int d = mu.dim(), m = K.codim();
    std::vector<CompensatedSum> acc(m);
    std::vector<double> diff(d), kv(m);
    const double* xi = mu.point(i);
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (j == i) continue;
        const double q = f[j] * mu.weight(j);
        if (q == 0.0) continue;
        const double* xj = mu.point(j);
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            diff[k] = xi[k] - xj[k];
            r2 += diff[k] * diff[k];
        }
        K.eval_regularized_unchecked(delta, diff.data(), r2, kv.data());
        for (int c = 0; c < m; ++c) acc[c].add(kv[c] * q);
    }
    for (int c = 0; c < m; ++c) out[c] = acc[c].value();
}

}  // namespace

TransformResult apply_T(const DiscreteMeasure& mu, const KernelSpec& K, double delta, std::span<const double> f) {
    check_f(mu, K, f);
    check_delta(delta);
    TransformResult r;
    r.codim = K.codim();
    r.delta = delta;
    r.values.assign(mu.size() * r.codim, 0.0);
    parallel_for(mu.size(), [&](std::size_t i) { direct_row(mu, K, delta, f, i, &r.values[i * r.codim]); });
    r.near_interactions = mu.size() * (mu.size() > 0 ? mu.size() - 1 : 0);
    return r;
}

std::vector<double> apply_abs_T(const DiscreteMeasure& mu, const KernelSpec& K, double delta,
                                std::span<const double> f) {
    check_f(mu, K, f);
    check_delta(delta);
    const int d = mu.dim(), m = K.codim();
    std::vector<double> out(mu.size());
    parallel_for(mu.size(), [&](std::size_t i) {
        CompensatedSum acc;
        std::vector<double> diff(d), kv(m);
        for (std::size_t j = 0; j < mu.size(); ++j) {
            if (j == i) continue;
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) {
                diff[k] = mu.point(i)[k] - mu.point(j)[k];
                r2 += diff[k] * diff[k];
            }
            K.eval_regularized_unchecked(delta, diff.data(), r2, kv.data());
            double n2 = 0.0;
            for (double v : kv) n2 += v * v;
            acc.add(std::sqrt(n2) * std::fabs(f[j]) * mu.weight(j));
        }
        out[i] = acc.value();
    });
    return out;
}

std::vector<double> transform_at(const DiscreteMeasure& mu, const KernelSpec& K, std::span<const double> f,
                                 std::span<const double> points) {
    check_f(mu, K, f);
    const int d = mu.dim(), m = K.codim();
    if (points.size() % d) throw InvalidArgument("evaluation points must have dim coordinates each");
    const std::size_t n = points.size() / d;
    std::vector<double> out(n * m);
    parallel_for(n, [&](std::size_t p) {
        std::vector<CompensatedSum> acc(m);
        std::vector<double> diff(d), kv(m);
        const double* x = &points[p * d];
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double q = f[j] * mu.weight(j);
            if (q == 0.0) continue;
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) {
                diff[k] = x[k] - mu.point(j)[k];
                r2 += diff[k] * diff[k];
            }
            if (r2 == 0.0) throw CoincidentPoints(p, j);
            K.eval_unchecked(diff.data(), r2, kv.data());
            for (int c = 0; c < m; ++c) acc[c].add(kv[c] * q);
        }
        for (int c = 0; c < m; ++c) out[p * m + c] = acc[c].value();
    });
    return out;
}

// ---------------------------------------------------------------------------
// Tree code

namespace {

struct Cell {
    std::size_t begin, end;
    int left = -1, right = -1;
    double abs_charge = 0.0;  // sum |q_j|
    double charge = 0.0;      // sum q_j
    double radius = 0.0;      // max |x_j - c|
    double dipole = 0.0;      // |sum q_j (x_j - c)|
    double second = 0.0;      // sum |q_j| |x_j - c|^2
};

class ChargeTree {
public:
    ChargeTree(const DiscreteMeasure& mu, std::span<const double> q, std::size_t leaf)
        : mu_(mu), q_(q), d_(mu.dim()), perm_(mu.size()) {
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        if (!perm_.empty()) build(0, perm_.size(), std::max<std::size_t>(leaf, 1));
    }

    const std::vector<Cell>& cells() const { return cells_; }
    const double* center(int c) const { return &centers_[static_cast<std::size_t>(c) * d_]; }
    const std::vector<std::size_t>& perm() const { return perm_; }
    bool degenerate() const { return cells_.empty() || cells_[0].left < 0; }

private:
    int build(std::size_t begin, std::size_t end, std::size_t leaf) {
        const int id = static_cast<int>(cells_.size());
        cells_.push_back({begin, end});
        centers_.resize(cells_.size() * d_, 0.0);
        Cell& c = cells_[id];
        std::vector<double> lo(d_, INFINITY), hi(d_, -INFINITY), ctr(d_, 0.0);
        CompensatedSum a, s;
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t j = perm_[t];
            const double* x = mu_.point(j);
            for (int k = 0; k < d_; ++k) {
                lo[k] = std::min(lo[k], x[k]);
                hi[k] = std::max(hi[k], x[k]);
                ctr[k] += std::fabs(q_[j]) * x[k];
            }
            a.add(std::fabs(q_[j]));
            s.add(q_[j]);
        }
        c.abs_charge = a.value();
        c.charge = s.value();
        for (int k = 0; k < d_; ++k) ctr[k] = c.abs_charge > 0.0 ? ctr[k] / c.abs_charge : 0.5 * (lo[k] + hi[k]);
        // Keep the centre inside the bounding box despite rounding.
        for (int k = 0; k < d_; ++k) ctr[k] = std::clamp(ctr[k], lo[k], hi[k]);
        std::vector<double> dip(d_, 0.0);
        double r2max = 0.0, second = 0.0;
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t j = perm_[t];
            const double r2 = squared_distance(mu_.point(j), ctr.data(), d_);
            r2max = std::max(r2max, r2);
            second += std::fabs(q_[j]) * r2;
            for (int k = 0; k < d_; ++k) dip[k] += q_[j] * (mu_.point(j)[k] - ctr[k]);
        }
        // Round the certified quantities up slightly so rounding never breaks the bound.
        c.radius = std::sqrt(r2max) * (1.0 + 1e-12);
        c.second = second * (1.0 + 1e-12);
        c.dipole = norm(dip) * (1.0 + 1e-12) + 1e-15 * c.abs_charge * c.radius;
        std::copy(ctr.begin(), ctr.end(), centers_.begin() + static_cast<std::ptrdiff_t>(id) * d_);
        if (end - begin <= leaf) return id;
        int axis = 0;
        double widest = -1.0;
        for (int k = 0; k < d_; ++k)
            if (hi[k] - lo[k] > widest) {
                widest = hi[k] - lo[k];
                axis = k;
            }
        if (widest <= 0.0) return id;
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                         [&](std::size_t x, std::size_t y) {
                             const double px = mu_.point(x)[axis], py = mu_.point(y)[axis];
                             return px < py || (px == py && x < y);
                         });
        const int l = build(begin, mid, leaf);
        const int r = build(mid, end, leaf);
        cells_[id].left = l;
        cells_[id].right = r;
        return id;
    }

    const DiscreteMeasure& mu_;
    std::span<const double> q_;
    int d_;
    std::vector<std::size_t> perm_;
    std::vector<Cell> cells_;
    std::vector<double> centers_;
};

}  // namespace

TransformResult apply_T_fast(const DiscreteMeasure& mu, const KernelSpec& K, double delta,
                             std::span<const double> f, const TreeOptions& options) {
    check_f(mu, K, f);
    check_delta(delta);
    if (!(options.theta > 0.0 && options.theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
    if (!(options.tolerance > 0.0)) throw InvalidArgument("tree tolerance must be > 0");
    const std::size_t n = mu.size();
    std::vector<double> q(n);
    for (std::size_t j = 0; j < n; ++j) q[j] = f[j] * mu.weight(j);
    ChargeTree tree(mu, q, options.leaf_size);
    if (!K.has_derivative_bounds() || tree.degenerate()) return apply_T(mu, K, delta, f);

    const int d = mu.dim(), m = K.codim();
    const double s = K.s();
    const double c1 = K.first_derivative_constant(), c2 = K.second_derivative_constant();
    const auto& cells = tree.cells();
    const auto& perm = tree.perm();

    TransformResult r;
    r.codim = m;
    r.delta = delta;
    r.accuracy = TransformAccuracy::tree;
    r.theta = options.theta;
    r.values.assign(n * m, 0.0);
    std::vector<double> ratio(n, 0.0);
    std::vector<std::size_t> far(n, 0), near(n, 0);

    parallel_for(n, [&](std::size_t i) {
        const double* xi = mu.point(i);
        std::vector<CompensatedSum> acc(m);
        CompensatedSum err, lower;
        std::vector<double> diff(d), kv(m);
        std::vector<int> stack{0};
        while (!stack.empty()) {
            const int id = stack.back();
            stack.pop_back();
            const Cell& c = cells[id];
            if (c.abs_charge == 0.0) continue;
            const double* ctr = tree.center(id);
            const double dist = distance(xi, ctr, d);
            const double gap = dist - c.radius;
            if (c.radius <= options.theta * dist && gap > 0.0 && gap >= delta) {
                const double e = c1 * c.dipole / std::pow(dist, s + 1.0) +
                                 0.5 * c2 * c.second / std::pow(gap, s + 2.0);
                const double lb = c.abs_charge * std::pow(dist + c.radius, -s);
                if (e <= options.tolerance * lb) {
                    for (int k = 0; k < d; ++k) diff[k] = xi[k] - ctr[k];
                    K.eval_unchecked(diff.data(), dist * dist, kv.data());
                    for (int k = 0; k < m; ++k) acc[k].add(kv[k] * c.charge);
                    err.add(e);
                    lower.add(lb);
                    ++far[i];
                    continue;
                }
            }
            if (c.left >= 0) {
                stack.push_back(c.right);
                stack.push_back(c.left);
                continue;
            }
            for (std::size_t t = c.begin; t < c.end; ++t) {
                const std::size_t j = perm[t];
                if (j == i || q[j] == 0.0) continue;
                double r2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    diff[k] = xi[k] - mu.point(j)[k];
                    r2 += diff[k] * diff[k];
                }
                K.eval_regularized_unchecked(delta, diff.data(), r2, kv.data());
                double n2 = 0.0;
                for (int k = 0; k < m; ++k) {
                    acc[k].add(kv[k] * q[j]);
                    n2 += kv[k] * kv[k];
                }
                lower.add(std::sqrt(n2) * std::fabs(q[j]));
                ++near[i];
            }
        }
        for (int k = 0; k < m; ++k) r.values[i * m + k] = acc[k].value();
        ratio[i] = lower.value() > 0.0 ? err.value() / lower.value() : 0.0;
    });
    // Truncation bound plus an allowance for summation rounding.
    r.error_bound = *std::max_element(ratio.begin(), ratio.end()) + 1e-13;
    r.far_interactions = std::accumulate(far.begin(), far.end(), std::size_t{0});
    r.near_interactions = std::accumulate(near.begin(), near.end(), std::size_t{0});
    return r;
}

// ---------------------------------------------------------------------------
// Operator norm

std::vector<double> default_delta_grid(const DiscreteMeasure& mu) {
    if (mu.size() < 2) return {1.0};
    std::vector<double> grid;
    const double diam = mu.diameter();
    for (double delta = 0.5 * mu.min_spacing();; delta *= 2.0) {
        grid.push_back(delta);
        if (delta >= diam) break;
    }
    return grid;
}

namespace {

class WeightedOperator {
public:
    WeightedOperator(const DiscreteMeasure& mu, const KernelSpec& K, double delta, std::size_t cache_limit)
        : mu_(mu), K_(K), delta_(delta), n_(mu.size()), m_(K.codim()) {
        if (n_ * n_ * static_cast<std::size_t>(m_) <= cache_limit) {
            matrix_.resize(n_ * n_ * m_);
            parallel_for(n_, [&](std::size_t i) {
                for (std::size_t j = 0; j < n_; ++j) entry(i, j, &matrix_[(i * n_ + j) * m_]);
            });
        }
    }

    // (Tf)_i = sum_j K(x_i - x_j) f_j w_j
    void apply(const std::vector<double>& f, std::vector<double>& out) const {
        out.assign(n_ * m_, 0.0);
        parallel_for(n_, [&](std::size_t i) {
            std::vector<double> kv(m_);
            for (std::size_t j = 0; j < n_; ++j) {
                const double q = f[j] * mu_.weight(j);
                if (q == 0.0) continue;
                const double* k = lookup(i, j, kv.data());
                for (int c = 0; c < m_; ++c) out[i * m_ + c] += k[c] * q;
            }
        });
    }

    // (T*g)_j = sum_i <K(x_i - x_j), g_i> w_i
    void adjoint(const std::vector<double>& g, std::vector<double>& out) const {
        out.assign(n_, 0.0);
        parallel_for(n_, [&](std::size_t j) {
            std::vector<double> kv(m_);
            double sum = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (mu_.weight(i) == 0.0) continue;
                const double* k = lookup(i, j, kv.data());
                double dot = 0.0;
                for (int c = 0; c < m_; ++c) dot += k[c] * g[i * m_ + c];
                sum += dot * mu_.weight(i);
            }
            out[j] = sum;
        });
    }

private:
    void entry(std::size_t i, std::size_t j, double* out) const {
        const int d = mu_.dim();
        double diff[16];
        std::vector<double> big;
        double* x = diff;
        if (d > 16) {
            big.resize(d);
            x = big.data();
        }
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            x[k] = mu_.point(i)[k] - mu_.point(j)[k];
            r2 += x[k] * x[k];
        }
        if (i == j) r2 = 0.0;
        K_.eval_regularized_unchecked(delta_, x, r2, out);
    }
    const double* lookup(std::size_t i, std::size_t j, double* scratch) const {
        if (!matrix_.empty()) return &matrix_[(i * n_ + j) * m_];
        entry(i, j, scratch);
        return scratch;
    }

    const DiscreteMeasure& mu_;
    const KernelSpec& K_;
    double delta_;
    std::size_t n_;
    int m_;
    std::vector<double> matrix_;
};

double weighted_norm(const DiscreteMeasure& mu, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * v[i] * mu.weight(i);
    return std::sqrt(s);
}

}  // namespace

namespace {

// Cyclic Jacobi on a small symmetric matrix (row-major b x b). Returns the
// eigenvalues in descending order with matching eigenvector columns in `vec`.
std::vector<double> small_symmetric_eigen(std::vector<double> a, int b, std::vector<double>& vec) {
    vec.assign(static_cast<std::size_t>(b) * b, 0.0);
    for (int i = 0; i < b; ++i) vec[i * b + i] = 1.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j) (i == j ? diag : off) += a[i * b + j] * a[i * b + j];
        if (off <= 1e-32 * diag || off == 0.0) break;
        for (int p = 0; p < b; ++p)
            for (int q = p + 1; q < b; ++q) {
                const double apq = a[p * b + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * b + q] - a[p * b + p]) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (int k = 0; k < b; ++k) {
                    const double akp = a[k * b + p], akq = a[k * b + q];
                    a[k * b + p] = c * akp - sn * akq;
                    a[k * b + q] = sn * akp + c * akq;
                }
                for (int k = 0; k < b; ++k) {
                    const double apk = a[p * b + k], aqk = a[q * b + k];
                    a[p * b + k] = c * apk - sn * aqk;
                    a[q * b + k] = sn * apk + c * aqk;
                }
                for (int k = 0; k < b; ++k) {
                    const double vkp = vec[k * b + p], vkq = vec[k * b + q];
                    vec[k * b + p] = c * vkp - sn * vkq;
                    vec[k * b + q] = sn * vkp + c * vkq;
                }
            }
    }
    std::vector<int> order(b);
    for (int i = 0; i < b; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x * b + x] > a[y * b + y]; });
    std::vector<double> vals(b), sorted(vec.size());
    for (int c = 0; c < b; ++c) {
        vals[c] = a[order[c] * b + order[c]];
        for (int k = 0; k < b; ++k) sorted[k * b + c] = vec[k * b + order[c]];
    }
    vec = std::move(sorted);
    return vals;
}

double weighted_dot(const DiscreteMeasure& mu, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * mu.weight(i);
    return s;
}

// Modified Gram-Schmidt in L^2(mu), twice for stability. Columns that
// collapse are replaced by fresh random vectors.
void orthonormalize(const DiscreteMeasure& mu, std::vector<std::vector<double>>& cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            const double before = weighted_norm(mu, cols[c]);
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t p = 0; p < c; ++p) {
                    const double h = weighted_dot(mu, cols[p], cols[c]);
                    for (std::size_t i = 0; i < cols[c].size(); ++i) cols[c][i] -= h * cols[p][i];
                }
            const double after = weighted_norm(mu, cols[c]);
            if (after > 1e-10 * before && after > 0.0) {
                for (double& x : cols[c]) x /= after;
                break;
            }
            for (double& x : cols[c]) x = u(rng);
        }
    }
}

}  // namespace

NormEntry operator_norm_at(const DiscreteMeasure& mu, const KernelSpec& K, double delta, const PowerOptions& options) {
    if (mu.dim() != K.dim()) throw InvalidArgument("kernel and measure dimensions differ");
    if (!(delta > 0.0)) throw InvalidArgument("operator norm needs delta > 0");
    if (mu.empty()) throw InvalidArgument("operator norm needs a nonempty measure");
    if (options.block < 1) throw InvalidArgument("block size must be positive");
    NormEntry entry;
    entry.delta = delta;
    const std::size_t n = mu.size();
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i) positive += mu.weight(i) > 0.0;
    if (positive == 0) return entry;
    const int b = static_cast<int>(std::min<std::size_t>(options.block, positive));
    WeightedOperator T(mu, K, delta, options.cache_limit);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> V(b, std::vector<double>(n)), W(b), X(b, std::vector<double>(n)),
        AX(b, std::vector<double>(n));
    for (auto& v : V)
        for (double& x : v) x = u(rng);
    orthonormalize(mu, V, rng);
    std::vector<double> tv, H(static_cast<std::size_t>(b) * b), Y;
    for (int it = 1; it <= options.max_iterations; ++it) {
        for (int c = 0; c < b; ++c) {
            T.apply(V[c], tv);
            T.adjoint(tv, W[c]);
        }
        for (int p = 0; p < b; ++p)
            for (int q = p; q < b; ++q)
                H[p * b + q] = H[q * b + p] =
                    0.5 * (weighted_dot(mu, V[p], W[q]) + weighted_dot(mu, V[q], W[p]));
        const auto theta = small_symmetric_eigen(H, b, Y);
        for (int c = 0; c < b; ++c) {
            std::fill(X[c].begin(), X[c].end(), 0.0);
            std::fill(AX[c].begin(), AX[c].end(), 0.0);
            for (int k = 0; k < b; ++k) {
                const double y = Y[k * b + c];
                for (std::size_t i = 0; i < n; ++i) {
                    X[c][i] += y * V[k][i];
                    AX[c][i] += y * W[k][i];
                }
            }
        }
        const double lambda = theta[0];
        entry.iterations = it;
        if (!(lambda > 0.0)) {
            // T*T vanishes on a random subspace: T = 0 up to a null set of starts.
            entry.norm = 0.0;
            entry.residual = 0.0;
            return entry;
        }
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = AX[0][i] - lambda * X[0][i];
            res += t * t * mu.weight(i);
        }
        entry.residual = std::sqrt(res) / lambda;
        entry.norm = std::sqrt(lambda);
        if (entry.residual <= options.rtol) return entry;
        V = AX;
        orthonormalize(mu, V, rng);
    }
    throw ConvergenceError("power iteration did not converge", entry.residual);
}

OperatorNormReport operator_norm(const DiscreteMeasure& mu, const KernelSpec& K, std::vector<double> delta_grid,
                                 const PowerOptions& options) {
    if (delta_grid.empty()) delta_grid = default_delta_grid(mu);
    OperatorNormReport rep;
    for (double delta : delta_grid) {
        rep.entries.push_back(operator_norm_at(mu, K, delta, options));
        if (rep.entries.size() == 1 || rep.entries.back().norm > rep.sup) {
            rep.sup = rep.entries.back().norm;
            rep.sup_delta = delta;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Pairings

std::vector<double> bilinear_pairing(const DiscreteMeasure& mu, const KernelSpec& K, std::span<const double> f,
                                     std::span<const double> phi) {
    check_f(mu, K, f);
    check_f(mu, K, phi);
    const int d = mu.dim(), m = K.codim();
    const std::size_t n = mu.size();
    std::vector<double> rows(n * m, 0.0);
    parallel_for(n, [&](std::size_t i) {
        std::vector<CompensatedSum> acc(m);
        std::vector<double> diff(d), kv(m);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double h = 0.5 * (f[j] * phi[i] - phi[j] * f[i]);
            if (h == 0.0) continue;
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) {
                diff[k] = mu.point(i)[k] - mu.point(j)[k];
                r2 += diff[k] * diff[k];
            }
            K.eval_unchecked(diff.data(), r2, kv.data());
            const double ww = h * mu.weight(i) * mu.weight(j);
            for (int c = 0; c < m; ++c) acc[c].add(kv[c] * ww);
        }
        for (int c = 0; c < m; ++c) rows[i * m + c] = acc[c].value();
    });
    std::vector<double> out(m);
    for (int c = 0; c < m; ++c) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < n; ++i) acc.add(rows[i * m + c]);
        out[c] = acc.value();
    }
    return out;
}

PairingField::PairingField(const DiscreteMeasure& mu, const KernelSpec& K, std::span<const double> phi)
    : mu_(&mu), codim_(K.codim()), field_(apply_T(mu, K, 0.0, phi).values) {}

std::vector<double> PairingField::pair(std::span<const double> f) const {
    if (f.size() != mu_->size()) throw InvalidArgument("need one function value per support point");
    std::vector<double> out(codim_);
    for (int c = 0; c < codim_; ++c) {
        CompensatedSum acc;
        for (std::size_t j = 0; j < f.size(); ++j) acc.add(-f[j] * mu_->weight(j) * field_[j * codim_ + c]);
        out[c] = acc.value();
    }
    return out;
}

bool has_mean_zero(const DiscreteMeasure& mu, std::span<const double> f) {
    if (f.size() != mu.size()) throw InvalidArgument("need one function value per support point");
    CompensatedSum s, a;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s.add(f[i] * mu.weight(i));
        a.add(std::fabs(f[i]) * mu.weight(i));
    }
    return std::fabs(s.value()) <= 1e-12 * a.value();
}

DefectReport reflectionless_defect(const DiscreteMeasure& mu, const KernelSpec& K,
                                   const std::vector<std::vector<double>>& dictionary, double R) {
    if (dictionary.empty()) throw InvalidArgument("defect needs a nonempty dictionary");
    for (const auto& f : dictionary)
        if (!has_mean_zero(mu, f)) throw InvalidArgument("dictionary function does not have mu-mean zero");
    std::vector<double> phi(mu.size(), 1.0);
    if (std::isfinite(R)) {
        const std::vector<double> origin(mu.dim(), 0.0);
        for (std::size_t i = 0; i < mu.size(); ++i)
            phi[i] = squared_distance(mu.point(i), origin.data(), mu.dim()) < R * R ? 1.0 : 0.0;
    }
    const PairingField field(mu, K, phi);
    DefectReport rep;
    rep.values.resize(dictionary.size());
    for (std::size_t t = 0; t < dictionary.size(); ++t) {
        const auto p = field.pair(dictionary[t]);
        rep.values[t] = norm(p);
        if (t == 0 || rep.values[t] > rep.defect) {
            rep.defect = rep.values[t];
            rep.argmax = t;
            rep.pairing = p;
        }
    }
    return rep;
}

namespace {

double smooth_bump(const double* x, const double* c, double r, int d) {
    const double t = 1.0 - squared_distance(x, c, d) / (r * r);
    return t > 0.0 ? t * t * t : 0.0;
}

}  // namespace

std::vector<std::vector<double>> bump_dictionary(const DiscreteMeasure& mu, std::span<const double> centers, double r,
                                                 std::span<const double> anchor, double anchor_r, bool modulated) {
    const int d = mu.dim();
    const std::size_t n = mu.size();
    if (centers.size() % d != 0 || anchor.size() != static_cast<std::size_t>(d))
        throw InvalidArgument("centers and anchor must have the measure's dimension");
    if (!(r > 0.0) || !(anchor_r > 0.0)) throw InvalidArgument("bump radii must be positive");
    std::vector<double> a(n);
    CompensatedSum am;
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = smooth_bump(mu.point(i), anchor.data(), anchor_r, d);
        am.add(a[i] * mu.weight(i));
    }
    std::vector<std::vector<double>> out;
    if (!(am.value() > 0.0)) return out;
    auto emit = [&](std::vector<double> g) {
        CompensatedSum gm;
        for (std::size_t i = 0; i < n; ++i) gm.add(g[i] * mu.weight(i));
        const double k = gm.value() / am.value();
        for (std::size_t i = 0; i < n; ++i) g[i] -= k * a[i];
        out.push_back(std::move(g));
    };
    for (std::size_t c = 0; c < centers.size() / d; ++c) {
        const double* ctr = &centers[c * d];
        std::vector<double> g(n), m(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = smooth_bump(mu.point(i), ctr, r, d);
            m[i] = g[i] * (mu.point(i)[0] - ctr[0]) / r;
        }
        emit(std::move(g));
        if (modulated) emit(std::move(m));
    }
    return out;
}

std::vector<double> ring_centers(int dim, std::size_t n, std::span<const double> radii) {
    if (dim < 1) throw InvalidArgument("dimension must be positive");
    std::vector<double> out;
    for (double rho : radii)
        for (std::size_t k = 0; k < n; ++k) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            std::vector<double> c(dim, 0.0);
            c[0] = rho * std::cos(t);
            if (dim > 1) c[1] = rho * std::sin(t);
            out.insert(out.end(), c.begin(), c.end());
        }
    return out;
}

}  // namespace gmtlab
