#include "gmtlab/measure.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace gmtlab {

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<double> coords, std::vector<double> weights,
                                 Duplicates duplicates)
    : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
    if (dim_ < 1) throw InvalidArgument("measure dimension must be >= 1");
    if (coords_.size() != weights_.size() * static_cast<std::size_t>(dim_))
        throw InvalidArgument("coordinate count does not match weights * dim");
    for (double c : coords_)
        if (!std::isfinite(c)) throw InvalidArgument("non-finite coordinate");
    for (double w : weights_)
        if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("weights must be finite and >= 0");

    const std::size_t n = weights_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        const double* pa = point(a);
        const double* pb = point(b);
        for (int k = 0; k < dim_; ++k)
            if (pa[k] != pb[k]) return pa[k] < pb[k];
        return a < b;
    };
    auto same = [&](std::size_t a, std::size_t b) {
        return std::equal(point(a), point(a) + dim_, point(b));
    };
    std::sort(order.begin(), order.end(), less);

    std::vector<char> drop(n, 0);
    bool merged = false;
    for (std::size_t t = 1; t < n; ++t) {
        if (!same(order[t - 1], order[t])) continue;
        if (duplicates == Duplicates::reject)
            throw CoincidentPoints(std::min(order[t - 1], order[t]), std::max(order[t - 1], order[t]));
        // Runs are sorted by index, so the first member of a run keeps the mass.
        std::size_t head = t - 1;
        while (head > 0 && drop[order[head]]) --head;
        weights_[order[head]] += weights_[order[t]];
        drop[order[t]] = 1;
        merged = true;
    }
    if (merged) {
        std::vector<double> c, w;
        for (std::size_t i = 0; i < n; ++i) {
            if (drop[i]) continue;
            c.insert(c.end(), point(i), point(i) + dim_);
            w.push_back(weights_[i]);
        }
        coords_ = std::move(c);
        weights_ = std::move(w);
    }
    total_mass_ = compensated_sum(weights_);
    build_index();
}

void DiscreteMeasure::build_index() {
    index_ = std::make_unique<KdTree>(coords_.data(), weights_.size(), dim_);
    cache_ = std::make_unique<GeometryCache>();
}

DiscreteMeasure::DiscreteMeasure(const DiscreteMeasure& o)
    : dim_(o.dim_), coords_(o.coords_), weights_(o.weights_), total_mass_(o.total_mass_) {
    build_index();
}

DiscreteMeasure& DiscreteMeasure::operator=(const DiscreteMeasure& o) {
    if (this != &o) *this = DiscreteMeasure(o);
    return *this;
}

DiscreteMeasure::~DiscreteMeasure() = default;

double DiscreteMeasure::min_spacing() const {
    std::call_once(cache_->spacing_once, [&] {
        const std::size_t n = size();
        std::vector<double> nn(n, std::numeric_limits<double>::infinity());
        parallel_for(n, [&](std::size_t i) { nn[i] = index_->nearest(point(i), i).second; });
        cache_->min_spacing = n < 2 ? std::numeric_limits<double>::infinity()
                             : *std::min_element(nn.begin(), nn.end());
    });
    return cache_->min_spacing;
}

double DiscreteMeasure::diameter() const {
    std::call_once(cache_->diameter_once, [&] {
        const std::size_t n = size();
        std::vector<double> far(n, 0.0);
        parallel_for(n, [&](std::size_t i) {
            double best = 0.0;
            for (std::size_t j = i + 1; j < n; ++j)
                best = std::max(best, squared_distance(point(i), point(j), dim_));
            far[i] = best;
        });
        cache_->diameter = n < 2 ? 0.0 : std::sqrt(*std::max_element(far.begin(), far.end()));
    });
    return cache_->diameter;
}

DiscreteMeasure DiscreteMeasure::restricted(std::span<const std::size_t> indices) const {
    std::vector<double> c, w;
    c.reserve(indices.size() * dim_);
    w.reserve(indices.size());
    for (std::size_t i : indices) {
        c.insert(c.end(), point(i), point(i) + dim_);
        w.push_back(weights_[i]);
    }
    return DiscreteMeasure(dim_, std::move(c), std::move(w));
}

DiscreteMeasure DiscreteMeasure::scaled(double lambda, double mass_factor) const {
    std::vector<double> c(coords_);
    std::vector<double> w(weights_);
    for (double& x : c) x *= lambda;
    for (double& x : w) x *= mass_factor;
    return DiscreteMeasure(dim_, std::move(c), std::move(w));
}

std::uint64_t DiscreteMeasure::fingerprint() const {
    std::uint64_t h = fnv1a(&dim_, sizeof dim_);
    h = fnv1a(coords_.data(), coords_.size() * sizeof(double), h);
    return fnv1a(weights_.data(), weights_.size() * sizeof(double), h);
}

double ball_mass(const DiscreteMeasure& mu, const double* x, double r) {
    CompensatedSum s;
    for (std::size_t i : mu.index().ball(x, r)) s.add(mu.weight(i));
    return s.value();
}

double ball_mass_bruteforce(const DiscreteMeasure& mu, const double* x, double r) {
    CompensatedSum s;
    if (!(r > 0.0)) return 0.0;
    const double r2 = r * r;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (squared_distance(mu.point(i), x, mu.dim()) < r2) s.add(mu.weight(i));
    return s.value();
}

double energy(const DiscreteMeasure& mu, double s) {
    const std::size_t n = mu.size();
    const int d = mu.dim();
    std::vector<double> rows(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        CompensatedSum acc;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double r = distance(mu.point(i), mu.point(j), d);
            if (r == 0.0) throw CoincidentPoints(std::min(i, j), std::max(i, j));
            acc.add(mu.weight(i) * mu.weight(j) * std::pow(r, -(s - 1.0)));
        }
        rows[i] = acc.value();
    });
    return compensated_sum(rows);
}

std::vector<double> coordinate_energies(const DiscreteMeasure& mu, double s) {
    const std::size_t n = mu.size();
    const int d = mu.dim();
    std::vector<double> rows(n * d, 0.0);
    parallel_for(n, [&](std::size_t i) {
        std::vector<CompensatedSum> acc(d);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double r = distance(mu.point(i), mu.point(j), d);
            if (r == 0.0) throw CoincidentPoints(std::min(i, j), std::max(i, j));
            const double scale = mu.weight(i) * mu.weight(j) / std::pow(r, s + 1.0);
            for (int k = 0; k < d; ++k) {
                const double t = mu.point(i)[k] - mu.point(j)[k];
                acc[k].add(t * t * scale);
            }
        }
        for (int k = 0; k < d; ++k) rows[i * d + k] = acc[k].value();
    });
    std::vector<double> out(d);
    for (int k = 0; k < d; ++k) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < n; ++i) acc.add(rows[i * d + k]);
        out[k] = acc.value();
    }
    return out;
}

}  // namespace gmtlab
