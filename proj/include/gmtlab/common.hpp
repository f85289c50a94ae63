#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmtlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Thrown when a computation would exceed a configured size cap.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

/// Two distinct indices share a location where the operation needs them apart.
class CoincidentPoints : public Error {
public:
    CoincidentPoints(std::size_t i, std::size_t j);
    std::size_t first;
    std::size_t second;
};

/// An iterative method hit its iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual);
    double residual;
};

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Compensated sum of a range, in the given order.
double compensated_sum(std::span<const double> values);

inline double squared_distance(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

inline double distance(const double* a, const double* b, int dim) {
    return std::sqrt(squared_distance(a, b, dim));
}

inline double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Worker count: GMTLAB_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. Each index must
/// write only its own output slot; callers reduce afterwards in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Stable 64-bit FNV-1a hash, used for measure fingerprints in reports.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 14695981039346656037ULL);

std::string hex64(std::uint64_t v);

}  // namespace gmtlab
