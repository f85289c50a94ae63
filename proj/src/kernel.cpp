#include "gmtlab/kernel.hpp"

#include <algorithm>

namespace gmtlab {

KernelSpec::KernelSpec(KernelVariant v, int d, double s, double alpha, int codim, KernelEvaluator fn)
    : variant_(v), dim_(d), s_(s), alpha_(alpha), codim_(codim), unit_s_(s == 1.0), custom_(std::move(fn)) {
    if (d < 1) throw InvalidArgument("kernel dimension must be >= 1");
    if (!(s > 0.0 && s < d)) throw InvalidArgument("kernel exponent s must lie in (0, d)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("Hoelder order alpha must lie in (0, 1]");
    if (codim < 1) throw InvalidArgument("kernel codomain dimension must be >= 1");
}

KernelSpec KernelSpec::riesz(int d, double s, double alpha) {
    return KernelSpec(KernelVariant::riesz, d, s, alpha, d, {});
}

KernelSpec KernelSpec::planar_conjugate(double alpha) {
    return KernelSpec(KernelVariant::planar_conjugate, 2, 1.0, alpha, 2, {});
}

KernelSpec KernelSpec::custom(int d, double s, double alpha, int codim, KernelEvaluator fn) {
    if (!fn) throw InvalidArgument("custom kernel needs an evaluator");
    return KernelSpec(KernelVariant::custom, d, s, alpha, codim, std::move(fn));
}

std::string KernelSpec::name() const {
    switch (variant_) {
        case KernelVariant::riesz: return "riesz";
        case KernelVariant::planar_conjugate: return "planar_conjugate";
        case KernelVariant::custom: return "custom";
    }
    return "unknown";
}

void KernelSpec::eval(const double* x, double* out) const {
    double r2 = 0.0;
    for (int k = 0; k < dim_; ++k) r2 += x[k] * x[k];
    if (r2 == 0.0) throw InvalidArgument("kernel is undefined at x = 0");
    eval_unchecked(x, r2, out);
}

void KernelSpec::eval_regularized(double delta, const double* x, double* out) const {
    if (!(delta > 0.0)) throw InvalidArgument("regularization delta must be > 0");
    double r2 = 0.0;
    for (int k = 0; k < dim_; ++k) r2 += x[k] * x[k];
    eval_regularized_unchecked(delta, x, r2, out);
}

double KernelSpec::first_derivative_constant() const {
    switch (variant_) {
        // DK(y) = |y|^{-s-1} (I - (s+1) yy^T/|y|^2), eigenvalues 1 and -s.
        case KernelVariant::riesz: return std::max(1.0, s_);
        // |d/dz| + |d/dzbar| = 2/|z|^2 + 1/|z|^2.
        case KernelVariant::planar_conjugate: return 3.0;
        case KernelVariant::custom: return 0.0;
    }
    return 0.0;
}

double KernelSpec::second_derivative_constant() const {
    switch (variant_) {
        case KernelVariant::riesz: {
            // For unit y, v with u = <y,v>^2, a = s+1, b = s+3:
            //   |D^2K(y)[v,v]|^2 = a^2 ((b^2 - 4b) u^2 + (8 - 2b) u + 1),
            // maximised over u in [0,1] at u = 0, u = 1 or (when b < 4) u = 1/b.
            const double a = s_ + 1.0, b = s_ + 3.0;
            double m = std::max(1.0, (b - 3.0) * (b - 3.0));
            if (b < 4.0) m = std::max(m, 4.0 / b);
            return a * std::sqrt(m);
        }
        // |6 zbar/z^4| + 2 |2/z^3|.
        case KernelVariant::planar_conjugate: return 10.0;
        case KernelVariant::custom: return 0.0;
    }
    return 0.0;
}

}  // namespace gmtlab
