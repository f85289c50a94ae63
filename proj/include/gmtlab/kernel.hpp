#pragma once

#include <functional>
#include <string>

#include "gmtlab/common.hpp"

namespace gmtlab {

enum class KernelVariant { riesz, planar_conjugate, custom };

/// Writes K(x) (codim values) for x != 0.
using KernelEvaluator = std::function<void(const double* x, double* out)>;

/// Antisymmetric, (-s)-homogeneous kernel with |K(x)| <= |x|^{-s}.
class KernelSpec {
public:
    /// K(x) = x / |x|^{s+1} on R^d.
    static KernelSpec riesz(int d, double s, double alpha = 1.0);
    /// K(z) = conj(z) / z^2 on C = R^2 (s = 1).
    static KernelSpec planar_conjugate(double alpha = 1.0);
    /// Caller-supplied evaluator. It must be stateless and safe to share.
    static KernelSpec custom(int d, double s, double alpha, int codim, KernelEvaluator fn);

    int dim() const { return dim_; }
    int codim() const { return codim_; }
    double s() const { return s_; }
    double alpha() const { return alpha_; }
    KernelVariant variant() const { return variant_; }
    std::string name() const;

    /// K(x); throws InvalidArgument at x = 0.
    void eval(const double* x, double* out) const;
    /// K_delta(x) = K(x) (|x| / max(|x|, delta))^{s + alpha}; K_delta(0) = 0.
    void eval_regularized(double delta, const double* x, double* out) const;

    /// K(x) given r2 = |x|^2 > 0; no checks. Used in inner loops.
    void eval_unchecked(const double* x, double r2, double* out) const {
        switch (variant_) {
            case KernelVariant::riesz: {
                const double scale = unit_s_ ? 1.0 / r2 : std::pow(r2, -0.5 * (s_ + 1.0));
                for (int k = 0; k < dim_; ++k) out[k] = x[k] * scale;
                return;
            }
            case KernelVariant::planar_conjugate: {
                // conj(z)/z^2 = conj(z)^3 / |z|^4, written to be exactly odd in z.
                const double a = x[0], b = x[1];
                const double inv = 1.0 / (r2 * r2);
                out[0] = a * (a * a - 3.0 * b * b) * inv;
                out[1] = b * (b * b - 3.0 * a * a) * inv;
                return;
            }
            case KernelVariant::custom:
                custom_(x, out);
                return;
        }
    }

    /// K_delta with r2 = |x|^2 (r2 = 0 gives 0).
    void eval_regularized_unchecked(double delta, const double* x, double r2, double* out) const {
        if (r2 == 0.0) {
            for (int k = 0; k < codim_; ++k) out[k] = 0.0;
            return;
        }
        eval_unchecked(x, r2, out);
        if (r2 < delta * delta) {
            const double f = std::pow(std::sqrt(r2) / delta, s_ + alpha_);
            for (int k = 0; k < codim_; ++k) out[k] *= f;
        }
    }

    /// Constants C1, C2 with |DK(y)| <= C1 |y|^{-s-1} and |D^2K(y)[v,v]| <= C2 |v|^2 |y|^{-s-2}.
    /// Zero for custom kernels (no certified bound).
    double first_derivative_constant() const;
    double second_derivative_constant() const;
    bool has_derivative_bounds() const { return variant_ != KernelVariant::custom; }

private:
    KernelSpec(KernelVariant v, int d, double s, double alpha, int codim, KernelEvaluator fn);

    KernelVariant variant_;
    int dim_;
    double s_;
    double alpha_;
    int codim_;
    bool unit_s_;
    KernelEvaluator custom_;
};

}  // namespace gmtlab
