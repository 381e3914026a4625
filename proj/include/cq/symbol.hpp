#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cq/types.hpp"

namespace cq {

/// Growth bound ||F(s)|| <= c0 |s|^mu / (Re s)^m on the right half-plane.
/// Informational only; nothing checks it at runtime.
struct SymbolBound {
    double mu = 0.0;
    double m = 0.0;
    double c0 = 1.0;
};

/// A transfer function F: {Re s > 0} -> complex rows x cols matrices,
/// represented purely by pointwise evaluation. Scalars are 1x1.
///
/// Callers only evaluate with Re s > 0. When `conjugate_symmetric` is set,
/// F(conj s) = conj F(s) and contour evaluations may be halved. Symbols whose
/// evaluator is not safe to call concurrently must clear `thread_safe`; the
/// engine then evaluates their nodes sequentially.
class Symbol {
public:
    using Evaluator = std::function<CMatrix(cplx)>;

    Symbol(Evaluator eval, Eigen::Index rows, Eigen::Index cols, bool conjugate_symmetric,
           std::string name = {}, bool thread_safe = true);

    CMatrix operator()(cplx s) const;

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool conjugate_symmetric() const { return conjugate_symmetric_; }
    bool thread_safe() const { return thread_safe_; }
    const std::string& name() const { return name_; }

    const std::optional<SymbolBound>& bound() const { return bound_; }
    Symbol& with_bound(SymbolBound b) {
        bound_ = b;
        return *this;
    }

private:
    Evaluator eval_;
    Eigen::Index rows_;
    Eigen::Index cols_;
    bool conjugate_symmetric_;
    std::string name_;
    bool thread_safe_;
    std::optional<SymbolBound> bound_;
};

/// Wraps a scalar function as a 1x1 symbol.
Symbol scalar_symbol(std::function<cplx(cplx)> fn, bool conjugate_symmetric, std::string name = {});

Symbol identity_symbol(Eigen::Index dim = 1);
Symbol constant_symbol(const CMatrix& value, bool conjugate_symmetric);

/// s -> 1/(s - c). Kernel exp(c t).
Symbol resolvent(cplx c);
/// s -> 1/(s^2 + c^2), c > 0. Kernel sin(c t)/c.
Symbol oscillator(double c);
/// s -> s^alpha on the principal branch.
Symbol power(double alpha);
/// s -> exp(-s t0), t0 >= 0.
Symbol delay(double t0);

/// Pointwise product F1(s) F2(s).
Symbol compose(const Symbol& f1, const Symbol& f2);
/// Pointwise inverse F(s)^{-1}; throws SingularSymbol where F(s) is numerically singular.
Symbol inverse(const Symbol& f);
/// s -> F(s / c), the time rescaling used for wave speed c.
Symbol rescale(const Symbol& f, double c);

}  // namespace cq
