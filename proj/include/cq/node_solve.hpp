#pragma once

#include <cmath>

#include "cq/types.hpp"

namespace cq {

/// LU factorization of a small dense square matrix with a conditioning guard.
/// Scalars skip the factorization.
class SquareSolver {
public:
    explicit SquareSolver(const CMatrix& a, double min_rcond = 1e-14) : dim_(a.rows()) {
        if (dim_ == 1) {
            scalar_ = a(0, 0);
            ok_ = scalar_ != cplx{} && std::isfinite(std::abs(scalar_));
            return;
        }
        lu_.compute(a);
        ok_ = lu_.rcond() > min_rcond;
    }

    bool ok() const { return ok_; }

    template <typename Rhs>
    CMatrix solve(const Rhs& rhs) const {
        if (dim_ == 1) return rhs / scalar_;
        return lu_.solve(rhs);
    }

private:
    Eigen::Index dim_;
    cplx scalar_{};
    Eigen::PartialPivLU<CMatrix> lu_;
    bool ok_ = false;
};

}  // namespace cq
