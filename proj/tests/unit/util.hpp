#pragma once

#include <algorithm>
#include <random>

#include "cq/types.hpp"

namespace testutil {

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline cq::cplx random_cplx(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

/// Random point of the right half-plane.
inline cq::cplx random_right(double lo = 0.05, double hi = 5.0) { return {uniform(lo, hi), uniform(-hi, hi)}; }

inline std::vector<cq::cplx> random_vector(std::size_t n) {
    std::vector<cq::cplx> v(n);
    for (auto& x : v) x = random_cplx();
    return v;
}

inline cq::CMatrix random_matrix(Eigen::Index r, Eigen::Index c) {
    cq::CMatrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = random_cplx();
    return m;
}

template <class A, class B>
double max_abs_diff(const A& a, const B& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

template <class A>
double max_abs(const A& a) {
    double m = 0.0;
    for (const auto& x : a) m = std::max(m, std::abs(x));
    return m;
}

inline double rel_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    return scale == 0.0 ? 0.0 : (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace testutil
