#pragma once

#include <utility>

#include "cq/types.hpp"

namespace cq {

/// Modified Bessel functions of the second kind for Re z > 0. If Re z is so
/// large that the value underflows, 0 is returned and `*underflow` (when
/// given) is set.
cplx k0(cplx z, bool* underflow = nullptr);
cplx k1(cplx z, bool* underflow = nullptr);
/// Both at once; the scattering kernels need the pair.
std::pair<cplx, cplx> k0_k1(cplx z, bool* underflow = nullptr);

/// Relative residuals of (i/4)H0(iz) = K0(z)/2pi and (1/4)H1(iz) = -K1(z)/2pi,
/// with H0, H1 summed from their own ascending series. Needs |z| <= 8.
struct BridgeResidual {
    double order0 = 0.0;
    double order1 = 0.0;
};
BridgeResidual hankel_bridge_check(cplx z);

/// Hankel functions of the first kind from ascending series (|w| <= 8).
std::pair<cplx, cplx> hankel1_series(cplx w);

namespace detail {
inline constexpr double kSeriesRadius = 8.0;
/// Ascending series, accurate for |z| <= 9.
std::pair<cplx, cplx> k_series(cplx z);
/// Steed continued fraction, accurate for |z| >= 7.
std::pair<cplx, cplx> k_continued_fraction(cplx z);
}  // namespace detail

}  // namespace cq
