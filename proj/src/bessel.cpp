#include "cq/bessel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cq/errors.hpp"

namespace cq {

namespace {

using lcplx = std::complex<long double>;
constexpr long double kEuler = 0.577215664901532860606512090082402431L;
constexpr long double kPi = 3.141592653589793238462643383279502884L;

void check_argument(cplx z) {
    if (!(z.real() > 0.0) || !std::isfinite(z.imag())) {
        std::ostringstream msg;
        msg << "modified Bessel K needs Re z > 0, got " << z;
        throw InvalidArgument(msg.str());
    }
}

// Past this the e^{-z} factor underflows double precision.
constexpr double kUnderflowReal = 705.0;

}  // namespace

namespace detail {

std::pair<cplx, cplx> k_series(cplx zd) {
    const lcplx z(zd.real(), zd.imag());
    const lcplx q = z * z / 4.0L;
    const lcplx log_half = std::log(z / 2.0L);

    // K0 = sum (psi(k+1) - L) q^k/(k!)^2,
    // K1 = 1/z + (z/4) sum (2L - psi(k+1) - psi(k+2)) q^k/(k!(k+1)!),  L = log(z/2).
    // The coefficients nearly vanish where the terms peak, so the large
    // I-function contributions cancel term by term rather than in the total.
    lcplx term = 1.0L, term1 = 1.0L;
    long double psi_k1 = -kEuler;        // psi(k+1)
    long double psi_k2 = 1.0L - kEuler;  // psi(k+2)
    lcplx s0 = 0.0L, s1 = 0.0L;
    for (int k = 0; k < 200; ++k) {
        const lcplx d0 = (psi_k1 - log_half) * term;
        const lcplx d1 = (2.0L * log_half - psi_k1 - psi_k2) * term1;
        s0 += d0;
        s1 += d1;
        if (k > 2 && std::abs(d0) < 1e-21L * std::abs(s0) && std::abs(d1) < 1e-21L * std::abs(s1) &&
            std::abs(term) < 1e-21L)
            break;
        const long double kk = k + 1;
        term *= q / (kk * kk);
        term1 *= q / (kk * (kk + 1.0L));
        psi_k1 += 1.0L / kk;
        psi_k2 += 1.0L / (kk + 1.0L);
    }
    const lcplx kk0 = s0;
    const lcplx kk1 = 1.0L / z + (z / 4.0L) * s1;
    return {cplx(static_cast<double>(kk0.real()), static_cast<double>(kk0.imag())),
            cplx(static_cast<double>(kk1.real()), static_cast<double>(kk1.imag()))};
}

std::pair<cplx, cplx> k_continued_fraction(cplx z) {
    // Steed's evaluation of the second continued fraction at order 0.
    constexpr double kTol = 1e-17;
    constexpr int kMaxIter = 100000;
    const double a1 = 0.25;
    cplx b = 2.0 * (1.0 + z);
    cplx d = 1.0 / b;
    cplx h = d, delh = d;
    cplx q1 = 0.0, q2 = 1.0;
    cplx q = a1, c = a1;
    double a = -a1;
    cplx s = 1.0 + q * delh;
    int i = 1;
    for (; i < kMaxIter; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const cplx qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const cplx dels = q * delh;
        s += dels;
        if (std::abs(dels) < kTol * std::abs(s) && std::abs(delh) < kTol * std::abs(h)) break;
    }
    if (i == kMaxIter) {
        std::ostringstream msg;
        msg << "K continued fraction did not converge at z = " << z;
        throw Error("numerical", msg.str());
    }
    h = a1 * h;
    const cplx kk0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
    const cplx kk1 = kk0 * (z + 0.5 - h) / z;
    return {kk0, kk1};
}

}  // namespace detail

std::pair<cplx, cplx> k0_k1(cplx z, bool* underflow) {
    check_argument(z);
    if (underflow) *underflow = false;
    // Evaluate on the upper half-plane only, so conjugation symmetry is exact.
    if (std::signbit(z.imag())) {
        auto [a, b] = k0_k1(std::conj(z), underflow);
        return {std::conj(a), std::conj(b)};
    }
    if (z.real() > kUnderflowReal) {
        if (underflow) *underflow = true;
        return {0.0, 0.0};
    }
    return std::abs(z) <= detail::kSeriesRadius ? detail::k_series(z) : detail::k_continued_fraction(z);
}

cplx k0(cplx z, bool* underflow) { return k0_k1(z, underflow).first; }
cplx k1(cplx z, bool* underflow) { return k0_k1(z, underflow).second; }

std::pair<cplx, cplx> hankel1_series(cplx wd) {
    const lcplx w(wd.real(), wd.imag());
    const lcplx q = -w * w / 4.0L;  // (-w^2/4)
    const lcplx log_half = std::log(w / 2.0L);
    lcplx term = 1.0L, term1 = 1.0L;
    long double harmonic = 0.0L;                 // H_k
    long double psi_k1 = -kEuler, psi_k2 = 1.0L - kEuler;
    lcplx j0 = 0.0L, j1 = 0.0L, y0_tail = 0.0L, y1_tail = 0.0L;
    for (int k = 0; k < 200; ++k) {
        j0 += term;
        j1 += term1;
        // sum_{k>=1} (-1)^{k+1} H_k (w^2/4)^k/(k!)^2 = -sum H_k q^k/(k!)^2
        y0_tail -= harmonic * term;
        y1_tail += (psi_k1 + psi_k2) * term1;
        if (k > 2 && std::abs(term) < 1e-22L * std::abs(j0) && std::abs(term1) < 1e-22L * std::abs(j1) &&
            std::abs(harmonic * term) < 1e-22L * (std::abs(y0_tail) + 1e-300L))
            break;
        const long double kk = k + 1;
        term *= q / (kk * kk);
        term1 *= q / (kk * (kk + 1.0L));
        harmonic += 1.0L / kk;
        psi_k1 += 1.0L / kk;
        psi_k2 += 1.0L / (kk + 1.0L);
    }
    const lcplx half = w / 2.0L;
    j1 *= half;
    const lcplx y0 = (2.0L / kPi) * ((log_half + kEuler) * j0 + y0_tail);
    const lcplx y1 = -2.0L / (kPi * w) + (2.0L / kPi) * log_half * j1 - (1.0L / kPi) * half * y1_tail;
    const lcplx i(0.0L, 1.0L);
    const lcplx h0 = j0 + i * y0, h1 = j1 + i * y1;
    return {cplx(static_cast<double>(h0.real()), static_cast<double>(h0.imag())),
            cplx(static_cast<double>(h1.real()), static_cast<double>(h1.imag()))};
}

BridgeResidual hankel_bridge_check(cplx z) {
    check_argument(z);
    if (std::abs(z) > detail::kSeriesRadius) throw InvalidArgument("hankel_bridge_check needs |z| <= 8");
    const auto [h0, h1] = hankel1_series(cplx(0.0, 1.0) * z);
    const auto [kk0, kk1] = k0_k1(z);
    const double two_pi = 2.0 * std::numbers::pi;
    const cplx lhs0 = cplx(0.0, 0.25) * h0, rhs0 = kk0 / two_pi;
    const cplx lhs1 = 0.25 * h1, rhs1 = -kk1 / two_pi;
    return {std::abs(lhs0 - rhs0) / std::abs(rhs0), std::abs(lhs1 - rhs1) / std::abs(rhs1)};
}

}  // namespace cq
