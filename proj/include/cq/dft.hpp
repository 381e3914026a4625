#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cq/types.hpp"

namespace cq {

/// Forward transform, unnormalized: X[l] = sum_n x[n] exp(-2 pi i l n / L),
/// L = x.size(). Any length L >= 1 is accepted.
std::vector<cplx> dft(std::span<const cplx> x);

/// Inverse transform carrying the 1/L factor: x[n] = (1/L) sum_l X[l] exp(2 pi i l n / L).
std::vector<cplx> idft(std::span<const cplx> x);

/// Periodic convolution of two equal-length sequences through the transform.
std::vector<cplx> periodic_conv(std::span<const cplx> x, std::span<const cplx> y);

/// First N+1 entries of the causal convolution sum_{m<=n} x[m] y[n-m],
/// computed by zero-padding both truncated inputs to length 2N+2.
std::vector<cplx> causal_conv(std::span<const cplx> x, std::span<const cplx> y, std::size_t n);

/// Expands entries 0..floor((N+1)/2) of a Hermitian vector of length N+1
/// by filling x[N+1-l] = conj(x[l]) for l = 1..floor(N/2).
std::vector<cplx> symmetrize(std::span<const cplx> half, std::size_t n);

/// Number of entries a Hermitian vector of length N+1 must be given.
inline std::size_t hermitian_half_length(std::size_t n) { return (n + 1) / 2 + 1; }

/// Column-wise transforms of a time series (rows are the transform index).
void dft_columns(Series& data);
void idft_columns(Series& data);

}  // namespace cq
