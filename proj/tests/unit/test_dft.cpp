#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cq/dft.hpp"
#include "cq/errors.hpp"
#include "util.hpp"

using namespace cq;
using testutil::max_abs;
using testutil::max_abs_diff;

namespace {

std::vector<cplx> direct_dft(const std::vector<cplx>& x, int sign) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t l = 0; l < n; ++l) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            acc += x[k] * std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>((l * k) % n) / static_cast<double>(n));
        out[l] = acc;
    }
    return out;
}

std::vector<cplx> direct_periodic(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m) out[k] += x[m] * y[(k + n - m) % n];
    return out;
}

std::vector<cplx> direct_causal(const std::vector<cplx>& x, const std::vector<cplx>& y, std::size_t n) {
    std::vector<cplx> out(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k)
        for (std::size_t m = 0; m <= k; ++m) out[k] += x[m] * y[k - m];
    return out;
}

const cplx I(0.0, 1.0);

}  // namespace

TEST_CASE("dft of small fixed vectors") {
    CHECK(max_abs_diff(dft(std::vector<cplx>{1, 1, 1, 1}), std::vector<cplx>{4, 0, 0, 0}) < 1e-15);
    CHECK(max_abs_diff(dft(std::vector<cplx>{1, 0, 0, 0}), std::vector<cplx>{1, 1, 1, 1}) < 1e-15);
    CHECK(max_abs_diff(dft(std::vector<cplx>{0, 1, 0, 0}), std::vector<cplx>{1, -I, -1, I}) < 1e-15);
}

TEST_CASE("idft of small fixed vectors") {
    CHECK(max_abs_diff(idft(std::vector<cplx>{4, 0, 0, 0}), std::vector<cplx>{1, 1, 1, 1}) < 1e-15);
    CHECK(max_abs_diff(idft(std::vector<cplx>{1, 1, 1, 1}), std::vector<cplx>{1, 0, 0, 0}) < 1e-15);
    const std::vector<cplx> x{1, 2, 3};
    CHECK(max_abs_diff(idft(dft(x)), x) < 1e-14);
}

TEST_CASE("dft matches the defining sum for every length up to 64") {
    for (std::size_t n = 1; n <= 64; ++n) {
        const auto x = testutil::random_vector(n);
        const auto fast = dft(x);
        const auto slow = direct_dft(x, -1);
        CHECK(max_abs_diff(fast, slow) <= 1e-13 * max_abs(slow));
        const auto back = idft(x);
        auto slow_back = direct_dft(x, 1);
        for (auto& v : slow_back) v /= static_cast<double>(n);
        CHECK(max_abs_diff(back, slow_back) <= 1e-13 * max_abs(slow_back));
    }
}

TEST_CASE("round trip for lengths 1..256") {
    for (std::size_t n = 1; n <= 256; ++n) {
        const auto x = testutil::random_vector(n);
        CHECK(max_abs_diff(idft(dft(x)), x) <= 1e-13 * max_abs(x));
    }
}

TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(dft(std::vector<cplx>{}), InvalidArgument);
    CHECK_THROWS_AS(idft(std::vector<cplx>{}), InvalidArgument);
}

TEST_CASE("periodic convolution") {
    const cplx a(2.0, -1.0), b(0.5, 3.0);
    CHECK(max_abs_diff(periodic_conv(std::vector<cplx>{1, 0}, std::vector<cplx>{a, b}), std::vector<cplx>{a, b}) < 1e-15);
    CHECK(max_abs_diff(periodic_conv(std::vector<cplx>{1, 1}, std::vector<cplx>{1, 1}), std::vector<cplx>{2, 2}) < 1e-15);
    CHECK_THROWS_AS(periodic_conv(std::vector<cplx>{1, 2}, std::vector<cplx>{1}), InvalidArgument);
    for (std::size_t n : {1u, 2u, 7u, 8u, 31u, 100u, 257u}) {
        const auto x = testutil::random_vector(n), y = testutil::random_vector(n);
        const auto slow = direct_periodic(x, y);
        CHECK(max_abs_diff(periodic_conv(x, y), slow) <= 1e-12 * max_abs(slow));
    }
}

TEST_CASE("causal convolution") {
    CHECK(max_abs_diff(causal_conv(std::vector<cplx>{1, 2}, std::vector<cplx>{3, 4}, 1), std::vector<cplx>{3, 10}) < 1e-14);
    const std::vector<cplx> y{cplx(1, 2), cplx(-3, 0.5), cplx(7, 1)};
    CHECK(max_abs_diff(causal_conv(std::vector<cplx>{1, 0, 0}, y, 2), y) < 1e-14);
    CHECK(max_abs_diff(causal_conv(std::vector<cplx>{1, 1, 1}, std::vector<cplx>{1, 1, 1}, 2),
                       std::vector<cplx>{1, 2, 3}) < 1e-14);
    CHECK_THROWS_AS(causal_conv(std::vector<cplx>{1, 1}, std::vector<cplx>{1, 1, 1}, 2), InvalidArgument);
    for (std::size_t n : {0u, 1u, 5u, 64u, 200u, 512u}) {
        const auto x = testutil::random_vector(n + 3), y = testutil::random_vector(n + 1);
        const auto slow = direct_causal(x, y, n);
        CHECK(max_abs_diff(causal_conv(x, y, n), slow) <= 1e-12 * max_abs(slow));
    }
}

TEST_CASE("symmetrize") {
    const std::vector<cplx> half{cplx(1, 0), cplx(2, 3), cplx(4, 5)};
    const auto full = symmetrize(half, 3);
    REQUIRE(full.size() == 4);
    CHECK(full[0] == half[0]);
    CHECK(full[1] == half[1]);
    CHECK(full[2] == half[2]);
    CHECK(full[3] == std::conj(half[1]));
    CHECK_THROWS_AS(symmetrize(std::vector<cplx>{1, 2}, 3), InvalidArgument);

    const auto real_full = symmetrize(std::vector<cplx>{1.5, 2.0, -1.0}, 4);
    for (std::size_t l = 1; l < real_full.size(); ++l) CHECK(real_full[real_full.size() - l] == std::conj(real_full[l]));

    for (std::size_t n : {0u, 1u, 2u, 3u, 10u, 11u, 64u}) {
        std::vector<cplx> x(n + 1);
        for (auto& v : x) v = testutil::uniform(-1, 1);
        const auto full_dft = dft(x);
        const std::vector<cplx> first(full_dft.begin(), full_dft.begin() + static_cast<std::ptrdiff_t>(hermitian_half_length(n)));
        CHECK(max_abs_diff(symmetrize(first, n), full_dft) <= 1e-13 * max_abs(full_dft));
    }
}

TEST_CASE("dft of a real sequence is Hermitian") {
    std::vector<cplx> x(37);
    for (auto& v : x) v = testutil::uniform(-2, 2);
    const auto f = dft(x);
    for (std::size_t l = 1; l < f.size(); ++l) CHECK(std::abs(f[f.size() - l] - std::conj(f[l])) < 1e-13);
}

TEST_CASE("column transforms agree with the scalar transform") {
    Series s(12, 3);
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = testutil::random_cplx();
    Series t = s;
    dft_columns(t);
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
        std::vector<cplx> col(s.col(j).data(), s.col(j).data() + s.rows());
        const auto f = dft(col);
        for (Eigen::Index i = 0; i < s.rows(); ++i) CHECK(t(i, j) == f[static_cast<std::size_t>(i)]);
    }
    idft_columns(t);
    CHECK((t - s).cwiseAbs().maxCoeff() < 1e-14);
}
