#include "cq/dft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "cq/errors.hpp"

namespace cq {

namespace {

static_assert(sizeof(cplx) == sizeof(fftw_complex));

// FFTW planning is not thread-safe, execution with the new-array interface is.
// Plans are made once per (length, direction) with FFTW_ESTIMATE so the chosen
// algorithm, and therefore the rounding, never depends on timing.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<cplx> in(n), out(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                          reinterpret_cast<fftw_complex*>(out.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plans() {
    static PlanCache cache;
    return cache;
}

void run_transform(const cplx* in, cplx* out, std::size_t n, int sign) {
    fftw_plan plan = plans().get(n, sign);
    // new-array execute keeps the out-of-place layout the plan was made with
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void require_nonempty(std::size_t n) {
    if (n == 0) throw InvalidArgument("transform of an empty sequence");
}

}  // namespace

std::vector<cplx> dft(std::span<const cplx> x) {
    require_nonempty(x.size());
    std::vector<cplx> out(x.size());
    run_transform(x.data(), out.data(), x.size(), FFTW_FORWARD);
    return out;
}

std::vector<cplx> idft(std::span<const cplx> x) {
    require_nonempty(x.size());
    std::vector<cplx> out(x.size());
    run_transform(x.data(), out.data(), x.size(), FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> periodic_conv(std::span<const cplx> x, std::span<const cplx> y) {
    if (x.size() != y.size())
        throw InvalidArgument("periodic_conv: length mismatch (" + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()) + ")");
    auto xh = dft(x);
    const auto yh = dft(y);
    for (std::size_t l = 0; l < xh.size(); ++l) xh[l] *= yh[l];
    return idft(xh);
}

std::vector<cplx> causal_conv(std::span<const cplx> x, std::span<const cplx> y, std::size_t n) {
    if (x.size() < n + 1 || y.size() < n + 1)
        throw InvalidArgument("causal_conv: inputs need at least N+1 = " + std::to_string(n + 1) + " entries");
    const std::size_t len = 2 * n + 2;
    std::vector<cplx> xe(len, cplx{}), ye(len, cplx{});
    std::copy_n(x.begin(), n + 1, xe.begin());
    std::copy_n(y.begin(), n + 1, ye.begin());
    auto full = periodic_conv(xe, ye);
    full.resize(n + 1);
    return full;
}

std::vector<cplx> symmetrize(std::span<const cplx> half, std::size_t n) {
    if (half.size() != hermitian_half_length(n))
        throw InvalidArgument("symmetrize: expected " + std::to_string(hermitian_half_length(n)) +
                              " entries for N = " + std::to_string(n) + ", got " + std::to_string(half.size()));
    std::vector<cplx> out(n + 1);
    // for N = 0 the single input entry is both the half and the whole vector
    std::copy_n(half.begin(), std::min(half.size(), n + 1), out.begin());
    for (std::size_t l = 1; l <= n / 2; ++l) out[n + 1 - l] = std::conj(out[l]);
    return out;
}

void dft_columns(Series& data) {
    const auto rows = static_cast<std::size_t>(data.rows());
    if (rows == 0) return;
    std::vector<cplx> out(rows);
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        run_transform(data.col(j).data(), out.data(), rows, FFTW_FORWARD);
        std::copy(out.begin(), out.end(), data.col(j).data());
    }
}

void idft_columns(Series& data) {
    const auto rows = static_cast<std::size_t>(data.rows());
    if (rows == 0) return;
    std::vector<cplx> out(rows);
    const double scale = 1.0 / static_cast<double>(rows);
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        run_transform(data.col(j).data(), out.data(), rows, FFTW_BACKWARD);
        for (std::size_t i = 0; i < rows; ++i) data(static_cast<Eigen::Index>(i), j) = out[i] * scale;
    }
}

}  // namespace cq
