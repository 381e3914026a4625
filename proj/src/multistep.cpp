#include "cq/multistep.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cq/dft.hpp"
#include "cq/errors.hpp"
#include "cq/node_solve.hpp"
#include "cq/parallel.hpp"

namespace cq {

DeltaGenerator DeltaGenerator::backward_euler() { return {DeltaKind::BackwardEuler, 1, "be"}; }
DeltaGenerator DeltaGenerator::bdf2() { return {DeltaKind::Bdf2, 2, "bdf2"}; }
DeltaGenerator DeltaGenerator::trapezoidal() { return {DeltaKind::Trapezoidal, 2, "tr"}; }

DeltaGenerator DeltaGenerator::bdf(int steps) {
    if (steps < 1 || steps > 6) throw InvalidArgument("BDF order must be between 1 and 6");
    if (steps == 1) return backward_euler();
    if (steps == 2) return bdf2();
    return {DeltaKind::Bdf, steps, "bdf" + std::to_string(steps)};
}

cplx DeltaGenerator::operator()(cplx zeta) const {
    switch (kind_) {
        case DeltaKind::BackwardEuler:
            return 1.0 - zeta;
        case DeltaKind::Bdf2:
            return 1.5 - 2.0 * zeta + 0.5 * zeta * zeta;
        case DeltaKind::Trapezoidal:
            return 2.0 * (1.0 - zeta) / (1.0 + zeta);
        case DeltaKind::Bdf: {
            const cplx w = 1.0 - zeta;
            cplx term = 1.0, sum = 0.0;
            for (int l = 1; l <= order_; ++l) {
                term *= w;
                sum += term / static_cast<double>(l);
            }
            return sum;
        }
    }
    return {};
}

std::vector<cplx> delta_coefficients(const DeltaGenerator& delta, std::size_t n) {
    std::vector<cplx> c(n + 1, cplx{});
    switch (delta.kind()) {
        case DeltaKind::Trapezoidal:
            // 2(1-z)/(1+z) = 2 + 4 sum_{k>=1} (-1)^k z^k
            c[0] = 2.0;
            for (std::size_t k = 1; k <= n; ++k) c[k] = (k % 2 ? -4.0 : 4.0);
            return c;
        default: {
            const int p = delta.kind() == DeltaKind::BackwardEuler ? 1 : delta.kind() == DeltaKind::Bdf2 ? 2 : delta.order();
            // sum_{l=1}^p (1/l) sum_k binom(l,k) (-z)^k
            for (int l = 1; l <= p; ++l) {
                double binom = 1.0;
                for (int k = 0; k <= l && static_cast<std::size_t>(k) <= n; ++k) {
                    c[static_cast<std::size_t>(k)] += (k % 2 ? -binom : binom) / l;
                    binom = binom * (l - k) / (k + 1);
                }
            }
            return c;
        }
    }
}

double contour_radius(std::size_t n, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("contour eps must lie in (0, 1)");
    return std::pow(eps, 1.0 / (2.0 * static_cast<double>(n + 1)));
}

namespace {

void require_kappa(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("time step must be positive");
}

// R^{-n} without accumulating rounding across n
inline double inv_power(double radius, std::size_t n) { return std::pow(radius, -static_cast<double>(n)); }

}  // namespace

NodeTable evaluate_nodes(const Symbol& f, const DeltaGenerator& delta, double kappa, std::size_t n, double eps) {
    require_kappa(kappa);
    NodeTable table;
    table.kappa = kappa;
    table.eps = eps;
    table.radius = contour_radius(n, eps);
    const std::size_t count = n + 1;
    table.frequencies.resize(count);
    table.values.resize(count);

    const bool hermitian = f.conjugate_symmetric() && delta.real_coefficients();
    const std::size_t computed = hermitian ? std::min(count, hermitian_half_length(n)) : count;
    const double two_pi = 2.0 * std::numbers::pi;

    parallel_for(
        computed,
        [&](std::size_t l) {
            const cplx zeta = std::polar(table.radius, -two_pi * static_cast<double>(l) / static_cast<double>(count));
            const cplx s = delta(zeta) / kappa;
            table.frequencies[l] = s;
            try {
                table.values[l] = f(s);
            } catch (const Error& e) {
                throw NodeFailure(e.category(), l, s, "node " + std::to_string(l) + ": " + e.what());
            }
        },
        !f.thread_safe());

    if (hermitian) {
        for (std::size_t l = 1; l <= n / 2; ++l) {
            table.frequencies[count - l] = std::conj(table.frequencies[l]);
            table.values[count - l] = table.values[l].conjugate();
        }
    }
    return table;
}

WeightTable cq_weights(const NodeTable& nodes, const Symbol& f, const DeltaGenerator& delta) {
    const std::size_t count = nodes.values.size();
    const Eigen::Index rows = nodes.values.front().rows();
    const Eigen::Index cols = nodes.values.front().cols();

    WeightTable table;
    table.kappa = nodes.kappa;
    table.radius = nodes.radius;
    table.eps = nodes.eps;
    table.scheme = delta.name();
    table.weights.assign(count, CMatrix::Zero(rows, cols));

    std::vector<cplx> entry(count);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (std::size_t l = 0; l < count; ++l) entry[l] = nodes.values[l](i, j);
            const auto coeff = idft(entry);
            for (std::size_t k = 0; k < count; ++k) table.weights[k](i, j) = coeff[k] * inv_power(nodes.radius, k);
        }
    }
    table.weights[0] = f(delta.at_zero() / nodes.kappa);
    return table;
}

WeightTable cq_weights(const Symbol& f, const DeltaGenerator& delta, double kappa, std::size_t n, double eps) {
    return cq_weights(evaluate_nodes(f, delta, kappa, n, eps), f, delta);
}

Series forward_convolution_mot(const WeightTable& w, const Series& g, ConvolutionPath path) {
    if (g.cols() != w.cols())
        throw InvalidArgument("forward convolution: data has " + std::to_string(g.cols()) + " components, weights take " +
                              std::to_string(w.cols()));
    if (g.rows() == 0) return Series(0, w.rows());
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(g.rows()) - 1, w.steps());
    Series y = Series::Zero(static_cast<Eigen::Index>(n + 1), w.rows());

    if (path == ConvolutionPath::Direct) {
        for (std::size_t k = 0; k <= n; ++k) {
            CVector acc = CVector::Zero(w.rows());
            for (std::size_t m = 0; m <= k; ++m)
                acc.noalias() += w.weights[m] * g.row(static_cast<Eigen::Index>(k - m)).transpose();
            y.row(static_cast<Eigen::Index>(k)) = acc.transpose();
        }
        return y;
    }

    std::vector<cplx> weight_entry(n + 1), data(n + 1);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            for (std::size_t k = 0; k <= n; ++k) {
                weight_entry[k] = w.weights[k](i, j);
                data[k] = g(static_cast<Eigen::Index>(k), j);
            }
            const auto part = causal_conv(weight_entry, data, n);
            for (std::size_t k = 0; k <= n; ++k) y(static_cast<Eigen::Index>(k), i) += part[k];
        }
    }
    return y;
}

namespace {

Series forward_substitution(const MatrixSequence& weights, const SquareSolver& leading, const Series& h) {
    Series g = Series::Zero(h.rows(), h.cols());
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
        CVector rhs = h.row(k).transpose();
        for (Eigen::Index m = 1; m <= k; ++m)
            rhs.noalias() -= weights[static_cast<std::size_t>(m)] * g.row(k - m).transpose();
        g.row(k) = leading.solve(rhs).transpose();
    }
    return g;
}

}  // namespace

Series solve_equation_mot(const WeightTable& w, const Series& h) {
    if (w.rows() != w.cols()) throw InvalidArgument("convolution equation needs square weights");
    if (h.cols() != w.rows()) throw InvalidArgument("right-hand side dimension does not match the weights");
    if (h.rows() == 0) return Series(0, w.cols());
    if (static_cast<std::size_t>(h.rows()) - 1 > w.steps())
        throw InvalidArgument("weight table has fewer steps than the right-hand side");

    const SquareSolver leading(w.weights[0]);
    if (!leading.ok()) throw UnsolvableEquation("leading weight omega_0 is singular");
    return forward_substitution(w.weights, leading, h);
}

namespace {

void require_rows(const NodeTable& nodes, const Series& data, Eigen::Index expected_cols, const char* what) {
    if (static_cast<std::size_t>(data.rows()) != nodes.values.size())
        throw InvalidArgument(std::string(what) + ": expected " + std::to_string(nodes.values.size()) +
                              " samples, got " + std::to_string(data.rows()));
    if (data.cols() != expected_cols)
        throw InvalidArgument(std::string(what) + ": data dimension " + std::to_string(data.cols()) +
                              " does not match the symbol (" + std::to_string(expected_cols) + ")");
}

void scale_rows(Series& data, double radius, bool inverse) {
    for (Eigen::Index m = 0; m < data.rows(); ++m) {
        const double factor = inverse ? inv_power(radius, static_cast<std::size_t>(m))
                                      : std::pow(radius, static_cast<double>(m));
        data.row(m) *= factor;
    }
}

}  // namespace

Series all_steps_forward(const NodeTable& nodes, const Series& g) {
    const Eigen::Index rows = nodes.values.front().rows();
    require_rows(nodes, g, nodes.values.front().cols(), "all_steps_forward");
    Series h = g;
    scale_rows(h, nodes.radius, false);
    dft_columns(h);
    Series v(h.rows(), rows);
    for (Eigen::Index l = 0; l < h.rows(); ++l)
        v.row(l) = (nodes.values[static_cast<std::size_t>(l)] * h.row(l).transpose()).transpose();
    idft_columns(v);
    scale_rows(v, nodes.radius, true);
    return v;
}

Series all_steps_forward(const Symbol& f, const DeltaGenerator& delta, double kappa, const Series& g, double eps) {
    if (g.rows() == 0) throw InvalidArgument("all_steps_forward: empty data");
    return all_steps_forward(evaluate_nodes(f, delta, kappa, static_cast<std::size_t>(g.rows()) - 1, eps), g);
}

Series all_steps_solve(const NodeTable& nodes, const Series& h) {
    const Eigen::Index cols = nodes.values.front().cols();
    if (nodes.values.front().rows() != cols) throw InvalidArgument("all_steps_solve needs a square symbol");
    require_rows(nodes, h, cols, "all_steps_solve");
    Series v = h;
    scale_rows(v, nodes.radius, false);
    dft_columns(v);
    Series w(v.rows(), cols);
    parallel_for(static_cast<std::size_t>(v.rows()), [&](std::size_t l) {
        const SquareSolver solver(nodes.values[l]);
        if (!solver.ok()) {
            std::ostringstream msg;
            msg << "symbol singular at node " << l << " (s = " << nodes.frequencies[l] << ")";
            throw NodeFailure("singular-symbol", l, nodes.frequencies[l], msg.str());
        }
        const auto row = static_cast<Eigen::Index>(l);
        w.row(row) = solver.solve(v.row(row).transpose()).transpose();
    });
    idft_columns(w);
    scale_rows(w, nodes.radius, true);
    return w;
}

Series all_steps_solve(const Symbol& f, const DeltaGenerator& delta, double kappa, const Series& h, double eps) {
    if (h.rows() == 0) throw InvalidArgument("all_steps_solve: empty data");
    return all_steps_solve(evaluate_nodes(f, delta, kappa, static_cast<std::size_t>(h.rows()) - 1, eps), h);
}

Series convolution_piece(const NodeTable& nodes, const Series& u, std::size_t q, std::size_t m) {
    const std::size_t n = nodes.steps();
    if (m > n) throw InvalidArgument("convolution_piece: need N >= M");
    if (q >= m) throw InvalidArgument("convolution_piece: need Q < M");
    if (static_cast<std::size_t>(u.rows()) < q + 1) throw InvalidArgument("convolution_piece: need Q+1 data rows");
    const Eigen::Index rows = nodes.values.front().rows();
    if (u.cols() != nodes.values.front().cols()) throw InvalidArgument("convolution_piece: dimension mismatch");

    const std::size_t count = n + 1;
    Series w = Series::Zero(static_cast<Eigen::Index>(count), u.cols());
    for (std::size_t k = 0; k <= q; ++k)
        w.row(static_cast<Eigen::Index>(k)) = u.row(static_cast<Eigen::Index>(k)) * std::pow(nodes.radius, static_cast<double>(k));
    dft_columns(w);

    Series hh(static_cast<Eigen::Index>(count), rows);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t l = 0; l < count; ++l) {
        // zeta^{l(Q+1)} with the exponent reduced modulo N+1 first
        const std::size_t e = (l * ((q + 1) % count)) % count;
        const cplx phase = std::polar(1.0, two_pi * static_cast<double>(e) / static_cast<double>(count));
        const auto row = static_cast<Eigen::Index>(l);
        hh.row(row) = (phase * (nodes.values[l] * w.row(row).transpose())).transpose();
    }
    idft_columns(hh);

    Series out(static_cast<Eigen::Index>(m - q), rows);
    for (std::size_t k = 0; k < m - q; ++k)
        out.row(static_cast<Eigen::Index>(k)) = hh.row(static_cast<Eigen::Index>(k)) * inv_power(nodes.radius, k + q + 1);
    return out;
}

Series convolution_piece(const Symbol& f, const DeltaGenerator& delta, double kappa, const Series& u, std::size_t q,
                         std::size_t m, std::size_t n, double eps) {
    return convolution_piece(evaluate_nodes(f, delta, kappa, n, eps), u, q, m);
}

Series look_ahead_solve(const Symbol& f, const DeltaGenerator& delta, double kappa, const Series& u, std::size_t block,
                        double eps) {
    if (u.rows() == 0) throw InvalidArgument("look_ahead_solve: empty data");
    const std::size_t n = static_cast<std::size_t>(u.rows()) - 1;
    if (block < 1 || block > n + 1) throw InvalidArgument("look_ahead_solve: block size must lie in [1, N+1]");
    if (!f.is_square()) throw InvalidArgument("look_ahead_solve needs a square symbol");
    if (u.cols() != f.cols()) throw InvalidArgument("look_ahead_solve: dimension mismatch");

    const NodeTable nodes = evaluate_nodes(f, delta, kappa, n, eps);
    const WeightTable weights = cq_weights(nodes, f, delta);
    const SquareSolver leading(weights.weights[0]);
    if (!leading.ok()) throw UnsolvableEquation("leading weight omega_0 is singular");

    Series rhs = u;
    Series g = Series::Zero(u.rows(), u.cols());
    const auto bl = static_cast<Eigen::Index>(block);
    const std::size_t blocks = n / block;
    for (std::size_t i = 0; i < blocks; ++i) {
        const auto b0 = static_cast<Eigen::Index>(i * block);
        const Series h = forward_substitution(weights.weights, leading, rhs.middleRows(b0, bl));
        g.middleRows(b0, bl) = h;
        // influence of this block on every later unknown: local indices block..N-start
        const Series r = convolution_piece(nodes, h, block - 1, n - i * block);
        rhs.middleRows(b0 + bl, r.rows()) -= r;
    }

    const auto tail = static_cast<Eigen::Index>(blocks * block);
    g.middleRows(tail, u.rows() - tail) = forward_substitution(weights.weights, leading, rhs.middleRows(tail, u.rows() - tail));
    return g;
}

}  // namespace cq
