#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cq/symbol.hpp"
#include "cq/types.hpp"

namespace cq {

/// Default contour parameter: the binary64 machine epsilon 2^-52.
inline constexpr double kDefaultContourEps = 2.220446049250313080847e-16;

enum class DeltaKind { BackwardEuler, Bdf2, Trapezoidal, Bdf };

/// Characteristic function delta(zeta) of a linear multistep method:
/// s Y(s) is discretized as delta(zeta)/kappa Y(zeta).
class DeltaGenerator {
public:
    static DeltaGenerator backward_euler();
    static DeltaGenerator bdf2();
    static DeltaGenerator trapezoidal();
    /// sum_{l=1}^{p} (1-zeta)^l / l for p = 1..6. Only p <= 2 is A-stable.
    static DeltaGenerator bdf(int steps);

    cplx operator()(cplx zeta) const;
    cplx at_zero() const { return (*this)(cplx{0.0, 0.0}); }

    DeltaKind kind() const { return kind_; }
    int order() const { return order_; }
    /// Short identifier: "be", "bdf2", "tr", "bdf3", ...
    const std::string& name() const { return name_; }
    bool a_stable() const { return order_ <= 2; }
    /// All shipped generators have real Taylor coefficients, so delta(conj z) = conj delta(z).
    bool real_coefficients() const { return true; }

private:
    DeltaGenerator(DeltaKind kind, int order, std::string name) : kind_(kind), order_(order), name_(std::move(name)) {}

    DeltaKind kind_;
    int order_;
    std::string name_;
};

/// Taylor coefficients delta_0..delta_n of delta at zeta = 0.
std::vector<cplx> delta_coefficients(const DeltaGenerator& delta, std::size_t n);

/// Radius of the Cauchy contour used to compute N+1 coefficients:
/// R = eps^(1/(2(N+1))).
double contour_radius(std::size_t n, double eps = kDefaultContourEps);

/// CQ (or RK-CQ block) coefficients together with the discretization that
/// produced them. For multistep tables `stages` is 1 and each weight is
/// rows x cols; for Runge-Kutta tables each weight is a (p rows) x (p cols) block.
struct WeightTable {
    MatrixSequence weights;
    double kappa = 0.0;
    double radius = 0.0;
    double eps = kDefaultContourEps;
    std::string scheme;   // generator or tableau identifier
    std::string tableau;  // tableau name for RK tables, empty otherwise
    int stages = 1;

    std::size_t steps() const { return weights.empty() ? 0 : weights.size() - 1; }
    Eigen::Index rows() const { return weights.empty() ? 0 : weights.front().rows(); }
    Eigen::Index cols() const { return weights.empty() ? 0 : weights.front().cols(); }
};

/// Symbol values at the contour nodes s_l = delta(R zeta_{N+1}^{-l}) / kappa,
/// l = 0..N. Shared by every all-steps-at-once algorithm.
struct NodeTable {
    std::vector<cplx> frequencies;
    MatrixSequence values;
    double kappa = 0.0;
    double radius = 0.0;
    double eps = kDefaultContourEps;

    std::size_t steps() const { return values.size() - 1; }
};

/// Evaluates F at every contour node (halved by Hermitian reflection when F is
/// conjugate-symmetric). Failures are reported as NodeFailure with the index.
NodeTable evaluate_nodes(const Symbol& f, const DeltaGenerator& delta, double kappa, std::size_t n,
                         double eps = kDefaultContourEps);

/// Coefficients omega_0..omega_N of F(delta(zeta)/kappa) by the trapezoidal
/// rule on |zeta| = R, with omega_0 replaced by the exact F(delta(0)/kappa).
WeightTable cq_weights(const Symbol& f, const DeltaGenerator& delta, double kappa, std::size_t n,
                       double eps = kDefaultContourEps);
WeightTable cq_weights(const NodeTable& nodes, const Symbol& f, const DeltaGenerator& delta);

enum class ConvolutionPath { Direct, Fft };

/// y_n = sum_{m<=n} omega_m g_{n-m} for n = 0..min(N, rows(g)-1).
Series forward_convolution_mot(const WeightTable& w, const Series& g, ConvolutionPath path = ConvolutionPath::Direct);

/// Forward substitution for sum_{m<=n} omega_m g_{n-m} = h_n. omega_0 is factored once.
Series solve_equation_mot(const WeightTable& w, const Series& h);

/// All-steps-at-once convolution: g has N+1 rows (samples at t_0..t_N).
Series all_steps_forward(const Symbol& f, const DeltaGenerator& delta, double kappa, const Series& g,
                         double eps = kDefaultContourEps);
Series all_steps_forward(const NodeTable& nodes, const Series& g);

/// All-steps-at-once solve of the discrete convolution equation: one linear
/// solve per contour node, no inverses formed.
Series all_steps_solve(const Symbol& f, const DeltaGenerator& delta, double kappa, const Series& h,
                       double eps = kDefaultContourEps);
Series all_steps_solve(const NodeTable& nodes, const Series& h);

/// Piece of a convolution: g_n = sum_{m=0}^{Q} w~_{n-m} u_m for n = Q+1..M,
/// using trapezoidal coefficients on an (N+1)-point contour, N >= M.
/// u holds at least Q+1 rows; the result has M-Q rows (row k is g_{Q+1+k}).
Series convolution_piece(const Symbol& f, const DeltaGenerator& delta, double kappa, const Series& u,
                         std::size_t q, std::size_t m, std::size_t n, double eps = kDefaultContourEps);
Series convolution_piece(const NodeTable& nodes, const Series& u, std::size_t q, std::size_t m);

/// Look-ahead block forward substitution: blocks of `block` unknowns are
/// solved directly and their influence on the remaining right-hand side is
/// removed with convolution pieces. u has N+1 rows.
Series look_ahead_solve(const Symbol& f, const DeltaGenerator& delta, double kappa, const Series& u,
                        std::size_t block = 32, double eps = kDefaultContourEps);

}  // namespace cq
