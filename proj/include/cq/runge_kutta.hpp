#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cq/multistep.hpp"
#include "cq/symbol.hpp"
#include "cq/types.hpp"

namespace cq {

/// Butcher tableau (A, b, c) of an implicit Runge-Kutta method with invertible A.
struct RKTableau {
    std::string name;
    RMatrix a;
    RVector b;
    RVector c;
    int classical_order = 0;
    int stage_order = 0;

    int stages() const { return static_cast<int>(b.size()); }
    /// Last row of A equals b^T (exact comparison of the stored coefficients).
    bool stiffly_accurate() const;
    RMatrix a_inverse() const;
    /// mu = 1 - b^T A^{-1} 1, computed from the coefficients.
    double mu_numeric() const;
    /// mu and d^T = b^T A^{-1} as used for step extraction; for stiffly
    /// accurate tableaus these are exactly 0 and e_p.
    double mu() const;
    RVector d() const;

    static RKTableau radau_iia3();
    static RKTableau lobatto_iiic4();
    /// "radau3" or "lobatto4".
    static RKTableau by_name(const std::string& id);
    /// User tableau; throws InvalidArgument if validate_tableau() rejects it.
    static RKTableau custom(std::string name, RMatrix a, RVector b, RVector c, int classical_order, int stage_order);
};

struct TableauReport {
    double row_sum_defect = 0.0;     // max |A 1 - c|
    double weight_sum_defect = 0.0;  // |b^T 1 - 1|
    std::vector<cplx> eigenvalues;   // of A
    bool spectrum_in_right_halfplane = false;
    bool stiffly_accurate = false;
    double mu = 0.0;                    // R(infinity)
    double max_left_halfplane_gain = 0;  // max |R(z)| over the Re z <= 0 sample grid
    double max_imaginary_axis_gain = 0;  // max |R(i w)| over w in +-[0.1, 100]

    bool ok() const;
    std::string summary() const;
};

TableauReport validate_tableau(const RKTableau& tab);

/// R(z) = 1 + z b^T (I - zA)^{-1} 1; empty at a pole (I - zA singular).
std::optional<cplx> stability_function(const RKTableau& tab, cplx z);

/// Delta(zeta) = ((zeta/(1-zeta)) 1 b^T + A)^{-1}; for stiffly accurate
/// tableaus the equivalent A^{-1}(I - zeta 1 e_p^T) is returned.
CMatrix delta_matrix(const RKTableau& tab, cplx zeta);
/// Always the inverse form, regardless of stiff accuracy.
CMatrix delta_matrix_general(const RKTableau& tab, cplx zeta);

/// B = P diag(values) P^{-1}, with the condition number of P.
struct SpectralDecomposition {
    CMatrix vectors;
    CMatrix inverse;
    CVector values;
    double condition = 0.0;
};

SpectralDecomposition spectral_decomposition(const CMatrix& b);

/// Largest eigenvector condition number accepted by dunford_eval.
inline constexpr double kMaxSpectralCondition = 1e8;

/// F(B) = sum_i col(P,i) (x) (row(P^{-1},i) (x) F(lambda_i)), a (p d1) x (p d2) matrix.
CMatrix dunford_eval(const Symbol& f, const CMatrix& b);
CMatrix dunford_eval(const Symbol& f, const SpectralDecomposition& spectrum);

/// Per-node spectral data of Delta(R zeta^{-l})/kappa and the symbol values F(lambda_i).
struct RKNodeTable {
    std::vector<SpectralDecomposition> spectra;
    std::vector<MatrixSequence> symbol_values;  // [node][stage]
    double kappa = 0.0;
    double radius = 0.0;
    double eps = kDefaultContourEps;
    int stages = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;

    std::size_t steps() const { return spectra.size() - 1; }
    /// F(Delta_l / kappa) assembled as a dense block matrix.
    CMatrix node_matrix(std::size_t l) const;
    /// F(Delta_l / kappa) x and its inverse action, through the factored form.
    CVector apply(std::size_t l, const CVector& x) const;
    CVector solve(std::size_t l, const CVector& x) const;
};

/// Evaluates the node table. If some node's eigenvector matrix is worse
/// conditioned than kMaxSpectralCondition, R is multiplied by 0.995 and the
/// whole table recomputed, at most five times.
RKNodeTable evaluate_rk_nodes(const Symbol& f, const RKTableau& tab, double kappa, std::size_t n,
                              double eps = kDefaultContourEps);

/// Block coefficients W_0..W_N of F(Delta(zeta)/kappa). With `exact_leading`,
/// W_0 is replaced by F(A^{-1}/kappa).
WeightTable rk_cq_weights(const Symbol& f, const RKTableau& tab, double kappa, std::size_t n,
                          double eps = kDefaultContourEps, bool exact_leading = true);

/// Samples g(t_n + kappa c) for n = 0..N; row n is laid out stage-major
/// (stage j occupies columns j*dim .. j*dim+dim-1).
Series sample_stages(const std::function<CVector(double)>& g, const RKTableau& tab, double kappa, std::size_t n,
                     Eigen::Index dim);

struct RKOutput {
    Series stages;  // row n: approximations at t_n + kappa c
    Series steps;   // row n: approximation at t_{n+1}
};

/// y_{n+1} = mu y_n + (d^T (x) I) y_n with y_0 = 0.
Series extract_steps(const RKTableau& tab, const Series& stages, Eigen::Index dim);

/// All-steps-at-once RK convolution of stage samples (N+1 rows).
RKOutput rk_forward(const RKNodeTable& nodes, const RKTableau& tab, const Series& stage_samples);
RKOutput rk_forward(const Symbol& f, const RKTableau& tab, double kappa, const Series& stage_samples,
                    double eps = kDefaultContourEps);
RKOutput rk_forward(const Symbol& f, const RKTableau& tab, double kappa, const std::function<CVector(double)>& g,
                    std::size_t n, double eps = kDefaultContourEps);

/// All-steps-at-once RK convolution equation at the stage level: p solves
/// with F(lambda_i) per node.
Series rk_solve(const RKNodeTable& nodes, const Series& stage_rhs);
Series rk_solve(const Symbol& f, const RKTableau& tab, double kappa, const Series& stage_rhs,
                double eps = kDefaultContourEps);
Series rk_solve(const Symbol& f, const RKTableau& tab, double kappa, const std::function<CVector(double)>& h,
                std::size_t n, double eps = kDefaultContourEps);

/// Block analogue of convolution_piece: rows g_{Q+1}..g_M.
Series rk_piece(const RKNodeTable& nodes, const Series& u, std::size_t q, std::size_t m);
Series rk_piece(const Symbol& f, const RKTableau& tab, double kappa, const Series& u, std::size_t q, std::size_t m,
                std::size_t n, double eps = kDefaultContourEps);

}  // namespace cq
