#include "cq/runge_kutta.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cq/dft.hpp"
#include "cq/errors.hpp"
#include "cq/node_solve.hpp"
#include "cq/parallel.hpp"

namespace cq {

bool RKTableau::stiffly_accurate() const {
    const int p = stages();
    for (int j = 0; j < p; ++j)
        if (a(p - 1, j) != b(j)) return false;
    return true;
}

RMatrix RKTableau::a_inverse() const { return a.inverse(); }

double RKTableau::mu_numeric() const {
    const RVector ones = RVector::Ones(stages());
    return 1.0 - b.dot(a.partialPivLu().solve(ones));
}

double RKTableau::mu() const { return stiffly_accurate() ? 0.0 : mu_numeric(); }

RVector RKTableau::d() const {
    if (stiffly_accurate()) return RVector::Unit(stages(), stages() - 1);
    return a.transpose().partialPivLu().solve(b);
}

RKTableau RKTableau::radau_iia3() {
    RKTableau t;
    t.name = "radau3";
    t.a.resize(2, 2);
    t.a << 5.0 / 12.0, -1.0 / 12.0, 3.0 / 4.0, 1.0 / 4.0;
    t.b.resize(2);
    t.b << 3.0 / 4.0, 1.0 / 4.0;
    t.c.resize(2);
    t.c << 1.0 / 3.0, 1.0;
    t.classical_order = 3;
    t.stage_order = 2;
    return t;
}

RKTableau RKTableau::lobatto_iiic4() {
    RKTableau t;
    t.name = "lobatto4";
    t.a.resize(3, 3);
    t.a << 1.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0,
           1.0 / 6.0, 5.0 / 12.0, -1.0 / 12.0,
           1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0;
    t.b.resize(3);
    t.b << 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0;
    t.c.resize(3);
    t.c << 0.0, 0.5, 1.0;
    t.classical_order = 4;
    t.stage_order = 2;
    return t;
}

RKTableau RKTableau::by_name(const std::string& id) {
    if (id == "radau3" || id == "radau") return radau_iia3();
    if (id == "lobatto4" || id == "lobatto") return lobatto_iiic4();
    throw InvalidArgument("unknown Runge-Kutta tableau '" + id + "'");
}

RKTableau RKTableau::custom(std::string name, RMatrix a, RVector b, RVector c, int classical_order, int stage_order) {
    if (a.rows() != a.cols() || a.rows() != b.size() || b.size() != c.size() || b.size() == 0)
        throw InvalidArgument("tableau dimensions are inconsistent");
    RKTableau t{std::move(name), std::move(a), std::move(b), std::move(c), classical_order, stage_order};
    const auto report = validate_tableau(t);
    if (!report.ok()) throw InvalidArgument("tableau '" + t.name + "' rejected: " + report.summary());
    return t;
}

std::optional<cplx> stability_function(const RKTableau& tab, cplx z) {
    const int p = tab.stages();
    const CMatrix m = CMatrix::Identity(p, p) - z * tab.a.cast<cplx>();
    Eigen::PartialPivLU<CMatrix> lu(m);
    if (!(lu.rcond() > 1e-14)) return std::nullopt;
    const CVector x = lu.solve(CVector::Ones(p));
    return 1.0 + z * tab.b.cast<cplx>().dot(x);  // dot() conjugates its left side; b is real
}

bool TableauReport::ok() const {
    return row_sum_defect <= 1e-14 && weight_sum_defect <= 1e-14 && spectrum_in_right_halfplane &&
           max_left_halfplane_gain <= 1.0 + 1e-12 && max_imaginary_axis_gain < 1.0;
}

std::string TableauReport::summary() const {
    std::ostringstream s;
    s << "A1-c=" << row_sum_defect << " b1-1=" << weight_sum_defect
      << " spectrum_in_C+=" << spectrum_in_right_halfplane << " stiffly_accurate=" << stiffly_accurate
      << " mu=" << mu << " max|R(z)|,Re z<=0: " << max_left_halfplane_gain
      << " max|R(iw)|: " << max_imaginary_axis_gain;
    return s.str();
}

TableauReport validate_tableau(const RKTableau& tab) {
    TableauReport r;
    const int p = tab.stages();
    r.row_sum_defect = (tab.a * RVector::Ones(p) - tab.c).cwiseAbs().maxCoeff();
    r.weight_sum_defect = std::abs(tab.b.sum() - 1.0);
    Eigen::EigenSolver<RMatrix> es(tab.a);
    r.spectrum_in_right_halfplane = true;
    for (int i = 0; i < p; ++i) {
        r.eigenvalues.push_back(es.eigenvalues()(i));
        if (!(es.eigenvalues()(i).real() > 0.0)) r.spectrum_in_right_halfplane = false;
    }
    r.stiffly_accurate = tab.stiffly_accurate();
    r.mu = tab.mu_numeric();

    const double reals[] = {0.0, -1e-3, -0.1, -0.5, -1.0, -2.0, -5.0, -10.0, -100.0, -1e4};
    const double imags[] = {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4};
    for (double x : reals)
        for (double y : imags)
            for (double sign : {1.0, -1.0}) {
                const auto value = stability_function(tab, {x, sign * y});
                r.max_left_halfplane_gain =
                    std::max(r.max_left_halfplane_gain, value ? std::abs(*value) : std::numeric_limits<double>::infinity());
            }
    const double omegas[] = {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0};
    for (double w : omegas)
        for (double sign : {1.0, -1.0}) {
            const auto value = stability_function(tab, {0.0, sign * w});
            r.max_imaginary_axis_gain =
                std::max(r.max_imaginary_axis_gain, value ? std::abs(*value) : std::numeric_limits<double>::infinity());
        }
    return r;
}

CMatrix delta_matrix_general(const RKTableau& tab, cplx zeta) {
    const int p = tab.stages();
    if (zeta == cplx{1.0, 0.0}) throw GeneratorSingular(zeta, "Delta(zeta) is undefined at zeta = 1");
    const cplx factor = zeta / (1.0 - zeta);
    const CMatrix inner = factor * (CVector::Ones(p) * tab.b.transpose().cast<cplx>()) + tab.a.cast<cplx>();
    Eigen::PartialPivLU<CMatrix> lu(inner);
    if (!(lu.rcond() > 1e-14)) {
        std::ostringstream msg;
        msg << "Delta(zeta) generator is singular at zeta = " << zeta;
        throw GeneratorSingular(zeta, msg.str());
    }
    return lu.inverse();
}

CMatrix delta_matrix(const RKTableau& tab, cplx zeta) {
    if (!tab.stiffly_accurate()) return delta_matrix_general(tab, zeta);
    const int p = tab.stages();
    CMatrix shift = CMatrix::Identity(p, p);
    shift.col(p - 1) -= zeta * CVector::Ones(p);
    return tab.a_inverse().cast<cplx>() * shift;
}

SpectralDecomposition spectral_decomposition(const CMatrix& b) {
    if (b.rows() != b.cols()) throw InvalidArgument("spectral decomposition of a non-square matrix");
    Eigen::ComplexEigenSolver<CMatrix> es(b, true);
    if (es.info() != Eigen::Success) throw IllConditionedSpectrum(INFINITY, "eigenvalue iteration did not converge");
    SpectralDecomposition d;
    d.values = es.eigenvalues();
    d.vectors = es.eigenvectors();
    Eigen::JacobiSVD<CMatrix> svd(d.vectors);
    const auto& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    d.condition = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
    if (std::isfinite(d.condition)) d.inverse = d.vectors.partialPivLu().inverse();
    return d;
}

namespace {

void check_spectrum(const SpectralDecomposition& d) {
    if (!(d.condition <= kMaxSpectralCondition)) {
        std::ostringstream msg;
        msg << "eigenvector matrix condition number " << d.condition << " exceeds " << kMaxSpectralCondition;
        throw IllConditionedSpectrum(d.condition, msg.str());
    }
    for (Eigen::Index i = 0; i < d.values.size(); ++i) {
        if (!(d.values(i).real() > 0.0)) {
            std::ostringstream msg;
            msg << "eigenvalue " << d.values(i) << " is not in the right half-plane";
            throw SpectrumOutsideHalfplane(msg.str());
        }
    }
}

CMatrix assemble(const SpectralDecomposition& d, const MatrixSequence& values) {
    const Eigen::Index p = d.values.size();
    const Eigen::Index r = values.front().rows();
    const Eigen::Index c = values.front().cols();
    CMatrix out = CMatrix::Zero(p * r, p * c);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            for (Eigen::Index k = 0; k < p; ++k)
                out.block(j * r, k * c, r, c) += (d.vectors(j, i) * d.inverse(i, k)) * values[static_cast<std::size_t>(i)];
    return out;
}

}  // namespace

CMatrix dunford_eval(const Symbol& f, const SpectralDecomposition& spectrum) {
    check_spectrum(spectrum);
    MatrixSequence values;
    values.reserve(static_cast<std::size_t>(spectrum.values.size()));
    for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) values.push_back(f(spectrum.values(i)));
    return assemble(spectrum, values);
}

CMatrix dunford_eval(const Symbol& f, const CMatrix& b) { return dunford_eval(f, spectral_decomposition(b)); }

CMatrix RKNodeTable::node_matrix(std::size_t l) const { return assemble(spectra[l], symbol_values[l]); }

CVector RKNodeTable::apply(std::size_t l, const CVector& x) const {
    const auto& d = spectra[l];
    const Eigen::Index p = stages;
    CVector out = CVector::Zero(p * rows);
    for (Eigen::Index i = 0; i < p; ++i) {
        CVector w = CVector::Zero(cols);
        for (Eigen::Index k = 0; k < p; ++k) w += d.inverse(i, k) * x.segment(k * cols, cols);
        const CVector z = symbol_values[l][static_cast<std::size_t>(i)] * w;
        for (Eigen::Index j = 0; j < p; ++j) out.segment(j * rows, rows) += d.vectors(j, i) * z;
    }
    return out;
}

CVector RKNodeTable::solve(std::size_t l, const CVector& x) const {
    const auto& d = spectra[l];
    const Eigen::Index p = stages;
    CVector out = CVector::Zero(p * cols);
    for (Eigen::Index i = 0; i < p; ++i) {
        CVector w = CVector::Zero(rows);
        for (Eigen::Index k = 0; k < p; ++k) w += d.inverse(i, k) * x.segment(k * rows, rows);
        const SquareSolver solver(symbol_values[l][static_cast<std::size_t>(i)]);
        if (!solver.ok()) {
            std::ostringstream msg;
            msg << "symbol singular at node " << l << ", eigenvalue " << d.values(i);
            throw NodeFailure("singular-symbol", l, d.values(i), msg.str());
        }
        const CVector z = solver.solve(w);
        for (Eigen::Index j = 0; j < p; ++j) out.segment(j * cols, cols) += d.vectors(j, i) * z;
    }
    return out;
}

RKNodeTable evaluate_rk_nodes(const Symbol& f, const RKTableau& tab, double kappa, std::size_t n, double eps) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("time step must be positive");
    const std::size_t count = n + 1;
    const bool hermitian = f.conjugate_symmetric();
    const std::size_t computed = hermitian ? std::min(count, hermitian_half_length(n)) : count;
    const double two_pi = 2.0 * std::numbers::pi;

    RKNodeTable table;
    table.kappa = kappa;
    table.eps = eps;
    table.stages = tab.stages();
    table.rows = f.rows();
    table.cols = f.cols();
    table.spectra.resize(count);
    table.symbol_values.resize(count);

    double radius = contour_radius(n, eps);
    constexpr int kMaxNudges = 5;
    for (int attempt = 0;; ++attempt) {
        std::vector<double> conditions(computed, 0.0);
        parallel_for(computed, [&](std::size_t l) {
            const cplx zeta = std::polar(radius, -two_pi * static_cast<double>(l) / static_cast<double>(count));
            CMatrix b = delta_matrix(tab, zeta) / kappa;
            table.spectra[l] = spectral_decomposition(b);
            conditions[l] = table.spectra[l].condition;
        });
        std::size_t worst = 0;
        for (std::size_t l = 0; l < computed; ++l)
            if (!(conditions[l] <= conditions[worst])) worst = l;
        if (conditions[worst] <= kMaxSpectralCondition) break;
        if (attempt == kMaxNudges) {
            std::ostringstream msg;
            msg << "Delta(zeta)/kappa is not safely diagonalizable at node " << worst
                << " (condition " << conditions[worst] << ") after " << kMaxNudges << " radius reductions";
            throw IllConditionedSpectrum(conditions[worst], msg.str());
        }
        radius *= 0.995;
    }
    table.radius = radius;

    parallel_for(
        computed,
        [&](std::size_t l) {
            const auto& d = table.spectra[l];
            auto& values = table.symbol_values[l];
            values.resize(static_cast<std::size_t>(d.values.size()));
            for (Eigen::Index i = 0; i < d.values.size(); ++i) {
                const cplx s = d.values(i);
                if (!(s.real() > 0.0)) {
                    std::ostringstream msg;
                    msg << "node " << l << ": eigenvalue " << s << " outside the right half-plane";
                    throw NodeFailure("spectrum-outside-halfplane", l, s, msg.str());
                }
                try {
                    values[static_cast<std::size_t>(i)] = f(s);
                } catch (const Error& e) {
                    throw NodeFailure(e.category(), l, s, "node " + std::to_string(l) + ": " + e.what());
                }
            }
        },
        !f.thread_safe());

    if (hermitian) {
        for (std::size_t l = 1; l <= n / 2; ++l) {
            const auto& src = table.spectra[l];
            auto& dst = table.spectra[count - l];
            dst.vectors = src.vectors.conjugate();
            dst.inverse = src.inverse.conjugate();
            dst.values = src.values.conjugate();
            dst.condition = src.condition;
            table.symbol_values[count - l].clear();
            for (const auto& v : table.symbol_values[l]) table.symbol_values[count - l].push_back(v.conjugate());
        }
    }
    return table;
}

namespace {

inline double inv_power(double radius, std::size_t n) { return std::pow(radius, -static_cast<double>(n)); }

void scale_rows(Series& data, double radius, bool inverse) {
    for (Eigen::Index m = 0; m < data.rows(); ++m)
        data.row(m) *= inverse ? inv_power(radius, static_cast<std::size_t>(m)) : std::pow(radius, static_cast<double>(m));
}

}  // namespace

WeightTable rk_cq_weights(const Symbol& f, const RKTableau& tab, double kappa, std::size_t n, double eps,
                          bool exact_leading) {
    const RKNodeTable nodes = evaluate_rk_nodes(f, tab, kappa, n, eps);
    const std::size_t count = n + 1;
    MatrixSequence hat(count);
    for (std::size_t l = 0; l < count; ++l) hat[l] = nodes.node_matrix(l);

    WeightTable table;
    table.kappa = kappa;
    table.radius = nodes.radius;
    table.eps = eps;
    table.scheme = tab.name;
    table.tableau = tab.name;
    table.stages = tab.stages();
    const Eigen::Index rows = hat.front().rows(), cols = hat.front().cols();
    table.weights.assign(count, CMatrix::Zero(rows, cols));
    std::vector<cplx> entry(count);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (std::size_t l = 0; l < count; ++l) entry[l] = hat[l](i, j);
            const auto coeff = idft(entry);
            for (std::size_t k = 0; k < count; ++k) table.weights[k](i, j) = coeff[k] * inv_power(nodes.radius, k);
        }
    if (exact_leading) table.weights[0] = dunford_eval(f, CMatrix(tab.a_inverse().cast<cplx>() / kappa));
    return table;
}

Series sample_stages(const std::function<CVector(double)>& g, const RKTableau& tab, double kappa, std::size_t n,
                     Eigen::Index dim) {
    const int p = tab.stages();
    Series out(static_cast<Eigen::Index>(n + 1), p * dim);
    for (std::size_t k = 0; k <= n; ++k)
        for (int j = 0; j < p; ++j) {
            const double t = static_cast<double>(k) * kappa + kappa * tab.c(j);
            const CVector v = g(t);
            if (v.size() != dim) throw InvalidArgument("sampled data has the wrong dimension");
            out.row(static_cast<Eigen::Index>(k)).segment(j * dim, dim) = v.transpose();
        }
    return out;
}

Series extract_steps(const RKTableau& tab, const Series& stages, Eigen::Index dim) {
    const int p = tab.stages();
    if (stages.cols() != p * dim) throw InvalidArgument("stage data has the wrong width");
    const double mu = tab.mu();
    const RVector d = tab.d();
    Series steps(stages.rows(), dim);
    CVector previous = CVector::Zero(dim);
    for (Eigen::Index k = 0; k < stages.rows(); ++k) {
        CVector next = mu * previous;
        if (tab.stiffly_accurate()) {
            next = stages.row(k).segment((p - 1) * dim, dim).transpose();  // exact: e_p^T y_n
        } else {
            for (int j = 0; j < p; ++j) next += d(j) * stages.row(k).segment(j * dim, dim).transpose();
        }
        steps.row(k) = next.transpose();
        previous = next;
    }
    return steps;
}

RKOutput rk_forward(const RKNodeTable& nodes, const RKTableau& tab, const Series& stage_samples) {
    const Eigen::Index p = nodes.stages;
    if (static_cast<std::size_t>(stage_samples.rows()) != nodes.spectra.size())
        throw InvalidArgument("rk_forward: sample count does not match the node table");
    if (stage_samples.cols() != p * nodes.cols) throw InvalidArgument("rk_forward: stage data has the wrong width");
    Series h = stage_samples;
    scale_rows(h, nodes.radius, false);
    dft_columns(h);
    Series v(h.rows(), p * nodes.rows);
    parallel_for(static_cast<std::size_t>(h.rows()), [&](std::size_t l) {
        const auto row = static_cast<Eigen::Index>(l);
        v.row(row) = nodes.apply(l, h.row(row).transpose()).transpose();
    });
    idft_columns(v);
    scale_rows(v, nodes.radius, true);
    RKOutput out;
    out.steps = extract_steps(tab, v, nodes.rows);
    out.stages = std::move(v);
    return out;
}

RKOutput rk_forward(const Symbol& f, const RKTableau& tab, double kappa, const Series& stage_samples, double eps) {
    if (stage_samples.rows() == 0) throw InvalidArgument("rk_forward: empty data");
    return rk_forward(evaluate_rk_nodes(f, tab, kappa, static_cast<std::size_t>(stage_samples.rows()) - 1, eps), tab,
                      stage_samples);
}

RKOutput rk_forward(const Symbol& f, const RKTableau& tab, double kappa, const std::function<CVector(double)>& g,
                    std::size_t n, double eps) {
    return rk_forward(f, tab, kappa, sample_stages(g, tab, kappa, n, f.cols()), eps);
}

Series rk_solve(const RKNodeTable& nodes, const Series& stage_rhs) {
    const Eigen::Index p = nodes.stages;
    if (nodes.rows != nodes.cols) throw InvalidArgument("rk_solve needs a square symbol");
    if (static_cast<std::size_t>(stage_rhs.rows()) != nodes.spectra.size())
        throw InvalidArgument("rk_solve: sample count does not match the node table");
    if (stage_rhs.cols() != p * nodes.rows) throw InvalidArgument("rk_solve: stage data has the wrong width");
    Series v = stage_rhs;
    scale_rows(v, nodes.radius, false);
    dft_columns(v);
    Series w(v.rows(), p * nodes.cols);
    parallel_for(static_cast<std::size_t>(v.rows()), [&](std::size_t l) {
        const auto row = static_cast<Eigen::Index>(l);
        w.row(row) = nodes.solve(l, v.row(row).transpose()).transpose();
    });
    idft_columns(w);
    scale_rows(w, nodes.radius, true);
    return w;
}

Series rk_solve(const Symbol& f, const RKTableau& tab, double kappa, const Series& stage_rhs, double eps) {
    if (stage_rhs.rows() == 0) throw InvalidArgument("rk_solve: empty data");
    return rk_solve(evaluate_rk_nodes(f, tab, kappa, static_cast<std::size_t>(stage_rhs.rows()) - 1, eps), stage_rhs);
}

Series rk_solve(const Symbol& f, const RKTableau& tab, double kappa, const std::function<CVector(double)>& h,
                std::size_t n, double eps) {
    return rk_solve(f, tab, kappa, sample_stages(h, tab, kappa, n, f.rows()), eps);
}

Series rk_piece(const RKNodeTable& nodes, const Series& u, std::size_t q, std::size_t m) {
    const std::size_t n = nodes.steps();
    if (m > n) throw InvalidArgument("rk_piece: need N >= M");
    if (q >= m) throw InvalidArgument("rk_piece: need Q < M");
    if (static_cast<std::size_t>(u.rows()) < q + 1) throw InvalidArgument("rk_piece: need Q+1 data rows");
    const Eigen::Index p = nodes.stages;
    if (u.cols() != p * nodes.cols) throw InvalidArgument("rk_piece: dimension mismatch");

    const std::size_t count = n + 1;
    Series w = Series::Zero(static_cast<Eigen::Index>(count), u.cols());
    for (std::size_t k = 0; k <= q; ++k)
        w.row(static_cast<Eigen::Index>(k)) = u.row(static_cast<Eigen::Index>(k)) * std::pow(nodes.radius, static_cast<double>(k));
    dft_columns(w);
    Series hh(static_cast<Eigen::Index>(count), p * nodes.rows);
    const double two_pi = 2.0 * std::numbers::pi;
    parallel_for(count, [&](std::size_t l) {
        const std::size_t e = (l * ((q + 1) % count)) % count;
        const cplx phase = std::polar(1.0, two_pi * static_cast<double>(e) / static_cast<double>(count));
        const auto row = static_cast<Eigen::Index>(l);
        hh.row(row) = (phase * nodes.apply(l, w.row(row).transpose())).transpose();
    });
    idft_columns(hh);
    Series out(static_cast<Eigen::Index>(m - q), p * nodes.rows);
    for (std::size_t k = 0; k < m - q; ++k)
        out.row(static_cast<Eigen::Index>(k)) = hh.row(static_cast<Eigen::Index>(k)) * inv_power(nodes.radius, k + q + 1);
    return out;
}

Series rk_piece(const Symbol& f, const RKTableau& tab, double kappa, const Series& u, std::size_t q, std::size_t m,
                std::size_t n, double eps) {
    return rk_piece(evaluate_rk_nodes(f, tab, kappa, n, eps), u, q, m);
}

}  // namespace cq
