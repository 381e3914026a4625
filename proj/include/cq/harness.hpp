#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cq/multistep.hpp"
#include "cq/scattering.hpp"
#include "cq/symbol.hpp"

namespace cq {

/// Convolution kernels with a time-domain oracle.
enum class KernelKind {
    Exponential,  // e^{ct}, transfer function 1/(s-c)
    Sine,         // sin(ct)/c, transfer function 1/(s^2+c^2)
    Abel,         // 1/sqrt(pi t), transfer function s^{-1/2}
    Delay,        // delta(t - t0), transfer function e^{-s t0}
};

struct KernelSpec {
    KernelKind kind;
    double param = 0.0;
};

/// (k * g)(t) for each t, by adaptive Gauss-Kronrod quadrature to relative
/// tolerance `tol`. The Abel kernel is integrated after tau = u^2. Throws
/// OracleFailure if the quadrature does not reach the tolerance.
std::vector<double> oracle_convolution(const KernelSpec& kernel, const std::function<double(double)>& g,
                                       const std::vector<double>& times, double tol = 1e-12);

/// Scalar symbol described by a string:
///   resolvent:c  oscillator:c  power:alpha  delay:t0  abel  antiderivative
struct SymbolSpec {
    std::string kind;
    double param = 0.0;

    static SymbolSpec parse(const std::string& text);
    Symbol make() const;
    std::optional<KernelSpec> kernel() const;
    std::string str() const;
};

/// Data signal described by a string:
///   t5exp (t^5 e^{-t}, the default)  one  power:k  sin:w
struct SignalSpec {
    std::string kind = "t5exp";
    double param = 0.0;

    static SignalSpec parse(const std::string& text);
    /// Causal: zero for t < 0.
    std::function<double(double)> function() const;
    std::string str() const;
};

/// Flat key=value run configuration; every `set` validates immediately.
struct RunConfig {
    std::string scheme = "bdf2";
    double kappa = 0.05;
    std::optional<std::size_t> steps;
    std::optional<double> final_time;
    std::string symbol = "oscillator:1";
    std::string signal = "t5exp";
    std::string out = ".";
    std::optional<double> eps;
    std::size_t block = 32;
    std::string solver = "all-steps";  // all-steps | marching | look-ahead
    int levels = 4;
    double oracle_tol = 1e-12;
    std::string geometry = "circle:1";
    std::size_t boundary_points = 32;
    Point direction{1.0, 0.0};
    double speed = 1.0;
    double amplitude = 1.0;
    std::optional<std::pair<int, int>> grid;
    std::vector<double> snapshots;
    unsigned workers = 1;

    void set(const std::string& key, const std::string& value);
    /// Lines `key = value`; blank lines and lines starting with '#' are skipped.
    static RunConfig from_file(const std::string& path);
    void merge_file(const std::string& path);

    /// N from `steps`, or final_time / kappa when only the final time is given.
    std::size_t resolved_steps() const;
};

struct ConvergenceRow {
    double kappa = 0.0;
    std::size_t steps = 0;
    double error = 0.0;
    std::optional<double> order;  // log2(e(2 kappa) / e(kappa))
};

struct ConvergenceReport {
    std::string scheme;
    std::string symbol;
    std::string signal;
    double final_time = 0.0;
    double eps = 0.0;
    std::string norm = "max over step nodes in [0,T]";
    std::vector<ConvergenceRow> rows;

    double min_order() const;
    std::string to_csv() const;
};

/// Runs the scheme at kappa, kappa/2, ... (cfg.levels runs) up to the final
/// time (default 2) and compares with the oracle of the symbol.
ConvergenceReport run_convergence(const RunConfig& cfg);

/// Scheme output y_0..y_N of F(d/dt) g for the configured symbol and signal.
Series run_convolve(const RunConfig& cfg);
/// Solution of F(d/dt) y = g.
Series run_solve(const RunConfig& cfg);

/// Weight table for the configured scheme and symbol.
WeightTable make_weights(const RunConfig& cfg);
/// Writes <out>/weights.csv and returns its path.
std::string export_weights(const RunConfig& cfg);

/// Centroid of the outline plus four points halfway to the curve.
std::vector<Point> interior_probes(const BoundaryGeometry& geom);

struct ScatterDiagnostics {
    double first_arrival = 0.0;
    double peak_density = 0.0;
    double causality_ratio = 0.0;  // max |eta| before arrival / peak
    double extinction = 0.0;       // max over probes of sup_t |U + u_inc| / sup_t |u_inc|
    std::vector<std::string> files;
};

/// Scattering run described by cfg; writes eta.csv, lambda.csv and the
/// snapshot files into cfg.out.
ScatterDiagnostics run_scatter(const RunConfig& cfg);
ScatterDiagnostics scatter_diagnostics(const BoundaryGeometry& geom, const IncidentWave& wave,
                                       const ScatteringResult& result, const std::vector<Point>& probes);

/// CSV with a header row, 17 significant digits, LF line endings.
std::string series_csv(const std::vector<double>& times, const Series& data, const std::string& prefix,
                       bool real_only);

}  // namespace cq
