#include "cq/harness.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cq/errors.hpp"
#include "cq/parallel.hpp"
#include "cq/runge_kutta.hpp"
#include "cq/weights_io.hpp"

namespace cq {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
        throw InvalidArgument(key + ": not a finite number: '" + text + "'");
    return v;
}

std::size_t parse_count(const std::string& text, const std::string& key) {
    const double v = parse_double(text, key);
    if (v < 0 || v != std::floor(v) || v > 1e9) throw InvalidArgument(key + ": not a count: '" + text + "'");
    return static_cast<std::size_t>(v);
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item, key));
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::pair<std::string, std::optional<double>> split_kind(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return {text, std::nullopt};
    return {text.substr(0, colon), parse_double(text.substr(colon + 1), text.substr(0, colon))};
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    double error = 0.0, l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol, &error, &l1);
    if (!std::isfinite(value) || error > tol * std::max(l1, 1e-300) + 1e-300) {
        std::ostringstream msg;
        msg << "quadrature on [" << a << ", " << b << "] stopped at error estimate " << error << " (L1 norm " << l1
            << ", tolerance " << tol << ")";
        throw OracleFailure(msg.str());
    }
    return value;
}

void require_grid(std::size_t steps, std::size_t minimum = 1) {
    if (steps < minimum) throw InvalidArgument("need at least " + std::to_string(minimum) + " time steps");
}

}  // namespace

std::vector<double> oracle_convolution(const KernelSpec& kernel, const std::function<double(double)>& g,
                                       const std::vector<double>& times, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("oracle tolerance must be positive");
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t <= 0.0) {
            out.push_back(0.0);
            continue;
        }
        switch (kernel.kind) {
            case KernelKind::Exponential: {
                const double c = kernel.param;
                out.push_back(integrate([&](double tau) { return std::exp(c * tau) * g(t - tau); }, 0.0, t, tol));
                break;
            }
            case KernelKind::Sine: {
                const double c = kernel.param;
                if (!(c > 0.0)) throw InvalidArgument("sine kernel needs c > 0");
                out.push_back(integrate([&](double tau) { return std::sin(c * tau) / c * g(t - tau); }, 0.0, t, tol));
                break;
            }
            case KernelKind::Abel: {
                const double scale = 2.0 / std::sqrt(std::numbers::pi);
                out.push_back(integrate([&](double u) { return scale * g(t - u * u); }, 0.0, std::sqrt(t), tol));
                break;
            }
            case KernelKind::Delay:
                out.push_back(t >= kernel.param ? g(t - kernel.param) : 0.0);
                break;
        }
    }
    return out;
}

SymbolSpec SymbolSpec::parse(const std::string& text) {
    const auto [kind, value] = split_kind(trim(text));
    SymbolSpec s{kind, value.value_or(0.0)};
    if (kind == "abel" || kind == "antiderivative") {
        if (value) throw InvalidArgument("symbol '" + kind + "' takes no parameter");
    } else if (kind == "resolvent" || kind == "oscillator" || kind == "power" || kind == "delay") {
        if (!value) throw InvalidArgument("symbol '" + kind + "' needs a parameter, e.g. " + kind + ":1");
        if (kind == "oscillator" && !(s.param > 0.0)) throw InvalidArgument("oscillator needs c > 0");
        if (kind == "delay" && !(s.param >= 0.0)) throw InvalidArgument("delay needs t0 >= 0");
    } else {
        throw InvalidArgument("unknown symbol '" + text +
                              "' (resolvent:c, oscillator:c, power:alpha, delay:t0, abel, antiderivative)");
    }
    return s;
}

Symbol SymbolSpec::make() const {
    if (kind == "resolvent") return resolvent(param);
    if (kind == "oscillator") return oscillator(param);
    if (kind == "power") return power(param);
    if (kind == "delay") return delay(param);
    if (kind == "abel") return power(-0.5);
    if (kind == "antiderivative") return power(-1.0);
    throw InvalidArgument("unknown symbol '" + kind + "'");
}

std::optional<KernelSpec> SymbolSpec::kernel() const {
    if (kind == "resolvent") return KernelSpec{KernelKind::Exponential, param};
    if (kind == "oscillator") return KernelSpec{KernelKind::Sine, param};
    if (kind == "delay") return KernelSpec{KernelKind::Delay, param};
    if (kind == "abel" || (kind == "power" && param == -0.5)) return KernelSpec{KernelKind::Abel, 0.0};
    if (kind == "antiderivative" || (kind == "power" && param == -1.0)) return KernelSpec{KernelKind::Exponential, 0.0};
    return std::nullopt;
}

std::string SymbolSpec::str() const {
    if (kind == "abel" || kind == "antiderivative") return kind;
    return kind + ":" + fmt(param);
}

SignalSpec SignalSpec::parse(const std::string& text) {
    const auto [kind, value] = split_kind(trim(text));
    SignalSpec s{kind, value.value_or(0.0)};
    if (kind == "t5exp" || kind == "one") {
        if (value) throw InvalidArgument("signal '" + kind + "' takes no parameter");
    } else if (kind == "power") {
        if (!value || !(s.param >= 0.0)) throw InvalidArgument("signal power:k needs k >= 0");
    } else if (kind == "sin") {
        if (!value) throw InvalidArgument("signal sin:w needs a frequency");
    } else {
        throw InvalidArgument("unknown signal '" + text + "' (t5exp, one, power:k, sin:w)");
    }
    return s;
}

std::function<double(double)> SignalSpec::function() const {
    const double p = param;
    if (kind == "t5exp") return [](double t) { return t > 0.0 ? std::pow(t, 5) * std::exp(-t) : 0.0; };
    if (kind == "one") return [](double t) { return t >= 0.0 ? 1.0 : 0.0; };
    if (kind == "power") return [p](double t) { return t > 0.0 ? std::pow(t, p) : (p == 0.0 && t == 0.0 ? 1.0 : 0.0); };
    if (kind == "sin") return [p](double t) { return t > 0.0 ? std::sin(p * t) : 0.0; };
    throw InvalidArgument("unknown signal '" + kind + "'");
}

std::string SignalSpec::str() const { return kind == "t5exp" || kind == "one" ? kind : kind + ":" + fmt(param); }

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key), value = trim(raw_value);
    if (key == "scheme") {
        TimeScheme::parse(value);
        scheme = value;
    } else if (key == "kappa") {
        const double v = parse_double(value, key);
        if (!(v > 0.0)) throw InvalidArgument("kappa must be positive");
        kappa = v;
    } else if (key == "steps") {
        const auto v = parse_count(value, key);
        if (v < 1) throw InvalidArgument("steps must be at least 1");
        steps = v;
    } else if (key == "final_time") {
        const double v = parse_double(value, key);
        if (!(v > 0.0)) throw InvalidArgument("final_time must be positive");
        final_time = v;
    } else if (key == "symbol") {
        SymbolSpec::parse(value);
        symbol = value;
    } else if (key == "signal") {
        SignalSpec::parse(value);
        signal = value;
    } else if (key == "out") {
        if (value.empty()) throw InvalidArgument("out must name a directory");
        out = value;
    } else if (key == "eps") {
        const double v = parse_double(value, key);
        if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
        eps = v;
    } else if (key == "block") {
        const auto v = parse_count(value, key);
        if (v < 1) throw InvalidArgument("block must be at least 1");
        block = v;
    } else if (key == "solver") {
        if (value != "all-steps" && value != "marching" && value != "look-ahead")
            throw InvalidArgument("solver must be all-steps, marching or look-ahead");
        solver = value;
    } else if (key == "levels") {
        const auto v = parse_count(value, key);
        if (v < 4 || v > 16) throw InvalidArgument("levels must be between 4 and 16 (at least three error pairs)");
        levels = static_cast<int>(v);
    } else if (key == "tol") {
        const double v = parse_double(value, key);
        if (!(v > 0.0 && v <= 1e-3)) throw InvalidArgument("tol must lie in (0, 1e-3]");
        oracle_tol = v;
    } else if (key == "geometry") {
        Curve::parse(value);
        geometry = value;
    } else if (key == "boundary_points") {
        const auto v = parse_count(value, key);
        if (v < 3) throw InvalidArgument("boundary_points must be at least 3");
        boundary_points = v;
    } else if (key == "direction") {
        const auto v = parse_list(value, key);
        if (v.size() != 2 || (v[0] == 0.0 && v[1] == 0.0)) throw InvalidArgument("direction needs two components, not both zero");
        direction = Point(v[0], v[1]);
    } else if (key == "speed") {
        const double v = parse_double(value, key);
        if (!(v > 0.0)) throw InvalidArgument("speed must be positive");
        speed = v;
    } else if (key == "amplitude") {
        amplitude = parse_double(value, key);
    } else if (key == "grid") {
        const auto x = value.find_first_of("xX");
        if (x == std::string::npos) throw InvalidArgument("grid must look like WxH");
        const auto w = parse_count(value.substr(0, x), key), h = parse_count(value.substr(x + 1), key);
        if (w < 1 || h < 1 || w > 4096 || h > 4096) throw InvalidArgument("grid dimensions must lie in [1, 4096]");
        grid = std::make_pair(static_cast<int>(w), static_cast<int>(h));
    } else if (key == "snapshots") {
        auto v = parse_list(value, key);
        for (double t : v)
            if (!(t >= 0.0)) throw InvalidArgument("snapshot times must be nonnegative");
        snapshots = std::move(v);
    } else if (key == "workers") {
        const auto v = parse_count(value, key);
        if (v < 1 || v > 256) throw InvalidArgument("workers must lie in [1, 256]");
        workers = static_cast<unsigned>(v);
    } else {
        throw InvalidArgument("unknown configuration key '" + key + "'");
    }
}

void RunConfig::merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument(path + ":" + std::to_string(number) + ": expected key = value");
        try {
            set(t.substr(0, eq), t.substr(eq + 1));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(path + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

RunConfig RunConfig::from_file(const std::string& path) {
    RunConfig cfg;
    cfg.merge_file(path);
    return cfg;
}

std::size_t RunConfig::resolved_steps() const {
    if (steps) return *steps;
    if (!final_time) throw InvalidArgument("give either steps or final_time");
    const double ratio = *final_time / kappa;
    const double rounded = std::round(ratio);
    if (rounded < 1 || std::abs(ratio - rounded) > 1e-9 * rounded)
        throw InvalidArgument("final_time is not a whole number of steps of size kappa");
    return static_cast<std::size_t>(rounded);
}

double ConvergenceReport::min_order() const {
    double lowest = INFINITY;
    for (const auto& r : rows)
        if (r.order) lowest = std::min(lowest, *r.order);
    return lowest;
}

std::string ConvergenceReport::to_csv() const {
    std::ostringstream out;
    out << "# scheme=" << scheme << "\n# symbol=" << symbol << "\n# signal=" << signal << "\n# T=" << fmt(final_time)
        << "\n# eps=" << fmt(eps) << "\n# norm=" << norm << "\n";
    out << "kappa,steps,error,order\n";
    for (const auto& r : rows)
        out << fmt(r.kappa) << ',' << r.steps << ',' << fmt(r.error) << ',' << (r.order ? fmt(*r.order) : "") << '\n';
    return out.str();
}

namespace {

// y_0..y_N of F(d/dt) g on the grid t_n = n kappa.
Series scheme_forward(const RunConfig& cfg, const Symbol& f, const std::function<double(double)>& g, double kappa,
                      std::size_t n) {
    const double eps = cfg.eps.value_or(kDefaultContourEps);
    const TimeScheme scheme = TimeScheme::parse(cfg.scheme);
    if (!scheme.is_rk()) {
        Series samples(static_cast<Eigen::Index>(n + 1), 1);
        for (std::size_t k = 0; k <= n; ++k) samples(static_cast<Eigen::Index>(k), 0) = g(static_cast<double>(k) * kappa);
        if (cfg.solver == "all-steps") return all_steps_forward(f, *scheme.multistep, kappa, samples, eps);
        return forward_convolution_mot(cq_weights(f, *scheme.multistep, kappa, n, eps), samples, ConvolutionPath::Fft);
    }
    require_grid(n);
    const auto& tab = *scheme.rk;
    const auto vec = [&g](double t) { return CVector::Constant(1, g(t)); };
    Series stage_out;
    if (cfg.solver == "all-steps") {
        stage_out = rk_forward(f, tab, kappa, vec, n - 1, eps).stages;
    } else {
        stage_out = forward_convolution_mot(rk_cq_weights(f, tab, kappa, n - 1, eps),
                                            sample_stages(vec, tab, kappa, n - 1, 1), ConvolutionPath::Fft);
    }
    Series out = Series::Zero(static_cast<Eigen::Index>(n + 1), 1);
    out.bottomRows(static_cast<Eigen::Index>(n)) = extract_steps(tab, stage_out, 1);
    return out;
}

}  // namespace

Series run_convolve(const RunConfig& cfg) {
    set_worker_count(cfg.workers);
    if (cfg.solver == "look-ahead") throw InvalidArgument("look-ahead applies to solve, not convolve");
    return scheme_forward(cfg, SymbolSpec::parse(cfg.symbol).make(), SignalSpec::parse(cfg.signal).function(),
                          cfg.kappa, cfg.resolved_steps());
}

Series run_solve(const RunConfig& cfg) {
    set_worker_count(cfg.workers);
    const double eps = cfg.eps.value_or(kDefaultContourEps);
    const TimeScheme scheme = TimeScheme::parse(cfg.scheme);
    const Symbol f = SymbolSpec::parse(cfg.symbol).make();
    const auto g = SignalSpec::parse(cfg.signal).function();
    const std::size_t n = cfg.resolved_steps();
    const double kappa = cfg.kappa;
    if (!scheme.is_rk()) {
        Series rhs(static_cast<Eigen::Index>(n + 1), 1);
        for (std::size_t k = 0; k <= n; ++k) rhs(static_cast<Eigen::Index>(k), 0) = g(static_cast<double>(k) * kappa);
        if (cfg.solver == "all-steps") return all_steps_solve(f, *scheme.multistep, kappa, rhs, eps);
        if (cfg.solver == "look-ahead")
            return look_ahead_solve(f, *scheme.multistep, kappa, rhs, std::min(cfg.block, n + 1), eps);
        return solve_equation_mot(cq_weights(f, *scheme.multistep, kappa, n, eps), rhs);
    }
    if (cfg.solver == "look-ahead") throw InvalidArgument("look-ahead is implemented for multistep schemes only");
    const auto& tab = *scheme.rk;
    const Series rhs = sample_stages([&g](double t) { return CVector::Constant(1, g(t)); }, tab, kappa, n - 1, 1);
    const Series stages = cfg.solver == "all-steps" ? rk_solve(f, tab, kappa, rhs, eps)
                                                    : solve_equation_mot(rk_cq_weights(f, tab, kappa, n - 1, eps), rhs);
    Series out = Series::Zero(static_cast<Eigen::Index>(n + 1), 1);
    out.bottomRows(static_cast<Eigen::Index>(n)) = extract_steps(tab, stages, 1);
    return out;
}

ConvergenceReport run_convergence(const RunConfig& cfg) {
    set_worker_count(cfg.workers);
    const SymbolSpec symbol = SymbolSpec::parse(cfg.symbol);
    const auto kernel = symbol.kernel();
    if (!kernel) throw InvalidArgument("symbol '" + cfg.symbol + "' has no oracle kernel");
    const SignalSpec signal = SignalSpec::parse(cfg.signal);
    const auto g = signal.function();
    const Symbol f = symbol.make();
    const double final_time = cfg.final_time.value_or(2.0);

    ConvergenceReport report;
    report.scheme = cfg.scheme;
    report.symbol = symbol.str();
    report.signal = signal.str();
    report.final_time = final_time;
    report.eps = cfg.eps.value_or(kDefaultContourEps);

    double kappa = cfg.kappa;
    for (int level = 0; level < cfg.levels; ++level, kappa /= 2.0) {
        RunConfig run = cfg;
        run.kappa = kappa;
        run.steps.reset();
        run.final_time = final_time;
        const std::size_t n = run.resolved_steps();
        const Series y = scheme_forward(run, f, g, kappa, n);
        std::vector<double> times(n + 1);
        for (std::size_t k = 0; k <= n; ++k) times[k] = static_cast<double>(k) * kappa;
        const auto exact = oracle_convolution(*kernel, g, times, cfg.oracle_tol);
        double error = 0.0;
        for (std::size_t k = 0; k <= n; ++k)
            error = std::max(error, std::abs(y(static_cast<Eigen::Index>(k), 0) - exact[k]));
        if (!std::isfinite(error) || error == 0.0) {
            std::ostringstream msg;
            msg << "error at kappa = " << kappa << " is " << error << "; no order can be computed";
            throw Error("degenerate-error", msg.str());
        }
        ConvergenceRow row{kappa, n, error, std::nullopt};
        if (!report.rows.empty()) row.order = std::log2(report.rows.back().error / error);
        report.rows.push_back(row);
    }
    return report;
}

WeightTable make_weights(const RunConfig& cfg) {
    set_worker_count(cfg.workers);
    const double eps = cfg.eps.value_or(kDefaultContourEps);
    const TimeScheme scheme = TimeScheme::parse(cfg.scheme);
    const Symbol f = SymbolSpec::parse(cfg.symbol).make();
    const std::size_t n = cfg.resolved_steps();
    if (scheme.is_rk()) return rk_cq_weights(f, *scheme.rk, cfg.kappa, n, eps);
    return cq_weights(f, *scheme.multistep, cfg.kappa, n, eps);
}

std::string export_weights(const RunConfig& cfg) {
    const WeightTable table = make_weights(cfg);
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
    const std::string path = (std::filesystem::path(cfg.out) / "weights.csv").string();
    save_weights(path, table);
    return path;
}

std::vector<Point> interior_probes(const BoundaryGeometry& geom) {
    Point centroid = Point::Zero();
    for (const auto& p : geom.outline) centroid += p;
    centroid /= static_cast<double>(geom.outline.size());
    std::vector<Point> probes;
    if (inside(geom, centroid)) probes.push_back(centroid);
    for (std::size_t q = 0; q < 4; ++q) {
        const Point& edge = geom.outline[q * geom.outline.size() / 4];
        const Point p = centroid + 0.5 * (edge - centroid);
        if (inside(geom, p)) probes.push_back(p);
    }
    return probes;
}

ScatterDiagnostics scatter_diagnostics(const BoundaryGeometry& geom, const IncidentWave& wave,
                                       const ScatteringResult& result, const std::vector<Point>& probes) {
    ScatterDiagnostics d;
    d.first_arrival = wave.first_arrival(geom);
    double before = 0.0;
    for (std::size_t k = 0; k < result.times.size(); ++k) {
        const double row = result.eta.row(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff();
        d.peak_density = std::max(d.peak_density, row);
        if (result.times[k] < d.first_arrival) before = std::max(before, row);
    }
    d.causality_ratio = d.peak_density > 0.0 ? before / d.peak_density : 0.0;
    for (std::size_t p = 0; p < probes.size() && p < static_cast<std::size_t>(result.probe_field.cols()); ++p) {
        double residual = 0.0, incident = 0.0;
        for (std::size_t k = 0; k < result.times.size(); ++k) {
            const double ui = wave(probes[p], result.times[k]);
            residual = std::max(residual, std::abs(result.probe_field(static_cast<Eigen::Index>(k),
                                                                      static_cast<Eigen::Index>(p)) + ui));
            incident = std::max(incident, std::abs(ui));
        }
        if (incident > 0.0) d.extinction = std::max(d.extinction, residual / incident);
    }
    return d;
}

std::string series_csv(const std::vector<double>& times, const Series& data, const std::string& prefix,
                       bool real_only) {
    std::ostringstream out;
    out << 't';
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        if (real_only)
            out << ',' << prefix << '_' << j;
        else
            out << ",re_" << prefix << '_' << j << ",im_" << prefix << '_' << j;
    }
    out << '\n';
    for (Eigen::Index k = 0; k < data.rows(); ++k) {
        out << fmt(times[static_cast<std::size_t>(k)]);
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            out << ',' << fmt(data(k, j).real());
            if (!real_only) out << ',' << fmt(data(k, j).imag());
        }
        out << '\n';
    }
    return out.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text, std::vector<std::string>& files) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write '" + path.string() + "'");
    files.push_back(path.string());
}

}  // namespace

ScatterDiagnostics run_scatter(const RunConfig& cfg) {
    set_worker_count(cfg.workers);
    const auto geom = BoundaryGeometry::sample(Curve::parse(cfg.geometry), cfg.boundary_points);
    IncidentWave wave = IncidentWave::plane(geom, cfg.direction, cfg.speed);
    wave.amplitude = cfg.amplitude;
    const std::size_t steps = cfg.resolved_steps();

    ScatteringOptions options;
    options.solver = cfg.solver == "marching" ? TimeSolver::Marching : TimeSolver::AllSteps;
    if (cfg.solver == "look-ahead") throw InvalidArgument("scatter supports the all-steps and marching solvers");
    options.eps = cfg.eps.value_or(kScatteringContourEps);
    options.probes = interior_probes(geom);
    options.snapshot_times = cfg.snapshots;
    if (!cfg.snapshots.empty()) {
        const auto [w, h] = cfg.grid.value_or(std::make_pair(64, 64));
        options.grid = SnapshotGrid::around(geom, w, h);
    }
    const auto result = solve_scattering(geom, wave, TimeScheme::parse(cfg.scheme), cfg.kappa, steps, options);
    ScatterDiagnostics diag = scatter_diagnostics(geom, wave, result, options.probes);

    const std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
    write_text(dir / "eta.csv", series_csv(result.times, result.eta, "eta", true), diag.files);
    write_text(dir / "lambda.csv", series_csv(result.times, result.lambda, "lambda", true), diag.files);

    if (!options.probes.empty()) {
        Series probe(result.probe_field.rows(), 2 * result.probe_field.cols());
        for (Eigen::Index k = 0; k < probe.rows(); ++k)
            for (Eigen::Index p = 0; p < result.probe_field.cols(); ++p) {
                probe(k, 2 * p) = result.probe_field(k, p).real();
                probe(k, 2 * p + 1) = wave(options.probes[static_cast<std::size_t>(p)], result.times[static_cast<std::size_t>(k)]);
            }
        std::ostringstream out;
        out << 't';
        for (std::size_t p = 0; p < options.probes.size(); ++p) out << ",scattered_" << p << ",incident_" << p;
        out << '\n';
        const std::string body = series_csv(result.times, probe, "", true);
        out << body.substr(body.find('\n') + 1);
        write_text(dir / "probes.csv", out.str(), diag.files);
    }

    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
        const auto& snap = result.snapshots[k];
        const auto& grid = *options.grid;
        const auto points = grid.points();
        const std::string stem = "snapshot_" + std::to_string(k);
        std::ostringstream csv;
        csv << "y\\x";
        for (int c = 0; c < grid.width; ++c) csv << ',' << fmt(points[static_cast<std::size_t>(c)](0));
        csv << '\n';
        for (int r = 0; r < grid.height; ++r) {
            csv << fmt(points[static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.width)](1));
            for (int c = 0; c < grid.width; ++c)
                csv << ',' << fmt(snap.total[static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.width) + static_cast<std::size_t>(c)]);
            csv << '\n';
        }
        write_text(dir / (stem + ".csv"), csv.str(), diag.files);

        const auto [lo, hi] = std::minmax_element(snap.total.begin(), snap.total.end());
        const double vmin = *lo, vmax = *hi;
        std::string pgm = "P5\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
        for (double v : snap.total) {
            const double level = vmax > vmin ? 255.0 * (v - vmin) / (vmax - vmin) : 0.0;
            pgm.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(level, 0.0, 255.0)))));
        }
        write_text(dir / (stem + ".pgm"), pgm, diag.files);

        std::ostringstream side;
        side << "image=" << stem << ".pgm\ntime=" << fmt(snap.time) << "\nstep=" << snap.step << "\nwidth=" << grid.width
             << "\nheight=" << grid.height << "\nmin=" << fmt(vmin) << "\nmax=" << fmt(vmax)
             << "\nmapping=linear (min -> 0, max -> 255)\nquantity=total field, 0 inside the obstacle\nx0=" << fmt(grid.x0)
             << "\nx1=" << fmt(grid.x1) << "\ny0=" << fmt(grid.y0) << "\ny1=" << fmt(grid.y1) << '\n';
        write_text(dir / (stem + ".txt"), side.str(), diag.files);
    }
    return diag;
}

}  // namespace cq
