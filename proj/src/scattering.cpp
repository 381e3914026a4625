#include "cq/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cq/bessel.hpp"
#include "cq/errors.hpp"
#include "cq/parallel.hpp"

namespace cq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t\r") == std::string::npos) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str()) throw InvalidArgument("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

Curve Curve::circle(double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("circle radius must be positive");
    return {[radius](double r) { return Point(radius * std::cos(kTwoPi * r), radius * std::sin(kTwoPi * r)); },
            [radius](double r) {
                return Point(-kTwoPi * radius * std::sin(kTwoPi * r), kTwoPi * radius * std::cos(kTwoPi * r));
            },
            "circle"};
}

Curve Curve::ellipse(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("ellipse semi-axes must be positive");
    return {[a, b](double r) { return Point(a * std::cos(kTwoPi * r), b * std::sin(kTwoPi * r)); },
            [a, b](double r) { return Point(-kTwoPi * a * std::sin(kTwoPi * r), kTwoPi * b * std::cos(kTwoPi * r)); },
            "ellipse"};
}

Curve Curve::kite(double scale) {
    if (!(scale > 0.0)) throw InvalidArgument("kite scale must be positive");
    return {[scale](double r) {
                const double t = kTwoPi * r;
                return Point(scale * (std::cos(t) + 0.65 * std::cos(2 * t) - 0.65), scale * 1.5 * std::sin(t));
            },
            [scale](double r) {
                const double t = kTwoPi * r;
                return Point(scale * kTwoPi * (-std::sin(t) - 1.3 * std::sin(2 * t)),
                             scale * kTwoPi * 1.5 * std::cos(t));
            },
            "kite"};
}

Curve Curve::fourier(std::vector<double> a1, std::vector<double> b1, std::vector<double> a2, std::vector<double> b2) {
    if (a1.empty() || a2.empty()) throw InvalidArgument("Fourier curve needs constant terms");
    auto eval = [](const std::vector<double>& a, const std::vector<double>& b, double r, bool derivative) {
        double v = derivative ? 0.0 : a[0];
        const std::size_t top = std::max(a.size(), b.size() + 1);
        for (std::size_t k = 1; k < top; ++k) {
            const double ak = k < a.size() ? a[k] : 0.0;
            const double bk = k - 1 < b.size() ? b[k - 1] : 0.0;
            const double w = kTwoPi * static_cast<double>(k);
            if (derivative)
                v += w * (-ak * std::sin(w * r) + bk * std::cos(w * r));
            else
                v += ak * std::cos(w * r) + bk * std::sin(w * r);
        }
        return v;
    };
    return {[=](double r) { return Point(eval(a1, b1, r, false), eval(a2, b2, r, false)); },
            [=](double r) { return Point(eval(a1, b1, r, true), eval(a2, b2, r, true)); }, "fourier"};
}

Curve Curve::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (kind == "circle") {
        const auto v = parse_numbers(args);
        if (v.size() > 1) throw InvalidArgument("circle takes one radius");
        return circle(v.empty() ? 1.0 : v[0]);
    }
    if (kind == "ellipse") {
        const auto v = parse_numbers(args);
        if (v.size() != 2) throw InvalidArgument("ellipse needs two semi-axes: ellipse:a,b");
        return ellipse(v[0], v[1]);
    }
    if (kind == "kite") {
        const auto v = parse_numbers(args);
        if (v.size() > 1) throw InvalidArgument("kite takes one scale");
        return kite(v.empty() ? 1.0 : v[0]);
    }
    if (kind == "fourier") {
        std::ifstream in(args);
        if (!in) throw IoError("cannot open Fourier curve file '" + args + "'");
        std::vector<std::vector<double>> lines;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            lines.push_back(parse_numbers(line));
        }
        if (lines.size() != 4) throw InvalidArgument("Fourier curve file needs four coefficient lines");
        return fourier(lines[0], lines[1], lines[2], lines[3]);
    }
    throw InvalidArgument("unknown geometry '" + spec + "'");
}

BoundaryGeometry BoundaryGeometry::sample(const Curve& curve, std::size_t n) {
    if (n < 3) throw InvalidArgument("need at least 3 boundary points");
    BoundaryGeometry g;
    g.n = n;
    const double h = 1.0 / static_cast<double>(n);
    auto normal = [&](double r) {
        const Point d = curve.dx(r);
        return Point(h * d(1), -h * d(0));
    };
    for (std::size_t j = 0; j < n; ++j) {
        const double r = static_cast<double>(j) * h;
        g.sources.push_back(curve.x(r));
        g.source_normals.push_back(normal(r));
        g.obs_plus.push_back(curve.x(r + h / 6.0));
        g.obs_minus.push_back(curve.x(r - h / 6.0));
        g.normals_plus.push_back(normal(r + h / 6.0));
        g.normals_minus.push_back(normal(r - h / 6.0));
    }

    const std::size_t dense = std::max<std::size_t>(16 * n, 1024);
    double max_speed = 0.0, min_speed = INFINITY;
    for (std::size_t k = 0; k < dense; ++k) {
        const double r = static_cast<double>(k) / static_cast<double>(dense);
        const Point p = curve.x(r);
        if (!p.allFinite()) throw GeometryError("curve is not finite at r = " + std::to_string(r));
        g.outline.push_back(p);
        const double speed = curve.dx(r).norm();
        max_speed = std::max(max_speed, speed);
        min_speed = std::min(min_speed, speed);
    }
    if (!(min_speed > 1e-12 * max_speed) || !(max_speed > 0.0))
        throw GeometryError("curve parametrization has vanishing speed |x'(r)|");
    const Point closing = curve.x(1.0) - curve.x(0.0);
    for (const auto& p : g.outline)
        for (const auto& q : g.outline) g.diameter = std::max(g.diameter, (p - q).norm());
    if (closing.norm() > 1e-10 * g.diameter) throw GeometryError("curve is not 1-periodic");

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = std::min((g.obs_plus[i] - g.sources[j]).norm(), (g.obs_minus[i] - g.sources[j]).norm());
            if (!(d > 1e-12 * g.diameter))
                throw GeometryError("observation point " + std::to_string(i) + " coincides with source " +
                                    std::to_string(j));
        }
    return g;
}

RMatrix mass_matrix(std::size_t n) {
    if (n < 3) throw InvalidArgument("need at least 3 boundary points");
    const auto m = static_cast<Eigen::Index>(n);
    RMatrix a = RMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        a(i, i) = 7.0 / 9.0;
        a(i, (i + 1) % m) = 1.0 / 9.0;
        a(i, (i + m - 1) % m) = 1.0 / 9.0;
    }
    return a;
}

RMatrix correction_matrix(std::size_t n) {
    if (n < 3) throw InvalidArgument("need at least 3 boundary points");
    const auto m = static_cast<Eigen::Index>(n);
    RMatrix a = RMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        a(i, i) = 11.0 / 12.0;
        a(i, (i + 1) % m) = 1.0 / 24.0;
        a(i, (i + m - 1) % m) = 1.0 / 24.0;
    }
    return a;
}

namespace {

void check_frequency(cplx s) {
    if (!(s.real() > 0.0)) {
        std::ostringstream msg;
        msg << "boundary operators need Re s > 0, got s = " << s;
        throw InvalidArgument(msg.str());
    }
}

double checked_distance(const Point& a, const Point& b, const BoundaryGeometry& geom) {
    const double r = (a - b).norm();
    if (!(r > 1e-12 * geom.diameter)) throw GeometryError("evaluation point coincides with a boundary source");
    return r;
}

}  // namespace

CMatrix assemble_V(const BoundaryGeometry& geom, cplx s) {
    check_frequency(s);
    const auto n = static_cast<Eigen::Index>(geom.n);
    CMatrix v(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double rp = checked_distance(geom.obs_plus[i], geom.sources[j], geom);
            const double rm = checked_distance(geom.obs_minus[i], geom.sources[j], geom);
            v(i, j) = 0.5 * (k0(s * rp) + k0(s * rm)) / kTwoPi;
        }
    return v;
}

CMatrix assemble_J(const BoundaryGeometry& geom, cplx s) {
    check_frequency(s);
    const auto n = static_cast<Eigen::Index>(geom.n);
    CMatrix j0(n, n);
    auto term = [&](const Point& m, const Point& normal, const Point& src) {
        const Point d = m - src;
        const double r = checked_distance(m, src, geom);
        return k1(s * r) * (d.dot(normal) / r);
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            j0(i, j) = -s / kTwoPi * 0.5 *
                       (term(geom.obs_plus[i], geom.normals_plus[i], geom.sources[j]) +
                        term(geom.obs_minus[i], geom.normals_minus[i], geom.sources[j]));
    return correction_matrix(geom.n).cast<cplx>() * j0;
}

CMatrix assemble_potential(const BoundaryGeometry& geom, cplx s, const std::vector<Point>& points) {
    check_frequency(s);
    const auto n = static_cast<Eigen::Index>(geom.n);
    CMatrix p(static_cast<Eigen::Index>(points.size()), n);
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            p(i, j) = k0(s * checked_distance(points[static_cast<std::size_t>(i)], geom.sources[j], geom)) / kTwoPi;
    return p;
}

cplx potential_at(const BoundaryGeometry& geom, cplx s, const CVector& eta, const Point& z) {
    if (eta.size() != static_cast<Eigen::Index>(geom.n)) throw InvalidArgument("density has the wrong length");
    return (assemble_potential(geom, s, {z}) * eta)(0);
}

bool inside(const BoundaryGeometry& geom, const Point& z) {
    // crossing-number form of the winding number for a simple closed polygon
    const auto& poly = geom.outline;
    int winding = 0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point& a = poly[k];
        const Point& b = poly[(k + 1) % poly.size()];
        const double cross = (b(0) - a(0)) * (z(1) - a(1)) - (z(0) - a(0)) * (b(1) - a(1));
        if (a(1) <= z(1)) {
            if (b(1) > z(1) && cross > 0) ++winding;
        } else if (b(1) <= z(1) && cross < 0) {
            --winding;
        }
    }
    return winding != 0;
}

double default_signal(double t) { return t > 0.0 ? std::pow(t, 5) * std::exp(-2.0 * t) : 0.0; }

IncidentWave IncidentWave::plane(const BoundaryGeometry& geom, Point direction, double speed) {
    if (!(speed > 0.0)) throw InvalidArgument("wave speed must be positive");
    const double norm = direction.norm();
    if (!(norm > 0.0)) throw InvalidArgument("wave direction must be nonzero");
    IncidentWave w;
    w.direction = direction / norm;
    w.speed = speed;
    double reach = 0.0;
    for (std::size_t i = 0; i < geom.n; ++i)
        for (const Point* p : {&geom.sources[i], &geom.obs_plus[i], &geom.obs_minus[i]})
            reach = std::max(reach, std::abs(p->dot(w.direction)));
    w.lag = 2.0 + reach / speed;
    return w;
}

double IncidentWave::operator()(const Point& z, double t) const {
    return amplitude * signal(speed * (t - lag) - z.dot(direction));
}

double IncidentWave::first_arrival(const BoundaryGeometry& geom) const {
    double lowest = INFINITY;
    for (std::size_t i = 0; i < geom.n; ++i)
        for (const Point* p : {&geom.sources[i], &geom.obs_plus[i], &geom.obs_minus[i]})
            lowest = std::min(lowest, p->dot(direction));
    return lag + lowest / speed;
}

Series sample_incident(const BoundaryGeometry& geom, const IncidentWave& wave, const std::vector<double>& times) {
    Series beta(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(geom.n));
    for (std::size_t k = 0; k < times.size(); ++k)
        for (std::size_t i = 0; i < geom.n; ++i)
            beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
                0.5 * (wave(geom.obs_plus[i], times[k]) + wave(geom.obs_minus[i], times[k]));
    return beta;
}

TimeScheme TimeScheme::parse(const std::string& id) {
    TimeScheme t;
    if (id == "be")
        t.multistep = DeltaGenerator::backward_euler();
    else if (id == "bdf2")
        t.multistep = DeltaGenerator::bdf2();
    else if (id == "tr")
        t.multistep = DeltaGenerator::trapezoidal();
    else if (id == "radau3" || id == "lobatto4")
        t.rk = RKTableau::by_name(id);
    else
        throw InvalidArgument("unknown scheme '" + id + "' (be, bdf2, tr, radau3, lobatto4)");
    return t;
}

std::string TimeScheme::name() const { return rk ? rk->name : multistep->name(); }

SnapshotGrid SnapshotGrid::around(const BoundaryGeometry& geom, int width, int height, double margin) {
    if (width < 1 || height < 1) throw InvalidArgument("snapshot grid needs positive dimensions");
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& p : geom.outline) {
        x0 = std::min(x0, p(0));
        x1 = std::max(x1, p(0));
        y0 = std::min(y0, p(1));
        y1 = std::max(y1, p(1));
    }
    const double pad = margin * geom.diameter;
    return {width, height, x0 - pad, x1 + pad, y0 - pad, y1 + pad};
}

std::vector<Point> SnapshotGrid::points() const {
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (int r = 0; r < height; ++r) {
        const double y = height == 1 ? 0.5 * (y0 + y1) : y1 - (y1 - y0) * r / (height - 1);
        for (int c = 0; c < width; ++c) {
            const double x = width == 1 ? 0.5 * (x0 + x1) : x0 + (x1 - x0) * c / (width - 1);
            out.emplace_back(x, y);
        }
    }
    return out;
}

namespace {

struct Discretization {
    const TimeScheme& scheme;
    double kappa;
    std::size_t steps;
    double speed;
    TimeSolver solver;
    double eps;

    // Convolution with the kernel of `f(s/c)`; `data` holds N+1 step rows
    // (multistep) or N stage rows (Runge-Kutta). Returns step rows t_0..t_N.
    Series forward(const Symbol& f, const Series& data) const {
        const Symbol g = rescale(f, speed);
        if (!scheme.is_rk()) {
            if (solver == TimeSolver::AllSteps) return all_steps_forward(g, *scheme.multistep, kappa, data, eps);
            return forward_convolution_mot(cq_weights(g, *scheme.multistep, kappa, steps, eps), data,
                                           ConvolutionPath::Fft);
        }
        const auto& tab = *scheme.rk;
        Series stage_out;
        if (solver == TimeSolver::AllSteps) {
            stage_out = rk_forward(g, tab, kappa, data, eps).stages;
        } else {
            stage_out = forward_convolution_mot(rk_cq_weights(g, tab, kappa, steps - 1, eps), data,
                                                ConvolutionPath::Fft);
        }
        return with_initial_row(extract_steps(tab, stage_out, f.rows()));
    }

    // Solves the convolution equation; returns the raw (step or stage) rows.
    Series solve(const Symbol& f, const Series& rhs) const {
        const Symbol g = rescale(f, speed);
        if (!scheme.is_rk()) {
            if (solver == TimeSolver::AllSteps) return all_steps_solve(g, *scheme.multistep, kappa, rhs, eps);
            return solve_equation_mot(cq_weights(g, *scheme.multistep, kappa, steps, eps), rhs);
        }
        if (solver == TimeSolver::AllSteps) return rk_solve(g, *scheme.rk, kappa, rhs, eps);
        return solve_equation_mot(rk_cq_weights(g, *scheme.rk, kappa, steps - 1, eps), rhs);
    }

    static Series with_initial_row(const Series& steps_only) {
        Series out = Series::Zero(steps_only.rows() + 1, steps_only.cols());
        out.bottomRows(steps_only.rows()) = steps_only;
        return out;
    }

    // Sample times for the data: t_n (multistep) or t_n + c_j kappa stage-major (RK).
    std::vector<double> sample_times() const {
        std::vector<double> t;
        if (!scheme.is_rk()) {
            for (std::size_t n = 0; n <= steps; ++n) t.push_back(static_cast<double>(n) * kappa);
        } else {
            for (std::size_t n = 0; n < steps; ++n)
                for (int j = 0; j < scheme.rk->stages(); ++j)
                    t.push_back(static_cast<double>(n) * kappa + kappa * scheme.rk->c(j));
        }
        return t;
    }

    // Reshapes one row per sample time into stage-major rows for RK.
    Series arrange(const Series& per_time) const {
        if (!scheme.is_rk()) return per_time;
        const int p = scheme.rk->stages();
        const Eigen::Index d = per_time.cols();
        Series out(static_cast<Eigen::Index>(steps), p * d);
        for (Eigen::Index n = 0; n < out.rows(); ++n)
            for (int j = 0; j < p; ++j) out.row(n).segment(j * d, d) = per_time.row(n * p + j);
        return out;
    }
};

}  // namespace

ScatteringResult solve_scattering(const BoundaryGeometry& geom, const IncidentWave& wave, const TimeScheme& scheme,
                                  double kappa, std::size_t steps, const ScatteringOptions& options) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("time step must be positive");
    if (steps < 1) throw InvalidArgument("need at least one time step");
    if (!(wave.speed > 0.0)) throw InvalidArgument("wave speed must be positive");
    const Discretization disc{scheme, kappa, steps, wave.speed, options.solver, options.eps};
    const auto n = static_cast<Eigen::Index>(geom.n);

    ScatteringResult result;
    for (std::size_t k = 0; k <= steps; ++k) result.times.push_back(static_cast<double>(k) * kappa);

    const Symbol v([&geom](cplx s) { return assemble_V(geom, s); }, n, n, true, "V");
    const Symbol j([&geom](cplx s) { return assemble_J(geom, s); }, n, n, true, "J");

    const Series beta = disc.arrange(sample_incident(geom, wave, disc.sample_times()));
    const Series density = disc.solve(v, -beta);
    if (scheme.is_rk()) {
        result.eta_stages = density;
        result.eta = Discretization::with_initial_row(extract_steps(*scheme.rk, density, n));
    } else {
        result.eta = density;
    }

    const Series jeta = disc.forward(j, density);
    const Eigen::LLT<RMatrix> mass(mass_matrix(geom.n));
    result.lambda = Series(jeta.rows(), n);
    for (Eigen::Index k = 0; k < jeta.rows(); ++k) {
        const RVector re = mass.solve(RVector(jeta.row(k).real().transpose()));
        const RVector im = mass.solve(RVector(jeta.row(k).imag().transpose()));
        result.lambda.row(k) = -0.5 * result.eta.row(k) + (re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>()).transpose();
    }

    // Scattered field at arbitrary points, in chunks to bound the node tables.
    auto field = [&](const std::vector<Point>& points) {
        constexpr std::size_t kChunk = 64;
        Series out(static_cast<Eigen::Index>(steps + 1), static_cast<Eigen::Index>(points.size()));
        for (std::size_t first = 0; first < points.size(); first += kChunk) {
            const std::vector<Point> chunk(points.begin() + static_cast<std::ptrdiff_t>(first),
                                           points.begin() + static_cast<std::ptrdiff_t>(std::min(points.size(), first + kChunk)));
            const Symbol s([&geom, chunk](cplx z) { return assemble_potential(geom, z, chunk); },
                           static_cast<Eigen::Index>(chunk.size()), n, true, "S");
            out.middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(chunk.size())) =
                disc.forward(s, density);
        }
        return out;
    };

    if (!options.probes.empty()) result.probe_field = field(options.probes);

    if (!options.snapshot_times.empty()) {
        if (!options.grid) throw InvalidArgument("snapshots requested without a grid");
        const double final_time = kappa * static_cast<double>(steps);
        std::vector<std::size_t> wanted;
        for (double t : options.snapshot_times) {
            if (!(t >= 0.0) || t > final_time + 0.5 * kappa) {
                std::ostringstream msg;
                msg << "snapshot time " << t << " outside [0, " << final_time << "]";
                throw InvalidArgument(msg.str());
            }
            wanted.push_back(static_cast<std::size_t>(std::lround(t / kappa)));
        }
        const auto points = options.grid->points();
        std::vector<bool> mask(points.size());
        for (std::size_t p = 0; p < points.size(); ++p) mask[p] = inside(geom, points[p]);
        const Series u = field(points);
        for (std::size_t k = 0; k < wanted.size(); ++k) {
            Snapshot snap;
            snap.step = wanted[k];
            snap.time = result.times[wanted[k]];
            snap.mask = mask;
            for (std::size_t p = 0; p < points.size(); ++p) {
                const double scattered = u(static_cast<Eigen::Index>(wanted[k]), static_cast<Eigen::Index>(p)).real();
                snap.scattered.push_back(scattered);
                snap.total.push_back(mask[p] ? 0.0 : scattered + wave(points[p], snap.time));
            }
            result.snapshots.push_back(std::move(snap));
        }
    }
    return result;
}

}  // namespace cq
