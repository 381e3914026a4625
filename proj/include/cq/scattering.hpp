#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cq/multistep.hpp"
#include "cq/runge_kutta.hpp"
#include "cq/types.hpp"

namespace cq {

using Point = Eigen::Vector2d;

/// Closed curve r -> x(r), 1-periodic, traversed counterclockwise so that
/// n(r) = (x2'(r), -x1'(r)) points outward.
struct Curve {
    std::function<Point(double)> x;
    std::function<Point(double)> dx;
    std::string name;

    static Curve circle(double radius = 1.0);
    static Curve ellipse(double a, double b);
    /// The usual kite: (cos t + 0.65 cos 2t - 0.65, 1.5 sin t) times `scale`, t = 2 pi r.
    static Curve kite(double scale = 1.0);
    /// x_d(r) = a_d[0] + sum_k a_d[k] cos(2 pi k r) + b_d[k-1] sin(2 pi k r).
    static Curve fourier(std::vector<double> a1, std::vector<double> b1, std::vector<double> a2,
                         std::vector<double> b2);
    /// "circle[:r]", "ellipse:a,b", "kite[:scale]" or "fourier:FILE" (four
    /// comma-separated lines a1, b1, a2, b2).
    static Curve parse(const std::string& spec);
};

/// Sources m_j = x(jh), observation points m_i+- = x((i +- 1/6)h) and
/// h-scaled normals, h = 1/N.
struct BoundaryGeometry {
    std::size_t n = 0;
    std::vector<Point> sources;
    std::vector<Point> source_normals;
    std::vector<Point> obs_plus, obs_minus;
    std::vector<Point> normals_plus, normals_minus;
    std::vector<Point> outline;  // dense polygon of the curve, for inside tests
    double diameter = 0.0;

    /// Throws GeometryError for a degenerate parametrization or coincident points.
    static BoundaryGeometry sample(const Curve& curve, std::size_t n);
};

/// Circulant correction matrices: M (7/9, 1/9) and Q (11/12, 1/24).
RMatrix mass_matrix(std::size_t n);
RMatrix correction_matrix(std::size_t n);

CMatrix assemble_V(const BoundaryGeometry& geom, cplx s);
/// Q J°(s).
CMatrix assemble_J(const BoundaryGeometry& geom, cplx s);
/// Rows (1/2pi) K0(s|z_p - m_j|) for each point z_p.
CMatrix assemble_potential(const BoundaryGeometry& geom, cplx s, const std::vector<Point>& points);
cplx potential_at(const BoundaryGeometry& geom, cplx s, const CVector& eta, const Point& z);

/// Winding-number test against the sampled outline.
bool inside(const BoundaryGeometry& geom, const Point& z);

/// Default signal t^5 exp(-2t) for t > 0.
double default_signal(double t);

struct IncidentWave {
    Point direction{1.0, 0.0};
    double speed = 1.0;
    double lag = 0.0;
    double amplitude = 1.0;
    std::function<double(double)> signal = default_signal;

    /// Plane wave with t_lag = 2 + max_j |m_j . d| / c.
    static IncidentWave plane(const BoundaryGeometry& geom, Point direction, double speed = 1.0);
    double operator()(const Point& z, double t) const;
    /// Time at which the wave first touches the sampled boundary.
    double first_arrival(const BoundaryGeometry& geom) const;
};

/// beta_i(t) = average over +- of psi(c(t - t_lag) - m_i+- . d), one row per time.
Series sample_incident(const BoundaryGeometry& geom, const IncidentWave& wave, const std::vector<double>& times);

/// A multistep generator or a Runge-Kutta tableau.
struct TimeScheme {
    std::optional<DeltaGenerator> multistep;
    std::optional<RKTableau> rk;

    /// be | bdf2 | tr | radau3 | lobatto4
    static TimeScheme parse(const std::string& id);
    std::string name() const;
    bool is_rk() const { return rk.has_value(); }
};

enum class TimeSolver {
    AllSteps,  // one solve per contour node
    Marching,  // forward substitution with precomputed weights; exactly causal
};

struct SnapshotGrid {
    int width = 0;
    int height = 0;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

    /// Box around the curve with the given relative margin.
    static SnapshotGrid around(const BoundaryGeometry& geom, int width, int height, double margin = 0.6);
    /// Row-major, top row (y1) first.
    std::vector<Point> points() const;
};

/// Contour parameter for scattering runs. The all-steps solvers leak about
/// sqrt(eps) of the late signal into early steps; with 2^-52 that is ~1e-8 of
/// the peak density before the wave arrives, with 1e-24 about 1e-12.
inline constexpr double kScatteringContourEps = 1e-24;

struct ScatteringOptions {
    TimeSolver solver = TimeSolver::AllSteps;
    double eps = kScatteringContourEps;
    std::vector<double> snapshot_times;
    std::optional<SnapshotGrid> grid;
    /// Points at which the full scattered-field history is recorded.
    std::vector<Point> probes;
};

struct Snapshot {
    double time = 0.0;
    std::size_t step = 0;
    std::vector<double> scattered;  // per grid point
    std::vector<double> total;      // scattered + incident; 0 inside the obstacle
    std::vector<bool> mask;         // true inside the obstacle
};

struct ScatteringResult {
    std::vector<double> times;  // t_0 .. t_N
    Series eta;                 // rows = times, cols = boundary indices
    Series lambda;
    Series eta_stages;          // Runge-Kutta only
    Series probe_field;         // rows = times, cols = probes (scattered field)
    std::vector<Snapshot> snapshots;
};

/// Solves V_c * eta = -beta, then M lambda = -M eta / 2 + J_c * eta, and
/// evaluates the single-layer potential where requested. `steps` is the
/// number of time steps; the final time is steps * kappa.
ScatteringResult solve_scattering(const BoundaryGeometry& geom, const IncidentWave& wave, const TimeScheme& scheme,
                                  double kappa, std::size_t steps, const ScatteringOptions& options = {});

}  // namespace cq
