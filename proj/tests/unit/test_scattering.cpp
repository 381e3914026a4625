#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "cq/bessel.hpp"
#include "cq/errors.hpp"
#include "cq/parallel.hpp"
#include "cq/scattering.hpp"
#include "util.hpp"

using namespace cq;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

double circulant_defect(const CMatrix& m) {
    const Eigen::Index n = m.rows();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) worst = std::max(worst, std::abs(m(i, j) - m(0, (j - i + n) % n)));
    return worst;
}

// Entries straight from the Hankel ascending series: (i/4) H0(i s r) and (s/4) H1(i s r) (d.n)/r.
CMatrix hankel_V(const BoundaryGeometry& g, cplx s) {
    const auto n = static_cast<Eigen::Index>(g.n);
    CMatrix v(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (const Point* p : {&g.obs_plus[i], &g.obs_minus[i]})
                acc += 0.5 * (kI / 4.0) * hankel1_series(kI * s * (*p - g.sources[j]).norm()).first;
            v(i, j) = acc;
        }
    return v;
}

CMatrix hankel_J(const BoundaryGeometry& g, cplx s) {
    const auto n = static_cast<Eigen::Index>(g.n);
    CMatrix j0(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            cplx acc = 0.0;
            for (int side = 0; side < 2; ++side) {
                const Point& p = side == 0 ? g.obs_plus[i] : g.obs_minus[i];
                const Point& nrm = side == 0 ? g.normals_plus[i] : g.normals_minus[i];
                const Point d = p - g.sources[j];
                const double r = d.norm();
                acc += 0.5 * (s / 4.0) * hankel1_series(kI * s * r).second * d.dot(nrm) / r;
            }
            j0(i, j) = acc;
        }
    return correction_matrix(g.n).cast<cplx>() * j0;
}

}  // namespace

TEST_CASE("curves") {
    const auto c = Curve::circle(2.0);
    for (double r : {0.0, 0.1, 0.37, 0.9}) {
        CHECK((c.x(r) - Point(2.0 * std::cos(2 * kPi * r), 2.0 * std::sin(2 * kPi * r))).norm() <= 1e-15);
        CHECK((c.x(r) - c.x(r + 1.0)).norm() <= 1e-14);
    }
    for (const auto& curve : {Curve::circle(), Curve::ellipse(2.0, 0.5), Curve::kite(), Curve::parse("kite:0.5")}) {
        for (double r = 0.0; r < 1.0; r += 0.0625) {
            const double h = 1e-6;
            const Point fd = (curve.x(r + h) - curve.x(r - h)) / (2 * h);
            CHECK((fd - curve.dx(r)).norm() <= 1e-6 * curve.dx(r).norm());
        }
    }
    CHECK((Curve::parse("ellipse:3,1").x(0.0) - Point(3.0, 0.0)).norm() <= 1e-15);
    CHECK((Curve::parse("circle").x(0.25) - Point(0.0, 1.0)).norm() <= 1e-15);
    CHECK((Curve::parse("circle:0.5").x(0.5) - Point(-0.5, 0.0)).norm() <= 1e-15);
    CHECK_THROWS_AS(Curve::parse("square"), InvalidArgument);
    CHECK_THROWS_AS(Curve::parse("ellipse:1"), InvalidArgument);
    CHECK_THROWS_AS(Curve::parse("fourier:/nonexistent/curve.txt"), IoError);

    const std::string path = "test_scattering_curve.txt";
    {
        std::ofstream out(path);
        out << "0,2\n0\n0,0\n2\n";
    }
    const auto f = Curve::parse("fourier:" + path);
    std::remove(path.c_str());
    for (double r : {0.0, 0.2, 0.65}) CHECK((f.x(r) - c.x(r)).norm() <= 1e-14);
}

TEST_CASE("boundary sampling") {
    const auto curve = Curve::ellipse(1.5, 1.0);
    const auto g = BoundaryGeometry::sample(curve, 12);
    const double h = 1.0 / 12.0;
    REQUIRE(g.sources.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        const double r = static_cast<double>(i) * h;
        CHECK((g.sources[i] - curve.x(r)).norm() <= 1e-15);
        CHECK((g.obs_plus[i] - curve.x(r + h / 6.0)).norm() <= 1e-15);
        CHECK((g.obs_minus[i] - curve.x(r - h / 6.0)).norm() <= 1e-15);
        const Point d = curve.dx(r);
        CHECK((g.source_normals[i] - h * Point(d.y(), -d.x())).norm() <= 1e-15);
        CHECK(g.source_normals[i].dot(g.sources[i]) > 0.0);
        CHECK(g.normals_plus[i].dot(g.obs_plus[i]) > 0.0);
    }
    CHECK(g.diameter == doctest::Approx(3.0).epsilon(1e-3));
    CHECK_THROWS_AS(BoundaryGeometry::sample(curve, 2), InvalidArgument);
    Curve point{[](double) { return Point(0.0, 0.0); }, [](double) { return Point(0.0, 0.0); }, "point"};
    CHECK_THROWS_AS(BoundaryGeometry::sample(point, 8), GeometryError);
    Curve open{[](double r) { return Point(r, 0.0); }, [](double) { return Point(1.0, 0.0); }, "segment"};
    CHECK_THROWS_AS(BoundaryGeometry::sample(open, 8), GeometryError);
}

TEST_CASE("mass and correction matrices") {
    for (std::size_t n : {3u, 4u, 9u, 32u}) {
        const RMatrix m = mass_matrix(n), q = correction_matrix(n);
        CHECK(m(0, 0) == 7.0 / 9.0);
        CHECK(m(0, 1) == 1.0 / 9.0);
        CHECK(m(0, n - 1) == 1.0 / 9.0);
        CHECK(q(1, 1) == 11.0 / 12.0);
        CHECK(q(1, 0) == 1.0 / 24.0);
        CHECK(q(n - 1, 0) == 1.0 / 24.0);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            CHECK(std::abs(m.row(i).sum() - 1.0) <= 2.3e-16);
            CHECK(std::abs(q.row(i).sum() - 1.0) <= 2.3e-16);
        }
        CHECK(m == m.transpose());
        CHECK(q == q.transpose());
        CHECK(circulant_defect(m.cast<cplx>()) == 0.0);
        CHECK(circulant_defect(q.cast<cplx>()) == 0.0);
    }
    CHECK(mass_matrix(5)(0, 2) == 0.0);
}

TEST_CASE("single-layer matrix") {
    const auto circle4 = BoundaryGeometry::sample(Curve::circle(), 4);
    CHECK(circulant_defect(assemble_V(circle4, 1.0)) <= 1e-12);
    const auto circle = BoundaryGeometry::sample(Curve::circle(), 16);
    CHECK(circulant_defect(assemble_V(circle, {0.7, 3.0})) <= 1e-12);
    const auto kite = BoundaryGeometry::sample(Curve::kite(), 24);
    for (const cplx s : {cplx(1.0, 0.0), cplx(0.3, 2.0), cplx(2.0, -1.0)}) {
        CHECK(assemble_V(kite, std::conj(s)) == assemble_V(kite, s).conjugate());
        const CMatrix v = assemble_V(kite, s);
        CHECK((v - hankel_V(kite, s)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    CHECK_THROWS_AS(assemble_V(kite, cplx(0.0, 1.0)), InvalidArgument);
    CHECK_THROWS_AS(assemble_V(kite, -1.0), InvalidArgument);
}

TEST_CASE("double-layer transpose matrix") {
    const auto circle = BoundaryGeometry::sample(Curve::circle(), 8);
    CHECK(circulant_defect(assemble_J(circle, 1.0)) <= 1e-12);
    CHECK(circulant_defect(assemble_J(circle, {0.5, -2.0})) <= 1e-12);
    const auto ellipse = BoundaryGeometry::sample(Curve::ellipse(1.2, 0.8), 20);
    for (const cplx s : {cplx(1.0, 0.0), cplx(0.3, 2.0), cplx(2.5, -1.0)}) {
        CHECK(assemble_J(ellipse, std::conj(s)) == assemble_J(ellipse, s).conjugate());
        CHECK((assemble_J(ellipse, s) - hankel_J(ellipse, s)).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("potential") {
    const auto g = BoundaryGeometry::sample(Curve::circle(), 10);
    CVector e1 = CVector::Zero(10);
    e1(0) = 1.0;
    const cplx s(1.0, 0.5);
    const Point center = g.sources[0];
    const cplx ref = potential_at(g, s, e1, center + Point(0.3, 0.0));
    for (double angle : {0.5, 1.9, 3.0, -2.2})
        CHECK(std::abs(potential_at(g, s, e1, center + 0.3 * Point(std::cos(angle), std::sin(angle))) - ref) <=
              1e-14 * std::abs(ref));
    CHECK(std::abs(ref - k0(0.3 * s) / (2.0 * kPi)) <= 1e-15);

    const CVector a = testutil::random_matrix(10, 1), b = testutil::random_matrix(10, 1);
    const Point z(0.2, -0.4);
    const cplx alpha(0.3, 1.1);
    CHECK(std::abs(potential_at(g, s, CVector(alpha * a + b), z) - (alpha * potential_at(g, s, a, z) + potential_at(g, s, b, z))) <=
          1e-14);

    const CVector ones = CVector::Ones(10);
    CHECK(std::abs(potential_at(g, 1.0, ones, Point(50.0, 0.0))) <= std::exp(-40.0) * 10.0);

    const std::vector<Point> pts = {z, Point(3.0, 1.0)};
    const CMatrix rows = assemble_potential(g, s, pts);
    CHECK(std::abs((rows.row(0) * a)(0) - potential_at(g, s, a, z)) <= 1e-15);
    CHECK_THROWS_AS(potential_at(g, s, a, g.sources[3]), GeometryError);
}

TEST_CASE("inside test") {
    const auto g = BoundaryGeometry::sample(Curve::kite(), 32);
    CHECK(inside(g, Point(0.0, 0.0)));
    CHECK_FALSE(inside(g, Point(3.0, 0.0)));
    CHECK_FALSE(inside(g, Point(0.0, 1.6)));
}

TEST_CASE("incident wave") {
    CHECK(default_signal(-1.0) == 0.0);
    CHECK(default_signal(0.0) == 0.0);
    CHECK(default_signal(1.0) == doctest::Approx(std::exp(-2.0)));

    const auto g = BoundaryGeometry::sample(Curve::circle(), 16);
    const auto wave = IncidentWave::plane(g, Point(3.0, 4.0), 2.0);
    CHECK((wave.direction - Point(0.6, 0.8)).norm() <= 1e-15);
    double reach = 0.0;
    for (std::size_t i = 0; i < 16; ++i)
        for (const Point* p : {&g.sources[i], &g.obs_plus[i], &g.obs_minus[i]})
            reach = std::max(reach, std::abs(p->dot(wave.direction)));
    CHECK(wave.lag == doctest::Approx(2.0 + reach / 2.0).epsilon(1e-14));
    CHECK(wave.first_arrival(g) > 1.0);

    std::vector<double> early;
    for (double t = 0.0; t < wave.first_arrival(g); t += 0.05) early.push_back(t);
    CHECK(sample_incident(g, wave, early).cwiseAbs().maxCoeff() == 0.0);
    const Series beta = sample_incident(g, wave, {wave.first_arrival(g) + 1.0});
    CHECK(beta.cwiseAbs().maxCoeff() > 0.0);

    // all observation points with the same projection give identical data
    BoundaryGeometry flat = g;
    for (std::size_t i = 0; i < flat.n; ++i) {
        flat.obs_plus[i] = Point(0.0, static_cast<double>(i));
        flat.obs_minus[i] = Point(0.0, -static_cast<double>(i));
    }
    IncidentWave horizontal = wave;
    horizontal.direction = Point(1.0, 0.0);
    const Series same = sample_incident(flat, horizontal, {3.0, 4.0, 5.5});
    for (Eigen::Index k = 0; k < same.rows(); ++k)
        for (Eigen::Index i = 1; i < same.cols(); ++i) CHECK(same(k, i) == same(k, 0));

    IncidentWave shifted = wave;
    shifted.lag += 0.75;
    std::vector<double> t1, t0;
    for (int k = 0; k < 40; ++k) {
        t1.push_back(0.25 * k + 0.75);
        t0.push_back(0.25 * k);
    }
    CHECK(testutil::rel_diff(sample_incident(g, shifted, t1), sample_incident(g, wave, t0)) <= 1e-13);
}

TEST_CASE("time schemes and grids") {
    CHECK(TimeScheme::parse("bdf2").name() == "bdf2");
    CHECK_FALSE(TimeScheme::parse("be").is_rk());
    CHECK(TimeScheme::parse("radau3").is_rk());
    CHECK(TimeScheme::parse("lobatto4").rk->stages() == 3);
    CHECK(TimeScheme::parse("tr").multistep->kind() == DeltaKind::Trapezoidal);
    CHECK_THROWS_AS(TimeScheme::parse("rk4"), InvalidArgument);

    const auto g = BoundaryGeometry::sample(Curve::circle(), 16);
    const auto grid = SnapshotGrid::around(g, 5, 3);
    const auto pts = grid.points();
    REQUIRE(pts.size() == 15);
    CHECK(pts[0].y() == grid.y1);
    CHECK(pts[14].y() == grid.y0);
    CHECK(pts[0].x() == grid.x0);
    CHECK(pts[4].x() == grid.x1);
    CHECK(grid.x0 < -1.0);
    CHECK(grid.x1 > 1.0);
}

TEST_CASE("zero incident wave gives zero histories") {
    const auto g = BoundaryGeometry::sample(Curve::circle(), 12);
    auto wave = IncidentWave::plane(g, Point(1.0, 0.0));
    wave.amplitude = 0.0;
    ScatteringOptions opts;
    opts.probes = {Point(0.0, 0.0), Point(2.0, 1.0)};
    opts.grid = SnapshotGrid::around(g, 6, 6);
    opts.snapshot_times = {4.0};
    for (const char* id : {"bdf2", "radau3"}) {
        const auto res = solve_scattering(g, wave, TimeScheme::parse(id), 0.25, 24, opts);
        CHECK(res.eta.cwiseAbs().maxCoeff() == 0.0);
        CHECK(res.lambda.cwiseAbs().maxCoeff() == 0.0);
        CHECK(res.probe_field.cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(res.snapshots.size() == 1);
        for (double v : res.snapshots[0].scattered) CHECK(v == 0.0);
    }
}

TEST_CASE("scattering histories") {
    const auto g = BoundaryGeometry::sample(Curve::circle(), 16);
    const auto wave = IncidentWave::plane(g, Point(1.0, 0.0));
    const double t_final = 10.0;
    const std::size_t steps = 64;
    const double kappa = t_final / static_cast<double>(steps);
    ScatteringOptions opts;
    opts.probes = {Point(0.0, 0.0)};
    opts.grid = SnapshotGrid::around(g, 9, 9);
    opts.snapshot_times = {6.0};
    for (const char* id : {"bdf2", "radau3"}) {
        INFO(std::string(id));
        const auto scheme = TimeScheme::parse(id);
        const auto res = solve_scattering(g, wave, scheme, kappa, steps, opts);
        REQUIRE(res.times.size() == steps + 1);
        REQUIRE(res.eta.rows() == static_cast<Eigen::Index>(steps + 1));
        if (scheme.is_rk()) CHECK(res.eta_stages.cols() == 2 * 16);

        const double peak = res.eta.cwiseAbs().maxCoeff();
        CHECK(peak > 0.0);
        CHECK(std::isfinite(peak));
        const double arrival = wave.first_arrival(g);
        double before = 0.0;
        for (std::size_t k = 0; k <= steps; ++k)
            if (res.times[k] < arrival) before = std::max(before, res.eta.row(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff());
        CHECK(before <= 1e-10 * peak);

        // rotational symmetry about the x axis: eta at mirrored sources agree
        for (Eigen::Index j = 1; j < 8; ++j)
            CHECK(std::abs(res.eta(40, j) - res.eta(40, 16 - j)) <= 1e-8 * peak);

        const auto marching = solve_scattering(g, wave, scheme,
                                               kappa, steps, ScatteringOptions{TimeSolver::Marching, kDefaultContourEps, {}, {}, {}});
        CHECK(testutil::rel_diff(marching.eta, res.eta) <= 1e-6);
        for (std::size_t k = 0; k <= steps; ++k)
            if (res.times[k] < arrival) CHECK(marching.eta.row(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff() == 0.0);

        REQUIRE(res.snapshots.size() == 1);
        const auto& snap = res.snapshots[0];
        CHECK(snap.step == 38);
        CHECK(snap.time == res.times[snap.step]);
        const auto pts = opts.grid->points();
        for (std::size_t p = 0; p < pts.size(); ++p) {
            CHECK(snap.mask[p] == inside(g, pts[p]));
            if (snap.mask[p]) CHECK(snap.total[p] == 0.0);
        }
        CHECK(res.probe_field.rows() == static_cast<Eigen::Index>(steps + 1));
    }
}

TEST_CASE("scattering does not depend on the worker count") {
    const auto g = BoundaryGeometry::sample(Curve::kite(), 12);
    const auto wave = IncidentWave::plane(g, Point(0.0, 1.0));
    ScatteringOptions opts;
    opts.probes = {Point(0.0, 0.0)};
    set_worker_count(1);
    const auto a = solve_scattering(g, wave, TimeScheme::parse("radau3"), 0.2, 40, opts);
    set_worker_count(3);
    const auto b = solve_scattering(g, wave, TimeScheme::parse("radau3"), 0.2, 40, opts);
    set_worker_count(1);
    CHECK(a.eta == b.eta);
    CHECK(a.lambda == b.lambda);
    CHECK(a.probe_field == b.probe_field);
}
