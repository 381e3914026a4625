#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cq/bessel.hpp"
#include "cq/errors.hpp"
#include "cq/harness.hpp"
#include "cq/multistep.hpp"
#include "cq/parallel.hpp"

namespace py = pybind11;
using namespace cq;

namespace {

RunConfig config_from(const py::kwargs& kwargs) {
    RunConfig cfg;
    for (const auto& [key, value] : kwargs) cfg.set(py::str(key), py::str(value));
    return cfg;
}

DeltaGenerator multistep_scheme(const std::string& scheme) {
    const auto parsed = TimeScheme::parse(scheme);
    if (!parsed.multistep) throw InvalidArgument("array routines take a multistep scheme (be, bdf2, tr), got " + scheme);
    return *parsed.multistep;
}

Series as_series(const Series& data) {
    if (data.rows() == 0) throw InvalidArgument("data needs at least one sample");
    return data;
}

py::dict report_dict(const ConvergenceReport& r) {
    py::list rows;
    for (const auto& row : r.rows) {
        py::dict d;
        d["kappa"] = row.kappa;
        d["steps"] = row.steps;
        d["error"] = row.error;
        d["order"] = row.order ? py::cast(*row.order) : py::none();
        rows.append(d);
    }
    py::dict out;
    out["scheme"] = r.scheme;
    out["symbol"] = r.symbol;
    out["signal"] = r.signal;
    out["final_time"] = r.final_time;
    out["eps"] = r.eps;
    out["min_order"] = r.min_order();
    out["rows"] = rows;
    out["csv"] = r.to_csv();
    return out;
}

}  // namespace

PYBIND11_MODULE(_cq, m) {
    m.doc() = "Convolution quadrature: weights, convolutions, convolution equations and wave scattering";

    static PyObject* error_type = py::exception<Error>(m, "CqError").release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error_type, (e.category() + ": " + e.what()).c_str());
        }
    });

    m.def("set_workers", &set_worker_count, py::arg("count"));
    m.def("workers", &worker_count);
    m.def("contour_radius", &contour_radius, py::arg("n"), py::arg("eps") = kDefaultContourEps);

    m.def("k0", py::vectorize([](cplx z) { return k0(z); }), py::arg("z"));
    m.def("k1", py::vectorize([](cplx z) { return k1(z); }), py::arg("z"));

    m.def(
        "weights",
        [](const std::string& symbol, const std::string& scheme, double kappa, std::size_t n, std::optional<double> eps) {
            const auto table = cq_weights(SymbolSpec::parse(symbol).make(), multistep_scheme(scheme), kappa, n,
                                          eps.value_or(kDefaultContourEps));
            py::array_t<cplx> out({table.weights.size(), static_cast<std::size_t>(table.rows()),
                                   static_cast<std::size_t>(table.cols())});
            auto view = out.mutable_unchecked<3>();
            for (std::size_t k = 0; k < table.weights.size(); ++k)
                for (Eigen::Index i = 0; i < table.rows(); ++i)
                    for (Eigen::Index j = 0; j < table.cols(); ++j) view(k, i, j) = table.weights[k](i, j);
            return out;
        },
        py::arg("symbol"), py::arg("scheme"), py::arg("kappa"), py::arg("n"), py::arg("eps") = py::none(),
        "Weights omega_0..omega_n as an array of shape (n+1, rows, cols).");

    m.def(
        "convolve",
        [](const std::string& symbol, const std::string& scheme, double kappa, const Series& data,
           const std::string& path, std::optional<double> eps) {
            const Series g = as_series(data);
            const Symbol f = SymbolSpec::parse(symbol).make();
            const auto delta = multistep_scheme(scheme);
            const std::size_t n = static_cast<std::size_t>(g.rows()) - 1;
            const double e = eps.value_or(kDefaultContourEps);
            if (path == "all-steps") return all_steps_forward(f, delta, kappa, g, e);
            if (path == "direct") return forward_convolution_mot(cq_weights(f, delta, kappa, n, e), g);
            if (path == "fft")
                return forward_convolution_mot(cq_weights(f, delta, kappa, n, e), g, ConvolutionPath::Fft);
            throw InvalidArgument("path must be all-steps, direct or fft, got " + path);
        },
        py::arg("symbol"), py::arg("scheme"), py::arg("kappa"), py::arg("data"), py::arg("path") = "all-steps",
        py::arg("eps") = py::none(), "Scheme approximation of F(d/dt) g at t_0..t_N; data has shape (N+1, d).");

    m.def(
        "solve",
        [](const std::string& symbol, const std::string& scheme, double kappa, const Series& data,
           const std::string& solver, std::size_t block, std::optional<double> eps) {
            const Series h = as_series(data);
            const Symbol f = SymbolSpec::parse(symbol).make();
            const auto delta = multistep_scheme(scheme);
            const std::size_t n = static_cast<std::size_t>(h.rows()) - 1;
            const double e = eps.value_or(kDefaultContourEps);
            if (solver == "all-steps") return all_steps_solve(f, delta, kappa, h, e);
            if (solver == "marching") return solve_equation_mot(cq_weights(f, delta, kappa, n, e), h);
            if (solver == "look-ahead") return look_ahead_solve(f, delta, kappa, h, std::min(block, n + 1), e);
            throw InvalidArgument("solver must be all-steps, marching or look-ahead, got " + solver);
        },
        py::arg("symbol"), py::arg("scheme"), py::arg("kappa"), py::arg("data"), py::arg("solver") = "all-steps",
        py::arg("block") = 32, py::arg("eps") = py::none(), "Solution y of F(d/dt) y = h at t_0..t_N.");

    m.def(
        "convergence", [](const py::kwargs& kwargs) { return report_dict(run_convergence(config_from(kwargs))); },
        "Convergence study; keyword arguments are configuration keys (scheme, kappa, symbol, ...).");

    m.def(
        "scatter",
        [](const py::kwargs& kwargs) {
            const auto d = run_scatter(config_from(kwargs));
            py::dict out;
            out["first_arrival"] = d.first_arrival;
            out["peak_density"] = d.peak_density;
            out["causality_ratio"] = d.causality_ratio;
            out["extinction"] = d.extinction;
            out["files"] = d.files;
            return out;
        },
        "Scattering run; writes its files into `out` and returns the diagnostics.");
}
