#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "cq/errors.hpp"
#include "cq/harness.hpp"

namespace {

std::string one_line(std::string text) {
    for (char& c : text)
        if (c == '\n' || c == '\r') c = ' ';
    return text;
}

int fail(const std::string& category, const std::string& message) {
    std::cerr << "error: " << category << ": " << one_line(message) << '\n';
    return 2;
}

std::string write_output(const cq::RunConfig& cfg, const std::string& name, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) throw cq::IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
    const auto path = (std::filesystem::path(cfg.out) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw cq::IoError("cannot write '" + path + "'");
    return path;
}

std::string series_file(const cq::RunConfig& cfg, const cq::Series& y) {
    std::vector<double> times(static_cast<std::size_t>(y.rows()));
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = static_cast<double>(k) * cfg.kappa;
    return cq::series_csv(times, y, "y", false);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convolution quadrature toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::map<std::string, std::string> flags;
    app.add_option("--config", config_path, "key = value configuration file; flags override it");
    const std::pair<const char*, const char*> options[] = {
        {"scheme", "be | bdf2 | tr | radau3 | lobatto4"},
        {"kappa", "time step"},
        {"steps", "number of time steps N"},
        {"final-time", "final time T (sets N = T / kappa when --steps is absent)"},
        {"symbol", "resolvent:c | oscillator:c | power:alpha | delay:t0 | abel | antiderivative"},
        {"signal", "t5exp | one | power:k | sin:w"},
        {"eps", "contour parameter, R = eps^(1/(2(N+1)))"},
        {"block", "look-ahead block size"},
        {"solver", "all-steps | marching | look-ahead"},
        {"levels", "number of step sizes in a convergence study"},
        {"tol", "oracle quadrature tolerance"},
        {"geometry", "circle[:r] | ellipse:a,b | kite[:scale] | fourier:FILE"},
        {"points", "boundary points"},
        {"direction", "incident direction x,y"},
        {"speed", "wave speed"},
        {"amplitude", "incident amplitude"},
        {"grid", "snapshot grid WxH"},
        {"snapshots", "snapshot times t1,t2,..."},
        {"out", "output directory"},
        {"workers", "worker threads"},
    };
    for (const auto& [name, help] : options)
        app.add_option_function<std::string>(
            std::string("--") + name, [&flags, key = std::string(name)](const std::string& v) { flags[key] = v; },
            help);

    auto* weights = app.add_subcommand("weights", "write the weight table to <out>/weights.csv");
    auto* convolve = app.add_subcommand("convolve", "apply F(d/dt) to the signal, <out>/convolution.csv");
    auto* solve = app.add_subcommand("solve", "solve F(d/dt) y = signal, <out>/solution.csv");
    auto* converge = app.add_subcommand("converge", "convergence study against the quadrature oracle");
    auto* scatter = app.add_subcommand("scatter", "sound-soft scattering by a closed curve");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }

    try {
        cq::RunConfig cfg;
        if (!config_path.empty()) cfg.merge_file(config_path);
        const std::map<std::string, std::string> keys{{"final-time", "final_time"}, {"points", "boundary_points"}};
        for (const auto& [flag, value] : flags) {
            const auto it = keys.find(flag);
            cfg.set(it == keys.end() ? flag : it->second, value);
        }

        if (*weights) {
            std::cout << cq::export_weights(cfg) << '\n';
        } else if (*convolve) {
            std::cout << write_output(cfg, "convolution.csv", series_file(cfg, cq::run_convolve(cfg))) << '\n';
        } else if (*solve) {
            std::cout << write_output(cfg, "solution.csv", series_file(cfg, cq::run_solve(cfg))) << '\n';
        } else if (*converge) {
            const auto report = cq::run_convergence(cfg);
            const std::string csv = report.to_csv();
            std::cout << csv;
            std::cout << write_output(cfg, "convergence.csv", csv) << '\n';
            std::printf("min_order=%.6g\n", report.min_order());
        } else if (*scatter) {
            const auto d = cq::run_scatter(cfg);
            std::printf("first_arrival=%.17g\npeak_density=%.17g\ncausality_ratio=%.6e\nextinction=%.6e\n",
                        d.first_arrival, d.peak_density, d.causality_ratio, d.extinction);
            for (const auto& f : d.files) std::cout << f << '\n';
        }
    } catch (const cq::Error& e) {
        return fail(e.category(), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
