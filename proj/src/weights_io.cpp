#include "cq/weights_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cq/errors.hpp"

namespace cq {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') throw IoError("weights file: bad number '" + text + "' in " + what);
    return v;
}

long long to_integer(const std::string& text, const std::string& what) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw IoError("weights file: bad integer '" + text + "' in " + what);
    return v;
}

}  // namespace

void write_weights(std::ostream& out, const WeightTable& table) {
    const bool rk = !table.tableau.empty();
    out << "# cq-weights\n";
    out << "# kind=" << (rk ? "runge-kutta" : "multistep") << '\n';
    out << "# scheme=" << table.scheme << '\n';
    if (rk) {
        out << "# tableau=" << table.tableau << '\n';
        out << "# stages=" << table.stages << '\n';
    }
    out << "# kappa=" << fmt(table.kappa) << '\n';
    out << "# N=" << table.steps() << '\n';
    out << "# R=" << fmt(table.radius) << '\n';
    out << "# eps=" << fmt(table.eps) << '\n';
    out << "# rows=" << table.rows() << '\n';
    out << "# cols=" << table.cols() << '\n';
    out << 'n';
    for (Eigen::Index i = 0; i < table.rows(); ++i)
        for (Eigen::Index j = 0; j < table.cols(); ++j) out << ",re_" << i << '_' << j << ",im_" << i << '_' << j;
    out << '\n';
    for (std::size_t n = 0; n < table.weights.size(); ++n) {
        out << n;
        const auto& w = table.weights[n];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) out << ',' << fmt(w(i, j).real()) << ',' << fmt(w(i, j).imag());
        out << '\n';
    }
    if (!out) throw IoError("failed writing weight table");
}

WeightTable read_weights(std::istream& in) {
    std::map<std::string, std::string> header;
    std::string line;
    if (!std::getline(in, line) || line != "# cq-weights") throw IoError("not a cq-weights file");
    while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("weights file: malformed header line '" + line + "'");
        header[line.substr(2, eq - 2)] = line.substr(eq + 1);
    }
    auto need = [&](const std::string& key) -> const std::string& {
        const auto it = header.find(key);
        if (it == header.end()) throw IoError("weights file: missing header field '" + key + "'");
        return it->second;
    };

    WeightTable t;
    t.scheme = need("scheme");
    const bool rk = need("kind") == "runge-kutta";
    if (rk) {
        t.tableau = need("tableau");
        t.stages = static_cast<int>(to_integer(need("stages"), "stages"));
    }
    t.kappa = to_double(need("kappa"), "kappa");
    t.radius = to_double(need("R"), "R");
    t.eps = to_double(need("eps"), "eps");
    const auto steps = to_integer(need("N"), "N");
    const auto rows = to_integer(need("rows"), "rows");
    const auto cols = to_integer(need("cols"), "cols");
    if (steps < 0 || rows < 1 || cols < 1) throw IoError("weights file: bad dimensions");

    // `line` now holds the column header
    if (line.rfind("n,", 0) != 0) throw IoError("weights file: missing column header");
    for (long long n = 0; n <= steps; ++n) {
        if (!std::getline(in, line)) throw IoError("weights file: expected " + std::to_string(steps + 1) + " rows");
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        if (to_integer(cell, "row index") != n) throw IoError("weights file: rows out of order at " + std::to_string(n));
        CMatrix w(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) {
                std::string re, im;
                if (!std::getline(ss, re, ',') || !std::getline(ss, im, ','))
                    throw IoError("weights file: short row " + std::to_string(n));
                w(i, j) = cplx(to_double(re, "row " + std::to_string(n)), to_double(im, "row " + std::to_string(n)));
            }
        if (std::getline(ss, cell, ',')) throw IoError("weights file: long row " + std::to_string(n));
        t.weights.push_back(std::move(w));
    }
    return t;
}

void save_weights(const std::string& path, const WeightTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_weights(out, table);
}

WeightTable load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_weights(in);
}

}  // namespace cq
