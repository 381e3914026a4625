#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace cq {

/// Base class for every error raised by the library. `category()` is a
/// short machine-readable tag that the CLI prints on failure.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

/// A symbol could not be evaluated (pole hit, singular matrix, ...).
class SingularSymbol : public Error {
public:
    SingularSymbol(std::complex<double> s, const std::string& what)
        : Error("singular-symbol", what), s_(s) {}

    std::complex<double> frequency() const noexcept { return s_; }

private:
    std::complex<double> s_;
};

/// Failure at a particular contour node. Carries the node index and the
/// frequency at which the failure happened.
class NodeFailure : public Error {
public:
    NodeFailure(std::string category, std::size_t node, std::complex<double> s,
                const std::string& what)
        : Error(std::move(category), what), node_(node), s_(s) {}

    std::size_t node() const noexcept { return node_; }
    std::complex<double> frequency() const noexcept { return s_; }

private:
    std::size_t node_;
    std::complex<double> s_;
};

class UnsolvableEquation : public Error {
public:
    explicit UnsolvableEquation(const std::string& what) : Error("unsolvable-equation", what) {}
};

class GeneratorSingular : public Error {
public:
    GeneratorSingular(std::complex<double> zeta, const std::string& what)
        : Error("generator-singular", what), zeta_(zeta) {}

    std::complex<double> zeta() const noexcept { return zeta_; }

private:
    std::complex<double> zeta_;
};

class IllConditionedSpectrum : public Error {
public:
    IllConditionedSpectrum(double condition, const std::string& what)
        : Error("ill-conditioned-spectrum", what), condition_(condition) {}

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class SpectrumOutsideHalfplane : public Error {
public:
    explicit SpectrumOutsideHalfplane(const std::string& what)
        : Error("spectrum-outside-halfplane", what) {}
};

class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& what) : Error("geometry", what) {}
};

class OracleFailure : public Error {
public:
    explicit OracleFailure(const std::string& what) : Error("oracle-failure", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace cq
