#include "cq/symbol.hpp"

#include <cmath>
#include <sstream>

#include "cq/errors.hpp"

namespace cq {

Symbol::Symbol(Evaluator eval, Eigen::Index rows, Eigen::Index cols, bool conjugate_symmetric,
               std::string name, bool thread_safe)
    : eval_(std::move(eval)),
      rows_(rows),
      cols_(cols),
      conjugate_symmetric_(conjugate_symmetric),
      name_(std::move(name)),
      thread_safe_(thread_safe) {
    if (rows_ <= 0 || cols_ <= 0) throw InvalidArgument("symbol dimensions must be positive");
    if (!eval_) throw InvalidArgument("symbol needs an evaluator");
}

CMatrix Symbol::operator()(cplx s) const {
    CMatrix value = eval_(s);
    if (value.rows() != rows_ || value.cols() != cols_) {
        std::ostringstream msg;
        msg << "symbol '" << name_ << "' returned a " << value.rows() << "x" << value.cols()
            << " matrix, declared " << rows_ << "x" << cols_;
        throw InvalidArgument(msg.str());
    }
    return value;
}

Symbol scalar_symbol(std::function<cplx(cplx)> fn, bool conjugate_symmetric, std::string name) {
    return Symbol(
        [fn = std::move(fn)](cplx s) {
            CMatrix m(1, 1);
            m(0, 0) = fn(s);
            return m;
        },
        1, 1, conjugate_symmetric, std::move(name));
}

Symbol identity_symbol(Eigen::Index dim) {
    return Symbol([dim](cplx) { return CMatrix::Identity(dim, dim); }, dim, dim, true, "identity");
}

Symbol constant_symbol(const CMatrix& value, bool conjugate_symmetric) {
    return Symbol([value](cplx) { return value; }, value.rows(), value.cols(), conjugate_symmetric, "constant");
}

Symbol resolvent(cplx c) {
    std::ostringstream name;
    name << "resolvent(" << c.real() << (c.imag() != 0.0 ? "," + std::to_string(c.imag()) : "") << ")";
    return scalar_symbol(
               [c](cplx s) {
                   const cplx d = s - c;
                   if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(c)))
                       throw SingularSymbol(s, "resolvent evaluated at its pole");
                   return 1.0 / d;
               },
               c.imag() == 0.0, name.str())
        .with_bound({-1.0, 1.0, 1.0});
}

Symbol oscillator(double c) {
    if (!(c > 0.0)) throw InvalidArgument("oscillator frequency must be positive");
    return scalar_symbol([c](cplx s) { return 1.0 / (s * s + c * c); }, true,
                         "oscillator(" + std::to_string(c) + ")")
        .with_bound({-2.0, 2.0, 1.0});
}

namespace {

cplx integer_power(cplx s, long k) {
    cplx base = k < 0 ? 1.0 / s : s;
    unsigned long e = static_cast<unsigned long>(k < 0 ? -k : k);
    cplx result = 1.0;
    while (e) {
        if (e & 1UL) result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

}  // namespace

Symbol power(double alpha) {
    const double rounded = std::round(alpha);
    const bool integral = rounded == alpha && std::abs(alpha) <= 16.0;
    return scalar_symbol(
               [alpha, integral](cplx s) -> cplx {
                   if (integral) return integer_power(s, static_cast<long>(alpha));
                   if (alpha == 0.5) return std::sqrt(s);
                   if (alpha == -0.5) return 1.0 / std::sqrt(s);
                   return std::exp(alpha * std::log(s));
               },
               true, "power(" + std::to_string(alpha) + ")")
        .with_bound({alpha, std::max(0.0, -alpha), 1.0});
}

Symbol delay(double t0) {
    if (!(t0 >= 0.0)) throw InvalidArgument("delay must be non-negative");
    return scalar_symbol([t0](cplx s) { return std::exp(-s * t0); }, true, "delay(" + std::to_string(t0) + ")");
}

Symbol compose(const Symbol& f1, const Symbol& f2) {
    if (f1.cols() != f2.rows())
        throw InvalidArgument("compose: inner dimensions differ (" + std::to_string(f1.cols()) + " vs " +
                              std::to_string(f2.rows()) + ")");
    return Symbol([f1, f2](cplx s) -> CMatrix { return f1(s) * f2(s); }, f1.rows(), f2.cols(),
                  f1.conjugate_symmetric() && f2.conjugate_symmetric(), f1.name() + "*" + f2.name(),
                  f1.thread_safe() && f2.thread_safe());
}

Symbol inverse(const Symbol& f) {
    if (!f.is_square()) throw InvalidArgument("inverse of a non-square symbol");
    return Symbol(
        [f](cplx s) -> CMatrix {
            const CMatrix value = f(s);
            if (value.rows() == 1) {
                if (value(0, 0) == cplx{}) throw SingularSymbol(s, "inverse: symbol vanishes");
                return CMatrix::Constant(1, 1, 1.0 / value(0, 0));
            }
            Eigen::PartialPivLU<CMatrix> lu(value);
            if (!(lu.rcond() > 1e-14)) throw SingularSymbol(s, "inverse: symbol is numerically singular");
            return lu.inverse();
        },
        f.rows(), f.cols(), f.conjugate_symmetric(), "inv(" + f.name() + ")", f.thread_safe());
}

Symbol rescale(const Symbol& f, double c) {
    if (!(c > 0.0)) throw InvalidArgument("rescale: speed must be positive");
    return Symbol([f, c](cplx s) { return f(s / c); }, f.rows(), f.cols(), f.conjugate_symmetric(), f.name(),
                  f.thread_safe());
}

}  // namespace cq
