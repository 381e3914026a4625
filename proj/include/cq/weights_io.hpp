#pragma once

#include <iosfwd>
#include <string>

#include "cq/multistep.hpp"

namespace cq {

/// Plain-text weight table:
///
///   # cq-weights
///   # kind=multistep            (or runge-kutta)
///   # scheme=be
///   # tableau=radau3            (runge-kutta only)
///   # stages=2                  (runge-kutta only)
///   # kappa=0.1
///   # N=128
///   # R=0.86...
///   # eps=2.2204460492503131e-16
///   # rows=1
///   # cols=1
///   n,re_0_0,im_0_0
///   0,0.090909090909090912,0
///
/// Numbers are written with 17 significant digits, so reading a file back
/// reproduces every double exactly.
void write_weights(std::ostream& out, const WeightTable& table);
WeightTable read_weights(std::istream& in);

void save_weights(const std::string& path, const WeightTable& table);
WeightTable load_weights(const std::string& path);

}  // namespace cq
