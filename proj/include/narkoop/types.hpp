#pragma once

#include <Eigen/Core>
#include <vector>

namespace narkoop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One scalar output sequence, uniformly sampled.
using Series = std::vector<double>;
using SeriesSet = std::vector<Series>;

inline bool all_finite(const Series& s) {
  for (double v : s) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace narkoop
