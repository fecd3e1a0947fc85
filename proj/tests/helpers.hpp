#pragma once

// Shared test oracles: brute-force NAR simulation, the lifted one-step map,
// and companion-matrix iteration for linear AR models. Everything here is
// independent of the fitting path it is used to check.

#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace testkit {

using NarMap = std::function<double(std::span<const double>)>;  // window, oldest first

// Brute-force simulation of y_k = f(y_{k-tau}, ..., y_{k-1}).
inline std::vector<double> simulate_nar(const NarMap& f, int tau, std::vector<double> init, std::size_t length) {
  std::vector<double> y = std::move(init);
  while (y.size() < length) {
    const std::span<const double> window(y.data() + y.size() - static_cast<std::size_t>(tau),
                                         static_cast<std::size_t>(tau));
    y.push_back(f(window));
  }
  y.resize(length);
  return y;
}

// The lifted one-step map F~ on windows z = [y_k, ..., y_{k+tau-1}]:
// shifts the window and appends f(z).
inline Eigen::VectorXd nar_lift_step(const NarMap& f, const Eigen::VectorXd& z) {
  const int tau = static_cast<int>(z.size());
  Eigen::VectorXd next(tau);
  next.head(tau - 1) = z.tail(tau - 1);
  std::vector<double> window(z.data(), z.data() + z.size());
  next(tau - 1) = f(std::span<const double>(window));
  return next;
}

inline NarMap ar2_map(double a1, double a2) {
  // y_k = a1 * y_{k-1} + a2 * y_{k-2}; window is oldest-first.
  return [a1, a2](std::span<const double> w) {
    const std::size_t n = w.size();
    return a1 * w[n - 1] + a2 * w[n - 2];
  };
}

// Companion matrix acting on oldest-first windows [y_{k-2}, y_{k-1}].
inline Eigen::MatrixXd ar2_companion(double a1, double a2) {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, 1.0, a2, a1;
  return c;
}

inline std::vector<double> random_series(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

}  // namespace testkit
