#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "narkoop/errors.hpp"
#include "narkoop/growth_data.hpp"
#include "narkoop/types.hpp"

namespace narkoop {

/// Two-state saturating growth model: the population grows at rate
/// r_max * S / (K_s + S) and consumes substrate with yield gamma.
struct MonodParams {
  double r_max;   // maximum growth rate, 1/min
  double k_s;     // half-velocity constant, substrate units
  double gamma;   // substrate consumed per unit of population
  double n0;      // initial population (OD units)
  double s0;      // initial substrate; zero means no growth at all
};

struct MonodState {
  double population;
  double substrate;
};

namespace detail {

inline void check_monod(const MonodParams& p, double dt, int steps) {
  if (!(p.r_max > 0.0) || !(p.k_s > 0.0) || !(p.gamma > 0.0) || !(p.n0 > 0.0)) {
    throw ContractError("monod: r_max, K_s, gamma and N0 must be strictly positive");
  }
  if (!(p.s0 >= 0.0)) throw ContractError("monod: S0 must be non-negative");
  if (!(dt > 0.0)) throw ContractError("monod: dt must be positive");
  if (steps < 1) throw ContractError("monod: steps must be >= 1");
}

inline MonodState monod_rates(const MonodParams& p, const MonodState& x) {
  const double s = std::max(x.substrate, 0.0);
  const double growth = p.r_max * s * x.population / (p.k_s + s);
  return MonodState{growth, -p.gamma * growth};
}

}  // namespace detail

/// Integrates the population/substrate system with fixed-step classical
/// fourth-order Runge-Kutta; substrate is floored at zero after each step.
/// Returns steps + 1 states sampled at t = 0, dt, ..., steps * dt.
inline std::vector<MonodState> simulate_monod_states(const MonodParams& params, double dt, int steps) {
  detail::check_monod(params, dt, steps);
  std::vector<MonodState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  MonodState x{params.n0, params.s0};
  out.push_back(x);
  for (int k = 0; k < steps; ++k) {
    const MonodState k1 = detail::monod_rates(params, x);
    const MonodState k2 = detail::monod_rates(params, {x.population + 0.5 * dt * k1.population,
                                                       x.substrate + 0.5 * dt * k1.substrate});
    const MonodState k3 = detail::monod_rates(params, {x.population + 0.5 * dt * k2.population,
                                                       x.substrate + 0.5 * dt * k2.substrate});
    const MonodState k4 = detail::monod_rates(params, {x.population + dt * k3.population,
                                                       x.substrate + dt * k3.substrate});
    x.population += dt / 6.0 * (k1.population + 2.0 * k2.population + 2.0 * k3.population + k4.population);
    x.substrate += dt / 6.0 * (k1.substrate + 2.0 * k2.substrate + 2.0 * k3.substrate + k4.substrate);
    x.substrate = std::max(x.substrate, 0.0);
    out.push_back(x);
  }
  return out;
}

/// Population trajectory only (the measured output).
inline Series simulate_monod(const MonodParams& params, double dt, int steps) {
  const auto states = simulate_monod_states(params, dt, steps);
  Series out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.population);
  return out;
}

/// Substrate concentrations of a 2D serial dilution: casein halves across
/// rows, glucose halves across columns.
struct DilutionGrid {
  std::vector<double> casein_g_l;   // one per row
  std::vector<double> glucose_g_l;  // one per column
};

inline DilutionGrid halving_grid(double casein_max, double glucose_max, int rows, int cols) {
  if (rows < 1 || cols < 1) throw ContractError("halving_grid: rows and cols must be >= 1");
  if (!(casein_max > 0.0) || !(glucose_max > 0.0)) {
    throw ContractError("halving_grid: concentrations must be positive");
  }
  DilutionGrid grid;
  grid.casein_g_l.resize(static_cast<std::size_t>(rows));
  grid.glucose_g_l.resize(static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) grid.casein_g_l[static_cast<std::size_t>(r)] = casein_max / std::pow(2.0, r);
  for (int c = 0; c < cols; ++c) grid.glucose_g_l[static_cast<std::size_t>(c)] = glucose_max / std::pow(2.0, c);
  return grid;
}

struct FamilyOptions {
  /// Additive Gaussian noise with standard deviation = fraction * (largest
  /// clean sample in the family). Zero disables noise. Noisy OD is floored
  /// at zero so datasets stay loadable.
  double noise_std_fraction = 0.0;
  std::uint64_t noise_seed = 0;
};

/// One simulated curve per (casein, glucose) condition. The mapping from
/// concentrations to Monod parameters is a documented synthetic stand-in,
/// not a calibrated biology model: the well's initial substrate is C + G
/// and its growth rate is the base rate scaled by G / (G + K_s), both
/// monotone in the concentrations.
inline GrowthDataset generate_condition_family(const MonodParams& base, const DilutionGrid& grid,
                                               double dt_min, int steps,
                                               const FamilyOptions& options = {}) {
  if (grid.casein_g_l.empty() || grid.glucose_g_l.empty()) {
    throw ContractError("generate_condition_family: empty condition grid");
  }
  if (options.noise_std_fraction < 0.0) {
    throw ContractError("generate_condition_family: noise fraction must be non-negative");
  }

  GrowthDataset dataset;
  dataset.timestep_min = dt_min;
  dataset.start_time_min = 0.0;

  const bool letter_rows = grid.casein_g_l.size() <= 26;
  for (std::size_t r = 0; r < grid.casein_g_l.size(); ++r) {
    for (std::size_t c = 0; c < grid.glucose_g_l.size(); ++c) {
      const double casein = grid.casein_g_l[r];
      const double glucose = grid.glucose_g_l[c];
      MonodParams p = base;
      p.s0 = casein + glucose;
      p.r_max = base.r_max * glucose / (glucose + base.k_s);

      GrowthSeries well;
      well.well_id = letter_rows ? std::string(1, static_cast<char>('A' + r)) + std::to_string(c + 1)
                                 : "R" + std::to_string(r + 1) + "C" + std::to_string(c + 1);
      well.casein_g_l = casein;
      well.glucose_g_l = glucose;
      well.od = simulate_monod(p, dt_min, steps);
      dataset.wells.push_back(std::move(well));
    }
  }

  if (options.noise_std_fraction > 0.0) {
    double peak = 0.0;
    for (const auto& w : dataset.wells) {
      for (double v : w.od) peak = std::max(peak, std::abs(v));
    }
    const double sigma = options.noise_std_fraction * peak;
    for (std::size_t i = 0; i < dataset.wells.size(); ++i) {
      std::seed_seq seq{options.noise_seed, static_cast<std::uint64_t>(i)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> noise(0.0, sigma);
      for (double& v : dataset.wells[i].od) v = std::max(v + noise(rng), 0.0);
    }
  }
  return dataset;
}

}  // namespace narkoop
