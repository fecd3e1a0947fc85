#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "narkoop/dmd.hpp"
#include "narkoop/errors.hpp"
#include "narkoop/types.hpp"

namespace narkoop {

/// Free-running forecast from a single initial window.
struct Forecast {
  Vector initial_window;          // data units, length p * tau
  std::vector<double> predicted;  // data units, length = horizon
};

/// relift recomputes the dictionary from each predicted window (keeps the
/// iteration on the state manifold); linear propagates the full lifted
/// vector through the operator and only reads the state block out. The two
/// coincide for order-1 dictionaries; linear is exposed for diagnostics.
enum class RolloutMode { kRelift, kLinear };

/// Iterates the fitted operator from an initial window of tau * p samples.
/// A causal-jump model emits tau samples per application, a hankel-shift1
/// model one; the final partial block is truncated so exactly `horizon`
/// samples come back.
inline Forecast rollout(const KoopmanModel& model, const Vector& initial_window,
                        std::size_t horizon, RolloutMode mode = RolloutMode::kRelift) {
  detail::validate_model(model);
  const int window_dim = model.tau * model.output_dim;
  if (initial_window.size() != window_dim) {
    throw ContractError("rollout: initial window length " + std::to_string(initial_window.size()) +
                        " does not match tau * output_dim = " + std::to_string(window_dim));
  }
  if (horizon < 1) throw ContractError("rollout: horizon must be >= 1");
  if (!initial_window.allFinite()) throw ContractError("rollout: initial window has non-finite entries");

  const double scale = model.amplitude_scale;
  const PredictorRows predictor = extract_predictor(model);
  const int block = static_cast<int>(predictor.rows.rows());  // samples emitted per application

  Forecast result;
  result.initial_window = initial_window;
  result.predicted.reserve(horizon);

  Vector window = initial_window / scale;
  Vector lifted;
  if (mode == RolloutMode::kLinear) lifted = model.dictionary.evaluate(window);

  while (result.predicted.size() < horizon) {
    Vector emitted(block);
    if (mode == RolloutMode::kRelift) {
      const Vector psi = model.dictionary.evaluate(window);
      emitted = predictor.rows * psi;
    } else {
      lifted = model.koopman * lifted;
      const auto& state = model.dictionary.state_indices();
      if (model.variant == ModelVariant::kCausalJump) {
        for (int j = 0; j < block; ++j) emitted(j) = lifted(state[static_cast<std::size_t>(j)]);
      } else {
        const int p = model.output_dim;
        for (int j = 0; j < p; ++j) {
          emitted(j) = lifted(state[static_cast<std::size_t>(window_dim - p + j)]);
        }
      }
    }

    for (int j = 0; j < block && result.predicted.size() < horizon; ++j) {
      const double value = emitted(j) * scale;
      if (!std::isfinite(value)) {
        throw DivergenceError("rollout: non-finite prediction at step " +
                                  std::to_string(result.predicted.size() + 1),
                              result.predicted.size() + 1);
      }
      result.predicted.push_back(value);
    }

    if (result.predicted.size() >= horizon) break;

    if (mode == RolloutMode::kRelift) {
      if (!emitted.allFinite()) {
        throw DivergenceError("rollout: non-finite prediction at step " +
                                  std::to_string(result.predicted.size() + 1),
                              result.predicted.size() + 1);
      }
      if (model.variant == ModelVariant::kCausalJump) {
        window = emitted;
      } else {
        const int p = model.output_dim;
        window.head(window_dim - p) = window.tail(window_dim - p).eval();
        window.tail(p) = emitted;
      }
    }
  }
  return result;
}

/// 100 * mean((predicted - truth)^2) / mean(truth^2).
inline double normalized_mse_percent(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    throw ContractError("normalized_mse: sequences must be non-empty and of equal length");
  }
  double err = 0.0;
  double energy = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = predicted[i] - truth[i];
    err += d * d;
    energy += truth[i] * truth[i];
  }
  if (energy <= 0.0) {
    throw UndefinedMetricError("normalized_mse: reference signal has zero energy");
  }
  return 100.0 * err / energy;
}

/// A series set rescaled so the largest absolute sample over the whole set
/// is 1. One global factor, never per series, so relative amplitudes between
/// conditions survive the scaling.
struct NormalizedSet {
  SeriesSet series;
  double scale;  // originals = scale * series
};

inline NormalizedSet normalize_series(const SeriesSet& series_set) {
  if (series_set.empty()) throw ContractError("normalize_series: empty series set");
  double peak = 0.0;
  for (const Series& s : series_set) {
    for (double v : s) {
      if (!std::isfinite(v)) throw ContractError("normalize_series: non-finite sample");
      peak = std::max(peak, std::abs(v));
    }
  }
  if (peak <= 0.0) {
    throw DegenerateDataError("normalize_series: all samples are zero");
  }
  NormalizedSet out;
  out.scale = peak;
  out.series = series_set;
  for (Series& s : out.series) {
    for (double& v : s) v /= peak;
  }
  return out;
}

inline SeriesSet denormalize_series(const SeriesSet& scaled, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ContractError("denormalize_series: scale must be positive and finite");
  }
  SeriesSet out = scaled;
  for (Series& s : out) {
    for (double& v : s) v *= scale;
  }
  return out;
}

struct SeriesError {
  std::string id;
  double nmse_percent;
  std::size_t points;
};

/// Per-series normalized MSE plus a point-count weighted aggregate.
struct ErrorReport {
  double normalized_mse_percent = 0.0;
  std::vector<SeriesError> per_series;
  std::size_t horizon = 0;
};

/// Scores free-running forecasts: for each series, roll out from its first
/// tau * p samples and compare against the remainder (or the first `horizon`
/// samples of it when horizon > 0).
inline ErrorReport evaluate_forecasts(const KoopmanModel& model, std::span<const Series> series_set,
                                      std::span<const std::string> ids = {}, std::size_t horizon = 0) {
  if (series_set.empty()) throw ContractError("evaluate_forecasts: no series given");
  if (!ids.empty() && ids.size() != series_set.size()) {
    throw ContractError("evaluate_forecasts: ids and series count mismatch");
  }
  const std::size_t window = static_cast<std::size_t>(model.tau) * static_cast<std::size_t>(model.output_dim);

  ErrorReport report;
  double weighted = 0.0;
  std::size_t total_points = 0;
  for (std::size_t i = 0; i < series_set.size(); ++i) {
    const Series& s = series_set[i];
    if (s.size() < window + 1) {
      throw InsufficientDataError("evaluate_forecasts: series " + std::to_string(i) +
                                  " too short for a window of " + std::to_string(window));
    }
    std::size_t h = s.size() - window;
    if (horizon > 0) h = std::min(h, horizon);
    Vector init(static_cast<Eigen::Index>(window));
    for (std::size_t j = 0; j < window; ++j) init(static_cast<Eigen::Index>(j)) = s[j];
    const Forecast fc = rollout(model, init, h);
    const double nmse = normalized_mse_percent(
        fc.predicted, std::span<const double>(s.data() + window, h));
    report.per_series.push_back(SeriesError{
        ids.empty() ? "series-" + std::to_string(i) : ids[i], nmse, h});
    weighted += nmse * static_cast<double>(h);
    total_points += h;
    report.horizon = std::max(report.horizon, h);
  }
  report.normalized_mse_percent = weighted / static_cast<double>(total_points);
  return report;
}

/// Plain tabular export, one row per timestep: index, time (when a timestep
/// is given), truth (when provided), prediction. Tab separated with a header.
inline void write_forecast_table(std::ostream& out, const Forecast& forecast,
                                 std::span<const double> truth = {},
                                 std::optional<double> timestep = std::nullopt,
                                 double start_time = 0.0) {
  out << "index";
  if (timestep) out << "\ttime";
  if (!truth.empty()) out << "\ttruth";
  out << "\tprediction\n";
  char buf[64];
  for (std::size_t i = 0; i < forecast.predicted.size(); ++i) {
    out << (i + 1);
    if (timestep) {
      std::snprintf(buf, sizeof(buf), "%.10g", start_time + static_cast<double>(i) * *timestep);
      out << '\t' << buf;
    }
    if (!truth.empty()) {
      if (i < truth.size()) {
        std::snprintf(buf, sizeof(buf), "%.17g", truth[i]);
        out << '\t' << buf;
      } else {
        out << '\t';
      }
    }
    std::snprintf(buf, sizeof(buf), "%.17g", forecast.predicted[i]);
    out << '\t' << buf << '\n';
  }
}

}  // namespace narkoop
