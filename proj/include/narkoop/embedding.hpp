#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "narkoop/dictionary.hpp"
#include "narkoop/errors.hpp"
#include "narkoop/types.hpp"

namespace narkoop {

/// Delay window z_j = [y_j, ..., y_{j+tau-1}], oldest sample first.
struct DelayWindow {
  Vector values;
  std::size_t start_index;  // position of the oldest sample in the source series
};

enum class Pairing { kShift1, kTauJump };

/// Half-open column range [begin, end) contributed by one source series.
struct ColumnRange {
  std::size_t begin;
  std::size_t end;
};

/// Paired lifted snapshot matrices. Column c of `past` holds psi(window_c)
/// and the same column of `future` holds psi of the paired later window; no
/// column pair ever mixes samples from two series.
struct SnapshotPair {
  Matrix past;
  Matrix future;
  Pairing pairing;
  std::vector<ColumnRange> source_boundaries;
};

/// All length-tau delay windows of a series, sliding by one sample.
/// Returns N - tau + 1 windows.
inline std::vector<DelayWindow> delay_windows(const Series& series, int tau) {
  if (tau < 1) throw ContractError("delay_windows: tau must be >= 1");
  const std::size_t n = series.size();
  if (n < static_cast<std::size_t>(tau)) {
    throw InsufficientDataError("delay_windows: series length " + std::to_string(n) +
                                " is shorter than tau " + std::to_string(tau));
  }
  std::vector<DelayWindow> windows;
  windows.reserve(n - static_cast<std::size_t>(tau) + 1);
  for (std::size_t j = 0; j + static_cast<std::size_t>(tau) <= n; ++j) {
    Vector w(tau);
    for (int i = 0; i < tau; ++i) w(i) = series[j + static_cast<std::size_t>(i)];
    windows.push_back(DelayWindow{std::move(w), j});
  }
  return windows;
}

namespace detail {

inline SnapshotPair make_pairs(std::span<const Series> series_set, int tau,
                               const ObservableDictionary& dict, Pairing pairing) {
  if (tau < 1) throw ContractError("snapshot pairing: tau must be >= 1");
  if (dict.window_dim() != tau) {
    throw ContractError("snapshot pairing: dictionary window_dim " + std::to_string(dict.window_dim()) +
                        " does not match tau " + std::to_string(tau));
  }
  if (series_set.empty()) throw InsufficientDataError("snapshot pairing: no series given");

  const std::size_t offset = pairing == Pairing::kShift1 ? 1 : static_cast<std::size_t>(tau);
  const std::size_t min_len = static_cast<std::size_t>(tau) + offset;

  std::size_t total_cols = 0;
  for (std::size_t i = 0; i < series_set.size(); ++i) {
    const std::size_t n = series_set[i].size();
    if (n < min_len) {
      throw InsufficientDataError("snapshot pairing: series " + std::to_string(i) + " has " +
                                  std::to_string(n) + " samples but needs at least " +
                                  std::to_string(min_len) + " for tau " + std::to_string(tau));
    }
    if (!all_finite(series_set[i])) {
      throw ContractError("snapshot pairing: series " + std::to_string(i) + " contains non-finite samples");
    }
    total_cols += n - min_len + 1;
  }

  SnapshotPair pair;
  pair.pairing = pairing;
  pair.past.resize(dict.size(), static_cast<Eigen::Index>(total_cols));
  pair.future.resize(dict.size(), static_cast<Eigen::Index>(total_cols));
  pair.source_boundaries.reserve(series_set.size());

  std::size_t col = 0;
  for (const Series& series : series_set) {
    const std::size_t begin = col;
    const std::vector<DelayWindow> windows = delay_windows(series, tau);
    const std::size_t pairs = windows.size() - offset;
    for (std::size_t c = 0; c < pairs; ++c, ++col) {
      pair.past.col(static_cast<Eigen::Index>(col)) = dict.evaluate(windows[c].values);
      pair.future.col(static_cast<Eigen::Index>(col)) = dict.evaluate(windows[c + offset].values);
    }
    pair.source_boundaries.push_back(ColumnRange{begin, col});
  }
  return pair;
}

}  // namespace detail

/// Shift-1 pairing (time-shifted Hankel matrices): column c pairs window_c
/// with window_{c+1}; consecutive windows share tau - 1 samples.
inline SnapshotPair shift1_pair(std::span<const Series> series_set, int tau,
                                const ObservableDictionary& dict) {
  return detail::make_pairs(series_set, tau, dict, Pairing::kShift1);
}

/// Tau-jump pairing: column c pairs window_c with window_{c+tau}, so the past
/// and future windows draw on disjoint sample index sets. Columns still slide
/// by one sample, giving N - 2 tau + 1 pairs per series.
inline SnapshotPair tau_jump_pair(std::span<const Series> series_set, int tau,
                                  const ObservableDictionary& dict) {
  return detail::make_pairs(series_set, tau, dict, Pairing::kTauJump);
}

}  // namespace narkoop
