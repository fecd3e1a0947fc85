#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "narkoop/dmd.hpp"
#include "narkoop/forecast.hpp"

namespace narkoop {

/// Scores this close together count as tied, and ties resolve toward the
/// smaller model (order, then window, then rank). Exactly representable
/// systems drive several cells to zero error up to roundoff; without the
/// tolerance the winner among them would be decided by noise at 1e-16.
inline constexpr double kSelectionTieTolerance = 1e-9;

/// Disjoint train/validation/test id lists covering the input.
struct SplitSpec {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::vector<std::string> test_ids;
  std::uint64_t seed = 0;
};

/// Deterministic seeded shuffle, then equal thirds; a remainder of one goes
/// to train, a remainder of two to train and validation.
inline SplitSpec split(const std::vector<std::string>& ids, std::uint64_t seed) {
  if (ids.size() < 3) {
    throw ContractError("split: need at least 3 dataset ids, got " + std::to_string(ids.size()));
  }
  std::vector<std::string> shuffled = ids;
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the split is identical across
  // standard library implementations.
  for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(shuffled[i], shuffled[j]);
  }
  const std::size_t n = shuffled.size();
  const std::size_t base = n / 3;
  const std::size_t rem = n % 3;
  const std::size_t n_train = base + (rem >= 1 ? 1 : 0);
  const std::size_t n_val = base + (rem >= 2 ? 1 : 0);

  SplitSpec spec;
  spec.seed = seed;
  spec.train_ids.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
  spec.val_ids.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train),
                      shuffled.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  spec.test_ids.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), shuffled.end());
  return spec;
}

struct RankPoint {
  int rank;
  double train_mse_percent;
  double val_mse_percent;
};

struct RankScanResult {
  int best_rank = 0;
  std::vector<RankPoint> curve;
};

namespace detail {

inline bool better_score(double candidate, double incumbent) {
  return candidate < incumbent - kSelectionTieTolerance;
}

inline bool tied_score(double a, double b) {
  return std::abs(a - b) <= kSelectionTieTolerance;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&body, w, workers, n] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    }));
  }
  for (auto& f : futures) f.get();
}

}  // namespace detail

/// Fits causal-jump models on the training series at every retained rank
/// (1..effective rank of the tau-jump snapshot matrix), scores each with
/// free-running forecasts on both sets, and picks the rank minimizing
/// train + validation error; near-ties go to the smaller rank.
inline RankScanResult rank_scan(std::span<const Series> train, std::span<const Series> val,
                                int tau, int max_order, const FitOptions& opt = {},
                                std::size_t dictionary_cap = kDictionaryCapDefault) {
  const ObservableDictionary dict = build_dictionary(tau, max_order, dictionary_cap);
  const CausalJumpScan scan(train, tau, dict, opt);
  const int ranks = scan.effective_rank();

  RankScanResult result;
  result.curve.resize(static_cast<std::size_t>(ranks));
  detail::parallel_for(static_cast<std::size_t>(ranks), [&](std::size_t i) {
    const int rank = static_cast<int>(i) + 1;
    const KoopmanModel model = scan.model_at(rank);
    const double train_mse = evaluate_forecasts(model, train).normalized_mse_percent;
    const double val_mse = evaluate_forecasts(model, val).normalized_mse_percent;
    result.curve[i] = RankPoint{rank, train_mse, val_mse};
  });

  double best = std::numeric_limits<double>::infinity();
  for (const auto& point : result.curve) {
    best = std::min(best, point.train_mse_percent + point.val_mse_percent);
  }
  for (const auto& point : result.curve) {
    if (detail::tied_score(point.train_mse_percent + point.val_mse_percent, best)) {
      result.best_rank = point.rank;  // curve is rank-ascending, first tie wins
      break;
    }
  }
  return result;
}

struct SweepCell {
  int tau = 0;
  int max_order = 0;
  int rank = 0;
  double train_mse_percent = 0.0;
  double val_mse_percent = 0.0;
  bool ok = false;
  std::string note;  // failure reason for skipped cells
};

struct SweepOptions {
  std::vector<int> taus;
  std::vector<int> orders;
  FitOptions fit;
  std::size_t dictionary_cap = kDictionaryCapDefault;
  bool parallel = true;
};

struct SweepResult {
  std::vector<SweepCell> grid;  // row-major: taus outer, orders inner
  std::size_t best_index = 0;
  KoopmanModel best_model;
  double test_mse_percent = 0.0;
};

/// Full (tau, order) grid evaluated through rank_scan on the train/val
/// split; the winner is refit on the training set and scored on the test
/// set exactly once, after the selection is fixed. The provider maps a
/// dataset id to its series, so tests can attest that no test id is read
/// before then. Failing cells (insufficient data for a tau, oversized
/// dictionaries) are recorded and skipped as long as one cell survives.
template <class Provider>
SweepResult sweep(Provider&& provider, const SplitSpec& spec, const SweepOptions& options) {
  if (options.taus.empty() || options.orders.empty()) {
    throw ContractError("sweep: tau and order ranges must be non-empty");
  }
  if (spec.train_ids.empty() || spec.val_ids.empty() || spec.test_ids.empty()) {
    throw ContractError("sweep: split must have non-empty train, validation and test sets");
  }

  SeriesSet train;
  train.reserve(spec.train_ids.size());
  for (const auto& id : spec.train_ids) train.push_back(provider(id));
  SeriesSet val;
  val.reserve(spec.val_ids.size());
  for (const auto& id : spec.val_ids) val.push_back(provider(id));

  SweepResult result;
  result.grid.resize(options.taus.size() * options.orders.size());
  auto run_cell = [&](std::size_t index) {
    SweepCell& cell = result.grid[index];
    cell.tau = options.taus[index / options.orders.size()];
    cell.max_order = options.orders[index % options.orders.size()];
    try {
      const RankScanResult scan = rank_scan(train, val, cell.tau, cell.max_order, options.fit,
                                            options.dictionary_cap);
      const auto& point = scan.curve[static_cast<std::size_t>(scan.best_rank - 1)];
      cell.rank = scan.best_rank;
      cell.train_mse_percent = point.train_mse_percent;
      cell.val_mse_percent = point.val_mse_percent;
      cell.ok = true;
    } catch (const DataError& e) {
      cell.note = e.what();
    } catch (const CapacityError& e) {
      cell.note = e.what();
    }
  };
  if (options.parallel) {
    detail::parallel_for(result.grid.size(), run_cell);
  } else {
    for (std::size_t i = 0; i < result.grid.size(); ++i) run_cell(i);
  }

  // Smallest train + val score wins; near-ties prefer smaller order, then
  // smaller window, then smaller rank.
  bool found = false;
  double best_score = std::numeric_limits<double>::infinity();
  for (const auto& cell : result.grid) {
    if (cell.ok) best_score = std::min(best_score, cell.train_mse_percent + cell.val_mse_percent);
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    const auto& cell = result.grid[i];
    if (!cell.ok || !detail::tied_score(cell.train_mse_percent + cell.val_mse_percent, best_score)) {
      continue;
    }
    if (!found) {
      best = i;
      found = true;
      continue;
    }
    const auto& incumbent = result.grid[best];
    const auto key = [](const SweepCell& c) { return std::array<int, 3>{c.max_order, c.tau, c.rank}; };
    if (key(cell) < key(incumbent)) best = i;
  }
  if (!found) {
    std::string notes;
    for (const auto& cell : result.grid) {
      if (!cell.note.empty()) notes += "\n  (tau=" + std::to_string(cell.tau) + ", order=" +
                                       std::to_string(cell.max_order) + ") " + cell.note;
    }
    throw DataError("sweep: every grid cell failed" + notes);
  }
  result.best_index = best;

  const SweepCell& winner = result.grid[best];
  const ObservableDictionary dict = build_dictionary(winner.tau, winner.max_order, options.dictionary_cap);
  result.best_model = fit_causal_jump(train, winner.tau, dict, winner.rank, options.fit);

  // Test ids are materialized only now, with the selection already fixed.
  SeriesSet test;
  test.reserve(spec.test_ids.size());
  for (const auto& id : spec.test_ids) test.push_back(provider(id));
  result.test_mse_percent = evaluate_forecasts(result.best_model, test).normalized_mse_percent;
  return result;
}

/// Convenience overload reading series from an id -> series map.
inline SweepResult sweep(const std::map<std::string, Series>& by_id, const SplitSpec& spec,
                         const SweepOptions& options) {
  return sweep(
      [&by_id](const std::string& id) -> const Series& {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw DataError("sweep: unknown dataset id '" + id + "'");
        return it->second;
      },
      spec, options);
}

}  // namespace narkoop
