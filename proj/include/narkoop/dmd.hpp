#pragma once

#include <span>
#include <string>
#include <utility>

#include "narkoop/dictionary.hpp"
#include "narkoop/embedding.hpp"
#include "narkoop/errors.hpp"
#include "narkoop/linalg.hpp"
#include "narkoop/types.hpp"

namespace narkoop {

enum class ModelVariant { kHankelShift1, kCausalJump };

inline const char* variant_name(ModelVariant v) {
  return v == ModelVariant::kHankelShift1 ? "hankel-shift1" : "causal-jump";
}

/// A fitted finite Koopman approximation: square operator over the lifted
/// observable space, together with the dictionary that defines the lift.
///
/// For the causal-jump variant one application of the operator advances a
/// whole window (tau samples), and past/future training windows never share
/// a sample, so a rollout never reads anything it is predicting. The
/// hankel-shift1 variant advances one sample per application and its
/// dictionary is lag-separable: the learned predictor is a sum of per-lag
/// functions with a shared basis, and cannot carry cross-lag products the
/// way a causal-jump dictionary does.
struct KoopmanModel {
  Matrix koopman;                    // square, side = dictionary size
  ObservableDictionary dictionary;
  int tau = 0;
  int output_dim = 1;                // p; scalar series throughout this library
  int rank_used = 0;
  ModelVariant variant = ModelVariant::kCausalJump;
  double training_residual = 0.0;    // ||Psi_f - K Psi_p||_F / ||Psi_f||_F
  double amplitude_scale = 1.0;      // data units = amplitude_scale * model units
};

struct FitOptions {
  /// Recorded in the model; fitters treat their input as already scaled.
  double amplitude_scale = 1.0;
};

/// The rows of the operator that reproduce state coordinates, i.e. the
/// predictor. For a causal-jump model this is the full next-window block
/// (p*tau rows); for a Hankel model it is the p rows producing the newest
/// sample of the shifted window.
struct PredictorRows {
  Matrix rows;
  ModelVariant variant;
  int tau = 0;
  int output_dim = 1;
};

namespace detail {

inline void validate_model(const KoopmanModel& m) {
  if (m.koopman.rows() != m.koopman.cols()) {
    throw ContractError("model: operator must be square");
  }
  if (m.koopman.rows() != m.dictionary.size()) {
    throw ContractError("model: operator side " + std::to_string(m.koopman.rows()) +
                        " does not match dictionary size " + std::to_string(m.dictionary.size()));
  }
  if (m.tau < 1 || m.output_dim < 1) {
    throw ContractError("model: tau and output_dim must be >= 1");
  }
  if (m.dictionary.window_dim() != m.tau * m.output_dim) {
    throw ContractError("model: dictionary window_dim does not equal tau * output_dim");
  }
  if (m.rank_used < 1 || m.rank_used > m.koopman.rows()) {
    throw ContractError("model: rank_used out of range");
  }
  if (!(m.amplitude_scale > 0.0) || !std::isfinite(m.amplitude_scale)) {
    throw ContractError("model: amplitude_scale must be positive and finite");
  }
  if (!(m.training_residual >= 0.0)) {
    throw ContractError("model: training_residual must be non-negative");
  }
}

// When `pair` is given the residual is evaluated as ||F - K P||_F directly;
// the factored shortcut used otherwise cancels badly near zero residual.
inline KoopmanModel assemble(const TruncatedSolver& solver, const ObservableDictionary& dict,
                             int tau, int rank, ModelVariant variant, const FitOptions& opt,
                             const SnapshotPair* pair = nullptr) {
  KoopmanModel model;
  model.koopman = solver.operator_at(rank);
  model.dictionary = dict;
  model.tau = tau;
  model.output_dim = 1;
  model.rank_used = solver.used_rank(rank);
  model.variant = variant;
  const double fnorm = solver.future_norm();
  if (fnorm <= 0.0) {
    model.training_residual = 0.0;
  } else if (pair != nullptr) {
    model.training_residual = (pair->future - model.koopman * pair->past).norm() / fnorm;
  } else {
    model.training_residual = solver.residual_at(rank) / fnorm;
  }
  model.amplitude_scale = opt.amplitude_scale;
  validate_model(model);
  return model;
}

}  // namespace detail

/// Classic Hankel DMD: shift-1 snapshot regression over a lag-separable
/// dictionary. Rejects dictionaries with cross-lag monomials, which this
/// pairing structurally cannot represent.
inline KoopmanModel fit_hankel_dmd(std::span<const Series> series_set, int tau,
                                   const ObservableDictionary& dict, int rank,
                                   const FitOptions& opt = {}) {
  if (!lag_separable(dict, tau)) {
    throw ContractError("fit_hankel_dmd: dictionary has cross-lag monomials; "
                        "use build_lag_dictionary for the shift-1 variant");
  }
  const SnapshotPair pair = shift1_pair(series_set, tau, dict);
  TruncatedSolver solver(pair.past, pair.future);
  return detail::assemble(solver, dict, tau, rank, ModelVariant::kHankelShift1, opt, &pair);
}

/// Causal-jump extended DMD: pairs each lifted window with the window tau
/// steps later, so the regression targets share no samples with their inputs
/// and the identified operator is simultaneously the 1..tau step predictor.
inline KoopmanModel fit_causal_jump(std::span<const Series> series_set, int tau,
                                    const ObservableDictionary& dict, int rank,
                                    const FitOptions& opt = {}) {
  const SnapshotPair pair = tau_jump_pair(series_set, tau, dict);
  TruncatedSolver solver(pair.past, pair.future);
  return detail::assemble(solver, dict, tau, rank, ModelVariant::kCausalJump, opt, &pair);
}

/// Shares a single factorization of the tau-jump snapshot matrices across
/// several truncation ranks; used by rank scans.
class CausalJumpScan {
 public:
  CausalJumpScan(std::span<const Series> series_set, int tau, const ObservableDictionary& dict,
                 const FitOptions& opt = {})
      : dict_(dict), tau_(tau), opt_(opt),
        solver_([&] {
          const SnapshotPair pair = tau_jump_pair(series_set, tau, dict);
          return TruncatedSolver(pair.past, pair.future);
        }()) {}

  int effective_rank() const { return solver_.effective_rank(); }
  int max_rank() const { return solver_.max_rank(); }

  /// Scan models carry a factored residual estimate; refit through
  /// fit_causal_jump for the exactly evaluated one.
  KoopmanModel model_at(int rank) const {
    return detail::assemble(solver_, dict_, tau_, rank, ModelVariant::kCausalJump, opt_);
  }

 private:
  ObservableDictionary dict_;
  int tau_;
  FitOptions opt_;
  TruncatedSolver solver_;
};

/// Extracts the predictor rows of a fitted model (see PredictorRows).
inline PredictorRows extract_predictor(const KoopmanModel& model) {
  detail::validate_model(model);
  const auto& state = model.dictionary.state_indices();
  const int p = model.output_dim;
  const int window = model.tau * p;

  PredictorRows out;
  out.variant = model.variant;
  out.tau = model.tau;
  out.output_dim = p;
  if (model.variant == ModelVariant::kCausalJump) {
    // Next-window block: state rows stack the 1..tau step predictors.
    out.rows.resize(window, model.koopman.cols());
    for (int j = 0; j < window; ++j) {
      out.rows.row(j) = model.koopman.row(state[static_cast<std::size_t>(j)]);
    }
  } else {
    // Rows producing the newest sample of the shifted window.
    out.rows.resize(p, model.koopman.cols());
    for (int j = 0; j < p; ++j) {
      out.rows.row(j) = model.koopman.row(state[static_cast<std::size_t>(window - p + j)]);
    }
  }
  return out;
}

}  // namespace narkoop
