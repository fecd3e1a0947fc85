#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "narkoop/errors.hpp"
#include "narkoop/types.hpp"

namespace narkoop {

/// Default guard against combinatorial explosion of the monomial table.
inline constexpr std::size_t kDictionaryCapDefault = 100000;

/// Monomial observable dictionary over a delay window.
///
/// Each table entry is an exponent vector e over the window coordinates and
/// represents the observable w -> prod_j w[j]^e[j]. Every table is state
/// inclusive: each window coordinate appears somewhere as a pure degree-1
/// monomial, so the raw window can be read back out of a lifted vector
/// through state_indices().
class ObservableDictionary {
 public:
  ObservableDictionary() = default;

  ObservableDictionary(int window_dim, int max_order, std::vector<std::vector<int>> exponent_table)
      : window_dim_(window_dim), max_order_(max_order), exponents_(std::move(exponent_table)) {
    validate();
    compile_terms();
  }

  int window_dim() const { return window_dim_; }
  int max_order() const { return max_order_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  const std::vector<std::vector<int>>& exponent_table() const { return exponents_; }

  /// Row of the pure degree-1 monomial of window coordinate j, for j = 0..window_dim-1.
  const std::vector<int>& state_indices() const { return state_indices_; }

  /// Lifts a window: out[i] = prod_j window[j]^e_i[j].
  Vector evaluate(const Vector& window) const {
    if (window.size() != window_dim_) {
      throw ContractError("dictionary evaluate: window length " + std::to_string(window.size()) +
                          " does not match window_dim " + std::to_string(window_dim_));
    }
    Vector out(size());
    for (int i = 0; i < size(); ++i) {
      double value = 1.0;
      const auto& terms = terms_[static_cast<std::size_t>(i)];
      for (const auto& [coord, power] : terms) {
        const double base = window(coord);
        double p = base;
        for (int k = 1; k < power; ++k) p *= base;
        value *= p;
      }
      out(i) = value;
    }
    return out;
  }

  bool operator==(const ObservableDictionary& other) const {
    return window_dim_ == other.window_dim_ && max_order_ == other.max_order_ &&
           exponents_ == other.exponents_;
  }

 private:
  void validate() {
    if (window_dim_ < 1 || max_order_ < 1) {
      throw ContractError("dictionary: window_dim and max_order must be >= 1");
    }
    if (exponents_.empty()) {
      throw ContractError("dictionary: exponent table is empty");
    }
    state_indices_.assign(static_cast<std::size_t>(window_dim_), -1);
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
      const auto& e = exponents_[i];
      if (static_cast<int>(e.size()) != window_dim_) {
        throw ContractError("dictionary: exponent vector " + std::to_string(i) + " has wrong length");
      }
      int degree = 0;
      int support = -1;
      for (int j = 0; j < window_dim_; ++j) {
        if (e[static_cast<std::size_t>(j)] < 0) {
          throw ContractError("dictionary: negative exponent in entry " + std::to_string(i));
        }
        degree += e[static_cast<std::size_t>(j)];
        if (e[static_cast<std::size_t>(j)] > 0) support = j;
      }
      if (degree < 1 || degree > max_order_) {
        throw ContractError("dictionary: entry " + std::to_string(i) +
                            " has total degree outside 1..max_order");
      }
      if (degree == 1 && state_indices_[static_cast<std::size_t>(support)] < 0) {
        state_indices_[static_cast<std::size_t>(support)] = static_cast<int>(i);
      }
    }
    for (int j = 0; j < window_dim_; ++j) {
      if (state_indices_[static_cast<std::size_t>(j)] < 0) {
        throw ContractError("dictionary: not state inclusive, coordinate " + std::to_string(j) +
                            " has no degree-1 monomial");
      }
    }
  }

  void compile_terms() {
    terms_.clear();
    terms_.reserve(exponents_.size());
    for (const auto& e : exponents_) {
      std::vector<std::pair<int, int>> t;
      for (int j = 0; j < window_dim_; ++j) {
        if (e[static_cast<std::size_t>(j)] > 0) t.emplace_back(j, e[static_cast<std::size_t>(j)]);
      }
      terms_.push_back(std::move(t));
    }
  }

  int window_dim_ = 0;
  int max_order_ = 0;
  std::vector<std::vector<int>> exponents_;
  std::vector<int> state_indices_;
  std::vector<std::vector<std::pair<int, int>>> terms_;  // (coordinate, power) per monomial
};

namespace detail {

// C(dim + order, order) - 1, saturating at cap + 1.
inline std::size_t dictionary_size_bound(int dim, int order, std::size_t cap) {
  unsigned __int128 c = 1;
  for (int i = 1; i <= order; ++i) {
    c = c * static_cast<unsigned>(dim + i) / static_cast<unsigned>(i);
    if (c > cap + 1) return cap + 1;
  }
  return static_cast<std::size_t>(c - 1);
}

// Exponent vectors of exact total degree, first coordinate varying
// slowest from high to low (lexicographic within the degree).
template <class Emit>
void enumerate_degree(int dim, int degree, int coord, std::vector<int>& current, Emit&& emit) {
  if (coord == dim - 1) {
    current[static_cast<std::size_t>(coord)] = degree;
    emit(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[static_cast<std::size_t>(coord)] = e;
    enumerate_degree(dim, degree - e, coord + 1, current, emit);
  }
}

}  // namespace detail

/// All monomials of total degree 1..max_order over `window_dim` variables, in
/// graded order (degree 1 block first, lexicographic within each degree). The
/// degree-1 block is the unit exponent vectors in coordinate order, so the
/// lifted vector starts with the window itself. No constant term.
inline ObservableDictionary build_dictionary(int window_dim, int max_order,
                                             std::size_t cap = kDictionaryCapDefault) {
  if (window_dim < 1 || max_order < 1) {
    throw ContractError("build_dictionary: window_dim and max_order must be >= 1");
  }
  const std::size_t predicted = detail::dictionary_size_bound(window_dim, max_order, cap);
  if (predicted > cap) {
    throw CapacityError("build_dictionary: table of " + std::to_string(window_dim) + " variables up to order " +
                        std::to_string(max_order) + " exceeds cap " + std::to_string(cap));
  }
  std::vector<std::vector<int>> table;
  table.reserve(predicted);
  std::vector<int> current(static_cast<std::size_t>(window_dim), 0);
  for (int degree = 1; degree <= max_order; ++degree) {
    detail::enumerate_degree(window_dim, degree, 0, current,
                             [&table](const std::vector<int>& e) { table.push_back(e); });
  }
  return ObservableDictionary(window_dim, max_order, std::move(table));
}

/// Per-lag monomial table over a window of `lag_count` blocks of `lag_dim`
/// coordinates: the monomials of each lag block alone, block by block, with
/// no cross-lag products. This is the lifted observable Hankel DMD uses,
/// where the nonlinear map is applied to each delayed sample independently.
inline ObservableDictionary build_lag_dictionary(int lag_count, int lag_dim, int max_order,
                                                 std::size_t cap = kDictionaryCapDefault) {
  if (lag_count < 1 || lag_dim < 1 || max_order < 1) {
    throw ContractError("build_lag_dictionary: lag_count, lag_dim and max_order must be >= 1");
  }
  const std::size_t per_block = detail::dictionary_size_bound(lag_dim, max_order, cap);
  if (per_block > cap || per_block * static_cast<std::size_t>(lag_count) > cap) {
    throw CapacityError("build_lag_dictionary: table exceeds cap " + std::to_string(cap));
  }
  const int window_dim = lag_count * lag_dim;
  const ObservableDictionary block = build_dictionary(lag_dim, max_order, cap);
  std::vector<std::vector<int>> table;
  table.reserve(per_block * static_cast<std::size_t>(lag_count));
  for (int lag = 0; lag < lag_count; ++lag) {
    for (const auto& e : block.exponent_table()) {
      std::vector<int> full(static_cast<std::size_t>(window_dim), 0);
      for (int j = 0; j < lag_dim; ++j) {
        full[static_cast<std::size_t>(lag * lag_dim + j)] = e[static_cast<std::size_t>(j)];
      }
      table.push_back(std::move(full));
    }
  }
  return ObservableDictionary(window_dim, max_order, std::move(table));
}

/// True when every monomial's support stays inside a single lag block, i.e.
/// the table carries no cross-lag products.
inline bool lag_separable(const ObservableDictionary& dict, int lag_count) {
  if (lag_count < 1 || dict.window_dim() % lag_count != 0) return false;
  const int lag_dim = dict.window_dim() / lag_count;
  for (const auto& e : dict.exponent_table()) {
    int block = -1;
    for (int j = 0; j < dict.window_dim(); ++j) {
      if (e[static_cast<std::size_t>(j)] == 0) continue;
      const int b = j / lag_dim;
      if (block < 0) block = b;
      if (b != block) return false;
    }
  }
  return true;
}

}  // namespace narkoop
