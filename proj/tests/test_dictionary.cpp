#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "narkoop/dictionary.hpp"

using narkoop::ObservableDictionary;
using narkoop::Vector;

namespace {

// Brute-force oracle: count exponent vectors over `dim` variables with total
// degree in 1..order, enumerated by an odometer over 0..order per coordinate.
std::size_t count_monomials_brute(int dim, int order) {
  std::vector<int> e(static_cast<std::size_t>(dim), 0);
  std::size_t count = 0;
  while (true) {
    int degree = 0;
    for (int v : e) degree += v;
    if (degree >= 1 && degree <= order) ++count;
    int i = 0;
    while (i < dim) {
      if (++e[static_cast<std::size_t>(i)] <= order) break;
      e[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == dim) break;
  }
  return count;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

TEST_CASE("dictionary (2,2) lists the documented table") {
  const auto dict = narkoop::build_dictionary(2, 2);
  const std::vector<std::vector<int>> expected = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  REQUIRE(dict.exponent_table() == expected);
  REQUIRE(dict.size() == 5);
}

TEST_CASE("dictionary (1,3) is the pure powers") {
  const auto dict = narkoop::build_dictionary(1, 3);
  const std::vector<std::vector<int>> expected = {{1}, {2}, {3}};
  REQUIRE(dict.exponent_table() == expected);
}

TEST_CASE("dictionary (9,3) size matches brute-force enumeration") {
  REQUIRE(count_monomials_brute(9, 3) == 219);
  const auto dict = narkoop::build_dictionary(9, 3);
  REQUIRE(dict.size() == 219);
}

TEST_CASE("table size follows the binomial count law") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 5);
    const int order = 1 + static_cast<int>(rng() % 4);
    const auto dict = narkoop::build_dictionary(dim, order);
    REQUIRE(dict.size() == static_cast<int>(count_monomials_brute(dim, order)));
    REQUIRE(dict.size() ==
            static_cast<int>(binomial(static_cast<std::size_t>(dim + order), static_cast<std::size_t>(order)) - 1));
  }
}

TEST_CASE("table is graded with units first and lexicographic within degree") {
  const auto dict = narkoop::build_dictionary(4, 3);
  int previous_degree = 1;
  std::vector<int> previous;
  for (int i = 0; i < dict.size(); ++i) {
    const auto& e = dict.exponent_table()[static_cast<std::size_t>(i)];
    int degree = 0;
    for (int v : e) degree += v;
    REQUIRE(degree >= previous_degree);
    if (i < 4) {
      // state-inclusive block: unit vectors in coordinate order
      for (int j = 0; j < 4; ++j) REQUIRE(e[static_cast<std::size_t>(j)] == (j == i ? 1 : 0));
    }
    if (degree == previous_degree && !previous.empty()) {
      REQUIRE(previous > e);  // descending lexicographic within a degree block
    }
    previous_degree = degree;
    previous = e;
  }
  for (int j = 0; j < 4; ++j) REQUIRE(dict.state_indices()[static_cast<std::size_t>(j)] == j);
}

TEST_CASE("evaluation of the documented example") {
  const auto dict = narkoop::build_dictionary(2, 2);
  Vector w(2);
  w << 2.0, 3.0;
  const Vector out = dict.evaluate(w);
  REQUIRE(out.size() == 5);
  const double expected[] = {2.0, 3.0, 4.0, 6.0, 9.0};
  for (int i = 0; i < 5; ++i) REQUIRE(out(i) == expected[i]);
}

TEST_CASE("zero window lifts to zero, unit window lifts to ones") {
  const auto dict = narkoop::build_dictionary(3, 2);
  REQUIRE(dict.size() == 9);
  REQUIRE(dict.evaluate(Vector::Zero(3)).isZero());
  const Vector ones = dict.evaluate(Vector::Ones(3));
  for (int i = 0; i < ones.size(); ++i) REQUIRE(ones(i) == 1.0);
}

TEST_CASE("lifted vector starts with the window itself") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const auto dict = narkoop::build_dictionary(5, 3);
  for (int trial = 0; trial < 5; ++trial) {
    Vector w(5);
    for (int i = 0; i < 5; ++i) w(i) = dist(rng);
    const Vector out = dict.evaluate(w);
    for (int i = 0; i < 5; ++i) REQUIRE(out(i) == w(i));
  }
}

TEST_CASE("monomials factor over coordinatewise products") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  const auto dict = narkoop::build_dictionary(3, 3);
  Vector u(3), v(3);
  for (int i = 0; i < 3; ++i) {
    u(i) = dist(rng);
    v(i) = dist(rng);
  }
  const Vector lhs = dict.evaluate(u.cwiseProduct(v));
  const Vector rhs = dict.evaluate(u).cwiseProduct(dict.evaluate(v));
  REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("window length mismatch is rejected") {
  const auto dict = narkoop::build_dictionary(2, 2);
  REQUIRE_THROWS_AS(dict.evaluate(Vector::Zero(3)), narkoop::ContractError);
}

TEST_CASE("degenerate dimensions and capacity are rejected") {
  REQUIRE_THROWS_AS(narkoop::build_dictionary(0, 2), narkoop::ContractError);
  REQUIRE_THROWS_AS(narkoop::build_dictionary(2, 0), narkoop::ContractError);
  REQUIRE_THROWS_AS(narkoop::build_dictionary(50, 5), narkoop::CapacityError);
  REQUIRE_THROWS_AS(narkoop::build_dictionary(3, 2, 5), narkoop::CapacityError);
}

TEST_CASE("per-lag table keeps every monomial inside one lag") {
  const auto dict = narkoop::build_lag_dictionary(2, 1, 2);
  const std::vector<std::vector<int>> expected = {{1, 0}, {2, 0}, {0, 1}, {0, 2}};
  REQUIRE(dict.exponent_table() == expected);
  REQUIRE(dict.state_indices() == std::vector<int>{0, 2});
  REQUIRE(narkoop::lag_separable(dict, 2));

  const auto full = narkoop::build_dictionary(2, 2);
  REQUIRE_FALSE(narkoop::lag_separable(full, 2));  // carries the cross term
  const auto linear = narkoop::build_dictionary(3, 1);
  REQUIRE(narkoop::lag_separable(linear, 3));
}

TEST_CASE("order-1 per-lag and full tables coincide") {
  const auto a = narkoop::build_lag_dictionary(4, 1, 1);
  const auto b = narkoop::build_dictionary(4, 1);
  REQUIRE(a.exponent_table() == b.exponent_table());
}
