#include <doctest.h>

#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "shapes/bspline.hpp"
#include "shapes/errors.hpp"
#include "shapes/rng.hpp"

using namespace shapes;
using Rational = boost::multiprecision::cpp_rational;

namespace {

// Direct recursive definition over every basis function, in exact arithmetic.
// Order-1 functions are indicators of [t_j, t_j+1); at the right end of the
// span the last nonempty interval is taken as closed.
Rational oracle_basis(const std::vector<Rational>& t, int j, int order, const Rational& x) {
  const int p = static_cast<int>(t.size());
  if (order == 1) {
    if (t[j] <= x && x < t[j + 1]) return 1;
    if (x == t[p - 1] && t[j] < t[j + 1]) {
      int last = p - 2;
      while (t[last] == t[last + 1]) --last;
      return j == last ? 1 : 0;
    }
    return 0;
  }
  Rational value = 0;
  const Rational d1 = t[j + order - 1] - t[j];
  if (d1 != 0) value += (x - t[j]) / d1 * oracle_basis(t, j, order - 1, x);
  const Rational d2 = t[j + order] - t[j + 1];
  if (d2 != 0) value += (1 - (x - t[j + 1]) / d2) * oracle_basis(t, j + 1, order - 1, x);
  return value;
}

struct RandomCase {
  std::vector<Rational> exact;
  KnotVectord knots;
  Rational x;
};

// Dyadic knots (exactly representable) with random repeats, multiplicity <= k.
RandomCase random_case(Rng& rng, bool clamped) {
  std::uniform_int_distribution<int> order_dist(1, 6);
  std::uniform_int_distribution<int> count_dist(0, 8);
  std::uniform_int_distribution<int> tick(0, 256);
  const int k = order_dist(rng);
  std::vector<int> ticks;
  const int interior = count_dist(rng);
  for (int i = 0; i < interior; ++i) ticks.push_back(tick(rng));
  ticks.push_back(0);
  ticks.push_back(256);
  std::sort(ticks.begin(), ticks.end());
  std::vector<int> sequence;
  for (const int v : ticks) {
    const auto run = std::count(sequence.begin(), sequence.end(), v);
    if (run < k) sequence.push_back(v);
  }
  if (clamped) {
    while (std::count(sequence.begin(), sequence.end(), 0) < k) sequence.insert(sequence.begin(), 0);
    while (std::count(sequence.begin(), sequence.end(), 256) < k) sequence.push_back(256);
  }
  while (static_cast<int>(sequence.size()) < k + 1) sequence.push_back(256 + static_cast<int>(sequence.size()));
  std::sort(sequence.begin(), sequence.end());
  Eigen::VectorXd values(static_cast<Eigen::Index>(sequence.size()));
  std::vector<Rational> exact;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    values[static_cast<Eigen::Index>(i)] = sequence[i] / 256.0;
    exact.emplace_back(sequence[i], 256);
  }
  std::uniform_int_distribution<int> xtick(sequence.front() * 16, sequence.back() * 16);
  return {exact, KnotVectord(values, k), Rational(xtick(rng), 4096)};
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double d : v) out[i++] = d;
  return out;
}

}  // namespace

TEST_CASE("order 1 basis is the interval indicator") {
  const KnotVectord knots(vec({0.0, 0.5, 1.0}), 1);
  const Eigen::VectorXd b = evaluate_basis(knots, 0.25);
  REQUIRE(b.size() == 2);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 0.0);
}

TEST_CASE("uniform cubic basis at its middle knot is 2/3") {
  const KnotVectord knots(vec({0.0, 0.25, 0.5, 0.75, 1.0}), 4);
  const Eigen::VectorXd b = evaluate_basis(knots, 0.5);
  REQUIRE(b.size() == 1);
  CHECK(b[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  // Trapezoid integral of B_{0,4} equals (t_4 - t_0) / 4.
  double integral = 0.0;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    integral += w * evaluate_basis(knots, static_cast<double>(i) / n)[0];
  }
  CHECK(integral / n == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("basis matrix shape follows the knot count") {
  Eigen::VectorXd values(11);
  values << 0, 0, 0, 0, 0.2, 0.5, 0.7, 1, 1, 1, 1;
  const KnotVectord knots(values, 4);
  CHECK(knots.is_clamped());
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(64, 0.0, 1.0);
  const auto full = build_basis_matrix(knots, grid);
  CHECK(full.rows() == 7);
  CHECK(full.cols() == 64);
  const auto dropped = build_basis_matrix(knots, grid, true);
  CHECK(dropped.rows() == 5);
  CHECK(dropped.entries == full.entries.middleRows(1, 5));
  const Eigen::RowVectorXd sums = full.entries.colwise().sum();
  for (Eigen::Index n = 0; n < grid.size(); ++n) CHECK(std::abs(sums[n] - 1.0) <= 1e-12);
}

TEST_CASE("banded basis agrees with the dense matrix") {
  Eigen::VectorXd values(12);
  values << 0, 0, 0, 0, 0.3, 0.3, 0.61, 0.9, 1, 1, 1, 1;
  const KnotVectord knots(values, 4);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
  const auto dense = build_basis_matrix(knots, grid);
  const auto banded = build_banded_basis(knots, grid);
  for (Eigen::Index n = 0; n < grid.size(); ++n) {
    for (int a = 0; a < 4; ++a) {
      const Eigen::Index row = banded.first[static_cast<std::size_t>(n)] + a;
      if (row < 0 || row >= dense.rows()) continue;
      CHECK(banded.values(a, n) == doctest::Approx(dense.entries(row, n)).epsilon(1e-14));
    }
  }
}

TEST_CASE("invalid input is rejected") {
  CHECK_THROWS_AS(KnotVectord(vec({0.0, 0.5, 0.4, 1.0}), 2), KnotError);
  CHECK_THROWS_AS(KnotVectord(vec({0.0, 0.5, 0.5, 0.5, 1.0}), 2), KnotError);
  CHECK_THROWS_AS(KnotVectord(vec({0.0, 1.0}), 2), KnotError);
  CHECK_THROWS_AS(KnotVectord(vec({0.0, std::nan(""), 1.0}), 1), KnotError);
  const KnotVectord knots(vec({0, 0, 0, 0, 1, 1, 1, 1}), 4);
  CHECK_THROWS_AS(evaluate_basis(knots, 1.5), DomainError);
  CHECK_THROWS_AS(evaluate_basis(knots, -0.1), DomainError);
  CHECK_THROWS_AS(build_basis_matrix(knots, vec({0.0, 0.5, 1.0})), IllPosedError);
  CHECK_THROWS_AS(build_basis_matrix(knots, Eigen::VectorXd()), IllPosedError);
  CHECK_THROWS_AS(build_basis_matrix(knots, vec({0.0, 0.2, 0.2, 0.5, 1.0, 1.1})), IllPosedError);
}

TEST_CASE("partition of unity, nonnegativity and local support on random knots") {
  Rng rng = make_stream(StreamKind::test, 11);
  for (int trial = 0; trial < 500; ++trial) {
    const RandomCase c = random_case(rng, trial % 2 == 0);
    const KnotVectord& knots = c.knots;
    const int k = knots.order();
    const double x = static_cast<double>(c.x);
    const Eigen::VectorXd b = evaluate_basis(knots, x);
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      CHECK(b[j] >= 0.0);
      if (x < knots[j] || x > knots[j + k]) CHECK(b[j] == 0.0);
    }
    const double lo = knots[k - 1];
    const double hi = knots[knots.size() - k];
    if (lo < hi && x >= lo && (x < hi || x == knots.back())) CHECK(std::abs(b.sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("agreement with the exact rational recursion") {
  Rng rng = make_stream(StreamKind::test, 12);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const RandomCase c = random_case(rng, trial % 3 != 0);
    const Eigen::VectorXd b = evaluate_basis(c.knots, static_cast<double>(c.x));
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      const double expected = static_cast<double>(oracle_basis(c.exact, static_cast<int>(j), c.knots.order(), c.x));
      CHECK(std::abs(b[j] - expected) <= 1e-10);
    }
    ++compared;
  }
  CHECK(compared >= 100);
}

TEST_CASE("long double instantiation matches double") {
  Eigen::VectorXd values(10);
  values << 0, 0, 0, 0, 0.25, 0.6, 1, 1, 1, 1;
  const KnotVectord knots(values, 4);
  const KnotVector<long double> knots_ld(values.cast<long double>(), 4);
  for (const double x : {0.0, 0.1, 0.25, 0.5, 0.99, 1.0}) {
    const Eigen::VectorXd b = evaluate_basis(knots, x);
    const auto bl = evaluate_basis(knots_ld, static_cast<long double>(x));
    for (Eigen::Index j = 0; j < b.size(); ++j) CHECK(std::abs(b[j] - static_cast<double>(bl[j])) <= 1e-15);
  }
}
