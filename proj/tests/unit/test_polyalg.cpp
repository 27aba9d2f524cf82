#include <catch2/catch_amalgamated.hpp>
#include <limits>
#include <numbers>
#include <sstream>

#include "bnfstab/errors.hpp"
#include "helpers.hpp"
#include "oracle/dense1d.hpp"

using namespace bnfstab;
using testing::mono;
using Catch::Approx;

namespace {

Polynomial X(int i = 0, int n = 1) { return Polynomial::x(n, i); }
Polynomial Y(int i = 0, int n = 1) { return Polynomial::y(n, i); }

oracle::Dense to_dense(const Polynomial& p, int D) {
  oracle::Dense d(D);
  for (const Term& t : p.terms()) d.at(t.index.j(0), t.index.k(0)) = t.coeff.real();
  return d;
}

}  // namespace

TEST_CASE("multi-index packing and order") {
  const std::vector<int> j = {3, 0, 1}, k = {0, 2, 1};
  const MultiIndex m = MultiIndex::from_exponents(j, k);
  CHECK(m.degree() == 7);
  CHECK(m.x_degree() == 4);
  CHECK(m.j(0) == 3);
  CHECK(m.k(1) == 2);
  CHECK(m.j_vector(3) == j);
  CHECK_FALSE(m.is_diagonal());
  CHECK(MultiIndex::from_exponents(std::vector{1, 2}, std::vector{1, 2}).is_diagonal());

  // degree first, then larger x_1 exponent first
  const auto a = MultiIndex::from_exponents(std::vector{2}, std::vector{0});
  const auto b = MultiIndex::from_exponents(std::vector{1}, std::vector{1});
  const auto c = MultiIndex::from_exponents(std::vector{0}, std::vector{3});
  CHECK(a < b);
  CHECK(b < c);
  CHECK_FALSE(b < a);
  CHECK_THROWS_AS(MultiIndex::from_exponents(std::vector{-1}, std::vector{0}), Error);
}

TEST_CASE("arithmetic examples") {
  CHECK((X() + Y()) + (X() - Y()) == 2.0 * X());
  const Polynomial x2 = multiply(X(), X()), y2 = multiply(Y(), Y());
  CHECK(multiply(x2, y2, 4) == mono(1, {2}, {2}));
  CHECK(multiply(x2, y2, 3).is_zero());
  const Polynomial sq = multiply(X() + Y(), X() + Y());
  CHECK(sq == x2 + 2.0 * multiply(X(), Y()) + y2);
  CHECK_THROWS_AS(X(0, 1) + X(0, 2), DimensionError);
  CHECK((X() - X()).is_zero());
}

TEST_CASE("terms are sorted, merged and pruned") {
  std::vector<Term> raw = {{MultiIndex::from_exponents(std::vector{0}, std::vector{2}), 1.0},
                           {MultiIndex::from_exponents(std::vector{2}, std::vector{0}), 2.0},
                           {MultiIndex::from_exponents(std::vector{0}, std::vector{2}), 1.0},
                           {MultiIndex::from_exponents(std::vector{1}, std::vector{1}), 1e-17}};
  const Polynomial p = Polynomial::from_terms(1, Field::real, raw);
  REQUIRE(p.size() == 2);
  CHECK(p.terms()[0].index.j(0) == 2);
  CHECK(p.terms()[1].coeff == Complex(2.0));
  CHECK_THROWS_AS(Polynomial::from_terms(1, Field::real, {{MultiIndex{}, Complex(0, 1)}}), RealityError);
}

TEST_CASE("bracket examples") {
  CHECK(poisson_bracket(X(), Y()) == Polynomial::constant(1, 1.0));
  const Polynomial I = Polynomial::action(1, 0);
  CHECK(poisson_bracket(I, 1.7 * I).is_zero());
  CHECK(poisson_bracket(multiply(X(), X()), multiply(Y(), Y())) == 4.0 * multiply(X(), Y()));
  CHECK(poisson_bracket(I, mono(1, {4}, {0})) == mono(1, {3}, {1}, -4.0));
}

TEST_CASE("lie_exp examples") {
  const Polynomial chi = mono(1, {3}, {0});
  CHECK(lie_exp(Polynomial(1), Y(), 6) == Y());
  CHECK(lie_exp(chi, Y(), 3) == Y() + 3.0 * multiply(X(), X()));
  CHECK(lie_exp(chi, Polynomial::constant(1, 2.5), 8) == Polynomial::constant(1, 2.5));
  CHECK_THROWS_AS(lie_exp(mono(1, {1}, {1}), Y(), 6), NilpotencyError);
}

TEST_CASE("theta weights and polydisc norm") {
  CHECK(theta_weight(2, 0) == 1.0);
  CHECK(theta_weight(1, 1) == Approx(0.5).epsilon(1e-15));
  CHECK(theta_weight(0, 0) == 1.0);
  CHECK(theta_weight(3, 1) == Approx(std::sqrt(27.0 / 256.0)).epsilon(1e-15));
  CHECK(theta_weight(200, 100) == Approx(std::exp(0.5 * (200 * std::log(200.0 / 300) + 100 * std::log(100.0 / 300)))).epsilon(1e-12));

  const std::vector<double> one = {1.0}, two = {2.0};
  CHECK(polydisc_norm(mono(1, {2}, {0}) + mono(1, {0}, {2}), one) == Approx(2.0).epsilon(1e-15));
  CHECK(polydisc_norm(mono(1, {4}, {0}), two) == Approx(16.0).epsilon(1e-15));
  const Polynomial xy = multiply(X(), Y());
  CHECK(polydisc_norm(xy, one) == Approx(0.5).epsilon(1e-15));
  double sup = 0.0;
  for (int m = 0; m < 100000; ++m) {
    const double t = 2 * std::numbers::pi * m / 100000;
    sup = std::max(sup, std::abs(std::cos(t) * std::sin(t)));
  }
  CHECK(sup == Approx(0.5).epsilon(1e-9));
  CHECK(sup <= polydisc_norm(xy, one) * (1 + 4 * std::numeric_limits<double>::epsilon()));
  CHECK_THROWS_AS(polydisc_norm(X() + xy, one), GradingError);
}

TEST_CASE("chart change") {
  CHECK(complexify(Polynomial(1)).is_zero());
  const Polynomial f = multiply(X(), X()) + 3.0 * Y();
  CHECK(testing::max_diff(realify(complexify(f)), f) < 1e-15);
  const Polynomial c = complexify(multiply(X(), X()) + multiply(Y(), Y()));
  REQUIRE(c.size() == 1);
  CHECK(c.terms()[0].index.is_diagonal());
  CHECK(std::abs(c.terms()[0].coeff - Complex(0.0, 2.0)) < 1e-15);
  CHECK_THROWS_AS(realify(Polynomial::x(1, 0, Complex(1.0, 0.0)).as_complex() + Polynomial::x(1, 0, Complex(0, 1))),
                  RealityError);

  // bracket commutes with the chart change on random inputs
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Polynomial a = testing::random_homogeneous(rng, 2, 3), b = testing::random_homogeneous(rng, 2, 4);
    const Polynomial lhs = complexify(poisson_bracket(a, b));
    const Polynomial rhs = poisson_bracket(complexify(a), complexify(b));
    CHECK(testing::max_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("evaluation") {
  const std::vector<double> p = {3.0, 4.0};
  CHECK(evaluate_real(multiply(X(), X()) + multiply(Y(), Y()), p) == 25.0);
  const std::vector<double> origin = {0.0, 0.0};
  CHECK(evaluate_real(X() + Polynomial::constant(1, 7.0), origin) == 7.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const Polynomial f = testing::random_homogeneous(rng, 3, 4, 1.0);
    std::vector<double> z(6);
    double norm = 0.0;
    for (double& v : z) norm += (v = g(rng)) * v;
    for (double& v : z) v /= std::sqrt(norm);
    double direct = 0.0;
    for (const Term& t : f.terms()) {
      double m = t.coeff.real();
      for (int i = 0; i < 3; ++i) m *= std::pow(z[i], t.index.j(i)) * std::pow(z[3 + i], t.index.k(i));
      direct += m;
    }
    CHECK(std::abs(evaluate_real(f, z) - direct) < 1e-12);
  }
}

TEST_CASE("bracket identities on random inputs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 3;
    const Polynomial f = testing::random_homogeneous(rng, n, 2 + trial % 5);
    const Polynomial g = testing::random_homogeneous(rng, n, 3 + trial % 4);
    const Polynomial h = testing::random_homogeneous(rng, n, 3);
    CHECK(testing::max_diff(poisson_bracket(f, g), -poisson_bracket(g, f)) < 1e-12);
    const int cap = 14;
    const Polynomial jacobi = poisson_bracket(f, poisson_bracket(g, h, cap), cap) +
                              poisson_bracket(g, poisson_bracket(h, f, cap), cap) +
                              poisson_bracket(h, poisson_bracket(f, g, cap), cap);
    CHECK(jacobi.max_abs() < 1e-10);
    const Polynomial leibniz = poisson_bracket(f, multiply(g, h, cap), cap) -
                               multiply(poisson_bracket(f, g, cap), h, cap) - multiply(g, poisson_bracket(f, h, cap), cap);
    CHECK(leibniz.max_abs() < 1e-10);
  }
}

TEST_CASE("grading matches a dense recomputation") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int da = 1 + trial % 3, db = 2 + trial % 4;
    const Polynomial a = testing::random_homogeneous(rng, 1, da, 1.0);
    const Polynomial b = testing::random_homogeneous(rng, 1, db, 1.0);
    const int D = 8;
    const auto dense_prod = oracle::mul(to_dense(a, D), to_dense(b, D));
    const auto dense_br = oracle::bracket(to_dense(a, D), to_dense(b, D));
    const Polynomial prod = multiply(a, b, 6), br = poisson_bracket(a, b, 6);
    if (!prod.is_zero()) CHECK(prod.min_degree() == da + db);
    for (int i = 0; i <= 6; ++i)
      for (int j = 0; i + j <= 6; ++j) {
        const auto m = MultiIndex::from_exponents(std::vector{i}, std::vector{j});
        CHECK(std::abs(prod.coefficient(m).real() - dense_prod.at(i, j)) < 1e-12);
        CHECK(std::abs(br.coefficient(m).real() - dense_br.at(i, j)) < 1e-12);
      }
  }
}

TEST_CASE("serialization is deterministic and round-trips") {
  std::mt19937_64 rng(1);
  GradedSeries s(2, 5);
  for (int d = 2; d <= 5; ++d) s.set_component(d, testing::random_homogeneous(rng, 2, d));
  const std::string a = io::series_to_string(s), b = io::series_to_string(s);
  CHECK(a == b);
  const GradedSeries back = io::series_from_string(a);
  CHECK(io::series_to_string(back) == a);
  for (int d = 0; d <= 5; ++d) CHECK(back.component(d) == s.component(d));
}

TEST_CASE("series parser errors carry line numbers") {
  try {
    io::series_from_string("HAM n=1 dmax=4 field=real\n2 2 0 0.5\n3 2 0 1.0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(io::series_from_string("HAM n=1 dmax=2 field=real\n4 4 0 1\n"), ParseError);
  CHECK_THROWS_AS(io::series_from_string("HAM n=1 dmax=4 field=real\n2 2 0 1\n2 2 0 1\n"), ParseError);
  CHECK_THROWS_AS(io::series_from_string("HAM n=1 field=real\n"), ParseError);
  CHECK_THROWS_AS(io::series_from_string("HAM n=1 dmax=4 field=real\n2 2 0 one\n"), ParseError);
  const GradedSeries c = io::series_from_string("# comment\nHAM n=1 dmax=2 field=complex\n2 1 1 0 1 # ipq\n");
  CHECK(c.component(2).coefficient(MultiIndex::from_exponents(std::vector{1}, std::vector{1})) == Complex(0, 1));
}

TEST_CASE("graded series components") {
  GradedSeries s(1, 4);
  CHECK(s.dmin() == -1);
  CHECK_THROWS_AS(s.set_component(3, multiply(X(), X())), GradingError);
  CHECK_THROWS_AS(s.component(5), GradingError);
  s.set_component(2, multiply(X(), X()));
  CHECK(s.dmin() == 2);
  CHECK(s.to_polynomial() == multiply(X(), X()));
}
