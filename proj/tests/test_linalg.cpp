#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sheafbm/error.hpp"
#include "sheafbm/exact_linalg.hpp"

using namespace sheafbm;
using namespace sheafbm::linalg;

namespace {

const FieldSpec Q = FieldSpec::rationals();

Matrix mat(const std::vector<std::vector<Rational>>& rows, FieldSpec f = Q) { return Matrix::from_rows(f, rows); }

Matrix random_matrix(std::mt19937& rng, FieldSpec f, std::size_t r, std::size_t c, int density) {
  std::uniform_int_distribution<int> val(-3, 3), keep(0, 9);
  Matrix m(f, r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (keep(rng) < density) m.set(i, j, Rational(val(rng)));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("rational arithmetic stays normalized") {
  Rational a(6, -4);
  CHECK(a.to_string() == "-3/2");
  CHECK(a + Rational(3, 2) == Rational(0));
  CHECK((a * Rational(2, 3)).to_string() == "-1");
  Rational big = Rational(std::int64_t{1} << 62) * Rational(std::int64_t{1} << 62);
  CHECK(!big.is_small());
  CHECK((big / Rational(std::int64_t{1} << 62)).is_small());
  CHECK(Rational::parse("10/4") == Rational(5, 2));
  CHECK(Rational(1, 3).mod(7) == 5);
  CHECK(Rational(-1).mod(5) == 4);
}

TEST_CASE("field specs") {
  CHECK(FieldSpec::parse("q").is_rational());
  CHECK(FieldSpec::parse("fp:7").characteristic == 7);
  CHECK_THROWS_AS(FieldSpec::parse("fp:2"), Error);
  CHECK(FieldSpec::parse("fp:2", true).characteristic == 2);
  CHECK_THROWS_AS(FieldSpec::prime(9), Error);
  CHECK_THROWS_AS(FieldSpec::parse("z"), Error);
}

TEST_CASE("rref examples") {
  auto id = rref(Matrix::identity(Q, 2));
  CHECK(id.reduced == Matrix::identity(Q, 2));
  CHECK(id.pivots == std::vector<std::size_t>{0, 1});

  auto two = rref(mat({{2}}));
  CHECK(two.reduced == mat({{1}}));
  CHECK(two.pivots == std::vector<std::size_t>{0});

  auto r1 = rref(mat({{1, 2}, {2, 4}}));
  CHECK(r1.reduced == mat({{1, 2}, {0, 0}}));
  CHECK(r1.pivots == std::vector<std::size_t>{0});
}

TEST_CASE("kernel examples") {
  CHECK(kernel_basis(Matrix::identity(Q, 3)).empty());
  CHECK(kernel_basis(Matrix(Q, 2, 3)).size() == 3);
  auto k = kernel_basis(mat({{1, 1}}));
  REQUIRE(k.size() == 1);
  CHECK(k[0] == Vector{Rational(-1), Rational(1)});
}

TEST_CASE("preimage examples") {
  auto x = preimage_solve(Matrix::identity(Q, 2), Vector{1, 2});
  REQUIRE(x);
  CHECK(*x == Vector{1, 2});
  auto y = preimage_solve(mat({{1, 1}}), Vector{3});
  REQUIRE(y);
  CHECK(*y == Vector{3, 0});
  CHECK(!preimage_solve(mat({{0}}), Vector{1}));
}

TEST_CASE("random invariants over Q and F_p") {
  std::mt19937 rng(7);
  for (FieldSpec f : {Q, FieldSpec::prime(5), FieldSpec::prime(101)}) {
    for (int trial = 0; trial < 60; ++trial) {
      std::size_t r = 1 + rng() % 7, c = 1 + rng() % 7;
      Matrix m = random_matrix(rng, f, r, c, 1 + static_cast<int>(rng() % 9));
      auto [red, piv] = rref(m);
      auto again = rref(red);
      CHECK(again.reduced == red);
      auto ker = kernel_basis(m);
      CHECK(rank(m) == piv.size());
      CHECK(piv.size() == c - ker.size());
      for (const auto& v : ker) {
        for (const auto& e : m.apply(v)) CHECK(e.is_zero());
      }
      Vector x0(c);
      for (auto& e : x0) e = reduce(f, Rational(static_cast<int>(rng() % 5) - 2));
      Vector b = m.apply(x0);
      auto sol = preimage_solve(m, b);
      REQUIRE(sol);
      CHECK(m.apply(*sol) == b);
      Solver s(m);
      auto sol2 = s.solve(b);
      REQUIRE(sol2);
      CHECK(*sol2 == *sol);
      Matrix basis = column_basis(m);
      if (basis.cols() > 0) {
        LeftInverse li(basis);
        Vector coeffs(basis.cols());
        for (auto& e : coeffs) e = reduce(f, Rational(static_cast<int>(rng() % 7) - 3));
        CHECK(li.apply(basis.apply(coeffs)) == coeffs);
      }
      CHECK(same_column_space(m, hstack(m, m)));
    }
  }
}

TEST_CASE("solver detects inconsistency") {
  Solver s(mat({{1, 0}, {0, 0}}));
  CHECK(!s.solve(Vector{0, 1}));
  CHECK(s.solve(Vector{4, 0}).value() == Vector{4, 0});
}

TEST_CASE("column space intersection and complement") {
  Matrix a = mat({{1, 0}, {0, 1}, {0, 0}});
  Matrix b = mat({{1, 0}, {0, 0}, {0, 1}});
  Matrix i = column_space_intersection(a, b);
  CHECK(i.cols() == 1);
  CHECK(same_column_space(i, mat({{1}, {0}, {0}})));
  CHECK(complement_coordinates(a) == std::vector<std::size_t>{2});
}

TEST_CASE("elementary divisors") {
  CHECK(elementary_divisors({{1, 0}, {0, 1}}) == std::vector<std::int64_t>{1, 1});
  CHECK(elementary_divisors({{2, 0}}) == std::vector<std::int64_t>{2});
  CHECK(elementary_divisors({{2, 4}, {6, 8}}) == std::vector<std::int64_t>{2, 4});
  CHECK(elementary_divisors({{1, 1}}) == std::vector<std::int64_t>{1});
  CHECK(elementary_divisors({{0, 0}}).empty());
}
