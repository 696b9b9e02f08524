#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "sheafbm/cofiltered.hpp"
#include "sheafbm/error.hpp"

using namespace sheafbm;
using namespace sheafbm::cofiltered;
using linalg::Rational;
using Dims = std::vector<std::size_t>;

namespace {

const FieldSpec Q = FieldSpec::parse("q");
constexpr int TOP = 3;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::DomainError;
}

// chain 0 < 1 < 2, points 0 and 2 over orbit 0, point 1 over orbit 1
graph::Poset chain() { return graph::Poset::from_relations(3, {{0, 1}, {1, 2}}); }
const std::vector<int> ORBITS = {0, 1, 0};
const std::vector<std::string> NAMES = {"a", "b", "c"};

CofilteredModule delta(int w) { return standard_object(chain(), ORBITS, NAMES, Q, 1, TOP, w); }

Matrix cols(std::initializer_list<std::initializer_list<long>> rows) {
  std::size_t r = rows.size(), c = rows.begin()->size();
  Matrix m(Q, r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (long v : row) m.set(i, j++, Rational(v));
    ++i;
  }
  return m;
}

// Costalk at b spread over two orbits: M^{<=b} = {(f + g, f, g)}.
CofilteredModule smeared() {
  CofilteredModule m;
  m.field = Q;
  m.rank = 1;
  m.top = TOP;
  m.order = graph::Poset::from_relations(2, {{0, 1}});
  m.point_orbit = {0, 0};
  m.point_names = {"a", "b"};
  m.cells = {make_cell(Q, 1, TOP, 0, 0, {0}), make_cell(Q, 1, TOP, 1, 0, {0}), make_cell(Q, 1, TOP, 1, 1, {0})};
  m.point_orbit = {0, 0};
  for (int x = 0; x < 2; ++x) {
    std::vector<Matrix> sp;
    for (int k = 0; k <= TOP; ++k) sp.push_back(x == 0 ? cols({{1}}) : cols({{1, 1}, {1, 0}, {0, 1}}));
    m.spaces.push_back(sp);
  }
  return m;
}

}  // namespace

TEST_CASE("standard object") {
  auto d = delta(0);
  CHECK(well_formed(d).ok);
  CHECK(costalk(d, 0).module.dims == Dims(TOP + 1, 1));
  CHECK(costalk(d, 1).module.is_zero());
  CHECK(costalk(d, 2).module.is_zero());
  CHECK(support(d) == std::vector<int>{0});
  CHECK(delta_module(d, 0).module.is_zero());
  CHECK(support_condition_check(d).ok);
  CHECK(flabby_check(d).ok);
  for (int x = 0; x < 3; ++x) CHECK(piece(d, x).module.dims == Dims(TOP + 1, 1));

  auto d1 = delta(1);
  CHECK(piece(d1, 0).module.is_zero());
  CHECK(piece(d1, 2).module.dims == Dims(TOP + 1, 1));
  CHECK(support(d1) == std::vector<int>{1});
  CHECK(sections_over_open(d1, {0}).at(0).cols() == 0);
  CHECK(code_of([&] { sections_over_open(d1, {1}); }) == ErrorCode::NotOpen);
  CHECK(glue_check(d1, {{0, 1}}).ok);
  CHECK(glue_check(d1, {{0}, {0, 1}, {0, 1, 2}}).ok);
}

TEST_CASE("support violation") {
  auto m = smeared();
  CHECK(well_formed(m).ok);
  CHECK(costalk(m, 1).module.dims == Dims(TOP + 1, 1));
  CHECK_FALSE(support_condition_check(m).ok);
  CHECK(code_of([&] { delta_module(m, 1); }) == ErrorCode::SupportViolation);
  CHECK_NOTHROW(delta_module(m, 0));
}

TEST_CASE("fitting decomposition") {
  auto d = delta(0);
  auto id = fitting_decomposition(d, identity_morphism(d));
  CHECK(id.check.ok);
  CHECK(piece(id.nilpotent_part, 2).module.is_zero());
  CHECK(piece(id.invertible_part, 2).module.dims == Dims(TOP + 1, 1));
  auto zero = fitting_decomposition(d, zero_morphism(d, d));
  CHECK(zero.check.ok);
  CHECK(piece(zero.invertible_part, 2).module.is_zero());

  auto dd = direct_sum(d, d);
  auto proj = cell_map(dd, dd, {{0, 0}});
  auto split = fitting_decomposition(dd, proj);
  CHECK(split.check.ok);
  for (int x = 0; x < 3; ++x) {
    CHECK(piece(split.nilpotent_part, x).module.dims == Dims(TOP + 1, 1));
    CHECK(piece(split.invertible_part, x).module.dims == Dims(TOP + 1, 1));
  }
  auto report = endomorphism_probe(dd);
  CHECK_FALSE(report.local);
  CHECK(report.basis.size() == 4);
  CHECK(endomorphism_probe(d).local);

  CHECK(code_of([&] { fitting_decomposition(d, identity_morphism(dd)); }) == ErrorCode::NotEndomorphism);
}

TEST_CASE("exact sequences") {
  auto d = delta(0);
  auto dd = direct_sum(d, d);
  auto incl = cell_map(d, dd, {{0, 0}});
  auto proj = cell_map(dd, d, {{1, 0}});
  auto rep = exactness_check(d, dd, d, incl, proj);
  CHECK(rep.ok);
  CHECK(rep.opens_checked >= 4);
  CHECK(code_of([&] { exactness_check(d, dd, d, incl, cell_map(dd, d, {{0, 0}})); }) == ErrorCode::DomainError);
  auto half = exactness_check(d, dd, d, zero_morphism(d, dd), proj);
  CHECK_FALSE(half.ok);
  CHECK_FALSE(half.failing_open.empty());
}
