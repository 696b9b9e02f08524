#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sheafbm/error.hpp"
#include "sheafbm/moment_graph.hpp"

using namespace sheafbm;
using namespace sheafbm::graph;

namespace {

const FieldSpec Q = FieldSpec::rationals();

MomentGraph one_edge() {
  MomentGraph g;
  g.lattice_rank = 1;
  g.vertices = {"e", "s"};
  g.edges = {{0, 1, {1}}};
  return g;
}

// S3 with s = s1, t = s2; edges x -- r x for the three reflections r,
// labeled by the corresponding positive coroot in simple coroot coordinates.
MomentGraph s3_graph() {
  MomentGraph g;
  g.lattice_rank = 2;
  g.vertices = {"e", "s", "t", "st", "ts", "sts"};
  auto add = [&](const char* a, const char* b, Label l) { g.edges.push_back({g.index_of(a), g.index_of(b), l}); };
  add("e", "s", {1, 0});
  add("t", "st", {1, 0});
  add("ts", "sts", {1, 0});
  add("e", "t", {0, 1});
  add("s", "ts", {0, 1});
  add("st", "sts", {0, 1});
  add("e", "sts", {1, 1});
  add("s", "st", {1, 1});
  add("t", "ts", {1, 1});
  return g;
}

// Affine A1 window A_0..A_{n-1}: A_m -- A_k whenever m + k is odd.
MomentGraph affine_a1_window(int n) {
  MomentGraph g;
  g.lattice_rank = 1;
  for (int m = 0; m < n; ++m) g.vertices.push_back("A" + std::to_string(m));
  for (int m = 0; m < n; ++m) {
    for (int k = m + 1; k < n; k += 2) g.edges.push_back({m, k, {1}});
  }
  std::vector<int> shift(n, -1);
  for (int m = 0; m + 2 < n; ++m) shift[m] = m + 2;
  g.action_generators.push_back(shift);
  return g;
}

}  // namespace

TEST_CASE("labels are sign canonical") {
  CHECK(canonical_label({-1, 2}) == Label{1, -2});
  CHECK(canonical_label({0, -3}) == Label{0, 3});
  CHECK(label_string({1, -2}) == "(1,-2)");
}

TEST_CASE("validation") {
  CHECK(validate(one_edge()).ok());
  CHECK(validate(s3_graph()).ok());

  auto loop = one_edge();
  loop.edges.push_back({1, 1, {1}});
  CHECK(loop.edges.size() == 2);
  CHECK(validate(loop).has("LOOP"));

  auto dbl = one_edge();
  dbl.edges.push_back({1, 0, {2}});
  CHECK(validate(dbl).has("DOUBLE_EDGE"));

  auto zero = one_edge();
  zero.edges[0].label = {0};
  CHECK(validate(zero).has("ZERO_LABEL"));

  auto ordered = s3_graph();
  ordered.order_covers = {{0, 1}};
  CHECK(validate(ordered).has("INCOMPARABLE_EDGE"));

  auto cyc = one_edge();
  cyc.order_covers = {{0, 1}, {1, 0}};
  CHECK(validate(cyc).has("ORDER_CYCLE"));
}

TEST_CASE("posets") {
  auto p = Poset::from_relations(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  CHECK(p.less(0, 3));
  CHECK(!p.comparable(1, 2));
  CHECK(p.covers().size() == 4);
  CHECK(p.is_open({0, 1}));
  CHECK(!p.is_open({1}));
  CHECK(p.strictly_below(3) == std::vector<int>{0, 1, 2});
  CHECK(p.linear_extension({}) == std::vector<int>{0, 1, 2, 3});
  CHECK(p.linear_extension({}, true) == std::vector<int>{0, 2, 1, 3});
  CHECK_THROWS_AS(Poset::from_relations(2, {{0, 1}, {1, 0}}), Error);
}

TEST_CASE("gkm condition") {
  CHECK(gkm_check(s3_graph(), Q).ok);
  CHECK(gkm_check(s3_graph(), FieldSpec::prime(3)).ok);
  auto two = gkm_check(one_edge(), FieldSpec::parse("fp:2", true));
  CHECK(!two.ok);
  CHECK(two.reason == "characteristic");

  MomentGraph g;
  g.lattice_rank = 2;
  g.vertices = {"a", "b", "c"};
  g.edges = {{0, 1, {1, 1}}, {0, 2, {2, 2}}};
  auto r = gkm_check(g, Q);
  CHECK(!r.ok);
  CHECK(r.reason == "proportional");
  CHECK(r.vertex == 0);

  // (1,0) and (1,3) are independent over Q but not over F_3
  g.edges = {{0, 1, {1, 0}}, {0, 2, {1, 3}}};
  CHECK(gkm_check(g, Q).ok);
  CHECK(!gkm_check(g, FieldSpec::prime(3)).ok);
}

TEST_CASE("quotients") {
  auto triv = quotient_by_action(s3_graph());
  CHECK(triv.quotient.vertices == s3_graph().vertices);
  CHECK(triv.quotient.edges.size() == 9);
  CHECK(triv.orbit_map == std::vector<int>{0, 1, 2, 3, 4, 5});

  auto a1 = affine_a1_window(8);
  REQUIRE(validate(a1).ok());
  auto q = quotient_by_action(a1);
  CHECK(q.quotient.vertices == std::vector<std::string>{"A0", "A1"});
  REQUIRE(q.quotient.edges.size() == 1);
  CHECK(q.quotient.edges[0].label == Label{1});
  for (int m = 0; m < 8; ++m) CHECK(q.orbit_map[m] == m % 2);
  for (int m = 0; m < 8; ++m) {
    int image = a1.action_generators[0][m];
    if (image >= 0) CHECK(q.orbit_map[image] == q.orbit_map[m]);
  }

  MomentGraph two;
  two.lattice_rank = 1;
  two.vertices = {"a", "b", "c", "d"};
  two.edges = {{0, 1, {1}}, {2, 3, {-1}}};
  two.action_generators = {{2, 3, 0, 1}};
  auto c = quotient_by_action(two);
  CHECK(c.quotient.vertices.size() == 2);
  CHECK(c.quotient.edges.size() == 1);

  auto bad = one_edge();
  bad.vertices.push_back("x");
  bad.action_generators = {{2, 1, 0}};
  CHECK_THROWS_AS(quotient_by_action(bad), Error);
  CHECK(validate(bad).has("BAD_ACTION"));
}

TEST_CASE("sublattice restriction") {
  auto g = s3_graph();
  auto full = restrict_to_sublattice(g, {{1, 0}, {0, 1}});
  CHECK(full.graph.edges.size() == 9);
  CHECK(full.components.size() == 1);

  auto zero = restrict_to_sublattice(g, {});
  CHECK(zero.graph.edges.empty());
  CHECK(zero.components.size() == 6);

  auto simple = restrict_to_sublattice(g, {{1, 0}});
  CHECK(simple.graph.edges.size() == 3);
  REQUIRE(simple.components.size() == 3);
  for (const auto& comp : simple.components) CHECK(comp.size() == 2);

  // nested sublattices give refining components
  auto diag = restrict_to_sublattice(g, {{1, 1}});
  CHECK(diag.components.size() == 3);

  CHECK(!is_saturated({{2, 0}}, 2));
  CHECK(is_saturated({{1, 1}}, 2));
  CHECK_THROWS_AS(restrict_to_sublattice(g, {{2, 0}}), Error);
}

TEST_CASE("structure algebra Hilbert functions") {
  MomentGraph edgeless;
  edgeless.lattice_rank = 1;
  edgeless.vertices = {"a", "b"};
  CHECK(structure_algebra_hilbert(edgeless, Q, 8) == std::vector<std::size_t>{2, 2, 2, 2, 2});
  CHECK(structure_algebra_hilbert(one_edge(), Q, 8) == std::vector<std::size_t>{1, 2, 2, 2, 2});
  // equivariant cohomology of the flag variety of SL3: graded rank 1 + 2q + 2q^2 + q^3
  CHECK(structure_algebra_hilbert(s3_graph(), Q, 6) == std::vector<std::size_t>{1, 4, 9, 15});
  CHECK(structure_algebra_hilbert(s3_graph(), Q, 0)[0] == connected_components(s3_graph()).size());
  CHECK_THROWS_AS(structure_algebra_hilbert(one_edge(), Q, 3), Error);
}
