#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "sheafbm/alcove.hpp"
#include "sheafbm/error.hpp"

using namespace sheafbm;
using namespace sheafbm::alcove;
using roots::CartanType;

namespace {

RootSystem rs_of(CartanType t) { return roots::build_root_system(t); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::DomainError;
}

}  // namespace

TEST_CASE("root systems") {
  struct Expect {
    CartanType t;
    std::size_t roots, positive;
  };
  for (auto [t, n, p] : {Expect{CartanType::A1, 2, 1}, Expect{CartanType::A2, 6, 3}, Expect{CartanType::B2, 8, 4},
                         Expect{CartanType::G2, 12, 6}, Expect{CartanType::A3, 12, 6}}) {
    auto rs = rs_of(t);
    CHECK(rs.roots.size() == n);
    CHECK(rs.num_positive() == p);
    for (std::size_t i = 0; i < rs.roots.size(); ++i) {
      CHECK(roots::pairing<std::int64_t>(rs.roots_omega[i], rs.coroots[i]) == 2);
      auto neg = rs.roots[i];
      for (auto& x : neg) x = -x;
      CHECK(std::find(rs.roots.begin(), rs.roots.end(), neg) != rs.roots.end());
    }
  }
  CHECK_THROWS_AS(roots::parse_type("E8"), Error);
}

TEST_CASE("Weyl groups") {
  roots::WeylGroup a3(rs_of(CartanType::A3));
  CHECK(a3.size() == 24);
  CHECK(a3.name(a3.longest()) == "s1s2s1s3s2s1");
  CHECK(a3.name(a3.from_word("s2s3s1s2")) == "s2s1s3s2");
  roots::WeylGroup a2(rs_of(CartanType::A2));
  auto g = a2.bruhat_graph();
  CHECK(g.vertices.size() == 6);
  CHECK(g.edges.size() == 9);
  CHECK(graph::validate(g).ok());
  CHECK(graph::gkm_check(g, linalg::FieldSpec::rationals()).ok);
  CHECK(a2.bruhat_order().less(0, a2.longest()));
}

TEST_CASE("reflections and translations of alcoves") {
  auto a1 = rs_of(CartanType::A1);
  CHECK(reflect_alcove(a1, {0}, 0, 1) == Address{1});
  CHECK(reflect_alcove(a1, {0}, 0, 0) == Address{-1});
  CHECK(translate_alcove(a1, {0}, {1}) == Address{2});
  CHECK(translate_alcove(a1, {5}, {0}) == Address{5});
  CHECK(alcove_id({-1}) == "A-1");
  CHECK(parse_alcove(a1, "A-3") == Address{-3});

  std::mt19937 rng(3);
  for (auto t : {CartanType::A2, CartanType::B2, CartanType::G2}) {
    auto rs = rs_of(t);
    auto box = enumerate_box(rs, {-2, 2});
    REQUIRE(!box.empty());
    CHECK(sample_point(rs, Address(rs.num_positive(), 0)).has_value());
    for (int trial = 0; trial < 40; ++trial) {
      const auto& a = box[rng() % box.size()];
      std::size_t k = rng() % rs.num_positive();
      std::int64_t n = static_cast<std::int64_t>(rng() % 7) - 3;
      auto b = reflect_alcove(rs, a, k, n);
      CHECK(b != a);
      CHECK(reflect_alcove(rs, b, k, n) == a);
      graph::Label lambda(rs.rank);
      for (auto& x : lambda) x = static_cast<std::int64_t>(rng() % 5) - 2;
      auto ta = translate_alcove(rs, a, lambda);
      CHECK(sample_point(rs, ta).has_value());
      graph::Label minus = lambda;
      for (auto& x : minus) x = -x;
      CHECK(translate_alcove(rs, ta, minus) == a);
      // t_lambda s_{beta,n} t_{-lambda} = s_{beta, n + <lambda, beta^vee>}
      std::int64_t shift = translate_alcove(rs, Address(rs.num_positive(), 0), lambda)[k];
      CHECK(translate_alcove(rs, reflect_alcove(rs, translate_alcove(rs, a, minus), k, n), lambda) ==
            reflect_alcove(rs, a, k, n + shift));
    }
  }
}

TEST_CASE("affine A1 windows") {
  auto rs = rs_of(CartanType::A1);
  auto w = build_window(rs, {0}, {-4, 8}, {-4, 8});
  REQUIRE(w.size() == 9);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(w.alcoves[i] == Address{static_cast<std::int64_t>(i)});
    for (std::size_t j = i + 1; j < w.size(); ++j) CHECK(w.order.less(static_cast<int>(i), static_cast<int>(j)));
  }
  auto tiny = build_window(rs, {0}, {0, 0}, {-1, 1});
  CHECK(tiny.size() == 1);

  auto win = build_window(rs, {0}, {0, 3}, {-2, 5});
  auto pq = periodic_quotient(win);
  CHECK(pq.weyl_graph.vertices == std::vector<std::string>{"e", "s1"});
  CHECK(pq.weyl_graph.edges.size() == 1);
  for (std::size_t i = 0; i < win.size(); ++i) CHECK(pq.orbit_map[i] == static_cast<int>(i % 2));
  CHECK(graph::validate(pq.periodic).ok());
  CHECK(pq.periodic.edges.size() == 4);

  CHECK(code_of([&] { build_window(rs, {9}, {0, 3}, {-2, 5}); }) == ErrorCode::WNotInBox);
}

TEST_CASE("affine A2 windows") {
  auto rs = rs_of(CartanType::A2);
  Address fund(3, 0);
  auto w = build_window(rs, fund, {-2, 2}, {-6, 6});
  CHECK(w.size() >= 10);
  CHECK(w.alcoves[w.base] == fund);
  std::vector<Address> covers;
  for (auto [lo, hi] : w.order.covers()) {
    if (lo == w.base) covers.push_back(w.alcoves[hi]);
  }
  // brute force: the alcoves s_{beta,1} A_0 for the three positive coroots
  std::vector<Address> expected;
  for (std::size_t k = 0; k < 3; ++k) expected.push_back(reflect_alcove(rs, fund, k, 1));
  std::sort(expected.begin(), expected.end());
  CHECK(covers == expected);
  for (std::size_t x = 0; x < w.size(); ++x) CHECK(w.order.leq(w.base, static_cast<int>(x)));

  auto pq = periodic_quotient(w);
  CHECK(graph::validate(pq.periodic).ok());
  CHECK(pq.weyl_graph.vertices.size() == 6);
  CHECK(pq.weyl_graph.edges.size() == 9);
  // translation-window orbits refine the Weyl group coordinate
  auto part = graph::quotient_by_action(pq.periodic);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (part.orbit_map[i] == part.orbit_map[j]) CHECK(pq.orbit_map[i] == pq.orbit_map[j]);
    }
  }
  // edges of the periodic graph map to edges of the quotient with the same label
  for (const auto& e : pq.periodic.edges) {
    int a = pq.orbit_map[e.u], b = pq.orbit_map[e.v];
    bool found = false;
    for (const auto& f : pq.weyl_graph.edges) {
      if (((f.u == a && f.v == b) || (f.u == b && f.v == a)) && f.label == e.label) found = true;
    }
    CHECK(found);
  }
  // order is preserved by translations that stay inside the window
  for (const auto& gen : pq.periodic.action_generators) {
    for (std::size_t a = 0; a < w.size(); ++a) {
      for (std::size_t b = 0; b < w.size(); ++b) {
        if (gen[a] < 0 || gen[b] < 0) continue;
        CHECK(w.order.leq(static_cast<int>(a), static_cast<int>(b)) == w.order.leq(gen[a], gen[b]));
      }
    }
  }

  CHECK(code_of([&] { build_window(rs, fund, {0, 2}, {0, 2}); }) == ErrorCode::ClosureUncertified);
  CHECK(code_of([&] { build_window(rs, fund, {0, 2}, {-4, 6}); }) == ErrorCode::ClosureUncertified);
  CHECK(code_of([&] { enumerate_box(rs_of(CartanType::A3), {0, 1}); }) == ErrorCode::UnsupportedType);
}
