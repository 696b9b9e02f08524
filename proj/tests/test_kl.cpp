#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "sheafbm/error.hpp"
#include "sheafbm/kl_oracle.hpp"

using namespace sheafbm;
using namespace sheafbm::kl;

namespace {

// x <= w iff x is the product of a subword of a reduced word of w.
bool subword_leq(const CoxeterGroup& g, int x, int w) {
  std::vector<int> word;
  for (std::size_t pos = 1; pos < g.name(w).size(); pos += 2) word.push_back(g.name(w)[pos] - '1');
  if (g.name(w) == "e") word.clear();
  std::set<int> reach{g.from_word("e")};
  for (int s : word) {
    std::set<int> next = reach;
    for (int y : reach) next.insert(g.right(y, s));
    reach = std::move(next);
  }
  return reach.count(x) > 0;
}

}  // namespace

TEST_CASE("group sizes") {
  CHECK(CoxeterGroup("A1").size() == 2);
  CoxeterGroup a2("A2");
  CHECK(a2.size() == 6);
  CHECK(a2.length(a2.longest()) == 3);
  CoxeterGroup a3("A3");
  CHECK(a3.size() == 24);
  CHECK(a3.length(a3.longest()) == 6);
  CHECK(a3.name(a3.longest()) == "s1s2s1s3s2s1");
  CHECK(CoxeterGroup("B2").size() == 8);
  CHECK(CoxeterGroup("G2").size() == 12);
  CHECK_THROWS_AS(CoxeterGroup("D4"), Error);
}

TEST_CASE("Bruhat order") {
  CoxeterGroup a2("A2");
  int s1 = a2.from_word("s1"), s2 = a2.from_word("s2"), e = a2.from_word("e");
  CHECK(!a2.leq(s1, s2));
  CHECK(!a2.leq(s2, s1));
  for (std::size_t w = 0; w < a2.size(); ++w) {
    CHECK(a2.leq(static_cast<int>(w), static_cast<int>(w)));
    CHECK(a2.leq(e, static_cast<int>(w)));
  }
  for (const char* t : {"A2", "A3", "B2", "G2"}) {
    CoxeterGroup g(t);
    for (std::size_t x = 0; x < g.size(); ++x) {
      for (std::size_t w = 0; w < g.size(); ++w) {
        CHECK(g.leq(static_cast<int>(x), static_cast<int>(w)) == subword_leq(g, static_cast<int>(x), static_cast<int>(w)));
      }
    }
  }
}

TEST_CASE("Kazhdan-Lusztig polynomials") {
  CoxeterGroup a2("A2");
  KLOracle o2(a2);
  for (auto& [x, p] : o2.table(a2.longest())) CHECK(p == KLPoly{1});
  for (std::size_t w = 0; w < a2.size(); ++w) {
    for (auto& [x, p] : o2.table(static_cast<int>(w))) CHECK(p == KLPoly{1});
  }
  CHECK_THROWS_AS(o2.polynomial(a2.from_word("s1"), a2.from_word("s2")), Error);

  CoxeterGroup a3("A3");
  KLOracle o3(a3);
  int w = a3.from_word("s2s1s3s2");
  CHECK(a3.name(w) == "s2s1s3s2");
  CHECK(o3.polynomial(a3.from_word("s2"), w) == KLPoly{1, 1});
  CHECK(o3.polynomial(a3.from_word("e"), w) == KLPoly{1, 1});
  CHECK(poly_to_string(o3.polynomial(a3.from_word("s2"), w)) == "1 + q");
  CHECK(o3.polynomial(w, w) == KLPoly{1});
}

TEST_CASE("oracle invariants") {
  for (const char* t : {"A3", "B2", "G2"}) {
    CoxeterGroup g(t);
    KLOracle o(g);
    bool dihedral = g.rank() == 2;
    for (std::size_t w = 0; w < g.size(); ++w) {
      for (auto& [x, p] : o.table(static_cast<int>(w))) {
        REQUIRE(!p.empty());
        CHECK(p[0] == 1);
        for (auto c : p) CHECK(c >= 0);
        if (x != static_cast<int>(w)) CHECK(2 * static_cast<int>(p.size() - 1) <= g.length(static_cast<int>(w)) - g.length(x) - 1);
        CHECK(o.polynomial(g.inverse(x), g.inverse(static_cast<int>(w))) == p);
        // dihedral groups have trivial KL polynomials
        if (dihedral) CHECK(p == KLPoly{1});
      }
    }
  }
}
