#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "sheafbm/error.hpp"
#include "sheafbm/kl_oracle.hpp"
#include "sheafbm/sheaf.hpp"

using namespace sheafbm;
using namespace sheafbm::sheaf;
using Dims = std::vector<std::size_t>;

namespace {

const FieldSpec Q = FieldSpec::parse("q");

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::DomainError;
}

SheafWindow affine_a1(int last, int cutoff) {
  auto rs = roots::build_root_system(roots::CartanType::A1);
  auto win = alcove::build_window(rs, {0}, {0, last}, {-4, last + 4});
  return affine_window(win, Q, cutoff);
}

SheafWindow affine_a2(int cutoff) {
  auto rs = roots::build_root_system(roots::CartanType::A2);
  auto win = alcove::build_window(rs, {0, 0, 0}, {-2, 2}, {-6, 6});
  return affine_window(win, Q, cutoff);
}

Dims dims_of(const std::vector<Matrix>& spaces) { return hilbert(spaces); }

Dims constant(std::size_t v, int top) { return Dims(top + 1, v); }

void check_against_kl(const std::string& type, const std::string& w, int cutoff) {
  auto sw = classical_window(type, w, Q, cutoff);
  auto sh = bm_build(sw, sw.base);
  CHECK(bm_verify(sh, false).ok());
  kl::CoxeterGroup g(type);
  kl::KLOracle oracle(g);
  int wi = w == "longest" ? g.longest() : g.from_word(w);
  auto table = oracle.table(wi);
  auto ranks = rank_table(sh);
  REQUIRE(ranks.size() == table.size());
  for (const auto& row : ranks) {
    int x = g.index_of_name(sw.points[row.point]);
    REQUIRE(x >= 0);
    RankPolynomial expect;
    const auto& p = oracle.polynomial(x, wi);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] != 0) expect.coeffs[static_cast<int>(j)] = p[j];
    }
    INFO(type << " x=" << sw.points[row.point] << " w=" << w);
    CHECK(row.rank == expect);
  }
}

}  // namespace

TEST_CASE("affine A1 window") {
  auto sw = affine_a1(7, 8);
  REQUIRE(sw.size() == 8);
  CHECK(sw.quotient.size() == 2);
  CHECK(sw.quotient.edges.size() == 1);
  auto sh = bm_build(sw, sw.base);
  for (const auto& row : rank_table(sh)) CHECK(row.rank == RankPolynomial::one());
  CHECK(rank_table(sh).size() == 8);
  auto rep = bm_verify(sh);
  for (const auto& [name, c] : rep.checks) {
    INFO(name << ": " << c.detail);
    CHECK(c.ok);
  }
  int a0 = sw.index_of("A0"), a1 = sw.index_of("A1"), a2 = sw.index_of("A2");
  CHECK(dims_of(sections_over_open(sh, {})) == Dims(5, 0));
  CHECK(dims_of(sections_over_open(sh, {a0})) == constant(1, 4));
  CHECK(dims_of(sections_over_open(sh, {a0, a1})) == Dims{1, 2, 2, 2, 2});
  CHECK(code_of([&] { sections_over_open(sh, {a1}); }) == ErrorCode::NotOpen);

  CHECK(dims_of(delta_sheaf(sh, a0).image) == Dims(5, 0));
  CHECK(dims_of(delta_sheaf(sh, a1).image) == Dims{1, 0, 0, 0, 0});
  CHECK(dims_of(delta_sheaf(sh, a2).image) == constant(1, 4));

  CHECK(glue_check(sh, {{a0}}).ok);
  CHECK(glue_check(sh, {{a0}, {a0, a1}}).ok);

  auto b = global_sections(sh);
  CHECK(cofiltered::well_formed(b).ok);
  auto cs = cofiltered::costalk(b, a1);
  CHECK(cs.module.dims == Dims{0, 1, 1, 1, 1});
  CHECK(cofiltered::delta_module(b, a1).module.dims == Dims{1, 0, 0, 0, 0});
  CHECK(cofiltered::delta_module(b, a2).module.dims == constant(1, 4));
  CHECK(cofiltered::support(b) == std::vector<int>{a0, a1});
  CHECK(cofiltered::flabby_check(b).ok);
  for (std::size_t x = 0; x < sw.size(); ++x) CHECK(cofiltered::fiber_square_check(b, static_cast<int>(x)).ok);
  for (std::size_t x = 0; x < sw.size(); ++x) {
    CHECK(cofiltered::extension_lemma_check(b, sw.quotient, static_cast<int>(x)).ok);
  }

  auto gs = global_sections_and_epi(sh);
  CHECK(gs.epi.ok);
  CHECK(gs.delta_match.ok);
  CHECK(cofiltered::piece(gs.module, a0).module.dims == constant(1, 4));
}

TEST_CASE("window of six alcoves and the trivial window") {
  auto sh = bm_build(affine_a1(5, 6), 0);
  CHECK(rank_table(sh).size() == 6);
  for (const auto& row : rank_table(sh)) CHECK(row.rank == RankPolynomial::one());

  auto sw = affine_a1(5, 6);
  auto single = subwindow(sw, {sw.base});
  auto one = bm_build(single, single.base);
  CHECK(bm_verify(one).ok());
  CHECK(rank_table(one).size() == 1);

  // w maximal: only the seed
  auto top = bm_build(sw, sw.index_of("A5"));
  auto ranks = rank_table(top);
  REQUIRE(ranks.size() == 1);
  CHECK(sw.points[ranks[0].point] == "A5");
  CHECK(bm_verify(top).ok());
}

TEST_CASE("classical windows agree with the KL oracle") {
  check_against_kl("A2", "longest", 12);
  check_against_kl("A2", "s1s2", 6);
  check_against_kl("B2", "longest", 8);
  check_against_kl("B2", "s2s1s2", 8);
  check_against_kl("A3", "s2s1s3s2", 8);
  check_against_kl("A3", "s1s3s2s3s1", 8);

  auto sw = classical_window("A3", "s2s1s3s2", Q, 8);
  auto sh = bm_build(sw, sw.base);
  RankPolynomial one_q{{{0, 1}, {1, 1}}};
  for (const auto& row : rank_table(sh)) {
    const auto& name = sw.points[row.point];
    CHECK(row.rank == (name == "e" || name == "s2" ? one_q : RankPolynomial::one()));
  }
}

TEST_CASE("cutoff too low") {
  auto sw = classical_window("A3", "s2s1s3s2", Q, 2);
  CHECK(code_of([&] { bm_build(sw, sw.base); }) == ErrorCode::CutoffTooLow);
  CHECK(code_of([&] { classical_window("A2", "longest", Q, 3); }) == ErrorCode::DomainError);
}

TEST_CASE("reordering does not change the result") {
  auto sw = affine_a2(8);
  REQUIRE(sw.size() >= 10);
  auto ext_a = default_linear_extension(sw, false);
  auto ext_b = default_linear_extension(sw, true);
  CHECK(ext_a != ext_b);
  BuildOptions oa, ob;
  oa.linear_extension = ext_a;
  ob.linear_extension = ext_b;
  auto a = bm_build(sw, sw.base, oa);
  auto b = bm_build(sw, sw.base, ob);
  CHECK(bm_verify(a).ok());
  CHECK(bm_verify(b).ok());
  for (std::size_t x = 0; x < sw.size(); ++x) {
    CHECK(RankPolynomial::from_degrees(a.stalks[x].gen_degrees) == RankPolynomial::from_degrees(b.stalks[x].gen_degrees));
    auto open = sw.order.below(static_cast<int>(x));
    CHECK(hilbert(sections_over_open(a, open)) == hilbert(sections_over_open(b, open)));
  }
  std::vector<int> bad = ext_a;
  std::reverse(bad.begin(), bad.end());
  BuildOptions oc;
  oc.linear_extension = bad;
  CHECK(code_of([&] { bm_build(sw, sw.base, oc); }) == ErrorCode::DomainError);

  auto again = bm_build(sw, sw.base, oa);
  for (std::size_t x = 0; x < sw.size(); ++x) {
    CHECK(again.stalks[x].restriction == a.stalks[x].restriction);
    CHECK(again.stalks[x].rho == a.stalks[x].rho);
  }
}

TEST_CASE("mutations are caught") {
  auto sw = affine_a1(7, 8);
  int a2 = sw.index_of("A2"), a3 = sw.index_of("A3");
  BuildOptions drop;
  drop.mutations.push_back({Mutation::Kind::DropGenerator, a2, -1});
  auto sh = bm_build(sw, sw.base, drop);
  CHECK_FALSE(flabby_check(sh).ok);
  auto rep = bm_verify(sh, false);
  CHECK_FALSE(rep.ok());
  CHECK_FALSE(rep.find("flabby")->ok);
  CHECK(rep.find("flabby")->detail.find("A2") != std::string::npos);

  BuildOptions zero;
  zero.mutations.push_back({Mutation::Kind::ZeroRho, a3, 0});
  auto sz = bm_build(sw, sw.base, zero);
  auto rz = bm_verify(sz, false);
  CHECK_FALSE(rz.find("property_3")->ok);
  CHECK(rz.find("property_3")->detail.find("A3") != std::string::npos);
  CHECK(rz.find("property_2")->ok);
}

TEST_CASE("redundant generators break minimality only") {
  auto sw = affine_a1(5, 6);
  BuildOptions extra;
  extra.extra_generators_seed = 7;
  auto sh = bm_build(sw, sw.base, extra);
  auto rep = bm_verify(sh, false);
  CHECK(rep.find("flabby")->ok);
  CHECK(rep.find("well_formed")->ok);
  CHECK(rep.find("property_3")->ok);
  bool bigger = false;
  for (const auto& st : sh.stalks) bigger = bigger || st.gen_degrees.size() > 1;
  CHECK(rep.find("property_1")->ok == !bigger);
}

TEST_CASE("standard objects and endomorphisms") {
  auto sw = affine_a1(5, 6);
  auto sh = bm_build(sw, sw.base);
  auto gs = global_sections_and_epi(sh);
  auto endo = cofiltered::endomorphism_probe(gs.module);
  CHECK(endo.local);
  CHECK(endo.basis.size() >= 1);

  const auto& delta = gs.standard;
  auto dd = cofiltered::direct_sum(delta, delta);
  auto probe = cofiltered::endomorphism_probe(dd);
  CHECK_FALSE(probe.local);
  REQUIRE(probe.witness.has_value());
  auto fit = cofiltered::fitting_decomposition(dd, *probe.witness);
  CHECK(fit.check.ok);
  CHECK_FALSE(cofiltered::piece(fit.nilpotent_part, sw.base).module.is_zero());
  CHECK_FALSE(cofiltered::piece(fit.invertible_part, sw.base).module.is_zero());

  auto s3 = classical_window("A2", "longest", Q, 4);
  auto g3 = global_sections_and_epi(bm_build(s3, s3.base));
  CHECK(g3.epi.ok);
  CHECK(cofiltered::endomorphism_probe(g3.module).local);
}
