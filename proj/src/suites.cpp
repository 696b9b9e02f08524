#include "sheafbm/suites.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "sheafbm/error.hpp"

namespace sheafbm::suites {

using namespace sheafbm::sheaf;

const std::vector<SheafWindow>& base_windows() {
  static const std::vector<SheafWindow> pool = [] {
    const auto q = FieldSpec::parse("q");
    std::vector<SheafWindow> out;
    auto a1 = roots::build_root_system(roots::CartanType::A1);
    out.push_back(affine_window(alcove::build_window(a1, {0}, {0, 7}, {-4, 11}), q, 8));
    auto a2 = roots::build_root_system(roots::CartanType::A2);
    out.push_back(affine_window(alcove::build_window(a2, {0, 0, 0}, {-2, 2}, {-6, 6}), q, 8));
    out.push_back(classical_window("A2", "longest", q, 8));
    out.push_back(classical_window("B2", "longest", q, 8));
    out.push_back(classical_window("A3", "s2s1s3s2", q, 8));
    return out;
  }();
  return pool;
}

Instance random_instance(std::mt19937_64& rng, bool allow_redundant, bool mutate) {
  const auto& pool = base_windows();
  for (;;) {
    const SheafWindow& base = pool[rng() % pool.size()];
    std::vector<int> pts;
    for (std::size_t p = 0; p < base.size(); ++p) {
      if (rng() % 3 != 0) pts.push_back(static_cast<int>(p));
    }
    if (pts.empty()) continue;
    SheafWindow sw = subwindow(base, pts);
    sw.cutoff = 2 * static_cast<int>(2 + rng() % 3);
    // mostly a minimal point, so that the support is large
    std::vector<int> minimal;
    for (std::size_t p = 0; p < sw.size(); ++p) {
      if (sw.order.strictly_below(static_cast<int>(p)).empty()) minimal.push_back(static_cast<int>(p));
    }
    int w = rng() % 4 != 0 ? minimal[rng() % minimal.size()] : static_cast<int>(rng() % sw.size());
    BuildOptions opt;
    Instance inst;
    if (allow_redundant && !mutate && rng() % 2 == 0) {
      opt.extra_generators_seed = rng();
      inst.redundant = true;
    }
    if (rng() % 2 == 0) opt.linear_extension = default_linear_extension(sw, true);
    if (mutate) {
      std::vector<int> above;
      for (std::size_t p = 0; p < sw.size(); ++p) {
        if (sw.order.less(w, static_cast<int>(p))) above.push_back(static_cast<int>(p));
      }
      if (above.empty()) continue;
      opt.mutations.push_back({Mutation::Kind::DropGenerator, above[rng() % above.size()], -1});
    }
    try {
      inst.sheaf = bm_build(sw, w, opt);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CutoffTooLow) continue;
      throw;
    }
    if (mutate) {
      // a dropped generator at a zero stalk is no mutation
      int z = opt.mutations[0].point;
      auto plain = bm_build(sw, w, BuildOptions{opt.linear_extension, {}, opt.extra_generators_seed});
      if (plain.stalks[z].gen_degrees.empty()) continue;
    }
    return inst;
  }
}

std::vector<int> random_open(const graph::Poset& order, std::size_t n, std::mt19937_64& rng) {
  std::vector<int> out;
  std::size_t picks = rng() % 3;
  for (std::size_t i = 0; i < picks && n > 0; ++i) {
    auto b = order.below(static_cast<int>(rng() % n));
    out.insert(out.end(), b.begin(), b.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

using Trial = std::function<CheckResult(std::mt19937_64&, bool)>;

CheckResult merge(CheckResult a, const CheckResult& b, const std::string& tag) {
  if (!b.ok) a.fail(tag + ": " + b.detail);
  return a;
}

CheckResult gluing(std::mt19937_64& rng, bool mutate) {
  auto inst = random_instance(rng, true, mutate);
  const auto& sh = inst.sheaf;
  std::vector<std::vector<int>> cover;
  std::size_t parts = 1 + rng() % 3;
  for (std::size_t i = 0; i < parts; ++i) cover.push_back(random_open(sh.window.order, sh.window.size(), rng));
  CheckResult r = merge({}, glue_check(sh, cover), "sheaf");
  return merge(r, cofiltered::glue_check(global_sections(sh), cover), "module");
}

CheckResult flabby(std::mt19937_64& rng, bool mutate) {
  auto inst = random_instance(rng, true, mutate);
  CheckResult r = merge({}, flabby_check(inst.sheaf), "sheaf");
  return merge(r, cofiltered::flabby_check(global_sections(inst.sheaf)), "module");
}

CheckResult fiber_square(std::mt19937_64& rng, bool mutate) {
  auto b = global_sections(random_instance(rng, true, mutate).sheaf);
  CheckResult r = merge({}, cofiltered::support_condition_check(b), "support");
  for (std::size_t x = 0; x < b.num_points() && r.ok; ++x) {
    r = merge(r, cofiltered::fiber_square_check(b, static_cast<int>(x)), "fiber square");
  }
  return r;
}

CheckResult fitting(std::mt19937_64& rng, bool mutate) {
  Instance inst;
  do {
    inst = random_instance(rng, true, mutate);
  } while (inst.sheaf.window.size() > 8);
  auto b = global_sections(inst.sheaf);
  if (rng() % 2 == 0) {
    const auto& sw = inst.sheaf.window;
    b = cofiltered::direct_sum(
        b, cofiltered::standard_object(sw.order, sw.orbit_map, sw.points, sw.field, sw.rank(), sw.top(), inst.sheaf.w));
  }
  auto probe = cofiltered::endomorphism_probe(b);
  std::vector<linalg::Rational> coeffs;
  for (std::size_t i = 0; i < probe.basis.size(); ++i) coeffs.emplace_back(static_cast<std::int64_t>(rng() % 5) - 2);
  return cofiltered::fitting_decomposition(b, cofiltered::combine(probe.basis, coeffs)).check;
}

CheckResult delta_match(std::mt19937_64& rng, bool mutate) {
  auto inst = random_instance(rng, true, mutate);
  return delta_match_check(inst.sheaf, global_sections(inst.sheaf));
}

CheckResult extension(std::mt19937_64& rng, bool mutate) {
  auto inst = random_instance(rng, true, mutate);
  auto b = global_sections(inst.sheaf);
  CheckResult r;
  for (std::size_t x = 0; x < b.num_points() && r.ok; ++x) {
    r = cofiltered::extension_lemma_check(b, inst.sheaf.window.quotient, static_cast<int>(x));
  }
  return r;
}

CheckResult reordering(std::mt19937_64& rng, bool mutate) {
  auto inst = random_instance(rng, false, mutate);
  const auto& a = inst.sheaf;
  BuildOptions other;
  other.linear_extension = default_linear_extension(a.window, a.processing_order == default_linear_extension(a.window));
  auto b = bm_build(a.window, a.w, other);
  CheckResult r;
  for (std::size_t x = 0; x < a.window.size(); ++x) {
    if (RankPolynomial::from_degrees(a.stalks[x].gen_degrees) != RankPolynomial::from_degrees(b.stalks[x].gen_degrees)) {
      r.fail("rank differs at " + a.window.points[x]);
    }
    auto open = a.window.order.below(static_cast<int>(x));
    if (hilbert(sections_over_open(a, open)) != hilbert(sections_over_open(b, open))) {
      r.fail("Hilbert function of sections differs below " + a.window.points[x]);
    }
  }
  return r;
}

CheckResult mutations(std::mt19937_64& rng, bool mutate) {
  auto inst = random_instance(rng, false, mutate);
  const auto& sh = inst.sheaf;
  CheckResult r;
  if (!bm_verify(sh, false).ok()) r.fail("unmutated build fails verification");
  std::vector<int> gens;
  for (const auto& st : sh.stalks) {
    if (st.point != sh.w && !st.gen_degrees.empty()) gens.push_back(st.point);
  }
  std::vector<std::pair<int, int>> pieces;
  for (const auto& pc : sh.pieces) {
    if (!pc.module.is_zero()) pieces.emplace_back(pc.edge, pc.point);
  }
  BuildOptions base{sh.processing_order, {}, std::nullopt};
  try {
    if (!gens.empty()) {
      BuildOptions o = base;
      o.mutations.push_back({Mutation::Kind::DropGenerator, gens[rng() % gens.size()], -1});
      if (bm_verify(bm_build(sh.window, sh.w, o), false).ok()) r.fail("dropped generator not caught");
    }
    if (!pieces.empty()) {
      auto [e, z] = pieces[rng() % pieces.size()];
      BuildOptions o = base;
      o.mutations.push_back({Mutation::Kind::ZeroRho, z, e});
      auto rep = bm_verify(bm_build(sh.window, sh.w, o), false);
      if (rep.find("property_3")->ok) r.fail("zeroed rho not caught at " + sh.window.points[z]);
    }
  } catch (const Error& e) {
    // the mutated sheaf ran past the cutoff further up; draw again
    if (e.code() != ErrorCode::CutoffTooLow) throw;
    return mutations(rng, mutate);
  }
  return r;
}

const std::map<std::string, Trial>& trials() {
  static const std::map<std::string, Trial> t = {
      {"gluing", gluing},         {"flabby", flabby},       {"fiber_square", fiber_square}, {"fitting", fitting},
      {"delta_match", delta_match}, {"extension", extension}, {"reordering", reordering},   {"mutations", mutations}};
  return t;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"gluing",      "flabby",    "fiber_square", "fitting",
                                                 "delta_match", "extension", "reordering",   "mutations"};
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed, int runs, bool inject_mutation) {
  auto it = trials().find(name);
  if (it == trials().end()) throw Error(ErrorCode::DomainError, "unknown suite '" + name + "'");
  const auto& names = suite_names();
  auto pos = static_cast<std::uint64_t>(std::find(names.begin(), names.end(), name) - names.begin());
  std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (pos + 1));
  SuiteResult res;
  res.name = name;
  for (int i = 0; i < runs; ++i) {
    CheckResult c = it->second(rng, inject_mutation);
    ++res.runs;
    if (!c.ok) {
      if (res.failures == 0) res.first_failure = "fixture " + std::to_string(i) + ": " + c.detail;
      ++res.failures;
    }
  }
  return res;
}

}  // namespace sheafbm::suites
