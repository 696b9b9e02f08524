#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "sheafbm/alcove.hpp"
#include "sheafbm/error.hpp"
#include "sheafbm/io.hpp"
#include "sheafbm/sheaf.hpp"
#include "sheafbm/suites.hpp"

using namespace sheafbm;
using io::json;
using linalg::FieldSpec;

namespace {

constexpr int EXIT_FAILED = 2;
constexpr int EXIT_INPUT = 3;
constexpr int EXIT_LIMIT = 4;

struct RunConfig {
  std::string type;
  std::string graph_file;
  std::string w;
  std::string box;
  std::string margin;
  std::string field = "q";
  int cutoff = 8;
  std::string format = "json";
  std::string verify = "fast";
  std::string out;
  std::vector<std::string> mutate;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) std::cout << text;
  else io::write_atomically(cfg.out, text);
}

// "A2-bruhat" / "A2" -> classical, "affine-A2" -> alcoves.
bool is_affine(const std::string& type) { return type.rfind("affine-", 0) == 0; }

std::string base_type(const std::string& type) {
  std::string t = is_affine(type) ? type.substr(7) : type;
  auto dash = t.find("-bruhat");
  return dash == std::string::npos ? t : t.substr(0, dash);
}

alcove::Window window_for(const std::string& type, const std::string& w, const std::string& box, const std::string& margin) {
  auto rs = roots::build_root_system(roots::parse_type(base_type(type)));
  alcove::require_affine_rank(rs);
  if (box.empty()) throw Error(ErrorCode::InputError, "--box is required for alcove windows");
  auto b = alcove::parse_bounds(box);
  auto m = margin.empty() ? alcove::Bounds{b.lo - 4, b.hi + 4} : alcove::parse_bounds(margin);
  return alcove::build_window(rs, alcove::parse_alcove(rs, w.empty() ? "fundamental" : w), b, m);
}

struct Built {
  sheaf::CofilteredSheaf sheaf;
  std::string source;
};

Built build(const RunConfig& cfg) {
  auto field = FieldSpec::parse(cfg.field);
  if (cfg.type.empty() == cfg.graph_file.empty()) throw Error(ErrorCode::InputError, "give exactly one of --type and --graph-file");
  sheaf::SheafWindow sw;
  std::string source;
  if (!cfg.graph_file.empty()) {
    auto file = io::read_graph(cfg.graph_file);
    auto report = graph::validate(file.graph);
    if (!report.ok()) throw Error(ErrorCode::InputError, io::describe(file, report.violations[0]));
    if (!file.graph.has_order()) throw Error(ErrorCode::InputError, "the graph file has no order");
    sw = sheaf::graph_window(file.graph, field, cfg.cutoff);
    sw.base = sw.index_of(cfg.w);
    if (sw.base < 0) throw Error(ErrorCode::InputError, "w '" + cfg.w + "' is not a vertex of the graph");
    source = cfg.graph_file;
  } else if (is_affine(cfg.type)) {
    sw = sheaf::affine_window(window_for(cfg.type, cfg.w, cfg.box, cfg.margin), field, cfg.cutoff);
    source = cfg.type;
  } else {
    if (!cfg.box.empty()) throw Error(ErrorCode::InputError, "--box needs an affine type");
    sw = sheaf::classical_window(base_type(cfg.type), cfg.w.empty() ? "longest" : cfg.w, field, cfg.cutoff);
    source = base_type(cfg.type) + "-bruhat";
  }
  sheaf::BuildOptions opt;
  for (const auto& m : cfg.mutate) {
    // drop:POINT or zero-rho:POINT:EDGE
    auto c1 = m.find(':');
    std::string kind = m.substr(0, c1), rest = c1 == std::string::npos ? "" : m.substr(c1 + 1);
    sheaf::Mutation mu;
    if (kind == "drop") {
      mu.kind = sheaf::Mutation::Kind::DropGenerator;
    } else if (kind == "zero-rho") {
      mu.kind = sheaf::Mutation::Kind::ZeroRho;
      auto c2 = rest.rfind(':');
      if (c2 == std::string::npos) throw Error(ErrorCode::InputError, "zero-rho needs POINT:EDGE");
      mu.edge = std::stoi(rest.substr(c2 + 1));
      rest = rest.substr(0, c2);
    } else {
      throw Error(ErrorCode::InputError, "unknown mutation '" + m + "'");
    }
    mu.point = sw.index_of(rest);
    if (mu.point < 0) throw Error(ErrorCode::InputError, "unknown point in mutation '" + m + "'");
    opt.mutations.push_back(mu);
  }
  return {sheaf::bm_build(sw, sw.base, opt), source};
}

// Verification report, with the epi and delta checks at level full.
sheaf::VerifyReport verify(const sheaf::CofilteredSheaf& sh, const std::string& level) {
  auto rep = sheaf::bm_verify(sh, level == "full");
  if (level == "full") {
    auto gs = sheaf::global_sections_and_epi(sh);
    sheaf::CheckResult epi;
    if (!gs.epi.ok) epi.fail(gs.epi.detail);
    rep.checks.emplace_back("epi", epi);
  }
  return rep;
}

int cmd_bm(const RunConfig& cfg, bool verify_cmd) {
  auto b = build(cfg);
  std::optional<sheaf::VerifyReport> rep;
  if (cfg.verify != "none") rep = verify(b.sheaf, cfg.verify);
  auto record = io::make_record(b.sheaf, b.source, rep ? &*rep : nullptr);
  if (verify_cmd) {
    std::string text;
    if (cfg.format == "csv") {
      text = "check,ok,detail\n";
      for (const auto& c : record.verification) text += c.name + "," + (c.ok ? "1" : "0") + "," + c.detail + "\n";
    } else {
      text = io::to_json(record)["verification"].dump(2) + "\n";
    }
    emit(cfg, text);
  } else {
    emit(cfg, cfg.format == "csv" ? io::rank_csv(record) : io::to_json(record).dump(2) + "\n");
  }
  if (rep && !rep->ok()) {
    for (const auto& [name, c] : rep->checks) {
      if (!c.ok) std::cerr << "FAIL " << name << ": " << c.detail << "\n";
    }
    return EXIT_FAILED;
  }
  return 0;
}

int cmd_graph_validate(const std::string& path, const std::string& field_text) {
  auto file = io::read_graph(path);
  auto report = graph::validate(file.graph);
  for (const auto& v : report.violations) std::cout << io::describe(file, v) << "\n";
  if (!report.ok()) return EXIT_FAILED;
  auto field = FieldSpec::parse(field_text, true);
  auto gkm = graph::gkm_check(file.graph, field);
  if (!gkm.ok) {
    std::cout << "GKM " << gkm.to_string(file.graph) << "\n";
    return EXIT_FAILED;
  }
  std::cout << "OK " << file.graph.size() << " vertices, " << file.graph.edges.size() << " edges, GKM over "
            << field.to_string() << "\n";
  return 0;
}

int cmd_graph_quotient(const std::string& path, const RunConfig& cfg) {
  auto file = io::read_graph(path);
  auto report = graph::validate(file.graph);
  if (!report.ok()) {
    for (const auto& v : report.violations) std::cerr << io::describe(file, v) << "\n";
    return EXIT_FAILED;
  }
  auto q = graph::quotient_by_action(file.graph);
  json j = io::graph_to_json(q.quotient);
  json orbits = json::object();
  for (std::size_t i = 0; i < file.graph.size(); ++i) orbits[file.graph.vertices[i]] = q.quotient.vertices[q.orbit_map[i]];
  j["orbit_map"] = orbits;
  emit(cfg, j.dump(2) + "\n");
  return 0;
}

int cmd_kl(const std::string& type, const std::string& w, const RunConfig& cfg) {
  auto r = io::make_kl(base_type(type), w);
  emit(cfg, cfg.format == "csv" ? io::kl_csv(r) : io::to_json(r).dump(2) + "\n");
  return 0;
}

int cmd_compare(const std::string& bm_path, const std::string& kl_path) {
  auto bm = io::run_from_json(io::parse_json(io::read_text(bm_path)));
  auto kl = io::kl_from_json(io::parse_json(io::read_text(kl_path)));
  auto diff = io::compare(bm, kl);
  for (const auto& m : diff) std::cout << "MISMATCH " << m.x << ": bm " << m.bm << ", kl " << m.kl << "\n";
  if (!diff.empty()) return EXIT_FAILED;
  std::cout << "MATCH " << bm.stalks.size() << " stalks\n";
  return 0;
}

int cmd_selftest(const std::string& filter, std::uint64_t seed, int runs, bool inject) {
  std::vector<std::string> names;
  for (const auto& n : suites::suite_names()) {
    if (filter.empty() || ("," + filter + ",").find("," + n + ",") != std::string::npos) names.push_back(n);
  }
  if (names.empty()) throw Error(ErrorCode::InputError, "no suite matches '" + filter + "'");
  bool ok = true;
  for (const auto& n : names) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = suites::run_suite(n, seed, runs, inject);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-14s %4d runs %4d failed  %s  %.2fs\n", n.c_str(), r.runs, r.failures, r.ok() ? "PASS" : "FAIL", secs);
    if (!r.ok()) std::printf("  %s\n", r.first_failure.c_str());
    ok = ok && r.ok();
  }
  return ok ? 0 : EXIT_FAILED;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::CutoffTooLow:
    case ErrorCode::ClosureUncertified:
      return EXIT_LIMIT;
    default:
      return EXIT_INPUT;
  }
}

void add_run_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--type", cfg.type, "A2-bruhat, A3-bruhat, B2-bruhat, affine-A1, affine-A2, ...");
  cmd->add_option("--graph-file", cfg.graph_file, "ordered moment graph (JSON)");
  cmd->add_option("--w", cfg.w, "word, \"longest\", alcove id or vertex id");
  cmd->add_option("--box", cfg.box, "address box lo..hi (alcove types)");
  cmd->add_option("--margin", cfg.margin, "order-closure box (default: box widened by 4)");
  cmd->add_option("--field", cfg.field, "q or fp:P");
  cmd->add_option("--cutoff", cfg.cutoff, "even degree cutoff");
  cmd->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", cfg.out, "write here instead of stdout");
  cmd->add_option("--mutate", cfg.mutate, "test hook: drop:POINT or zero-rho:POINT:EDGE")->group("");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Braden-MacPherson sheaves on moment graph quotients"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* graph_cmd = app.add_subcommand("graph", "moment graph files");
  graph_cmd->require_subcommand(1);
  std::string graph_path, graph_field = "q";
  auto* gv = graph_cmd->add_subcommand("validate", "check invariants and the GKM condition");
  gv->add_option("--graph-file", graph_path)->required();
  gv->add_option("--field", graph_field);
  auto* gq = graph_cmd->add_subcommand("quotient", "quotient by the action generators");
  gq->add_option("--graph-file", graph_path)->required();
  gq->add_option("--out", cfg.out);

  auto* alc = app.add_subcommand("alcoves", "alcove windows");
  alc->require_subcommand(1);
  auto* ab = alc->add_subcommand("build", "certified window as a periodic moment graph");
  ab->add_option("--type", cfg.type)->required();
  ab->add_option("--w", cfg.w);
  ab->add_option("--box", cfg.box)->required();
  ab->add_option("--margin", cfg.margin);
  ab->add_option("--out", cfg.out);

  auto* bm = app.add_subcommand("bm", "Braden-MacPherson sheaves");
  bm->require_subcommand(1);
  auto* run = bm->add_subcommand("run", "build and print the rank table");
  add_run_options(run, cfg);
  run->add_option("--verify", cfg.verify)->check(CLI::IsMember({"none", "fast", "full"}));
  auto* ver = bm->add_subcommand("verify", "build and verify");
  add_run_options(ver, cfg);
  ver->add_option("--verify", cfg.verify)->check(CLI::IsMember({"fast", "full"}));

  auto* klc = app.add_subcommand("kl", "Kazhdan-Lusztig polynomials");
  klc->require_subcommand(1);
  std::string kl_type, kl_w = "longest";
  auto* kt = klc->add_subcommand("table", "P_{x,w} for all x <= w");
  kt->add_option("--type", kl_type)->required();
  kt->add_option("--w", kl_w);
  kt->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  kt->add_option("--out", cfg.out);

  std::string bm_file, kl_file;
  auto* cmp = app.add_subcommand("compare", "BM rank table against a KL table");
  cmp->add_option("bm", bm_file)->required();
  cmp->add_option("kl", kl_file)->required();

  std::string filter;
  std::uint64_t seed = 20240611;
  int runs = 100;
  bool inject = false;
  auto* st = app.add_subcommand("selftest", "randomized invariant suites");
  st->add_option("--filter", filter, "comma-separated suite names");
  st->add_option("--seed", seed);
  st->add_option("--runs", runs)->check(CLI::PositiveNumber);
  st->add_flag("--inject-mutation", inject, "test hook")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : EXIT_INPUT;
  }

  try {
    if (const char* env = std::getenv("SHEAFBM_THREADS")) {
      char* end = nullptr;
      long n = std::strtol(env, &end, 10);
      if (*env == '\0' || *end != '\0' || n < 1) throw Error(ErrorCode::InputError, "SHEAFBM_THREADS must be a positive integer");
    }
    if (*gv) return cmd_graph_validate(graph_path, graph_field);
    if (*gq) return cmd_graph_quotient(graph_path, cfg);
    if (*ab) {
      emit(cfg, io::window_to_json(window_for(cfg.type, cfg.w, cfg.box, cfg.margin)).dump(2) + "\n");
      return 0;
    }
    if (*run) return cmd_bm(cfg, false);
    if (*ver) return cmd_bm(cfg, true);
    if (*kt) return cmd_kl(kl_type, kl_w, cfg);
    if (*cmp) return cmd_compare(bm_file, kl_file);
    if (*st) return cmd_selftest(filter, seed, runs, inject);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}
