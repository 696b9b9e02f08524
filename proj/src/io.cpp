#include "sheafbm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sheafbm/error.hpp"
#include "sheafbm/kl_oracle.hpp"

namespace sheafbm::io {

namespace {

[[noreturn]] void input_error(const std::string& msg) { throw Error(ErrorCode::InputError, msg); }

int line_at(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

// Lines on which the elements of the top-level array `key` start.
std::vector<int> element_lines(const std::string& text, const std::string& key) {
  std::vector<int> out;
  int depth = 0, line = 1, array_depth = -1;
  bool in_string = false, escaped = false, expect = false;
  std::string current, last_string, pending_key;
  for (char c : text) {
    if (c == '\n') ++line;
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') {
        in_string = false;
        last_string = current;
      } else current += c;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (expect && depth == array_depth && c != ']' && c != ',') {
      out.push_back(line);
      expect = false;
    }
    switch (c) {
      case '"':
        in_string = true;
        current.clear();
        break;
      case ':':
        if (depth == 1) pending_key = last_string;
        break;
      case ',':
        if (depth == array_depth) expect = true;
        break;
      case '[':
      case '{':
        ++depth;
        if (c == '[' && depth == 2 && pending_key == key && array_depth < 0) {
          array_depth = 2;
          expect = true;
        }
        break;
      case ']':
      case '}':
        if (depth == array_depth) {
          array_depth = -3;  // done
          expect = false;
        }
        --depth;
        break;
      default:
        break;
    }
  }
  return out;
}

std::string id_of(const json& j, const std::string& what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  input_error(what + " must be a vertex id");
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) input_error(where + ": missing \"" + key + "\"");
  return *it;
}

std::string point_name(const sheaf::SheafWindow& sw, int p) { return sw.points[p]; }

}  // namespace

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    input_error("line " + std::to_string(line_at(text, e.byte == 0 ? 0 : e.byte - 1)) + ": malformed JSON");
  }
}

std::string read_text(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) input_error("cannot open " + path);
  ss << in.rdbuf();
  return ss.str();
}

void write_atomically(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) input_error("cannot write " + path);
    out << content;
    if (!out) input_error("cannot write " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) input_error("cannot write " + path);
}

GraphFile parse_graph(const std::string& text) {
  json j = parse_json(text);
  if (!j.is_object()) input_error("line 1: a graph file is a JSON object");
  GraphFile out;
  auto& g = out.graph;
  try {
    const json& rank = field(j, "lattice_rank", "graph");
    if (!rank.is_number_integer()) input_error("\"lattice_rank\" must be an integer");
    g.lattice_rank = rank.get<int>();
    const json& verts = field(j, "vertices", "graph");
    if (!verts.is_array()) input_error("\"vertices\" must be an array");
    for (const auto& v : verts) g.vertices.push_back(id_of(v, "a vertex"));
    auto index = [&](const json& v, const std::string& what) {
      std::string id = id_of(v, what);
      int i = g.index_of(id);
      if (i < 0) input_error(what + ": unknown vertex '" + id + "'");
      return i;
    };
    const json& edges = field(j, "edges", "graph");
    if (!edges.is_array()) input_error("\"edges\" must be an array");
    auto lines = element_lines(text, "edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const json& e = edges[i];
      int line = i < lines.size() ? lines[i] : 0;
      std::string where = "line " + std::to_string(line) + ": edge " + std::to_string(i);
      if (!e.is_object()) input_error(where + " must be an object");
      graph::Edge ed;
      ed.u = index(field(e, "u", where), where);
      ed.v = index(field(e, "v", where), where);
      const json& label = field(e, "label", where);
      if (!label.is_array()) input_error(where + ": the label must be an integer array");
      for (const auto& x : label) {
        if (!x.is_number_integer()) input_error(where + ": the label must be an integer array");
        ed.label.push_back(x.get<std::int64_t>());
      }
      ed.label = graph::canonical_label(ed.label);
      g.edges.push_back(std::move(ed));
      out.edge_lines.push_back(line);
    }
    if (auto it = j.find("order_covers"); it != j.end()) {
      if (!it->is_array()) input_error("\"order_covers\" must be an array of pairs");
      for (const auto& p : *it) {
        if (!p.is_array() || p.size() != 2) input_error("\"order_covers\" must be an array of pairs");
        g.order_covers.emplace_back(index(p[0], "an order relation"), index(p[1], "an order relation"));
      }
    }
    if (auto it = j.find("action_generators"); it != j.end()) {
      if (!it->is_array()) input_error("\"action_generators\" must be an array");
      for (const auto& perm : *it) {
        if (!perm.is_array()) input_error("an action generator must be an array");
        std::vector<int> s;
        for (const auto& x : perm) s.push_back(x.is_null() ? -1 : index(x, "an action generator"));
        g.action_generators.push_back(std::move(s));
      }
    }
  } catch (const json::exception& e) {
    input_error(std::string("graph file: ") + e.what());
  }
  return out;
}

GraphFile read_graph(const std::string& path) { return parse_graph(read_text(path)); }

std::string describe(const GraphFile& file, const graph::Violation& v) {
  std::string s;
  if (v.edge >= 0 && v.edge < static_cast<int>(file.edge_lines.size()) && file.edge_lines[v.edge] > 0) {
    s = "line " + std::to_string(file.edge_lines[v.edge]) + ": ";
  }
  return s + v.kind + " " + v.detail;
}

json graph_to_json(const graph::MomentGraph& g) {
  json j;
  j["lattice_rank"] = g.lattice_rank;
  j["vertices"] = g.vertices;
  j["edges"] = json::array();
  for (const auto& e : g.edges) j["edges"].push_back({{"u", g.vertices[e.u]}, {"v", g.vertices[e.v]}, {"label", e.label}});
  if (!g.order_covers.empty()) {
    j["order_covers"] = json::array();
    for (auto [a, b] : g.order_covers) j["order_covers"].push_back({g.vertices[a], g.vertices[b]});
  }
  if (!g.action_generators.empty()) {
    j["action_generators"] = json::array();
    for (const auto& s : g.action_generators) {
      json perm = json::array();
      for (int x : s) perm.push_back(x < 0 ? json(nullptr) : json(g.vertices[x]));
      j["action_generators"].push_back(perm);
    }
  }
  return j;
}

json window_to_json(const alcove::Window& window) {
  auto pq = alcove::periodic_quotient(window);
  json j = graph_to_json(pq.periodic);
  json alcoves = json::array();
  for (std::size_t i = 0; i < window.size(); ++i) {
    alcoves.push_back({{"id", window.ids[i]},
                       {"address", window.alcoves[i]},
                       {"orbit", pq.weyl_graph.vertices[pq.orbit_map[i]]}});
  }
  j["window"] = {{"type", roots::to_string(window.rs.type)},
                 {"w", window.ids[window.base]},
                 {"box", window.box.to_string()},
                 {"margin", window.margin.to_string()},
                 {"margin_alcoves", window.margin_size},
                 {"certified", true},
                 {"alcoves", alcoves}};
  return j;
}

json rank_poly_json(const RankPolynomial& p) {
  json j = json::object();
  for (const auto& [e, c] : p.coeffs) j[std::to_string(e)] = c;
  return j;
}

RankPolynomial rank_poly_from_json(const json& j) {
  if (!j.is_object()) input_error("a rank polynomial is an object {exponent: coefficient}");
  RankPolynomial p;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number_integer()) input_error("rank polynomial coefficients are integers");
    if (v.get<std::int64_t>() != 0) p.coeffs[std::stoi(k)] = v.get<std::int64_t>();
  }
  return p;
}

RunRecord make_record(const sheaf::CofilteredSheaf& sh, const std::string& source, const sheaf::VerifyReport* report) {
  const auto& sw = sh.window;
  RunRecord r;
  r.source = source;
  r.w = point_name(sw, sh.w);
  r.cutoff = sw.cutoff;
  r.field = sw.field.to_string();
  for (const auto& row : sheaf::rank_table(sh)) {
    r.stalks.push_back({point_name(sw, row.point), sw.quotient.vertices[row.orbit], row.rank});
  }
  for (const auto& pc : sh.pieces) {
    if (pc.module.is_zero()) continue;
    const auto& e = sw.quotient.edges[pc.edge];
    r.edge_modules.push_back(
        {sw.quotient.vertices[e.u] + " -- " + sw.quotient.vertices[e.v], point_name(sw, pc.point), pc.module.dims});
  }
  if (report) {
    for (const auto& [name, c] : report->checks) r.verification.push_back({name, c.ok, c.detail});
    std::sort(r.verification.begin(), r.verification.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  }
  return r;
}

json to_json(const RunRecord& r) {
  json j;
  j["source"] = r.source;
  j["w"] = r.w;
  j["cutoff"] = r.cutoff;
  j["field"] = {{"spec", r.field}};
  j["stalks"] = json::array();
  for (const auto& s : r.stalks) j["stalks"].push_back({{"x", s.x}, {"orbit", s.orbit}, {"rank_poly", rank_poly_json(s.rank)}});
  j["edge_modules"] = json::array();
  for (const auto& e : r.edge_modules) j["edge_modules"].push_back({{"edge", e.edge}, {"x", e.x}, {"dims", e.dims}});
  json v = json::object();
  for (const auto& c : r.verification) {
    v[c.name] = {{"ok", c.ok}};
    if (!c.ok) v[c.name]["detail"] = c.detail;
  }
  j["verification"] = v;
  return j;
}

RunRecord run_from_json(const json& j) {
  RunRecord r;
  try {
    r.source = field(j, "source", "run").get<std::string>();
    r.w = field(j, "w", "run").get<std::string>();
    r.cutoff = field(j, "cutoff", "run").get<int>();
    r.field = field(field(j, "field", "run"), "spec", "field").get<std::string>();
    for (const auto& s : field(j, "stalks", "run")) {
      r.stalks.push_back({field(s, "x", "stalk").get<std::string>(), field(s, "orbit", "stalk").get<std::string>(),
                          rank_poly_from_json(field(s, "rank_poly", "stalk"))});
    }
    if (auto it = j.find("edge_modules"); it != j.end()) {
      for (const auto& e : *it) {
        r.edge_modules.push_back({field(e, "edge", "edge module").get<std::string>(),
                                  field(e, "x", "edge module").get<std::string>(),
                                  field(e, "dims", "edge module").get<std::vector<std::size_t>>()});
      }
    }
    if (auto it = j.find("verification"); it != j.end()) {
      for (const auto& [name, c] : it->items()) {
        r.verification.push_back({name, field(c, "ok", name).get<bool>(), c.value("detail", std::string())});
      }
    }
  } catch (const json::exception& e) {
    input_error(std::string("run record: ") + e.what());
  }
  std::sort(r.verification.begin(), r.verification.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return r;
}

std::string rank_csv(const RunRecord& r) {
  std::string out = "x,orbit,rank_poly\n";
  for (const auto& s : r.stalks) out += s.x + "," + s.orbit + "," + s.rank.to_string() + "\n";
  return out;
}

KlRecord make_kl(const std::string& type, const std::string& w) {
  std::unique_ptr<kl::CoxeterGroup> g;
  try {
    g = std::make_unique<kl::CoxeterGroup>(type);
  } catch (const Error& e) {
    input_error(e.what());
  }
  int wi = w == "longest" ? g->longest() : g->from_word(w);
  kl::KLOracle oracle(*g);
  KlRecord r;
  r.type = type;
  r.w = g->name(wi);
  for (const auto& [x, p] : oracle.table(wi)) {
    RankPolynomial rp;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] != 0) rp.coeffs[static_cast<int>(i)] = p[i];
    }
    r.rows.emplace_back(g->name(x), rp);
  }
  return r;
}

json to_json(const KlRecord& r) {
  json j;
  j["type"] = r.type;
  j["w"] = r.w;
  j["rows"] = json::array();
  for (const auto& [x, p] : r.rows) j["rows"].push_back({{"x", x}, {"poly", rank_poly_json(p)}});
  return j;
}

KlRecord kl_from_json(const json& j) {
  KlRecord r;
  try {
    r.type = field(j, "type", "KL table").get<std::string>();
    r.w = field(j, "w", "KL table").get<std::string>();
    for (const auto& row : field(j, "rows", "KL table")) {
      r.rows.emplace_back(field(row, "x", "row").get<std::string>(), rank_poly_from_json(field(row, "poly", "row")));
    }
  } catch (const json::exception& e) {
    input_error(std::string("KL table: ") + e.what());
  }
  return r;
}

std::string kl_csv(const KlRecord& r) {
  std::string out = "x,poly\n";
  for (const auto& [x, p] : r.rows) out += x + "," + p.to_string() + "\n";
  return out;
}

std::vector<Mismatch> compare(const RunRecord& bm, const KlRecord& kl) {
  std::vector<Mismatch> out;
  for (const auto& s : bm.stalks) {
    auto it = std::find_if(kl.rows.begin(), kl.rows.end(), [&](const auto& row) { return row.first == s.x; });
    if (it == kl.rows.end()) out.push_back({s.x, s.rank.to_string(), "absent"});
    else if (!(it->second == s.rank)) out.push_back({s.x, s.rank.to_string(), it->second.to_string()});
  }
  for (const auto& [x, p] : kl.rows) {
    bool found = std::any_of(bm.stalks.begin(), bm.stalks.end(), [&](const auto& s) { return s.x == x; });
    if (!found) out.push_back({x, "absent", p.to_string()});
  }
  return out;
}

}  // namespace sheafbm::io
