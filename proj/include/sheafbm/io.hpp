#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sheafbm/alcove.hpp"
#include "sheafbm/moment_graph.hpp"
#include "sheafbm/sheaf.hpp"

namespace sheafbm::io {

using graded::RankPolynomial;
using json = nlohmann::json;

// Graph files. Vertex references are ids; an action generator is a list with
// one entry per vertex, the image id or null outside the window.
struct GraphFile {
  graph::MomentGraph graph;
  std::vector<int> edge_lines;  // source line of each edge, 0 if unknown
};

// Throws INPUT_ERROR ("line N: ...") on malformed JSON or a wrong shape.
// Invariant violations are left to graph::validate.
GraphFile parse_graph(const std::string& text);
GraphFile read_graph(const std::string& path);
json graph_to_json(const graph::MomentGraph& g);
std::string describe(const GraphFile& file, const graph::Violation& v);

json window_to_json(const alcove::Window& window);

json rank_poly_json(const RankPolynomial& p);
RankPolynomial rank_poly_from_json(const json& j);

struct StalkRecord {
  std::string x;
  std::string orbit;
  RankPolynomial rank;
  friend bool operator==(const StalkRecord&, const StalkRecord&) = default;
};

struct EdgeRecord {
  std::string edge;  // "u -- v" over quotient vertex ids
  std::string x;
  std::vector<std::size_t> dims;
  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

struct CheckRecord {
  std::string name;
  bool ok = true;
  std::string detail;
  friend bool operator==(const CheckRecord&, const CheckRecord&) = default;
};

struct RunRecord {
  std::string source;  // "A2-bruhat", "affine-A1", or a graph file name
  std::string w;
  int cutoff = 0;
  std::string field;
  std::vector<StalkRecord> stalks;  // points >= w
  std::vector<EdgeRecord> edge_modules;
  std::vector<CheckRecord> verification;
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

RunRecord make_record(const sheaf::CofilteredSheaf& sh, const std::string& source, const sheaf::VerifyReport* report);
json to_json(const RunRecord& r);
RunRecord run_from_json(const json& j);
std::string rank_csv(const RunRecord& r);

struct KlRecord {
  std::string type;
  std::string w;
  std::vector<std::pair<std::string, RankPolynomial>> rows;  // x <= w
  friend bool operator==(const KlRecord&, const KlRecord&) = default;
};

// w may be "longest" or a word; throws INPUT_ERROR for an unknown type.
KlRecord make_kl(const std::string& type, const std::string& w);
json to_json(const KlRecord& r);
KlRecord kl_from_json(const json& j);
std::string kl_csv(const KlRecord& r);

struct Mismatch {
  std::string x;
  std::string bm;
  std::string kl;
};

// Every stalk against the table and every table row against the stalks.
std::vector<Mismatch> compare(const RunRecord& bm, const KlRecord& kl);

// Reads a whole file; INPUT_ERROR if it cannot be opened. "-" is stdin.
std::string read_text(const std::string& path);
json parse_json(const std::string& text);
// Writes through a temporary file and a rename.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace sheafbm::io
