#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sheafbm/exact_linalg.hpp"

namespace sheafbm::graph {

using linalg::FieldSpec;
using Label = std::vector<std::int64_t>;

// First nonzero coordinate made positive. The zero vector is returned unchanged.
Label canonical_label(Label v);
bool is_zero_label(const Label& v);
std::string label_string(const Label& v);

struct Edge {
  int u = 0;
  int v = 0;
  Label label;
};

// Vertices are referred to by index; `vertices` holds their external ids.
// Action generators map vertex index -> vertex index, with -1 where the image
// is not part of the graph (generators restricted to a finite window).
struct MomentGraph {
  int lattice_rank = 1;
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<std::pair<int, int>> order_covers;  // (lower, upper)
  std::vector<std::vector<int>> action_generators;

  std::size_t size() const { return vertices.size(); }
  int index_of(const std::string& id) const;  // -1 if absent
  bool has_order() const { return !order_covers.empty(); }
};

// Partial order on 0..n-1 given by the transitive closure of cover pairs.
class Poset {
 public:
  Poset() = default;
  // Throws DOMAIN_ERROR if the relations contain a cycle.
  static Poset from_relations(std::size_t n, const std::vector<std::pair<int, int>>& less);

  std::size_t size() const { return n_; }
  bool leq(int a, int b) const { return a == b || lt_[a * n_ + b]; }
  bool less(int a, int b) const { return lt_[a * n_ + b]; }
  bool comparable(int a, int b) const { return leq(a, b) || leq(b, a); }
  // Cover relations (a < b with nothing strictly between), sorted.
  std::vector<std::pair<int, int>> covers() const;
  std::vector<int> below(int x) const;         // {y : y <= x}
  std::vector<int> strictly_below(int x) const;
  bool is_open(const std::vector<int>& subset) const;
  // Kahn's algorithm; among available elements take the smallest (or the
  // largest, with reverse_ties) under the given key order.
  std::vector<int> linear_extension(const std::vector<std::vector<std::int64_t>>& keys, bool reverse_ties = false) const;

 private:
  std::size_t n_ = 0;
  std::vector<char> lt_;
};

struct Violation {
  std::string kind;  // LOOP, DOUBLE_EDGE, ZERO_LABEL, BAD_LABEL, BAD_VERTEX, DUPLICATE_VERTEX, ORDER_CYCLE, INCOMPARABLE_EDGE, BAD_ACTION
  std::string detail;
  int edge = -1;  // offending edge, if any
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(const std::string& kind) const;
};

ValidationReport validate(const MomentGraph& g);

struct GkmReport {
  bool ok = true;
  std::string reason;  // "characteristic", "proportional", "vanishing label"
  int vertex = -1;
  int edge_a = -1;
  int edge_b = -1;
  std::string to_string(const MomentGraph& g) const;
};

GkmReport gkm_check(const MomentGraph& g, const FieldSpec& field);

struct QuotientData {
  MomentGraph quotient;        // no order, no action
  std::vector<int> orbit_map;  // vertex index -> quotient vertex index
};

// Orbits of the group generated by g.action_generators; quotient vertices are
// named by the id of the first member of each orbit.
QuotientData quotient_by_action(const MomentGraph& g);

struct SublatticeRestriction {
  MomentGraph graph;                          // same vertices, surviving edges
  std::vector<std::vector<int>> components;   // sorted vertex index lists
};

bool is_saturated(const std::vector<Label>& basis, int rank);
SublatticeRestriction restrict_to_sublattice(const MomentGraph& g, const std::vector<Label>& basis);

// dim of the structure algebra in degrees 0, 2, ..., cutoff.
std::vector<std::size_t> structure_algebra_hilbert(const MomentGraph& g, const FieldSpec& field, int cutoff);

// Connected components of the underlying abstract graph.
std::vector<std::vector<int>> connected_components(const MomentGraph& g);

}  // namespace sheafbm::graph
