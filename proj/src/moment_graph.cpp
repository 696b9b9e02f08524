#include "sheafbm/moment_graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "sheafbm/error.hpp"
#include "sheafbm/graded.hpp"

namespace sheafbm::graph {
namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
};

std::vector<std::vector<int>> groups_of(UnionFind& uf, std::size_t n) {
  std::map<int, std::vector<int>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(static_cast<int>(i))].push_back(static_cast<int>(i));
  std::vector<std::vector<int>> out;
  for (auto& [r, members] : by_root) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<int, int> unordered(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

std::string vname(const MomentGraph& g, int i) {
  if (i >= 0 && i < static_cast<int>(g.vertices.size())) return g.vertices[i];
  return "#" + std::to_string(i);
}

std::string edge_string(const MomentGraph& g, const Edge& e) {
  return vname(g, e.u) + " -- " + vname(g, e.v) + " " + label_string(e.label);
}

linalg::Matrix label_matrix(const FieldSpec& f, const std::vector<Label>& rows, int rank) {
  linalg::Matrix m(f, rows.size(), static_cast<std::size_t>(rank));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < rank; ++j) m.set(i, j, linalg::Rational(rows[i][j]));
  }
  return m;
}

}  // namespace

Label canonical_label(Label v) {
  for (auto x : v) {
    if (x == 0) continue;
    if (x < 0) {
      for (auto& y : v) y = -y;
    }
    break;
  }
  return v;
}

bool is_zero_label(const Label& v) {
  return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
}

std::string label_string(const Label& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

int MomentGraph::index_of(const std::string& id) const {
  auto it = std::find(vertices.begin(), vertices.end(), id);
  return it == vertices.end() ? -1 : static_cast<int>(it - vertices.begin());
}

Poset Poset::from_relations(std::size_t n, const std::vector<std::pair<int, int>>& less) {
  Poset p;
  p.n_ = n;
  p.lt_.assign(n * n, 0);
  for (auto [a, b] : less) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n) {
      throw Error(ErrorCode::DomainError, "order relation refers to an unknown vertex");
    }
    p.lt_[a * n + b] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!p.lt_[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (p.lt_[k * n + j]) p.lt_[i * n + j] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (p.lt_[i * n + i]) throw Error(ErrorCode::DomainError, "order relations contain a cycle");
  }
  return p;
}

std::vector<std::pair<int, int>> Poset::covers() const {
  std::vector<std::pair<int, int>> out;
  int n = static_cast<int>(n_);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (!less(a, b)) continue;
      bool cover = true;
      for (int c = 0; c < n && cover; ++c) {
        if (less(a, c) && less(c, b)) cover = false;
      }
      if (cover) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<int> Poset::below(int x) const {
  std::vector<int> out;
  for (int y = 0; y < static_cast<int>(n_); ++y) {
    if (leq(y, x)) out.push_back(y);
  }
  return out;
}

std::vector<int> Poset::strictly_below(int x) const {
  std::vector<int> out;
  for (int y = 0; y < static_cast<int>(n_); ++y) {
    if (less(y, x)) out.push_back(y);
  }
  return out;
}

bool Poset::is_open(const std::vector<int>& subset) const {
  std::vector<char> in(n_, 0);
  for (int x : subset) in[x] = 1;
  for (int x : subset) {
    for (int y = 0; y < static_cast<int>(n_); ++y) {
      if (less(y, x) && !in[y]) return false;
    }
  }
  return true;
}

std::vector<int> Poset::linear_extension(const std::vector<std::vector<std::int64_t>>& keys, bool reverse_ties) const {
  int n = static_cast<int>(n_);
  std::vector<int> indeg(n, 0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (less(a, b)) ++indeg[b];
    }
  }
  auto key_less = [&](int a, int b) {
    const auto& ka = keys.empty() ? std::vector<std::int64_t>{} : keys[a];
    const auto& kb = keys.empty() ? std::vector<std::int64_t>{} : keys[b];
    if (ka != kb) return reverse_ties ? kb < ka : ka < kb;
    return reverse_ties ? b < a : a < b;
  };
  std::vector<int> order;
  std::vector<char> done(n, 0);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int x = 0; x < n; ++x) {
      if (done[x] || indeg[x] != 0) continue;
      if (best < 0 || key_less(x, best)) best = x;
    }
    done[best] = 1;
    order.push_back(best);
    for (int b = 0; b < n; ++b) {
      if (less(best, b)) --indeg[b];
    }
  }
  return order;
}

bool ValidationReport::has(const std::string& kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate(const MomentGraph& g) {
  ValidationReport r;
  int n = static_cast<int>(g.size());
  if (g.lattice_rank < 1) r.violations.push_back({"BAD_LABEL", "lattice rank must be positive"});
  std::set<std::string> ids;
  for (const auto& id : g.vertices) {
    if (!ids.insert(id).second) r.violations.push_back({"DUPLICATE_VERTEX", id});
  }
  std::map<std::pair<int, int>, int> seen;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& e = g.edges[i];
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      r.violations.push_back({"BAD_VERTEX", "edge " + std::to_string(i) + " refers to an unknown vertex", static_cast<int>(i)});
      continue;
    }
    if (e.u == e.v) r.violations.push_back({"LOOP", edge_string(g, e), static_cast<int>(i)});
    if (static_cast<int>(e.label.size()) != g.lattice_rank) {
      r.violations.push_back({"BAD_LABEL", edge_string(g, e) + ": label length differs from lattice rank", static_cast<int>(i)});
    } else if (is_zero_label(e.label)) {
      r.violations.push_back({"ZERO_LABEL", edge_string(g, e), static_cast<int>(i)});
    }
    auto key = unordered(e.u, e.v);
    if (e.u != e.v) {
      auto [it, fresh] = seen.emplace(key, static_cast<int>(i));
      if (!fresh) {
        r.violations.push_back({"DOUBLE_EDGE", edge_string(g, e) + " duplicates " + edge_string(g, g.edges[it->second]), static_cast<int>(i)});
      }
    }
  }
  bool order_ok = true;
  Poset order;
  for (auto [a, b] : g.order_covers) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      r.violations.push_back({"BAD_VERTEX", "order relation refers to an unknown vertex"});
      order_ok = false;
    }
  }
  if (order_ok && g.has_order()) {
    try {
      order = Poset::from_relations(g.size(), g.order_covers);
    } catch (const Error&) {
      r.violations.push_back({"ORDER_CYCLE", "order relations contain a cycle"});
      order_ok = false;
    }
    if (order_ok) {
      for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v) continue;
        if (!order.comparable(e.u, e.v)) r.violations.push_back({"INCOMPARABLE_EDGE", edge_string(g, e), static_cast<int>(i)});
      }
    }
  }
  std::map<std::pair<int, int>, Label> labels;
  for (const auto& e : g.edges) {
    if (e.u >= 0 && e.u < n && e.v >= 0 && e.v < n) labels[unordered(e.u, e.v)] = canonical_label(e.label);
  }
  for (std::size_t gi = 0; gi < g.action_generators.size(); ++gi) {
    const auto& s = g.action_generators[gi];
    std::string name = "generator " + std::to_string(gi);
    if (static_cast<int>(s.size()) != n) {
      r.violations.push_back({"BAD_ACTION", name + " has the wrong length"});
      continue;
    }
    std::set<int> images;
    bool bad = false;
    for (int x : s) {
      if (x < -1 || x >= n) bad = true;
      else if (x >= 0 && !images.insert(x).second) bad = true;
    }
    if (bad) {
      r.violations.push_back({"BAD_ACTION", name + " is not an injective partial map on the vertices"});
      continue;
    }
    for (const auto& e : g.edges) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) continue;
      int a = s[e.u], b = s[e.v];
      if (a < 0 || b < 0) continue;
      auto it = labels.find(unordered(a, b));
      if (it == labels.end() || it->second != canonical_label(e.label)) {
        r.violations.push_back({"BAD_ACTION", name + " does not map edge " + edge_string(g, e) + " to an edge with the same label"});
      }
    }
  }
  return r;
}

std::string GkmReport::to_string(const MomentGraph& g) const {
  if (ok) return "OK";
  std::ostringstream os;
  os << "FAIL(" << reason << ")";
  if (vertex >= 0) os << " at " << vname(g, vertex);
  if (edge_a >= 0) os << " edge " << edge_string(g, g.edges[edge_a]);
  if (edge_b >= 0) os << " and edge " << edge_string(g, g.edges[edge_b]);
  return os.str();
}

GkmReport gkm_check(const MomentGraph& g, const FieldSpec& field) {
  GkmReport rep;
  if (field.characteristic == 2) {
    rep.ok = false;
    rep.reason = "characteristic";
    return rep;
  }
  std::vector<std::vector<int>> incident(g.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    incident[g.edges[i].u].push_back(static_cast<int>(i));
    incident[g.edges[i].v].push_back(static_cast<int>(i));
  }
  auto vanishes = [&](const Label& l) {
    if (field.is_rational()) return is_zero_label(l);
    auto p = static_cast<std::int64_t>(field.characteristic);
    return std::all_of(l.begin(), l.end(), [&](std::int64_t x) { return x % p == 0; });
  };
  for (std::size_t x = 0; x < g.size(); ++x) {
    const auto& inc = incident[x];
    for (std::size_t a = 0; a < inc.size(); ++a) {
      const Label& la = g.edges[inc[a]].label;
      if (vanishes(la)) {
        rep = {false, "vanishing label", static_cast<int>(x), inc[a], -1};
        return rep;
      }
      for (std::size_t b = a + 1; b < inc.size(); ++b) {
        const Label& lb = g.edges[inc[b]].label;
        if (linalg::rank(label_matrix(field, {la, lb}, g.lattice_rank)) < 2) {
          rep = {false, "proportional", static_cast<int>(x), inc[a], inc[b]};
          return rep;
        }
      }
    }
  }
  return rep;
}

QuotientData quotient_by_action(const MomentGraph& g) {
  int n = static_cast<int>(g.size());
  std::map<std::pair<int, int>, Label> labels;
  for (const auto& e : g.edges) labels[unordered(e.u, e.v)] = canonical_label(e.label);
  UnionFind uf(g.size());
  for (std::size_t gi = 0; gi < g.action_generators.size(); ++gi) {
    const auto& s = g.action_generators[gi];
    if (static_cast<int>(s.size()) != n) throw Error(ErrorCode::NotAutomorphism, "generator " + std::to_string(gi) + " has the wrong length");
    std::set<int> images;
    for (int x : s) {
      if (x < -1 || x >= n || (x >= 0 && !images.insert(x).second)) {
        throw Error(ErrorCode::NotAutomorphism, "generator " + std::to_string(gi) + " is not injective");
      }
    }
    for (const auto& e : g.edges) {
      int a = s[e.u], b = s[e.v];
      if (a < 0 || b < 0) continue;
      auto it = labels.find(unordered(a, b));
      if (it == labels.end()) {
        throw Error(ErrorCode::NotAutomorphism, "generator " + std::to_string(gi) + " maps edge " + edge_string(g, e) + " to a non-edge");
      }
      if (it->second != canonical_label(e.label)) {
        throw Error(ErrorCode::NotAutomorphism, "generator " + std::to_string(gi) + " changes the label of edge " + edge_string(g, e));
      }
    }
    for (int x = 0; x < n; ++x) {
      if (s[x] >= 0) uf.unite(x, s[x]);
    }
  }
  auto orbits = groups_of(uf, g.size());
  QuotientData q;
  q.orbit_map.assign(g.size(), -1);
  q.quotient.lattice_rank = g.lattice_rank;
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    q.quotient.vertices.push_back(g.vertices[orbits[o].front()]);
    for (int x : orbits[o]) q.orbit_map[x] = static_cast<int>(o);
  }
  std::set<std::tuple<int, int, Label>> qedges;
  for (const auto& e : g.edges) {
    int a = q.orbit_map[e.u], b = q.orbit_map[e.v];
    if (a == b) continue;
    auto [lo, hi] = unordered(a, b);
    qedges.emplace(lo, hi, canonical_label(e.label));
  }
  for (const auto& [a, b, l] : qedges) q.quotient.edges.push_back({a, b, l});
  return q;
}

bool is_saturated(const std::vector<Label>& basis, int rank) {
  if (basis.empty()) return true;
  std::vector<std::vector<std::int64_t>> m;
  for (const auto& b : basis) {
    if (static_cast<int>(b.size()) != rank) throw Error(ErrorCode::DomainError, "sublattice vector has the wrong length");
    m.push_back(b);
  }
  for (auto d : linalg::elementary_divisors(m)) {
    if (d != 1) return false;
  }
  return true;
}

SublatticeRestriction restrict_to_sublattice(const MomentGraph& g, const std::vector<Label>& basis) {
  if (!is_saturated(basis, g.lattice_rank)) {
    throw Error(ErrorCode::NotSaturated, "the sublattice has torsion quotient");
  }
  const FieldSpec q = FieldSpec::rationals();
  std::size_t base_rank = basis.empty() ? 0 : linalg::rank(label_matrix(q, basis, g.lattice_rank));
  SublatticeRestriction out;
  out.graph = g;
  out.graph.edges.clear();
  for (const auto& e : g.edges) {
    if (basis.empty()) continue;
    std::vector<Label> rows = basis;
    rows.push_back(e.label);
    if (linalg::rank(label_matrix(q, rows, g.lattice_rank)) == base_rank) out.graph.edges.push_back(e);
  }
  out.components = connected_components(out.graph);
  return out;
}

std::vector<std::vector<int>> connected_components(const MomentGraph& g) {
  UnionFind uf(g.size());
  for (const auto& e : g.edges) uf.unite(e.u, e.v);
  return groups_of(uf, g.size());
}

std::vector<std::size_t> structure_algebra_hilbert(const MomentGraph& g, const FieldSpec& field, int cutoff) {
  if (cutoff < 0 || cutoff % 2 != 0) throw Error(ErrorCode::DomainError, "cutoff must be even and nonnegative");
  int top = cutoff / 2;
  int r = g.lattice_rank;
  auto s = graded::free_module(field, r, top, {0});
  std::map<Label, graded::Quotient> quotients;
  for (const auto& e : g.edges) {
    Label l = canonical_label(e.label);
    if (!quotients.count(l)) quotients.emplace(l, graded::cokernel(s, graded::apply_form(s, l)));
  }
  std::vector<std::size_t> dims;
  std::size_t n = g.size();
  for (int k = 0; k <= top; ++k) {
    std::size_t sd = s.dims[k];
    std::size_t rows = 0;
    for (const auto& e : g.edges) rows += quotients.at(canonical_label(e.label)).module.dims[k];
    linalg::Matrix m(field, rows, n * sd);
    std::size_t row = 0;
    for (const auto& e : g.edges) {
      const auto& p = quotients.at(canonical_label(e.label)).projection[k];
      for (std::size_t i = 0; i < p.rows(); ++i) {
        for (std::size_t j = 0; j < sd; ++j) {
          if (p(i, j).is_zero()) continue;
          m.set_canonical(row + i, e.u * sd + j, p(i, j));
          m.set_canonical(row + i, e.v * sd + j, linalg::field_neg(field, p(i, j)));
        }
      }
      row += p.rows();
    }
    dims.push_back(n * sd - linalg::rank(m));
  }
  return dims;
}

}  // namespace sheafbm::graph
