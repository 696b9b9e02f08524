#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sheafbm/alcove.hpp"
#include "sheafbm/cofiltered.hpp"
#include "sheafbm/graded.hpp"
#include "sheafbm/moment_graph.hpp"

namespace sheafbm::sheaf {

using cofiltered::CheckResult;
using graded::DegreewiseModule;
using graded::RankPolynomial;
using linalg::FieldSpec;
using linalg::Matrix;

// The ordered index set (window points) next to the unordered quotient graph.
struct SheafWindow {
  graph::MomentGraph quotient;
  std::vector<std::string> points;
  graph::Poset order;
  std::vector<int> orbit_map;  // point -> quotient vertex
  std::vector<std::vector<std::int64_t>> keys;
  FieldSpec field;
  int cutoff = 0;
  int base = -1;  // w of a classical or alcove window, -1 for graph files

  int top() const { return cutoff / 2; }
  int rank() const { return quotient.lattice_rank; }
  std::size_t size() const { return points.size(); }
  int index_of(const std::string& id) const;  // -1 if absent
  std::vector<int> points_of(int orbit) const;
  std::vector<int> edges_at(int orbit) const;
};

// Checks the orbit map, the cutoff and the GKM condition over the field.
SheafWindow make_window(graph::MomentGraph quotient, std::vector<std::string> points, graph::Poset order,
                        std::vector<int> orbit_map, std::vector<std::vector<std::int64_t>> keys, FieldSpec field,
                        int cutoff);
// Points {x <= w} of a finite Weyl group with the reversed Bruhat order, so that
// w is minimal; trivial action. w may be "longest".
SheafWindow classical_window(const std::string& type, const std::string& w, FieldSpec field, int cutoff);
SheafWindow affine_window(const alcove::Window& window, FieldSpec field, int cutoff);
// Order from the graph; quotient by the action generators if there are any.
SheafWindow graph_window(const graph::MomentGraph& g, FieldSpec field, int cutoff);
// The window restricted to a subset of points (keeps the induced order).
SheafWindow subwindow(const SheafWindow& sw, const std::vector<int>& points);

struct Stalk {
  int point = 0;
  int orbit = 0;
  std::vector<int> gen_degrees;
  DegreewiseModule module;
  std::vector<int> lower;                   // points of the same orbit strictly below
  std::vector<Matrix> restriction;          // stalk -> sum of the stalks at `lower`
  std::map<int, std::vector<Matrix>> rho;   // quotient edge -> edge module at this point
};

// Edge module at a point t of E = (Theta, source), t in Theta:
// B^{E,<=t} = B^{source,<t} / alpha B^{source,<t}.
struct EdgePiece {
  int edge = 0;
  int point = 0;
  int source = 0;
  std::vector<int> lower;        // points of `source` strictly below t
  DegreewiseModule module;
  std::vector<Matrix> project;   // sum of the stalks at `lower` -> module, on the limit
};

struct Mutation {
  enum class Kind { DropGenerator, ZeroRho };
  Kind kind = Kind::DropGenerator;
  int point = 0;
  int edge = -1;  // ZeroRho: zeroes the canonical projection onto the edge module at `point`
};

struct BuildOptions {
  std::vector<int> linear_extension;  // empty: ascending keys
  std::vector<Mutation> mutations;
  std::optional<std::uint64_t> extra_generators_seed;  // adds redundant generators
};

struct CofilteredSheaf {
  SheafWindow window;
  int w = 0;
  std::vector<int> processing_order;
  std::vector<Stalk> stalks;  // indexed by point
  std::vector<EdgePiece> pieces;
  std::map<std::pair<int, int>, int> piece_index;  // (edge, point)

  const EdgePiece* piece(int edge, int point) const;
};

std::vector<int> default_linear_extension(const SheafWindow& sw, bool reverse_ties = false);

// Throws CUTOFF_TOO_LOW, DOMAIN_ERROR (bad linear extension).
CofilteredSheaf bm_build(const SheafWindow& sw, int w, const BuildOptions& options = {});

// Gamma(J): columns in the coordinates of the stalks at the points of J, ascending. Throws NOT_OPEN.
std::vector<Matrix> sections_over_open(const CofilteredSheaf& sh, const std::vector<int>& open);
std::vector<std::size_t> hilbert(const std::vector<Matrix>& sections);
CheckResult glue_check(const CofilteredSheaf& sh, const std::vector<std::vector<int>>& cover);

struct SheafDelta {
  DegreewiseModule target;     // edge modules at z, then the stalks of the orbit strictly below z
  std::vector<Matrix> d;       // stalk at z -> target
  std::vector<Matrix> u;       // Gamma(<z) coordinates -> target
  std::vector<Matrix> image;   // column basis of u(Gamma(<z))
};

SheafDelta delta_sheaf(const CofilteredSheaf& sh, int z);
CheckResult flabby_check(const CofilteredSheaf& sh);

struct VerifyReport {
  std::vector<std::pair<std::string, CheckResult>> checks;
  bool ok() const;
  const CheckResult* find(const std::string& name) const;
};

// full adds the checks that go through global sections.
VerifyReport bm_verify(const CofilteredSheaf& sh, bool full = true);

struct RankRow {
  int point = 0;
  int orbit = 0;
  RankPolynomial rank;
};

std::vector<RankRow> rank_table(const CofilteredSheaf& sh);  // points >= w

// B(w)^{<=x} = Gamma({<= x}); one cell per nonzero stalk.
cofiltered::CofilteredModule global_sections(const CofilteredSheaf& sh);

struct GlobalSections {
  cofiltered::CofilteredModule module;
  cofiltered::CofilteredModule standard;  // Delta(w)
  cofiltered::Morphism pi;
  CheckResult delta_match;                 // B(w)^{delta x} = B^{delta x}
  cofiltered::ExactnessReport epi;         // 0 -> ker pi -> B(w) -> Delta(w) -> 0
  std::vector<RankRow> ranks;
};

GlobalSections global_sections_and_epi(const CofilteredSheaf& sh);
CheckResult delta_match_check(const CofilteredSheaf& sh, const cofiltered::CofilteredModule& b);

}  // namespace sheafbm::sheaf
