#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sheafbm/exact_linalg.hpp"
#include "sheafbm/graded.hpp"
#include "sheafbm/moment_graph.hpp"

// Cofiltered modules, embedded in a direct sum of free "cells". Each cell sits
// over a window point and a quotient vertex (its orbit). M^{<=x} is a per-degree
// subspace of the sum of the cells over points <= x, restriction to {<= y} is
// the coordinate projection onto the cells over points <= y, and the component
// (M^{<=x})^Omega is the projection onto the cells with orbit Omega.

namespace sheafbm::cofiltered {

using graded::DegreewiseModule;
using linalg::FieldSpec;
using linalg::Matrix;

struct Cell {
  int point = 0;
  int orbit = 0;
  std::vector<int> gen_degrees;  // free module on these generators
  DegreewiseModule module;
};

Cell make_cell(FieldSpec field, int rank, int top, int point, int orbit, const std::vector<int>& gen_degrees);

struct CheckResult {
  bool ok = true;
  std::string detail;  // first failure
  void fail(const std::string& what) {
    if (ok) detail = what;
    ok = false;
  }
};

struct CofilteredModule {
  FieldSpec field;
  int rank = 1;
  int top = 0;
  graph::Poset order;
  std::vector<int> point_orbit;
  std::vector<std::string> point_names;
  std::vector<Cell> cells;
  // spaces[x][k]: column basis of M^{<=x} in degree 2k, in the coordinates of cells_below(x)
  std::vector<std::vector<Matrix>> spaces;

  std::size_t num_points() const { return point_orbit.size(); }
  std::vector<int> cells_over(const std::vector<int>& points) const;
  std::vector<int> cells_below(int x, bool strict = false) const;
  std::vector<int> all_cells() const;
  std::size_t dim(const std::vector<int>& cells, int k) const;
};

// Sum of the given cells.
DegreewiseModule ambient(const CofilteredModule& m, const std::vector<int>& cells);
// Projection from the coordinates of `from` onto those of `to` (a subset).
Matrix selector(const CofilteredModule& m, const std::vector<int>& from, const std::vector<int>& to, int k);
// M^{<=x} as an abstract module.
graded::Submodule piece(const CofilteredModule& m, int x);

// Restrictions land in the right spaces and every M^{<=x} is S-stable.
CheckResult well_formed(const CofilteredModule& m);

// M^J: columns in the coordinates of cells_over(open). Throws NOT_OPEN.
std::vector<Matrix> sections_over_open(const CofilteredModule& m, const std::vector<int>& open);
// Sections over the union biject onto compatible tuples over the members.
CheckResult glue_check(const CofilteredModule& m, const std::vector<std::vector<int>>& cover);

// Kernel of M^{<=x} -> M^{<x}, in the coordinates of cells_below(x).
graded::Submodule costalk(const CofilteredModule& m, int x);
std::vector<int> support(const CofilteredModule& m);

struct DeltaData {
  DegreewiseModule module;
  std::vector<int> theta_cells;  // cells below x over the orbit of x
  std::vector<int> lower_cells;  // cells strictly below x
  std::vector<Matrix> d;         // theta_cells coordinates -> delta
  std::vector<Matrix> u;         // lower_cells coordinates -> delta, defined on M^{<x}
};

// Throws SUPPORT_VIOLATION when (S) fails at x.
DeltaData delta_module(const CofilteredModule& m, int x);
CheckResult support_condition_check(const CofilteredModule& m);
// M^{<=x} -> M^{<x} surjective at every x.
CheckResult flabby_check(const CofilteredModule& m);
// M^{<=x} is the fiber product of its Omega-component and M^{<x} over M^{delta x}.
CheckResult fiber_square_check(const CofilteredModule& m, int x);

CofilteredModule standard_object(const graph::Poset& order, const std::vector<int>& point_orbit,
                                 const std::vector<std::string>& point_names, FieldSpec field, int rank, int top, int w);
CofilteredModule direct_sum(const CofilteredModule& a, const CofilteredModule& b);

// Degree-0 morphism given by a map of the full cell sums, per degree. A block
// from cell c to cell d may be nonzero only if both have the same orbit and
// point(c) <= point(d).
struct Morphism {
  std::vector<Matrix> blocks;
};

CheckResult morphism_check(const CofilteredModule& src, const CofilteredModule& dst, const Morphism& f);
Morphism identity_morphism(const CofilteredModule& m);
Morphism zero_morphism(const CofilteredModule& src, const CofilteredModule& dst);
Morphism compose(const Morphism& g, const Morphism& f);
Morphism combine(const std::vector<Morphism>& basis, const std::vector<linalg::Rational>& coeffs);
// Identity between paired cells (equal generator degrees), zero elsewhere.
Morphism cell_map(const CofilteredModule& src, const CofilteredModule& dst, const std::vector<std::pair<int, int>>& pairs);
// f^{<=x} in degree 2k, in the bases spaces[x][k] of source and target.
Matrix restricted(const CofilteredModule& src, const CofilteredModule& dst, const Morphism& f, int x, int k);
// Same cells as src, spaces ker f^{<=x}.
CofilteredModule kernel_module(const CofilteredModule& src, const CofilteredModule& dst, const Morphism& f);

struct Fitting {
  CofilteredModule nilpotent_part;   // ker^infty f
  CofilteredModule invertible_part;  // im^infty f
  CheckResult check;                 // direct sum of cofiltered modules, f nilpotent / invertible on the parts
};

// Throws NOT_ENDOMORPHISM unless f is an endomorphism of m.
Fitting fitting_decomposition(const CofilteredModule& m, const Morphism& f);

struct EndoReport {
  std::vector<Morphism> basis;  // degree-0 endomorphisms, independent on M
  bool local = true;
  std::optional<Morphism> witness;  // neither nilpotent nor invertible
  std::size_t probes = 0;
};

EndoReport endomorphism_probe(const CofilteredModule& m);

struct ExactnessReport {
  bool ok = true;
  std::size_t opens_checked = 0;
  std::vector<int> failing_open;
  std::string detail;
};

// Default opens: every {<= x}, every {< x} and the whole window, plus `extra`.
// Throws DOMAIN_ERROR if g f != 0.
ExactnessReport exactness_check(const CofilteredModule& a, const CofilteredModule& b, const CofilteredModule& c,
                                const Morphism& f, const Morphism& g, const std::vector<std::vector<int>>& extra = {});

// u_x vanishes on elements z * s, s in M^{<x}, for z in the degree-2 part of
// the structure algebra of `quotient` with z vanishing at the orbit of x.
CheckResult extension_lemma_check(const CofilteredModule& m, const graph::MomentGraph& quotient, int x);

}  // namespace sheafbm::cofiltered
