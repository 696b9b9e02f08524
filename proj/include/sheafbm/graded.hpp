#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sheafbm/exact_linalg.hpp"

namespace sheafbm::graded {

using linalg::FieldSpec;
using linalg::Matrix;
using linalg::Rational;
using linalg::Vector;

// dim S_degree for S = Sym of a rank-r lattice, generators in degree 2.
std::size_t sym_component_dim(int rank, int degree);

using Exponents = std::vector<int>;

// Monomial bases of S_0, S_2, ..., S_{2 top} in lex order (x_1^j first), with
// multiplication-by-variable tables.
class MonomialTable {
 public:
  MonomialTable(int rank, int top);

  int rank() const { return rank_; }
  int top() const { return top_; }
  std::size_t size(int j) const { return basis_[j].size(); }
  const Exponents& monomial(int j, std::size_t idx) const { return basis_[j][idx]; }
  std::size_t index(const Exponents& e) const;
  // index in degree j+1 of x_var times monomial idx of degree j
  std::size_t times(int j, std::size_t idx, int var) const { return times_[j][idx * rank_ + var]; }

 private:
  int rank_;
  int top_;
  std::vector<std::vector<Exponents>> basis_;
  std::map<Exponents, std::size_t> lookup_;
  std::vector<std::vector<std::size_t>> times_;
};

// Shared, cached table; safe to call concurrently.
std::shared_ptr<const MonomialTable> monomials(int rank, int top);

// Graded rank of a free module: coefficient of q^j counts generators in degree 2j.
struct RankPolynomial {
  std::map<int, std::int64_t> coeffs;

  static RankPolynomial from_degrees(const std::vector<int>& degrees);
  static RankPolynomial one() { return RankPolynomial{{{0, 1}}}; }
  std::int64_t total() const;
  std::string to_string() const;  // "1 + q", "2q^2", "0"
  friend bool operator==(const RankPolynomial&, const RankPolynomial&) = default;
};

// A graded S-module known in degrees 0, 2, ..., 2*top. action[k][i] is
// multiplication by the i-th lattice coordinate x_i from degree 2k to 2k+2.
struct DegreewiseModule {
  FieldSpec field;
  int rank = 1;
  int top = 0;
  std::vector<std::size_t> dims;
  std::vector<std::vector<Matrix>> action;

  int cutoff() const { return 2 * top; }
  std::size_t dim(int k) const { return dims[k]; }
  bool is_zero() const;
  // Commutativity of the action and shape consistency.
  bool well_formed() const;
};

DegreewiseModule zero_module(FieldSpec field, int rank, int top);
DegreewiseModule free_module(FieldSpec field, int rank, int top, const std::vector<int>& gen_degrees);
DegreewiseModule direct_sum(const DegreewiseModule& a, const DegreewiseModule& b);

// Degree-preserving or degree-raising map; blocks[k] maps source degree 2k to
// target degree 2k + shift (absent when that degree is beyond the cutoff).
struct GradedMap {
  int shift = 0;
  std::vector<Matrix> blocks;
};

GradedMap identity_map(const DegreewiseModule& m);
// Multiplication by sum_i lambda_i x_i.
GradedMap apply_form(const DegreewiseModule& m, const std::vector<std::int64_t>& lambda);
// Does f commute with the action of every variable?
bool is_module_map(const DegreewiseModule& source, const DegreewiseModule& target, const GradedMap& f);

// Sub- and quotient modules described by per-degree column bases inside an ambient module.
struct Submodule {
  DegreewiseModule module;
  std::vector<Matrix> inclusion;  // column bases in ambient coordinates
};

struct Quotient {
  DegreewiseModule module;
  std::vector<Matrix> projection;  // ambient -> quotient
  std::vector<Matrix> lift;        // quotient -> ambient (chosen section)
};

// Bases need not be independent; they must span an S-stable subspace.
Submodule submodule(const DegreewiseModule& ambient, const std::vector<Matrix>& spans);
Quotient quotient(const DegreewiseModule& ambient, const std::vector<Matrix>& sub_spans);

Submodule image(const DegreewiseModule& target, const GradedMap& f);
Submodule kernel(const DegreewiseModule& source, const GradedMap& f);
Quotient cokernel(const DegreewiseModule& target, const GradedMap& f);

// Degree-2k part of S-span: sum_i x_i * (spans at degree 2k-2).
Matrix raised_span(const DegreewiseModule& ambient, const std::vector<Matrix>& spans, int k);

struct Generator {
  int degree = 0;
  Vector vector;
};

// Minimal generators of the submodule spanned by `spans` inside `ambient`:
// per degree, basis columns not in the S-span of lower degrees, chosen as rref
// pivots. With guard set, a generator in the top represented degree raises
// CUTOFF_TOO_LOW.
std::vector<Generator> minimal_generators_in(const DegreewiseModule& ambient, const std::vector<Matrix>& spans,
                                             bool guard = true);
std::vector<Generator> minimal_generators(const DegreewiseModule& m, bool guard = true);

// Map from the free module on the given generator degrees to `target`
// sending the i-th generator to images[i].
GradedMap free_map(const DegreewiseModule& target, const std::vector<Generator>& images);

struct ProjectiveCover {
  RankPolynomial rank;
  std::vector<int> gen_degrees;
  DegreewiseModule free;
  GradedMap map;
};

ProjectiveCover projective_cover(const DegreewiseModule& m, bool guard = true);

// Per-degree rank of a graded map.
std::vector<std::size_t> map_ranks(const GradedMap& f);
bool is_surjective(const DegreewiseModule& target, const GradedMap& f);

}  // namespace sheafbm::graded
