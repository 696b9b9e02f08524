#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sheafbm/rational.hpp"

namespace sheafbm::linalg {

// Coefficient field: the rationals (characteristic 0) or F_p.
struct FieldSpec {
  std::uint64_t characteristic = 0;

  static FieldSpec rationals() { return FieldSpec{0}; }
  // Validated constructor for computation fields: p must be an odd prime.
  static FieldSpec prime(std::uint64_t p);
  // "q" or "fp:P". Characteristic 2 is only accepted with allow_char2,
  // which exists so GKM checks can report the failure themselves.
  static FieldSpec parse(const std::string& text, bool allow_char2 = false);

  bool is_rational() const { return characteristic == 0; }
  std::string to_string() const;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

bool is_prime(std::uint64_t n);

using Vector = std::vector<Rational>;

// Canonical image of an arbitrary rational in the field (residue in [0, p)
// for F_p, identity for Q).
Rational reduce(const FieldSpec& field, const Rational& value);

Rational field_add(const FieldSpec& f, const Rational& a, const Rational& b);
Rational field_sub(const FieldSpec& f, const Rational& a, const Rational& b);
Rational field_mul(const FieldSpec& f, const Rational& a, const Rational& b);
Rational field_div(const FieldSpec& f, const Rational& a, const Rational& b);
Rational field_neg(const FieldSpec& f, const Rational& a);

// Dense row-major matrix over a FieldSpec. Entries are always stored in
// canonical form for the field.
class Matrix {
 public:
  Matrix() = default;
  Matrix(FieldSpec field, std::size_t rows, std::size_t cols);

  static Matrix identity(FieldSpec field, std::size_t n);
  static Matrix from_rows(FieldSpec field, const std::vector<std::vector<Rational>>& rows);
  static Matrix from_columns(FieldSpec field, std::size_t rows, const std::vector<Vector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const FieldSpec& field() const { return field_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, const Rational& v) { data_[r * cols_ + c] = reduce(field_, v); }
  // Caller guarantees v is already canonical for the field.
  void set_canonical(std::size_t r, std::size_t c, Rational v) { data_[r * cols_ + c] = std::move(v); }
  void add_to(std::size_t r, std::size_t c, const Rational& v);

  std::span<const Rational> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  Vector column(std::size_t c) const;

  bool is_zero() const;
  Matrix transpose() const;
  Matrix select_columns(std::span<const std::size_t> idx) const;
  Matrix select_rows(std::span<const std::size_t> idx) const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& m);

  Vector apply(std::span<const Rational> v) const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  Matrix scaled(const Rational& s) const;

  friend bool operator==(const Matrix& a, const Matrix& b);

  std::string to_string() const;

 private:
  FieldSpec field_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);

struct RrefResult {
  Matrix reduced;
  std::vector<std::size_t> pivots;
};

// Reduced row-echelon form with leftmost-pivot, topmost-row elimination.
RrefResult rref(const Matrix& m);
std::size_t rank(const Matrix& m);

// Basis of the right null space, one vector per free column of the rref.
std::vector<Vector> kernel_basis(const Matrix& m);
// Same basis as the columns of a cols x k matrix.
Matrix kernel_matrix(const Matrix& m);

// The rref particular solution (free variables zero), or nullopt.
std::optional<Vector> preimage_solve(const Matrix& m, std::span<const Rational> b);

// Factorization for repeated right-hand sides against a fixed matrix.
class Solver {
 public:
  explicit Solver(const Matrix& a);

  std::size_t rank() const { return pivots_.size(); }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  std::optional<Vector> solve(std::span<const Rational> b) const;
  // Solves column by column; nullopt if any column is outside the image.
  std::optional<Matrix> solve_columns(const Matrix& b) const;

 private:
  FieldSpec field_;
  std::size_t cols_ = 0;
  std::vector<std::size_t> pivots_;
  Matrix particular_;   // rank x rows
  Matrix consistency_;  // (rows - rank) x rows
};

// Left inverse of a full-column-rank matrix, supported on a set of pivot rows.
class LeftInverse {
 public:
  LeftInverse() = default;
  explicit LeftInverse(const Matrix& basis);

  std::size_t dim() const { return inverse_.rows(); }
  Vector apply(std::span<const Rational> v) const;
  Matrix apply(const Matrix& m) const;
  // As an explicit dim x ambient matrix.
  Matrix as_matrix(std::size_t ambient) const;

 private:
  std::vector<std::size_t> rows_;
  Matrix inverse_;
};

// Columns of m forming a basis of its column space (the rref pivot columns).
Matrix column_basis(const Matrix& m);
// Canonical basis of the column space: rows of rref(m^T), as columns.
Matrix canonical_column_basis(const Matrix& m);
bool same_column_space(const Matrix& a, const Matrix& b);
// Column space of b contained in column space of a.
bool column_space_contains(const Matrix& a, const Matrix& b);
// Basis of the intersection of two column spaces (as columns, in ambient coordinates).
Matrix column_space_intersection(const Matrix& a, const Matrix& b);
// Standard basis vectors completing the column space of m to the whole space.
std::vector<std::size_t> complement_coordinates(const Matrix& m);

// Elementary divisors (diagonal of the Smith normal form, nonzero entries only)
// of an integer matrix.
std::vector<std::int64_t> elementary_divisors(const std::vector<std::vector<std::int64_t>>& m);

}  // namespace sheafbm::linalg
