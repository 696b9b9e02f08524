#include "sheafbm/exact_linalg.hpp"

#include <algorithm>
#include <sstream>

#include <gmpxx.h>

#include "sheafbm/error.hpp"

namespace sheafbm::linalg {
namespace {

using u128 = unsigned __int128;

struct QOps {
  Rational mul(const Rational& a, const Rational& b) const { return a * b; }
  Rational sub(const Rational& a, const Rational& b) const { return a - b; }
  Rational inv(const Rational& a) const { return Rational(1) / a; }
};

struct POps {
  std::uint64_t p;
  Rational mul(const Rational& a, const Rational& b) const {
    auto x = static_cast<std::uint64_t>(a.small_num());
    auto y = static_cast<std::uint64_t>(b.small_num());
    return Rational(static_cast<std::int64_t>((static_cast<u128>(x) * y) % p));
  }
  Rational sub(const Rational& a, const Rational& b) const {
    auto x = static_cast<std::uint64_t>(a.small_num());
    auto y = static_cast<std::uint64_t>(b.small_num());
    return Rational(static_cast<std::int64_t>(x >= y ? x - y : x + (p - y)));
  }
  Rational inv(const Rational& a) const {
    return Rational(static_cast<std::int64_t>(Rational(1, a.small_num()).mod(p)));
  }
};

// In-place Gauss-Jordan on a rows x cols buffer; pivots are searched only in
// the first pivot_limit columns. Returns the pivot columns.
template <class Ops>
std::vector<std::size_t> rref_core(std::vector<Rational>& a, std::size_t rows, std::size_t cols,
                                   std::size_t pivot_limit, const Ops& ops) {
  std::vector<std::size_t> pivots;
  std::vector<std::size_t> nz;
  std::size_t r = 0;
  for (std::size_t c = 0; c < pivot_limit && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p * cols + c].is_zero()) ++p;
    if (p == rows) continue;
    if (p != r) {
      std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(p * cols),
                       a.begin() + static_cast<std::ptrdiff_t>((p + 1) * cols),
                       a.begin() + static_cast<std::ptrdiff_t>(r * cols));
    }
    Rational* prow = a.data() + r * cols;
    nz.clear();
    if (!prow[c].is_one()) {
      Rational inv = ops.inv(prow[c]);
      for (std::size_t j = c; j < cols; ++j) {
        if (!prow[j].is_zero()) prow[j] = ops.mul(prow[j], inv);
      }
    }
    for (std::size_t j = c; j < cols; ++j) {
      if (!prow[j].is_zero()) nz.push_back(j);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      Rational* row = a.data() + i * cols;
      if (row[c].is_zero()) continue;
      Rational f = row[c];
      for (std::size_t j : nz) row[j] = ops.sub(row[j], ops.mul(f, prow[j]));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<std::size_t> rref_dispatch(const FieldSpec& f, std::vector<Rational>& a, std::size_t rows,
                                       std::size_t cols, std::size_t pivot_limit) {
  if (f.is_rational()) return rref_core(a, rows, cols, pivot_limit, QOps{});
  return rref_core(a, rows, cols, pivot_limit, POps{f.characteristic});
}

void check_same_field(const Matrix& a, const Matrix& b) {
  if (!(a.field() == b.field())) throw Error(ErrorCode::DomainError, "matrices over different fields");
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

FieldSpec FieldSpec::prime(std::uint64_t p) {
  if (p == 2) throw Error(ErrorCode::InvalidField, "characteristic 2 is not allowed");
  if (!is_prime(p)) throw Error(ErrorCode::InvalidField, std::to_string(p) + " is not prime");
  if (p >= (std::uint64_t{1} << 62)) throw Error(ErrorCode::InvalidField, "prime too large");
  return FieldSpec{p};
}

FieldSpec FieldSpec::parse(const std::string& text, bool allow_char2) {
  if (text == "q" || text == "Q") return rationals();
  if (text.rfind("fp:", 0) == 0) {
    std::uint64_t p = 0;
    try {
      std::size_t used = 0;
      p = std::stoull(text.substr(3), &used);
      if (used != text.size() - 3) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::InputError, "bad field spec '" + text + "'");
    }
    if (p == 2 && allow_char2) return FieldSpec{2};
    return prime(p);
  }
  throw Error(ErrorCode::InputError, "bad field spec '" + text + "' (expected q or fp:P)");
}

std::string FieldSpec::to_string() const {
  return is_rational() ? "q" : "fp:" + std::to_string(characteristic);
}

Rational reduce(const FieldSpec& field, const Rational& value) {
  if (field.is_rational()) return value;
  if (value.is_small() && value.small_den() == 1 && value.small_num() >= 0 &&
      static_cast<std::uint64_t>(value.small_num()) < field.characteristic) {
    return value;
  }
  return Rational(static_cast<std::int64_t>(value.mod(field.characteristic)));
}

Rational field_add(const FieldSpec& f, const Rational& a, const Rational& b) {
  if (f.is_rational()) return a + b;
  return POps{f.characteristic}.sub(a, POps{f.characteristic}.sub(Rational(0), b));
}

Rational field_sub(const FieldSpec& f, const Rational& a, const Rational& b) {
  if (f.is_rational()) return a - b;
  return POps{f.characteristic}.sub(a, b);
}

Rational field_mul(const FieldSpec& f, const Rational& a, const Rational& b) {
  if (f.is_rational()) return a * b;
  return POps{f.characteristic}.mul(a, b);
}

Rational field_div(const FieldSpec& f, const Rational& a, const Rational& b) {
  if (b.is_zero()) throw Error(ErrorCode::DomainError, "division by zero");
  if (f.is_rational()) return a / b;
  POps ops{f.characteristic};
  return ops.mul(a, ops.inv(b));
}

Rational field_neg(const FieldSpec& f, const Rational& a) {
  if (f.is_rational()) return -a;
  return POps{f.characteristic}.sub(Rational(0), a);
}

Matrix::Matrix(FieldSpec field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), data_(rows * cols) {}

Matrix Matrix::identity(FieldSpec field, std::size_t n) {
  Matrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = Rational(1);
  return m;
}

Matrix Matrix::from_rows(FieldSpec field, const std::vector<std::vector<Rational>>& rows) {
  std::size_t nc = rows.empty() ? 0 : rows.front().size();
  Matrix m(field, rows.size(), nc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != nc) throw Error(ErrorCode::DomainError, "ragged matrix rows");
    for (std::size_t j = 0; j < nc; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

Matrix Matrix::from_columns(FieldSpec field, std::size_t rows, const std::vector<Vector>& cols) {
  Matrix m(field, rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != rows) throw Error(ErrorCode::DomainError, "column length mismatch");
    for (std::size_t i = 0; i < rows; ++i) m.set(i, j, cols[j][i]);
  }
  return m;
}

void Matrix::add_to(std::size_t r, std::size_t c, const Rational& v) {
  Rational& e = data_[r * cols_ + c];
  e = field_add(field_, e, reduce(field_, v));
}

Vector Matrix::column(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = data_[i * cols_ + c];
  return v;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Rational& r) { return r.is_zero(); });
}

Matrix Matrix::transpose() const {
  Matrix t(field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t.data_[j * rows_ + i] = data_[i * cols_ + j];
  }
  return t;
}

Matrix Matrix::select_columns(std::span<const std::size_t> idx) const {
  Matrix m(field_, rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) m.data_[i * idx.size() + j] = data_[i * cols_ + idx[j]];
  }
  return m;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix m(field_, idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(idx[i] * cols_), cols_,
                m.data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
  }
  return m;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  Matrix m(field_, nr, nc);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) m.data_[i * nc + j] = data_[(r0 + i) * cols_ + c0 + j];
  }
  return m;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
  check_same_field(*this, m);
  for (std::size_t i = 0; i < m.rows_; ++i) {
    for (std::size_t j = 0; j < m.cols_; ++j) data_[(r0 + i) * cols_ + c0 + j] = m.data_[i * m.cols_ + j];
  }
}

Vector Matrix::apply(std::span<const Rational> v) const {
  if (v.size() != cols_) throw Error(ErrorCode::DomainError, "vector length mismatch");
  Vector out(rows_);
  for (std::size_t j = 0; j < cols_; ++j) {
    if (v[j].is_zero()) continue;
    for (std::size_t i = 0; i < rows_; ++i) {
      const Rational& e = data_[i * cols_ + j];
      if (e.is_zero()) continue;
      out[i] = field_add(field_, out[i], field_mul(field_, e, v[j]));
    }
  }
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  check_same_field(a, b);
  if (a.cols_ != b.rows_) throw Error(ErrorCode::DomainError, "matrix product shape mismatch");
  Matrix c(a.field_, a.rows_, b.cols_);
  const FieldSpec& f = a.field_;
  for (std::size_t i = 0; i < a.rows_; ++i) {
    Rational* crow = c.data_.data() + i * c.cols_;
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Rational& x = a.data_[i * a.cols_ + k];
      if (x.is_zero()) continue;
      const Rational* brow = b.data_.data() + k * b.cols_;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        if (brow[j].is_zero()) continue;
        crow[j] = field_add(f, crow[j], field_mul(f, x, brow[j]));
      }
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  check_same_field(a, b);
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorCode::DomainError, "matrix sum shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) {
    if (!b.data_[i].is_zero()) c.data_[i] = field_add(a.field_, c.data_[i], b.data_[i]);
  }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  check_same_field(a, b);
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorCode::DomainError, "matrix difference shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) {
    if (!b.data_[i].is_zero()) c.data_[i] = field_sub(a.field_, c.data_[i], b.data_[i]);
  }
  return c;
}

Matrix Matrix::scaled(const Rational& s) const {
  Matrix c = *this;
  Rational t = reduce(field_, s);
  for (auto& e : c.data_) {
    if (!e.is_zero()) e = field_mul(field_, e, t);
  }
  return c;
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << data_[i * cols_ + j];
    os << "]";
  }
  os << "]";
  return os.str();
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  check_same_field(a, b);
  if (a.rows() != b.rows()) throw Error(ErrorCode::DomainError, "hstack row mismatch");
  Matrix m(a.field(), a.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  check_same_field(a, b);
  if (a.cols() != b.cols()) throw Error(ErrorCode::DomainError, "vstack column mismatch");
  Matrix m(a.field(), a.rows() + b.rows(), a.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

RrefResult rref(const Matrix& m) {
  std::vector<Rational> data(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    std::copy(r.begin(), r.end(), data.begin() + static_cast<std::ptrdiff_t>(i * m.cols()));
  }
  auto pivots = rref_dispatch(m.field(), data, m.rows(), m.cols(), m.cols());
  Matrix out(m.field(), m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out.set_canonical(i, j, std::move(data[i * m.cols() + j]));
  }
  return {std::move(out), std::move(pivots)};
}

std::size_t rank(const Matrix& m) {
  if (m.empty()) return 0;
  // eliminate along the shorter side
  if (m.rows() > m.cols()) return rref(m.transpose()).pivots.size();
  return rref(m).pivots.size();
}

std::vector<Vector> kernel_basis(const Matrix& m) {
  auto [r, pivots] = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<Vector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    Vector v(m.cols());
    v[f] = Rational(1);
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      if (!r(i, f).is_zero()) v[pivots[i]] = field_neg(m.field(), r(i, f));
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

Matrix kernel_matrix(const Matrix& m) {
  return Matrix::from_columns(m.field(), m.cols(), kernel_basis(m));
}

std::optional<Vector> preimage_solve(const Matrix& m, std::span<const Rational> b) {
  if (b.size() != m.rows()) throw Error(ErrorCode::DomainError, "right-hand side length mismatch");
  Matrix aug(m.field(), m.rows(), m.cols() + 1);
  aug.set_block(0, 0, m);
  for (std::size_t i = 0; i < m.rows(); ++i) aug.set(i, m.cols(), b[i]);
  auto [r, pivots] = rref(aug);
  if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
  Vector x(m.cols());
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = r(i, m.cols());
  return x;
}

Solver::Solver(const Matrix& a) : field_(a.field()), cols_(a.cols()) {
  const std::size_t m = a.rows(), n = a.cols(), w = n + m;
  std::vector<Rational> data(m * w);
  for (std::size_t i = 0; i < m; ++i) {
    auto r = a.row(i);
    std::copy(r.begin(), r.end(), data.begin() + static_cast<std::ptrdiff_t>(i * w));
    data[i * w + n + i] = Rational(1);
  }
  pivots_ = rref_dispatch(field_, data, m, w, n);
  const std::size_t k = pivots_.size();
  particular_ = Matrix(field_, k, m);
  consistency_ = Matrix(field_, m - k, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      Rational& e = data[i * w + n + j];
      if (e.is_zero()) continue;
      if (i < k) particular_.set_canonical(i, j, std::move(e));
      else consistency_.set_canonical(i - k, j, std::move(e));
    }
  }
}

std::optional<Vector> Solver::solve(std::span<const Rational> b) const {
  if (!consistency_.empty()) {
    Vector c = consistency_.apply(b);
    for (const auto& e : c) {
      if (!e.is_zero()) return std::nullopt;
    }
  }
  Vector x(cols_);
  if (particular_.rows() == 0) return x;
  Vector y = particular_.apply(b);
  for (std::size_t i = 0; i < pivots_.size(); ++i) x[pivots_[i]] = std::move(y[i]);
  return x;
}

std::optional<Matrix> Solver::solve_columns(const Matrix& b) const {
  if (!consistency_.empty() && b.cols() > 0 && !(consistency_ * b).is_zero()) return std::nullopt;
  Matrix x(field_, cols_, b.cols());
  if (particular_.rows() == 0 || b.cols() == 0) return x;
  Matrix y = particular_ * b;
  for (std::size_t i = 0; i < pivots_.size(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) x.set_canonical(pivots_[i], j, y(i, j));
  }
  return x;
}

LeftInverse::LeftInverse(const Matrix& basis) {
  const std::size_t k = basis.cols();
  if (k == 0) {
    inverse_ = Matrix(basis.field(), 0, 0);
    return;
  }
  rows_ = rref(basis.transpose()).pivots;
  if (rows_.size() != k) throw Error(ErrorCode::DomainError, "left inverse of a rank-deficient matrix");
  Matrix square = basis.select_rows(rows_);
  Solver s(square);
  auto inv = s.solve_columns(Matrix::identity(basis.field(), k));
  inverse_ = std::move(*inv);
}

Vector LeftInverse::apply(std::span<const Rational> v) const {
  Vector sub(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) sub[i] = v[rows_[i]];
  if (rows_.empty()) return {};
  return inverse_.apply(sub);
}

Matrix LeftInverse::apply(const Matrix& m) const {
  if (rows_.empty()) return Matrix(m.field(), 0, m.cols());
  return inverse_ * m.select_rows(rows_);
}

Matrix LeftInverse::as_matrix(std::size_t ambient) const {
  Matrix out(inverse_.field(), rows_.size(), ambient);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (std::size_t j = 0; j < rows_.size(); ++j) out.set_canonical(i, rows_[j], inverse_(i, j));
  }
  return out;
}

Matrix column_basis(const Matrix& m) {
  if (m.cols() == 0) return m;
  return m.select_columns(rref(m).pivots);
}

Matrix canonical_column_basis(const Matrix& m) {
  auto [r, pivots] = rref(m.transpose());
  std::vector<std::size_t> idx(pivots.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return r.select_rows(idx).transpose();
}

bool same_column_space(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) return false;
  return canonical_column_basis(a) == canonical_column_basis(b);
}

bool column_space_contains(const Matrix& a, const Matrix& b) {
  if (b.cols() == 0) return true;
  return rank(hstack(a, b)) == rank(a);
}

Matrix column_space_intersection(const Matrix& a, const Matrix& b) {
  Matrix ab = hstack(a, b.scaled(Rational(-1)));
  Matrix k = kernel_matrix(ab);
  std::vector<std::size_t> top(a.cols());
  for (std::size_t i = 0; i < top.size(); ++i) top[i] = i;
  Matrix coeffs = k.select_rows(top);
  return column_basis(a * coeffs);
}

std::vector<std::size_t> complement_coordinates(const Matrix& m) {
  std::vector<bool> covered(m.rows(), false);
  if (m.cols() > 0) {
    for (auto p : rref(m.transpose()).pivots) covered[p] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (!covered[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::int64_t> elementary_divisors(const std::vector<std::vector<std::int64_t>>& input) {
  std::size_t rows = input.size();
  std::size_t cols = rows ? input[0].size() : 0;
  std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = static_cast<long>(input[i][j]);
  }
  std::vector<mpz_class> diag;
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // smallest nonzero entry in the trailing block
    std::size_t pi = rows, pj = cols;
    for (std::size_t i = t; i < rows; ++i) {
      for (std::size_t j = t; j < cols; ++j) {
        if (a[i][j] != 0 && (pi == rows || abs(a[i][j]) < abs(a[pi][pj]))) {
          pi = i;
          pj = j;
        }
      }
    }
    if (pi == rows) break;
    std::swap(a[t], a[pi]);
    for (auto& row : a) std::swap(row[t], row[pj]);
    bool clean = true;
    for (std::size_t i = t + 1; i < rows; ++i) {
      mpz_class q = a[i][t] / a[t][t];
      if (q != 0) {
        for (std::size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
      }
      if (a[i][t] != 0) clean = false;
    }
    for (std::size_t j = t + 1; j < cols; ++j) {
      mpz_class q = a[t][j] / a[t][t];
      if (q != 0) {
        for (std::size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
      }
      if (a[t][j] != 0) clean = false;
    }
    if (!clean) continue;
    // divisibility of the rest of the block
    bool divides = true;
    for (std::size_t i = t + 1; i < rows && divides; ++i) {
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a[i][j] % a[t][t] != 0) {
          for (std::size_t c = t; c < cols; ++c) a[t][c] += a[i][c];
          divides = false;
          break;
        }
      }
    }
    if (!divides) continue;
    diag.push_back(abs(a[t][t]));
    ++t;
  }
  std::vector<std::int64_t> out;
  for (auto& d : diag) out.push_back(d.get_si());
  return out;
}

}  // namespace sheafbm::linalg
