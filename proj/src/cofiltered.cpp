#include "sheafbm/cofiltered.hpp"

#include <algorithm>

#include "sheafbm/error.hpp"

namespace sheafbm::cofiltered {

using linalg::LeftInverse;
using linalg::Rational;

namespace {

Matrix zeros(const FieldSpec& f, std::size_t r, std::size_t c) { return Matrix(f, r, c); }

// Rows spanning {r : r b = 0}.
Matrix annihilator(const Matrix& b) {
  if (b.cols() == 0) return Matrix::identity(b.field(), b.rows());
  if (b.rows() == 0) return zeros(b.field(), 0, 0);
  return linalg::kernel_matrix(b.transpose()).transpose();
}

Matrix stack_rows(const FieldSpec& f, std::size_t cols, const std::vector<Matrix>& parts) {
  std::size_t rows = 0;
  for (const auto& p : parts) rows += p.rows();
  Matrix out(f, rows, cols);
  std::size_t r = 0;
  for (const auto& p : parts) {
    out.set_block(r, 0, p);
    r += p.rows();
  }
  return out;
}

Matrix stack_cols(const FieldSpec& f, std::size_t rows, const std::vector<Matrix>& parts) {
  std::size_t cols = 0;
  for (const auto& p : parts) cols += p.cols();
  Matrix out(f, rows, cols);
  std::size_t c = 0;
  for (const auto& p : parts) {
    out.set_block(0, c, p);
    c += p.cols();
  }
  return out;
}

// Null space of a matrix with `cols` columns; an empty constraint set leaves everything.
Matrix kernel_of(const FieldSpec& f, const Matrix& constraints, std::size_t cols) {
  if (cols == 0) return zeros(f, 0, 0);
  if (constraints.rows() == 0) return Matrix::identity(f, cols);
  return linalg::kernel_matrix(constraints);
}

Matrix left_inverse_matrix(const Matrix& basis) {
  if (basis.cols() == 0) return zeros(basis.field(), 0, basis.rows());
  return LeftInverse(basis).as_matrix(basis.rows());
}

Matrix basis_of(const Matrix& m) {
  if (m.cols() == 0 || m.rows() == 0) return zeros(m.field(), m.rows(), 0);
  return linalg::column_basis(m);
}

std::size_t rank_of(const Matrix& m) { return m.empty() ? 0 : linalg::rank(m); }

bool contains(const Matrix& space, const Matrix& v) {
  if (v.cols() == 0 || v.is_zero()) return true;
  if (space.cols() == 0) return false;
  return linalg::column_space_contains(space, v);
}

bool same_space(const Matrix& a, const Matrix& b) { return contains(a, b) && contains(b, a); }

std::vector<int> offsets(const CofilteredModule& m, const std::vector<int>& cells, int k) {
  std::vector<int> off(m.cells.size(), -1);
  int at = 0;
  for (int c : cells) {
    off[c] = at;
    at += static_cast<int>(m.cells[c].module.dims[k]);
  }
  return off;
}

std::string point_label(const CofilteredModule& m, int x) {
  return x < static_cast<int>(m.point_names.size()) ? m.point_names[x] : std::to_string(x);
}

Matrix embed(const CofilteredModule& m, int x, int k) {
  return selector(m, m.all_cells(), m.cells_below(x), k).transpose();
}

Matrix ambient_image(const CofilteredModule& src, const CofilteredModule& dst, const Morphism& f, int x, int k) {
  return selector(dst, dst.all_cells(), dst.cells_below(x), k) * f.blocks[k] * embed(src, x, k) * src.spaces[x][k];
}

// Multiplication by sum_i form[i] x_i on a cell, degree k -> k+1.
Matrix times_form(const Cell& cell, const std::vector<Rational>& form, int k) {
  const auto& act = cell.module.action[k];
  Matrix out(cell.module.field, cell.module.dims[k + 1], cell.module.dims[k]);
  for (std::size_t i = 0; i < form.size(); ++i) {
    if (!form[i].is_zero()) out = out + act[i].scaled(form[i]);
  }
  return out;
}

// Matrix of f modulo the maximal ideal on the generators of M^{<=x} in degree k.
Matrix on_generators(const CofilteredModule& m, const Morphism& f, int x, int k, const DegreewiseModule& amb) {
  const Matrix& b = m.spaces[x][k];
  Matrix lower = basis_of(graded::raised_span(amb, m.spaces[x], k));
  auto pivots = linalg::rref(hstack(lower, b)).pivots;
  std::vector<std::size_t> gens;
  for (auto p : pivots) {
    if (p >= lower.cols()) gens.push_back(p - lower.cols());
  }
  Matrix g = b.select_columns(gens);
  if (g.cols() == 0) return zeros(m.field, 0, 0);
  Matrix full = hstack(lower, g);
  Matrix img = selector(m, m.all_cells(), m.cells_below(x), k) * f.blocks[k] * embed(m, x, k) * g;
  auto coeff = linalg::Solver(full).solve_columns(img);
  if (!coeff) throw Error(ErrorCode::NotEndomorphism, "image leaves M^{<=" + point_label(m, x) + "}");
  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < g.cols(); ++j) rows.push_back(lower.cols() + j);
  return coeff->select_rows(rows);
}

bool is_nilpotent(Matrix a) {
  std::size_t n = a.rows();
  Matrix p = a;
  for (std::size_t i = 0; i < n && !p.is_zero(); ++i) p = p * a;
  return p.is_zero();
}

}  // namespace

Cell make_cell(FieldSpec field, int rank, int top, int point, int orbit, const std::vector<int>& gen_degrees) {
  Cell c;
  c.point = point;
  c.orbit = orbit;
  c.gen_degrees = gen_degrees;
  c.module = graded::free_module(field, rank, top, gen_degrees);
  return c;
}

std::vector<int> CofilteredModule::cells_over(const std::vector<int>& points) const {
  std::vector<char> in(num_points(), 0);
  for (int p : points) in[p] = 1;
  std::vector<int> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (in[cells[c].point]) out.push_back(static_cast<int>(c));
  }
  return out;
}

std::vector<int> CofilteredModule::cells_below(int x, bool strict) const {
  std::vector<int> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    int p = cells[c].point;
    if (strict ? order.less(p, x) : order.leq(p, x)) out.push_back(static_cast<int>(c));
  }
  return out;
}

std::vector<int> CofilteredModule::all_cells() const {
  std::vector<int> out(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) out[c] = static_cast<int>(c);
  return out;
}

std::size_t CofilteredModule::dim(const std::vector<int>& cs, int k) const {
  std::size_t n = 0;
  for (int c : cs) n += cells[c].module.dims[k];
  return n;
}

DegreewiseModule ambient(const CofilteredModule& m, const std::vector<int>& cells) {
  DegreewiseModule out = graded::zero_module(m.field, m.rank, m.top);
  for (int c : cells) out = graded::direct_sum(out, m.cells[c].module);
  return out;
}

Matrix selector(const CofilteredModule& m, const std::vector<int>& from, const std::vector<int>& to, int k) {
  auto off = offsets(m, from, k);
  Matrix s(m.field, m.dim(to, k), m.dim(from, k));
  std::size_t r = 0;
  for (int c : to) {
    if (off[c] < 0) throw Error(ErrorCode::DomainError, "selector target is not a subset");
    for (std::size_t i = 0; i < m.cells[c].module.dims[k]; ++i) s.set_canonical(r++, off[c] + i, Rational(1));
  }
  return s;
}

graded::Submodule piece(const CofilteredModule& m, int x) { return graded::submodule(ambient(m, m.cells_below(x)), m.spaces[x]); }

CheckResult well_formed(const CofilteredModule& m) {
  CheckResult res;
  if (m.spaces.size() != m.num_points()) {
    res.fail("spaces do not match the window");
    return res;
  }
  for (std::size_t x = 0; x < m.num_points(); ++x) {
    int xi = static_cast<int>(x);
    auto below = m.cells_below(xi);
    auto amb = ambient(m, below);
    for (int k = 0; k <= m.top; ++k) {
      if (m.spaces[x][k].rows() != amb.dims[k]) res.fail("M^{<=" + point_label(m, xi) + "} has the wrong shape");
    }
    if (!res.ok) return res;
    for (int k = 0; k < m.top; ++k) {
      for (int i = 0; i < m.rank; ++i) {
        if (!contains(m.spaces[x][k + 1], amb.action[k][i] * m.spaces[x][k])) {
          res.fail("M^{<=" + point_label(m, xi) + "} is not S-stable in degree " + std::to_string(2 * k));
        }
      }
    }
  }
  for (auto [y, x] : m.order.covers()) {
    for (int k = 0; k <= m.top; ++k) {
      Matrix r = selector(m, m.cells_below(x), m.cells_below(y), k) * m.spaces[x][k];
      if (!contains(m.spaces[y][k], r)) {
        res.fail("restriction from " + point_label(m, x) + " to " + point_label(m, y) + " leaves M^{<=y}");
      }
    }
  }
  return res;
}

std::vector<Matrix> sections_over_open(const CofilteredModule& m, const std::vector<int>& open) {
  if (!m.order.is_open(open)) throw Error(ErrorCode::NotOpen, "the subset is not downward closed");
  auto cells = m.cells_over(open);
  std::vector<Matrix> out;
  for (int k = 0; k <= m.top; ++k) {
    std::vector<Matrix> rows;
    for (int x : open) rows.push_back(annihilator(m.spaces[x][k]) * selector(m, cells, m.cells_below(x), k));
    std::size_t n = m.dim(cells, k);
    out.push_back(kernel_of(m.field, stack_rows(m.field, n, rows), n));
  }
  return out;
}

CheckResult glue_check(const CofilteredModule& m, const std::vector<std::vector<int>>& cover) {
  CheckResult res;
  std::vector<int> uni;
  for (const auto& j : cover) uni.insert(uni.end(), j.begin(), j.end());
  std::sort(uni.begin(), uni.end());
  uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
  auto whole = sections_over_open(m, uni);
  auto cells = m.cells_over(uni);
  std::vector<std::vector<Matrix>> parts;
  for (const auto& j : cover) parts.push_back(sections_over_open(m, j));
  for (int k = 0; k <= m.top; ++k) {
    std::vector<Matrix> rows;
    for (std::size_t i = 0; i < cover.size(); ++i) {
      rows.push_back(annihilator(parts[i][k]) * selector(m, cells, m.cells_over(cover[i]), k));
    }
    std::size_t n = m.dim(cells, k);
    Matrix tuples = kernel_of(m.field, stack_rows(m.field, n, rows), n);
    if (tuples.cols() != whole[k].cols() || !same_space(tuples, whole[k])) {
      res.fail("degree " + std::to_string(2 * k) + ": " + std::to_string(whole[k].cols()) + " sections, " +
               std::to_string(tuples.cols()) + " compatible tuples");
    }
  }
  return res;
}

graded::Submodule costalk(const CofilteredModule& m, int x) {
  auto below = m.cells_below(x);
  auto lower = m.cells_below(x, true);
  std::vector<Matrix> spans;
  for (int k = 0; k <= m.top; ++k) {
    const Matrix& b = m.spaces[x][k];
    Matrix r = selector(m, below, lower, k) * b;
    spans.push_back(b * kernel_of(m.field, r, b.cols()));
  }
  return graded::submodule(ambient(m, below), spans);
}

std::vector<int> support(const CofilteredModule& m) {
  std::vector<int> out;
  for (std::size_t x = 0; x < m.num_points(); ++x) {
    if (!costalk(m, static_cast<int>(x)).module.is_zero()) out.push_back(static_cast<int>(x));
  }
  return out;
}

DeltaData delta_module(const CofilteredModule& m, int x) {
  DeltaData out;
  int theta = m.point_orbit[x];
  auto below = m.cells_below(x);
  std::vector<int> other;
  for (int c : below) (m.cells[c].orbit == theta ? out.theta_cells : other).push_back(c);
  out.lower_cells = m.cells_below(x, true);
  auto cost = costalk(m, x);
  for (int k = 0; k <= m.top; ++k) {
    const Matrix& c = cost.inclusion[k];
    if (!(selector(m, below, other, k) * c).is_zero() || rank_of(selector(m, below, out.theta_cells, k) * c) != c.cols()) {
      throw Error(ErrorCode::SupportViolation, "the costalk at " + point_label(m, x) +
                                                   " is not concentrated at its own orbit (degree " +
                                                   std::to_string(2 * k) + ")");
    }
  }
  std::vector<Matrix> comp_spans;
  for (int k = 0; k <= m.top; ++k) comp_spans.push_back(selector(m, below, out.theta_cells, k) * m.spaces[x][k]);
  auto comp = graded::submodule(ambient(m, out.theta_cells), comp_spans);
  std::vector<Matrix> inv, sub;
  for (int k = 0; k <= m.top; ++k) {
    inv.push_back(left_inverse_matrix(comp.inclusion[k]));
    sub.push_back(inv[k] * (selector(m, below, out.theta_cells, k) * cost.inclusion[k]));
  }
  auto q = graded::quotient(comp.module, sub);
  out.module = q.module;
  for (int k = 0; k <= m.top; ++k) {
    out.d.push_back(q.projection[k] * inv[k]);
    const Matrix& b = m.spaces[x][k];
    Matrix r = selector(m, below, out.lower_cells, k) * b;
    std::vector<std::size_t> cols;
    if (!r.empty()) cols = linalg::rref(r).pivots;
    Matrix lifts = b.select_columns(cols);
    out.u.push_back(out.d[k] * (selector(m, below, out.theta_cells, k) * lifts) *
                    left_inverse_matrix(r.select_columns(cols)));
  }
  return out;
}

CheckResult support_condition_check(const CofilteredModule& m) {
  CheckResult res;
  for (std::size_t x = 0; x < m.num_points() && res.ok; ++x) {
    try {
      delta_module(m, static_cast<int>(x));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SupportViolation) throw;
      res.fail(e.what());
    }
  }
  return res;
}

CheckResult flabby_check(const CofilteredModule& m) {
  CheckResult res;
  for (std::size_t x = 0; x < m.num_points(); ++x) {
    int xi = static_cast<int>(x);
    auto lower_pts = m.order.strictly_below(xi);
    auto lower = sections_over_open(m, lower_pts);
    auto below = m.cells_below(xi);
    auto lower_cells = m.cells_below(xi, true);
    for (int k = 0; k <= m.top; ++k) {
      if (rank_of(selector(m, below, lower_cells, k) * m.spaces[x][k]) != lower[k].cols()) {
        res.fail("M^{<=" + point_label(m, xi) + "} -> M^{<" + point_label(m, xi) + "} is not onto in degree " +
                 std::to_string(2 * k));
        break;
      }
    }
  }
  return res;
}

CheckResult fiber_square_check(const CofilteredModule& m, int x) {
  CheckResult res;
  auto dd = delta_module(m, x);
  auto below = m.cells_below(x);
  for (int k = 0; k <= m.top; ++k) {
    const Matrix& b = m.spaces[x][k];
    Matrix pt = selector(m, below, dd.theta_cells, k);
    Matrix pl = selector(m, below, dd.lower_cells, k);
    std::string where = " at " + point_label(m, x) + " in degree " + std::to_string(2 * k);
    if (rank_of(vstack(pt * b, pl * b)) != b.cols()) res.fail("(m_Omega, m|<x) is not injective" + where);
    if (!(dd.d[k] * (pt * b) == dd.u[k] * (pl * b))) res.fail("the square does not commute" + where);
    Matrix cb = basis_of(pt * b);
    Matrix rb = basis_of(pl * b);
    Matrix pair = hstack(dd.d[k] * cb, (dd.u[k] * rb).scaled(Rational(-1)));
    std::size_t fiber = cb.cols() + rb.cols() - rank_of(pair);
    if (fiber != b.cols()) {
      res.fail("fiber product has dimension " + std::to_string(fiber) + ", M^{<=x} has " + std::to_string(b.cols()) + where);
    }
  }
  return res;
}

CofilteredModule standard_object(const graph::Poset& order, const std::vector<int>& point_orbit,
                                 const std::vector<std::string>& point_names, FieldSpec field, int rank, int top, int w) {
  CofilteredModule m;
  m.field = field;
  m.rank = rank;
  m.top = top;
  m.order = order;
  m.point_orbit = point_orbit;
  m.point_names = point_names;
  m.cells.push_back(make_cell(field, rank, top, w, point_orbit[w], {0}));
  for (std::size_t x = 0; x < point_orbit.size(); ++x) {
    std::vector<Matrix> sp;
    for (int k = 0; k <= top; ++k) {
      std::size_t n = m.cells[0].module.dims[k];
      if (order.leq(w, static_cast<int>(x))) sp.push_back(Matrix::identity(field, n));
      else sp.push_back(zeros(field, 0, 0));
    }
    m.spaces.push_back(std::move(sp));
  }
  return m;
}

CofilteredModule direct_sum(const CofilteredModule& a, const CofilteredModule& b) {
  if (a.num_points() != b.num_points() || a.top != b.top || a.rank != b.rank) {
    throw Error(ErrorCode::DomainError, "direct sum of modules over different windows");
  }
  CofilteredModule m = a;
  m.cells.insert(m.cells.end(), b.cells.begin(), b.cells.end());
  for (std::size_t x = 0; x < a.num_points(); ++x) {
    for (int k = 0; k <= a.top; ++k) {
      const Matrix& p = a.spaces[x][k];
      const Matrix& q = b.spaces[x][k];
      Matrix s(a.field, p.rows() + q.rows(), p.cols() + q.cols());
      s.set_block(0, 0, p);
      s.set_block(p.rows(), p.cols(), q);
      m.spaces[x][k] = std::move(s);
    }
  }
  return m;
}

CheckResult morphism_check(const CofilteredModule& src, const CofilteredModule& dst, const Morphism& f) {
  CheckResult res;
  if (static_cast<int>(f.blocks.size()) != src.top + 1) {
    res.fail("wrong number of degrees");
    return res;
  }
  auto sc = src.all_cells(), dc = dst.all_cells();
  for (int k = 0; k <= src.top; ++k) {
    if (f.blocks[k].rows() != dst.dim(dc, k) || f.blocks[k].cols() != src.dim(sc, k)) {
      res.fail("wrong block shape in degree " + std::to_string(2 * k));
      return res;
    }
    auto so = offsets(src, sc, k), dof = offsets(dst, dc, k);
    for (int c : sc) {
      for (int d : dc) {
        const Cell& a = src.cells[c];
        const Cell& b = dst.cells[d];
        if (a.orbit == b.orbit && dst.order.leq(a.point, b.point)) continue;
        if (a.module.dims[k] == 0 || b.module.dims[k] == 0) continue;
        if (!f.blocks[k].block(dof[d], so[c], b.module.dims[k], a.module.dims[k]).is_zero()) {
          res.fail("nonlocal block from cell " + std::to_string(c) + " to cell " + std::to_string(d));
        }
      }
    }
  }
  auto as = ambient(src, sc), ad = ambient(dst, dc);
  for (int k = 0; k < src.top; ++k) {
    for (int i = 0; i < src.rank; ++i) {
      if (!(f.blocks[k + 1] * as.action[k][i] == ad.action[k][i] * f.blocks[k])) {
        res.fail("not S-linear in degree " + std::to_string(2 * k));
      }
    }
  }
  if (!res.ok) return res;
  for (std::size_t x = 0; x < src.num_points(); ++x) {
    for (int k = 0; k <= src.top; ++k) {
      if (!contains(dst.spaces[x][k], ambient_image(src, dst, f, static_cast<int>(x), k))) {
        res.fail("does not map M^{<=" + point_label(src, static_cast<int>(x)) + "} into N^{<=x}");
      }
    }
  }
  return res;
}

Morphism identity_morphism(const CofilteredModule& m) {
  Morphism f;
  for (int k = 0; k <= m.top; ++k) f.blocks.push_back(Matrix::identity(m.field, m.dim(m.all_cells(), k)));
  return f;
}

Morphism zero_morphism(const CofilteredModule& src, const CofilteredModule& dst) {
  Morphism f;
  for (int k = 0; k <= src.top; ++k) f.blocks.push_back(zeros(src.field, dst.dim(dst.all_cells(), k), src.dim(src.all_cells(), k)));
  return f;
}

Morphism compose(const Morphism& g, const Morphism& f) {
  Morphism h;
  for (std::size_t k = 0; k < f.blocks.size(); ++k) h.blocks.push_back(g.blocks[k] * f.blocks[k]);
  return h;
}

Morphism combine(const std::vector<Morphism>& basis, const std::vector<Rational>& coeffs) {
  if (basis.empty()) throw Error(ErrorCode::DomainError, "empty basis");
  Morphism h;
  for (std::size_t k = 0; k < basis[0].blocks.size(); ++k) {
    Matrix acc(basis[0].blocks[k].field(), basis[0].blocks[k].rows(), basis[0].blocks[k].cols());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (!coeffs[i].is_zero()) acc = acc + basis[i].blocks[k].scaled(coeffs[i]);
    }
    h.blocks.push_back(std::move(acc));
  }
  return h;
}

Morphism cell_map(const CofilteredModule& src, const CofilteredModule& dst, const std::vector<std::pair<int, int>>& pairs) {
  Morphism f = zero_morphism(src, dst);
  for (int k = 0; k <= src.top; ++k) {
    auto so = offsets(src, src.all_cells(), k), dof = offsets(dst, dst.all_cells(), k);
    for (auto [c, d] : pairs) {
      if (src.cells[c].gen_degrees != dst.cells[d].gen_degrees) throw Error(ErrorCode::DomainError, "paired cells differ");
      std::size_t n = src.cells[c].module.dims[k];
      for (std::size_t i = 0; i < n; ++i) f.blocks[k].set_canonical(dof[d] + i, so[c] + i, Rational(1));
    }
  }
  return f;
}

Matrix restricted(const CofilteredModule& src, const CofilteredModule& dst, const Morphism& f, int x, int k) {
  return left_inverse_matrix(dst.spaces[x][k]) * ambient_image(src, dst, f, x, k);
}

CofilteredModule kernel_module(const CofilteredModule& src, const CofilteredModule& dst, const Morphism& f) {
  CofilteredModule m = src;
  for (std::size_t x = 0; x < src.num_points(); ++x) {
    for (int k = 0; k <= src.top; ++k) {
      const Matrix& b = src.spaces[x][k];
      m.spaces[x][k] = b * kernel_of(src.field, ambient_image(src, dst, f, static_cast<int>(x), k), b.cols());
    }
  }
  return m;
}

Fitting fitting_decomposition(const CofilteredModule& m, const Morphism& f) {
  auto ok = morphism_check(m, m, f);
  if (!ok.ok) throw Error(ErrorCode::NotEndomorphism, ok.detail);
  Fitting out{m, m, {}};
  for (std::size_t x = 0; x < m.num_points(); ++x) {
    int xi = static_cast<int>(x);
    for (int k = 0; k <= m.top; ++k) {
      const Matrix& b = m.spaces[x][k];
      std::size_t n = b.cols();
      Matrix a = restricted(m, m, f, xi, k);
      Matrix p = n == 0 ? zeros(m.field, 0, 0) : a;
      std::size_t r = rank_of(p);
      while (n > 0) {
        Matrix p2 = p * a;
        std::size_t r2 = rank_of(p2);
        p = std::move(p2);
        if (r2 == r) break;
        r = r2;
      }
      Matrix ker = kernel_of(m.field, p, n);
      Matrix im = basis_of(p);
      std::string where = " at " + point_label(m, xi) + " in degree " + std::to_string(2 * k);
      if (ker.cols() + im.cols() != n || rank_of(hstack(ker, im)) != n) out.check.fail("not a direct sum" + where);
      if (!is_nilpotent(left_inverse_matrix(ker) * (a * ker))) out.check.fail("f is not nilpotent on ker^infty" + where);
      if (rank_of(a * im) != im.cols() || !contains(im, a * im)) out.check.fail("f is not invertible on im^infty" + where);
      out.nilpotent_part.spaces[x][k] = b * ker;
      out.invertible_part.spaces[x][k] = b * im;
    }
  }
  auto c1 = well_formed(out.nilpotent_part);
  if (!c1.ok) out.check.fail("ker^infty: " + c1.detail);
  auto c2 = well_formed(out.invertible_part);
  if (!c2.ok) out.check.fail("im^infty: " + c2.detail);
  return out;
}

EndoReport endomorphism_probe(const CofilteredModule& m) {
  EndoReport rep;
  auto all = m.all_cells();
  // one parameter per (source generator, basis vector of the target cell in that degree)
  std::vector<Morphism> params;
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    for (std::size_t d = 0; d < m.cells.size(); ++d) {
      const Cell& a = m.cells[c];
      const Cell& b = m.cells[d];
      if (a.orbit != b.orbit || !m.order.leq(a.point, b.point)) continue;
      for (std::size_t g = 0; g < a.gen_degrees.size(); ++g) {
        int deg = a.gen_degrees[g] / 2;
        if (deg > m.top) continue;
        for (std::size_t j = 0; j < b.module.dims[deg]; ++j) {
          std::vector<graded::Generator> images;
          for (std::size_t h = 0; h < a.gen_degrees.size(); ++h) {
            linalg::Vector v(b.module.dims[std::min(a.gen_degrees[h] / 2, m.top)]);
            if (h == g) v[j] = Rational(1);
            images.push_back({a.gen_degrees[h], v});
          }
          auto fm = graded::free_map(b.module, images);
          Morphism e = zero_morphism(m, m);
          for (int k = 0; k <= m.top; ++k) {
            auto off = offsets(m, all, k);
            if (fm.blocks[k].rows() > 0 && fm.blocks[k].cols() > 0) e.blocks[k].set_block(off[d], off[c], fm.blocks[k]);
          }
          params.push_back(std::move(e));
        }
      }
    }
  }
  if (params.empty()) return rep;
  // constraints: generators of every M^{<=x} go into M^{<=x}; signature: their images
  std::vector<Matrix> cons, sig;
  std::vector<DegreewiseModule> ambs;
  for (std::size_t x = 0; x < m.num_points(); ++x) {
    int xi = static_cast<int>(x);
    auto below = m.cells_below(xi);
    ambs.push_back(ambient(m, below));
    auto gens = graded::minimal_generators_in(ambs.back(), m.spaces[x], false);
    for (const auto& g : gens) {
      int k = g.degree / 2;
      Matrix v = Matrix::from_columns(m.field, g.vector.size(), {g.vector});
      Matrix sel = selector(m, all, below, k);
      Matrix ann = annihilator(m.spaces[x][k]);
      std::vector<Matrix> cols_c, cols_s;
      Matrix lifted = embed(m, xi, k) * v;
      for (const auto& p : params) {
        Matrix img = sel * (p.blocks[k] * lifted);
        cols_c.push_back(ann * img);
        cols_s.push_back(img);
      }
      cons.push_back(stack_cols(m.field, ann.rows(), cols_c));
      sig.push_back(stack_cols(m.field, sel.rows(), cols_s));
    }
  }
  Matrix lam = kernel_of(m.field, stack_rows(m.field, params.size(), cons), params.size());
  Matrix s = stack_rows(m.field, params.size(), sig) * lam;
  std::vector<std::size_t> keep;
  if (!s.empty()) keep = linalg::rref(s).pivots;
  for (auto j : keep) {
    std::vector<Rational> coeffs(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) coeffs[i] = lam(i, j);
    rep.basis.push_back(combine(params, coeffs));
  }
  // probing set: basis elements and pairwise sums
  std::vector<Morphism> probes = rep.basis;
  for (std::size_t i = 0; i < rep.basis.size(); ++i) {
    for (std::size_t j = i + 1; j < rep.basis.size(); ++j) {
      probes.push_back(combine({rep.basis[i], rep.basis[j]}, {Rational(1), Rational(1)}));
    }
  }
  for (const auto& f : probes) {
    ++rep.probes;
    bool nilpotent = true, invertible = true;
    for (std::size_t x = 0; x < m.num_points(); ++x) {
      for (int k = 0; k <= m.top; ++k) {
        Matrix a = on_generators(m, f, static_cast<int>(x), k, ambs[x]);
        if (a.rows() == 0) continue;
        if (!is_nilpotent(a)) nilpotent = false;
        if (rank_of(a) != a.rows()) invertible = false;
      }
    }
    if (!nilpotent && !invertible) {
      rep.local = false;
      rep.witness = f;
      break;
    }
  }
  return rep;
}

ExactnessReport exactness_check(const CofilteredModule& a, const CofilteredModule& b, const CofilteredModule& c,
                                const Morphism& f, const Morphism& g, const std::vector<std::vector<int>>& extra) {
  ExactnessReport rep;
  Morphism gf = compose(g, f);
  for (std::size_t x = 0; x < a.num_points(); ++x) {
    for (int k = 0; k <= a.top; ++k) {
      if (!ambient_image(a, c, gf, static_cast<int>(x), k).is_zero()) {
        throw Error(ErrorCode::DomainError, "g f is not zero");
      }
    }
  }
  std::vector<std::vector<int>> opens;
  for (std::size_t x = 0; x < a.num_points(); ++x) {
    opens.push_back(a.order.below(static_cast<int>(x)));
    opens.push_back(a.order.strictly_below(static_cast<int>(x)));
  }
  std::vector<int> whole(a.num_points());
  for (std::size_t x = 0; x < a.num_points(); ++x) whole[x] = static_cast<int>(x);
  opens.push_back(whole);
  opens.insert(opens.end(), extra.begin(), extra.end());
  for (auto& j : opens) {
    std::sort(j.begin(), j.end());
    auto sa = sections_over_open(a, j), sb = sections_over_open(b, j), sc = sections_over_open(c, j);
    ++rep.opens_checked;
    for (int k = 0; k <= a.top && rep.ok; ++k) {
      Matrix fj = selector(b, b.all_cells(), b.cells_over(j), k) * f.blocks[k] *
                  selector(a, a.all_cells(), a.cells_over(j), k).transpose();
      Matrix gj = selector(c, c.all_cells(), c.cells_over(j), k) * g.blocks[k] *
                  selector(b, b.all_cells(), b.cells_over(j), k).transpose();
      Matrix fa = fj * sa[k];
      Matrix gb = gj * sb[k];
      std::string why;
      if (rank_of(fa) != sa[k].cols()) why = "not injective";
      else if (!contains(sb[k], fa)) why = "f leaves N^J";
      else if (!contains(sc[k], gb)) why = "g leaves O^J";
      else if (!same_space(sb[k] * kernel_of(b.field, gb, sb[k].cols()), fa)) why = "not exact in the middle";
      else if (rank_of(gb) != sc[k].cols()) why = "not surjective";
      if (!why.empty()) {
        rep.ok = false;
        rep.failing_open = j;
        rep.detail = why + " in degree " + std::to_string(2 * k);
      }
    }
    if (!rep.ok) break;
  }
  return rep;
}

CheckResult extension_lemma_check(const CofilteredModule& m, const graph::MomentGraph& quotient, int x) {
  CheckResult res;
  int theta = m.point_orbit[x];
  std::size_t nv = quotient.size(), r = static_cast<std::size_t>(m.rank), ne = quotient.edges.size();
  // unknowns: linear forms z_Omega and one scalar per edge, z_u - z_v = t_E alpha_E, z_theta = 0
  std::size_t nvar = nv * r + ne;
  Matrix cons(m.field, ne * r + r, nvar);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& ed = quotient.edges[e];
    for (std::size_t i = 0; i < r; ++i) {
      cons.set(e * r + i, ed.u * r + i, Rational(1));
      cons.set(e * r + i, ed.v * r + i, Rational(-1));
      cons.set(e * r + i, nv * r + e, Rational(-ed.label[i]));
    }
  }
  for (std::size_t i = 0; i < r; ++i) cons.set(ne * r + i, theta * r + i, Rational(1));
  Matrix zs = linalg::kernel_matrix(cons);
  auto dd = delta_module(m, x);
  auto lower_pts = m.order.strictly_below(x);
  auto lower = sections_over_open(m, lower_pts);
  auto lower_cells = m.cells_below(x, true);
  for (std::size_t z = 0; z < zs.cols(); ++z) {
    for (int k = 0; k < m.top; ++k) {
      if (lower[k].cols() == 0) continue;
      auto off0 = offsets(m, lower_cells, k), off1 = offsets(m, lower_cells, k + 1);
      Matrix mult(m.field, m.dim(lower_cells, k + 1), m.dim(lower_cells, k));
      for (int c : lower_cells) {
        const Cell& cell = m.cells[c];
        std::vector<Rational> form(r);
        for (std::size_t i = 0; i < r; ++i) form[i] = zs(cell.orbit * r + i, z);
        Matrix t = times_form(cell, form, k);
        if (t.rows() > 0 && t.cols() > 0) mult.set_block(off1[c], off0[c], t);
      }
      Matrix mp = mult * lower[k];
      std::string where = " at " + point_label(m, x) + " in degree " + std::to_string(2 * k + 2);
      if (!contains(lower[k + 1], mp)) res.fail("z * s left M^{<x}" + where);
      if (!(dd.u[k + 1] * mp).is_zero()) res.fail("u_x does not vanish on a label-divisible section" + where);
    }
  }
  return res;
}

}  // namespace sheafbm::cofiltered
