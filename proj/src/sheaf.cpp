#include "sheafbm/sheaf.hpp"

#include <algorithm>
#include <random>

#include "sheafbm/error.hpp"
#include "sheafbm/root_system.hpp"

namespace sheafbm::sheaf {

using graded::GradedMap;
using linalg::LeftInverse;
using linalg::Rational;

namespace {

Matrix zeros(const FieldSpec& f, std::size_t r, std::size_t c) { return Matrix(f, r, c); }

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

// Coordinates of a sum of stalks in one degree.
struct Layout {
  std::vector<int> offset;  // by point, -1 if absent
  std::size_t total = 0;
};

Layout layout(const std::vector<Stalk>& stalks, const std::vector<int>& points, int k) {
  Layout l;
  l.offset.assign(stalks.size(), -1);
  for (int p : points) {
    l.offset[p] = static_cast<int>(l.total);
    l.total += stalks[p].module.dims[k];
  }
  return l;
}

// Row indices of the stalks at `points` inside the layout.
std::vector<std::size_t> rows_of(const std::vector<Stalk>& stalks, const Layout& l, const std::vector<int>& points, int k) {
  std::vector<std::size_t> rows;
  for (int p : points) {
    for (std::size_t i = 0; i < stalks[p].module.dims[k]; ++i) rows.push_back(l.offset[p] + i);
  }
  return rows;
}

DegreewiseModule sum_of(const SheafWindow& sw, const std::vector<Stalk>& stalks, const std::vector<int>& points) {
  DegreewiseModule m = graded::zero_module(sw.field, sw.rank(), sw.top());
  for (int p : points) m = graded::direct_sum(m, stalks[p].module);
  return m;
}

std::string name_of(const SheafWindow& sw, int p) { return sw.points[p]; }

// B^{Omega,P} for P the points of one orbit strictly below some z, by compatibility kernel.
Matrix limit_kernel(const SheafWindow& sw, const std::vector<Stalk>& stalks, const std::vector<int>& pts, int k) {
  Layout l = layout(stalks, pts, k);
  std::vector<Matrix> rows;
  for (int t : pts) {
    const Stalk& st = stalks[t];
    Layout lt = layout(stalks, st.lower, k);
    Matrix c(sw.field, lt.total, l.total);
    if (st.module.dims[k] > 0 && lt.total > 0) c.set_block(0, l.offset[t], st.restriction[k]);
    for (int s : st.lower) {
      for (std::size_t i = 0; i < stalks[s].module.dims[k]; ++i) c.set(lt.offset[s] + i, l.offset[s] + i, Rational(-1));
    }
    rows.push_back(std::move(c));
  }
  return kernel_of(sw.field, stack_rows(sw.field, l.total, rows), l.total);
}

// Same space; with a unique maximal point m it is the graph of r_m.
Matrix limit_fast(const SheafWindow& sw, const std::vector<Stalk>& stalks, const std::vector<int>& pts, int k) {
  if (pts.empty()) return zeros(sw.field, 0, 0);
  int top_pt = -1;
  for (int m : pts) {
    bool max = std::all_of(pts.begin(), pts.end(), [&](int t) { return t == m || sw.order.less(t, m); });
    if (max) top_pt = m;
  }
  if (top_pt < 0) return limit_kernel(sw, stalks, pts, k);
  const Stalk& st = stalks[top_pt];
  Layout l = layout(stalks, pts, k);
  Layout lt = layout(stalks, st.lower, k);
  std::size_t n = st.module.dims[k];
  Matrix out(sw.field, l.total, n);
  if (n == 0) return out;
  out.set_block(l.offset[top_pt], 0, Matrix::identity(sw.field, n));
  for (int s : st.lower) {
    std::size_t d = stalks[s].module.dims[k];
    if (d > 0) out.set_block(l.offset[s], 0, st.restriction[k].block(lt.offset[s], 0, d, n));
  }
  return out;
}

EdgePiece make_piece(const SheafWindow& sw, const std::vector<Stalk>& stalks, int edge, int z, bool zeroed) {
  EdgePiece pc;
  pc.edge = edge;
  pc.point = z;
  const auto& e = sw.quotient.edges[edge];
  pc.source = e.u == sw.orbit_map[z] ? e.v : e.u;
  for (int t : sw.points_of(pc.source)) {
    if (sw.order.less(t, z)) pc.lower.push_back(t);
  }
  DegreewiseModule amb = sum_of(sw, stalks, pc.lower);
  std::vector<Matrix> lim;
  for (int k = 0; k <= sw.top(); ++k) lim.push_back(limit_fast(sw, stalks, pc.lower, k));
  auto sub = graded::submodule(amb, lim);
  GradedMap alpha = graded::apply_form(amb, e.label);
  std::vector<Matrix> inv, spans;
  for (int k = 0; k <= sw.top(); ++k) {
    inv.push_back(left_inverse_matrix(sub.inclusion[k]));
    Matrix al = k == 0 ? zeros(sw.field, amb.dims[0], 0) : alpha.blocks[k - 1] * sub.inclusion[k - 1];
    spans.push_back(inv[k] * al);
  }
  auto q = graded::quotient(sub.module, spans);
  pc.module = q.module;
  for (int k = 0; k <= sw.top(); ++k) {
    Matrix p = q.projection[k] * inv[k];
    if (zeroed) p = zeros(sw.field, p.rows(), p.cols());
    pc.project.push_back(std::move(p));
  }
  return pc;
}

// u_z applied to section columns given in `sec_layout` coordinates.
Matrix apply_u(const CofilteredSheaf& sh, const std::vector<const EdgePiece*>& pcs, const Stalk& st, const Matrix& sec,
               const Layout& sec_layout, int k) {
  std::vector<Matrix> parts;
  for (const auto* pc : pcs) {
    parts.push_back(pc->project[k] * sec.select_rows(rows_of(sh.stalks, sec_layout, pc->lower, k)));
  }
  parts.push_back(sec.select_rows(rows_of(sh.stalks, sec_layout, st.lower, k)));
  return stack_rows(sh.window.field, sec.cols(), parts);
}

Matrix apply_d(const CofilteredSheaf& sh, const std::vector<const EdgePiece*>& pcs, const Stalk& st, int k) {
  std::vector<Matrix> parts;
  for (const auto* pc : pcs) parts.push_back(st.rho.at(pc->edge)[k]);
  parts.push_back(st.restriction[k]);
  return stack_rows(sh.window.field, st.module.dims[k], parts);
}

std::vector<const EdgePiece*> pieces_at(const CofilteredSheaf& sh, int z) {
  std::vector<const EdgePiece*> out;
  for (int e : sh.window.edges_at(sh.window.orbit_map[z])) out.push_back(sh.piece(e, z));
  return out;
}

DegreewiseModule target_of(const CofilteredSheaf& sh, const std::vector<const EdgePiece*>& pcs, const Stalk& st) {
  DegreewiseModule t = graded::zero_module(sh.window.field, sh.window.rank(), sh.window.top());
  for (const auto* pc : pcs) t = graded::direct_sum(t, pc->module);
  return graded::direct_sum(t, sum_of(sh.window, sh.stalks, st.lower));
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

int SheafWindow::index_of(const std::string& id) const {
  auto it = std::find(points.begin(), points.end(), id);
  return it == points.end() ? -1 : static_cast<int>(it - points.begin());
}

std::vector<int> SheafWindow::points_of(int orbit) const {
  std::vector<int> out;
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (orbit_map[p] == orbit) out.push_back(static_cast<int>(p));
  }
  return out;
}

std::vector<int> SheafWindow::edges_at(int orbit) const {
  std::vector<int> out;
  for (std::size_t e = 0; e < quotient.edges.size(); ++e) {
    if (quotient.edges[e].u == orbit || quotient.edges[e].v == orbit) out.push_back(static_cast<int>(e));
  }
  return out;
}

SheafWindow make_window(graph::MomentGraph quotient, std::vector<std::string> points, graph::Poset order,
                        std::vector<int> orbit_map, std::vector<std::vector<std::int64_t>> keys, FieldSpec field,
                        int cutoff) {
  if (cutoff < 0 || cutoff % 2 != 0) throw Error(ErrorCode::DomainError, "the cutoff must be even and nonnegative");
  if (orbit_map.size() != points.size() || order.size() != points.size()) {
    throw Error(ErrorCode::DomainError, "orbit map and order must cover every window point");
  }
  for (int o : orbit_map) {
    if (o < 0 || o >= static_cast<int>(quotient.size())) throw Error(ErrorCode::DomainError, "orbit map is not total");
  }
  auto gkm = graph::gkm_check(quotient, field);
  if (!gkm.ok) throw Error(ErrorCode::DomainError, "quotient graph is not GKM: " + gkm.to_string(quotient));
  if (keys.empty()) {
    for (std::size_t p = 0; p < points.size(); ++p) keys.push_back({static_cast<std::int64_t>(p)});
  }
  quotient.order_covers.clear();
  quotient.action_generators.clear();
  SheafWindow sw;
  sw.quotient = std::move(quotient);
  sw.points = std::move(points);
  sw.order = std::move(order);
  sw.orbit_map = std::move(orbit_map);
  sw.keys = std::move(keys);
  sw.field = field;
  sw.cutoff = cutoff;
  return sw;
}

SheafWindow classical_window(const std::string& type, const std::string& w, FieldSpec field, int cutoff) {
  auto rs = roots::build_root_system(roots::parse_type(type));
  roots::WeylGroup weyl(rs);
  int wi = w == "longest" ? weyl.longest() : weyl.index_of_name(w);
  if (wi < 0) wi = weyl.from_word(w);
  auto bruhat = weyl.bruhat_order();
  std::vector<int> members;
  for (std::size_t x = 0; x < weyl.size(); ++x) {
    if (bruhat.leq(static_cast<int>(x), wi)) members.push_back(static_cast<int>(x));
  }
  std::vector<int> pos(weyl.size(), -1);
  for (std::size_t i = 0; i < members.size(); ++i) pos[members[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> rel;
  for (auto [lo, hi] : weyl.bruhat_covers()) {
    if (pos[lo] >= 0 && pos[hi] >= 0) rel.emplace_back(pos[hi], pos[lo]);
  }
  std::vector<std::string> names;
  std::vector<std::vector<std::int64_t>> keys;
  for (int x : members) {
    names.push_back(weyl.name(x));
    keys.push_back({-weyl.length(x), x});
  }
  auto sw = make_window(weyl.bruhat_graph(), names, graph::Poset::from_relations(members.size(), rel), members, keys,
                        field, cutoff);
  sw.base = pos[wi];
  return sw;
}

SheafWindow affine_window(const alcove::Window& window, FieldSpec field, int cutoff) {
  auto pq = alcove::periodic_quotient(window);
  auto sw = make_window(pq.weyl_graph, window.ids, window.order, pq.orbit_map, window.keys(), field, cutoff);
  sw.base = window.base;
  return sw;
}

SheafWindow graph_window(const graph::MomentGraph& g, FieldSpec field, int cutoff) {
  auto report = graph::validate(g);
  if (!report.ok()) {
    throw Error(ErrorCode::InputError, report.violations[0].kind + ": " + report.violations[0].detail);
  }
  auto order = graph::Poset::from_relations(g.size(), g.order_covers);
  if (g.action_generators.empty()) {
    std::vector<int> ident(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) ident[i] = static_cast<int>(i);
    return make_window(g, g.vertices, order, ident, {}, field, cutoff);
  }
  auto q = graph::quotient_by_action(g);
  return make_window(q.quotient, g.vertices, order, q.orbit_map, {}, field, cutoff);
}

SheafWindow subwindow(const SheafWindow& sw, const std::vector<int>& pts) {
  std::vector<int> p = sorted(pts);
  std::vector<std::pair<int, int>> rel;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (sw.order.less(p[i], p[j])) rel.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  std::vector<std::string> names;
  std::vector<int> orbits;
  std::vector<std::vector<std::int64_t>> keys;
  for (int x : p) {
    names.push_back(sw.points[x]);
    orbits.push_back(sw.orbit_map[x]);
    keys.push_back(sw.keys[x]);
  }
  auto sub = make_window(sw.quotient, names, graph::Poset::from_relations(p.size(), rel), orbits, keys, sw.field, sw.cutoff);
  auto it = std::find(p.begin(), p.end(), sw.base);
  sub.base = it == p.end() ? -1 : static_cast<int>(it - p.begin());
  return sub;
}

const EdgePiece* CofilteredSheaf::piece(int edge, int point) const {
  auto it = piece_index.find({edge, point});
  return it == piece_index.end() ? nullptr : &pieces[it->second];
}

std::vector<int> default_linear_extension(const SheafWindow& sw, bool reverse_ties) {
  return sw.order.linear_extension(sw.keys, reverse_ties);
}

CofilteredSheaf bm_build(const SheafWindow& sw, int w, const BuildOptions& options) {
  const int top = sw.top();
  const FieldSpec& field = sw.field;
  const std::size_t n = sw.size();
  if (w < 0 || w >= static_cast<int>(n)) throw Error(ErrorCode::DomainError, "w is not a window point");
  CofilteredSheaf sh;
  sh.window = sw;
  sh.w = w;
  sh.processing_order = options.linear_extension.empty() ? default_linear_extension(sw) : options.linear_extension;
  {
    std::vector<int> seen(n, 0);
    bool ok = sh.processing_order.size() == n;
    for (std::size_t i = 0; ok && i < n; ++i) {
      int z = sh.processing_order[i];
      if (z < 0 || z >= static_cast<int>(n) || seen[z]) ok = false;
      else seen[z] = 1;
      for (std::size_t j = 0; ok && j < i; ++j) {
        if (sw.order.less(z, sh.processing_order[j])) ok = false;
      }
    }
    if (!ok) throw Error(ErrorCode::DomainError, "processing order is not a linear extension of the window order");
  }
  std::mt19937_64 rng(options.extra_generators_seed.value_or(0));
  sh.stalks.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    sh.stalks[p].point = static_cast<int>(p);
    sh.stalks[p].orbit = sw.orbit_map[p];
    sh.stalks[p].module = graded::zero_module(field, sw.rank(), top);
  }
  // sections over the processed points, in processing-order coordinates
  std::vector<Matrix> gamma(top + 1, zeros(field, 0, 0));
  std::vector<int> processed;

  for (int z : sh.processing_order) {
    Stalk& st = sh.stalks[z];
    for (int t : sw.points_of(st.orbit)) {
      if (sw.order.less(t, z)) st.lower.push_back(t);
    }
    std::vector<const EdgePiece*> pcs;
    std::vector<int> piece_ids;
    for (int e : sw.edges_at(st.orbit)) {
      bool zeroed = std::any_of(options.mutations.begin(), options.mutations.end(), [&](const Mutation& m) {
        return m.kind == Mutation::Kind::ZeroRho && m.point == z && m.edge == e;
      });
      sh.piece_index[{e, z}] = static_cast<int>(sh.pieces.size());
      piece_ids.push_back(static_cast<int>(sh.pieces.size()));
      sh.pieces.push_back(make_piece(sw, sh.stalks, e, z, zeroed));
    }
    for (int id : piece_ids) pcs.push_back(&sh.pieces[id]);
    DegreewiseModule target = target_of(sh, pcs, st);

    std::vector<Matrix> u(top + 1);
    for (int k = 0; k <= top; ++k) {
      Layout l = layout(sh.stalks, processed, k);
      u[k] = apply_u(sh, pcs, st, gamma[k], l, k);
    }
    std::vector<graded::Generator> gens;
    if (z == w) {
      gens.push_back({0, linalg::Vector(target.dims[0])});
    } else if (sw.order.leq(w, z)) {
      std::vector<Matrix> spans;
      for (int k = 0; k <= top; ++k) spans.push_back(basis_of(u[k]));
      gens = graded::minimal_generators_in(target, spans, true);
      for (const auto& m : options.mutations) {
        if (m.kind == Mutation::Kind::DropGenerator && m.point == z && !gens.empty()) gens.erase(gens.begin());
      }
      if (options.extra_generators_seed && rng() % 2 == 0) {
        std::vector<int> avail;
        for (int k = 0; k <= top; ++k) {
          if (spans[k].cols() > 0) avail.push_back(k);
        }
        if (!avail.empty()) {
          int k = avail[rng() % avail.size()];
          linalg::Vector v(target.dims[k]);
          for (std::size_t c = 0; c < spans[k].cols(); ++c) {
            Rational coef(static_cast<std::int64_t>(rng() % 5) - 2);
            for (std::size_t r = 0; r < v.size(); ++r) v[r] = linalg::field_add(field, v[r], linalg::field_mul(field, coef, spans[k](r, c)));
          }
          gens.push_back({2 * k, v});
          std::stable_sort(gens.begin(), gens.end(), [](const auto& a, const auto& b) { return a.degree < b.degree; });
        }
      }
    }
    for (const auto& g : gens) st.gen_degrees.push_back(g.degree);
    st.module = graded::free_module(field, sw.rank(), top, st.gen_degrees);
    GradedMap phi = graded::free_map(target, gens);
    for (int k = 0; k <= top; ++k) {
      const Matrix& b = phi.blocks[k];
      std::size_t r = 0;
      for (const auto* pc : pcs) {
        st.rho[pc->edge].push_back(b.block(r, 0, pc->module.dims[k], b.cols()));
        r += pc->module.dims[k];
      }
      st.restriction.push_back(b.block(r, 0, b.rows() - r, b.cols()));
    }

    // Gamma(processed + z) = {(n, s) : d_z n = u_z s}
    for (int k = 0; k <= top; ++k) {
      const Matrix& d = phi.blocks[k];
      const Matrix& g = gamma[k];
      std::size_t nz = d.cols(), rows = g.rows();
      Matrix next;
      std::optional<Matrix> lift;
      if (u[k].is_zero()) lift = zeros(field, nz, g.cols());
      else if (nz > 0) lift = linalg::Solver(d).solve_columns(u[k]);
      if (lift) {
        Matrix kd = kernel_of(field, d, nz);
        next = Matrix(field, rows + nz, g.cols() + kd.cols());
        next.set_block(0, 0, g);
        next.set_block(rows, 0, *lift);
        next.set_block(rows, g.cols(), kd);
      } else {
        Matrix both = hstack(d, u[k].scaled(Rational(-1)));
        Matrix ker = kernel_of(field, both, both.cols());
        std::vector<std::size_t> top_rows, bottom_rows;
        for (std::size_t i = 0; i < nz; ++i) top_rows.push_back(i);
        for (std::size_t i = nz; i < both.cols(); ++i) bottom_rows.push_back(i);
        next = vstack(g * ker.select_rows(bottom_rows), ker.select_rows(top_rows));
      }
      gamma[k] = std::move(next);
    }
    processed.push_back(z);
  }
  return sh;
}

std::vector<Matrix> sections_over_open(const CofilteredSheaf& sh, const std::vector<int>& open_in) {
  const SheafWindow& sw = sh.window;
  std::vector<int> open = sorted(open_in);
  if (!sw.order.is_open(open)) throw Error(ErrorCode::NotOpen, "the subset is not downward closed");
  std::vector<Matrix> out;
  for (int k = 0; k <= sw.top(); ++k) {
    Layout l = layout(sh.stalks, open, k);
    std::vector<Matrix> rows;
    for (int t : open) {
      const Stalk& st = sh.stalks[t];
      std::size_t nt = st.module.dims[k];
      Layout lt = layout(sh.stalks, st.lower, k);
      Matrix c(sw.field, lt.total, l.total);
      if (nt > 0 && lt.total > 0) c.set_block(0, l.offset[t], st.restriction[k]);
      for (int s : st.lower) {
        for (std::size_t i = 0; i < sh.stalks[s].module.dims[k]; ++i) c.set(lt.offset[s] + i, l.offset[s] + i, Rational(-1));
      }
      rows.push_back(std::move(c));
      for (const auto& [e, rho] : st.rho) {
        const EdgePiece* pc = sh.piece(e, t);
        Matrix ce(sw.field, pc->module.dims[k], l.total);
        if (nt > 0 && ce.rows() > 0) ce.set_block(0, l.offset[t], rho[k]);
        Layout lp = layout(sh.stalks, pc->lower, k);
        for (int s : pc->lower) {
          std::size_t ds = sh.stalks[s].module.dims[k];
          if (ds == 0 || ce.rows() == 0) continue;
          ce.set_block(0, l.offset[s], pc->project[k].block(0, lp.offset[s], ce.rows(), ds).scaled(Rational(-1)));
        }
        rows.push_back(std::move(ce));
      }
    }
    out.push_back(kernel_of(sw.field, stack_rows(sw.field, l.total, rows), l.total));
  }
  return out;
}

std::vector<std::size_t> hilbert(const std::vector<Matrix>& sections) {
  std::vector<std::size_t> h;
  for (const auto& s : sections) h.push_back(s.cols());
  return h;
}

CheckResult glue_check(const CofilteredSheaf& sh, const std::vector<std::vector<int>>& cover) {
  CheckResult res;
  std::vector<int> uni;
  for (const auto& j : cover) uni.insert(uni.end(), j.begin(), j.end());
  uni = sorted(uni);
  uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
  auto whole = sections_over_open(sh, uni);
  std::vector<std::vector<Matrix>> parts;
  for (const auto& j : cover) parts.push_back(sections_over_open(sh, j));
  for (int k = 0; k <= sh.window.top(); ++k) {
    Layout l = layout(sh.stalks, uni, k);
    std::vector<Matrix> rows;
    for (std::size_t i = 0; i < cover.size(); ++i) {
      const Matrix& p = parts[i][k];
      Matrix ann = p.cols() == 0 ? Matrix::identity(sh.window.field, p.rows())
                                 : (p.rows() == 0 ? zeros(sh.window.field, 0, 0) : linalg::kernel_matrix(p.transpose()).transpose());
      Matrix sel(sh.window.field, p.rows(), l.total);
      auto r = rows_of(sh.stalks, l, sorted(cover[i]), k);
      for (std::size_t a = 0; a < r.size(); ++a) sel.set(a, r[a], Rational(1));
      rows.push_back(ann * sel);
    }
    Matrix tuples = kernel_of(sh.window.field, stack_rows(sh.window.field, l.total, rows), l.total);
    if (tuples.cols() != whole[k].cols() || !same_space(tuples, whole[k])) {
      res.fail("degree " + std::to_string(2 * k) + ": " + std::to_string(whole[k].cols()) + " sections, " +
               std::to_string(tuples.cols()) + " compatible tuples");
    }
  }
  return res;
}

SheafDelta delta_sheaf(const CofilteredSheaf& sh, int z) {
  SheafDelta out;
  const Stalk& st = sh.stalks[z];
  auto pcs = pieces_at(sh, z);
  out.target = target_of(sh, pcs, st);
  auto lower_pts = sh.window.order.strictly_below(z);
  auto sec = sections_over_open(sh, lower_pts);
  for (int k = 0; k <= sh.window.top(); ++k) {
    Layout l = layout(sh.stalks, sorted(lower_pts), k);
    Matrix ident = Matrix::identity(sh.window.field, l.total);
    out.u.push_back(apply_u(sh, pcs, st, ident, l, k));
    out.image.push_back(basis_of(out.u[k] * sec[k]));
    out.d.push_back(apply_d(sh, pcs, st, k));
  }
  return out;
}

CheckResult flabby_check(const CofilteredSheaf& sh) {
  CheckResult res;
  for (std::size_t z = 0; z < sh.window.size(); ++z) {
    auto sd = delta_sheaf(sh, static_cast<int>(z));
    for (int k = 0; k <= sh.window.top(); ++k) {
      if (!contains(basis_of(sd.d[k]), sd.image[k])) {
        res.fail("im u_z is not inside im d_z at " + name_of(sh.window, static_cast<int>(z)) + " in degree " +
                 std::to_string(2 * k));
        break;
      }
    }
  }
  return res;
}

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second.ok; });
}

const CheckResult* VerifyReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.first == name) return &c.second;
  }
  return nullptr;
}

VerifyReport bm_verify(const CofilteredSheaf& sh, bool full) {
  const SheafWindow& sw = sh.window;
  const int top = sw.top();
  CheckResult wf, p1, p2, p3, flab, onto;
  auto deg = [](int k) { return " in degree " + std::to_string(2 * k); };

  for (std::size_t t = 0; t < sw.size(); ++t) {
    const Stalk& st = sh.stalks[t];
    const std::string at = " at " + name_of(sw, static_cast<int>(t));
    auto free = graded::free_module(sw.field, sw.rank(), top, st.gen_degrees);
    if (free.dims != st.module.dims) wf.fail("stalk is not the free module on its generators" + at);
    DegreewiseModule amb = sum_of(sw, sh.stalks, st.lower);
    if (!graded::is_module_map(st.module, amb, GradedMap{0, st.restriction})) wf.fail("restriction is not S-linear" + at);
    for (int k = 0; k <= top; ++k) {
      if (!contains(limit_kernel(sw, sh.stalks, st.lower, k), st.restriction[k])) wf.fail("restriction leaves the limit" + at);
    }
    for (const auto& [e, rho] : st.rho) {
      const EdgePiece* pc = sh.piece(e, static_cast<int>(t));
      if (!graded::is_module_map(st.module, pc->module, GradedMap{0, rho})) wf.fail("rho is not S-linear" + at);
    }
  }
  for (const auto& pc : sh.pieces) {
    const std::string at = " at " + name_of(sw, pc.point) + " on edge " + std::to_string(pc.edge);
    auto alpha = graded::apply_form(pc.module, sw.quotient.edges[pc.edge].label);
    for (const auto& b : alpha.blocks) {
      if (!b.is_zero()) wf.fail("alpha does not kill the edge module" + at);
    }
    // property (3): the canonical map from B^{source,<t} is onto with kernel alpha B^{source,<t}
    DegreewiseModule amb = sum_of(sw, sh.stalks, pc.lower);
    auto a_amb = graded::apply_form(amb, sw.quotient.edges[pc.edge].label);
    std::vector<Matrix> lim;
    for (int k = 0; k <= top; ++k) lim.push_back(limit_kernel(sw, sh.stalks, pc.lower, k));
    for (int k = 0; k <= top; ++k) {
      Matrix img = pc.project[k] * lim[k];
      if (rank_of(img) != pc.module.dims[k]) p3.fail("rho is not onto" + at + deg(k));
      Matrix ker = lim[k] * kernel_of(sw.field, img, lim[k].cols());
      Matrix al = k == 0 ? zeros(sw.field, amb.dims[0], 0) : a_amb.blocks[k - 1] * lim[k - 1];
      if (!same_space(ker, al)) p3.fail("kernel of rho is not alpha times the stalk" + at + deg(k));
    }
  }
  for (std::size_t t = 0; t < sw.size(); ++t) {
    int ti = static_cast<int>(t);
    const Stalk& st = sh.stalks[t];
    const std::string at = " at " + name_of(sw, ti);
    bool above = sw.order.leq(sh.w, ti);
    if (!above && !st.gen_degrees.empty()) p2.fail("nonzero stalk outside {>= w}" + at);
    if (ti == sh.w && st.gen_degrees != std::vector<int>{0}) p2.fail("the stalk at w is not S" + at);
    if (!above || ti == sh.w) {
      for (const auto* pc : pieces_at(sh, ti)) {
        if (!pc->module.is_zero()) p2.fail("nonzero edge module at or below w" + at);
      }
    }
    auto sd = delta_sheaf(sh, ti);
    for (int k = 0; k <= top; ++k) {
      Matrix imd = basis_of(sd.d[k]);
      if (!contains(imd, sd.image[k])) flab.fail("im u_z is not inside im d_z" + at + deg(k));
      if (above && ti != sh.w && !same_space(imd, sd.image[k])) p1.fail("im d_z differs from the delta space" + at + deg(k));
    }
    if (above && ti != sh.w) {
      auto gens = graded::minimal_generators_in(sd.target, sd.image, false);
      std::vector<int> degs;
      for (const auto& g : gens) degs.push_back(g.degree);
      if (sorted(degs) != sorted(st.gen_degrees)) p1.fail("the stalk is not a minimal cover of the delta space" + at);
    }
    auto below = sections_over_open(sh, sw.order.below(ti));
    for (int k = 0; k <= top; ++k) {
      Layout l = layout(sh.stalks, sorted(sw.order.below(ti)), k);
      std::size_t nt = st.module.dims[k];
      if (nt == 0) continue;
      Matrix sel = below[k].select_rows(rows_of(sh.stalks, l, {ti}, k));
      if (rank_of(sel) != nt) onto.fail("Gamma(<= z) does not surject onto the stalk" + at + deg(k));
    }
  }
  VerifyReport rep;
  rep.checks = {{"well_formed", wf}, {"property_1", p1}, {"property_2", p2}, {"property_3", p3},
                {"flabby", flab}, {"sections_onto_stalks", onto}};
  if (full) {
    auto b = global_sections(sh);
    rep.checks.emplace_back("support_condition", cofiltered::support_condition_check(b));
    rep.checks.emplace_back("delta_match", delta_match_check(sh, b));
  }
  return rep;
}

std::vector<RankRow> rank_table(const CofilteredSheaf& sh) {
  std::vector<RankRow> out;
  for (std::size_t t = 0; t < sh.window.size(); ++t) {
    if (!sh.window.order.leq(sh.w, static_cast<int>(t))) continue;
    out.push_back({static_cast<int>(t), sh.stalks[t].orbit, RankPolynomial::from_degrees(sh.stalks[t].gen_degrees)});
  }
  return out;
}

cofiltered::CofilteredModule global_sections(const CofilteredSheaf& sh) {
  const SheafWindow& sw = sh.window;
  cofiltered::CofilteredModule m;
  m.field = sw.field;
  m.rank = sw.rank();
  m.top = sw.top();
  m.order = sw.order;
  m.point_orbit = sw.orbit_map;
  m.point_names = sw.points;
  for (const auto& st : sh.stalks) {
    if (st.gen_degrees.empty()) continue;
    m.cells.push_back({st.point, st.orbit, st.gen_degrees, st.module});
  }
  for (std::size_t x = 0; x < sw.size(); ++x) m.spaces.push_back(sections_over_open(sh, sw.order.below(static_cast<int>(x))));
  return m;
}

CheckResult delta_match_check(const CofilteredSheaf& sh, const cofiltered::CofilteredModule& b) {
  CheckResult res;
  for (std::size_t x = 0; x < sh.window.size(); ++x) {
    int xi = static_cast<int>(x);
    const std::string at = " at " + name_of(sh.window, xi);
    cofiltered::DeltaData dm;
    try {
      dm = cofiltered::delta_module(b, xi);
    } catch (const Error& e) {
      res.fail(e.what());
      continue;
    }
    auto sd = delta_sheaf(sh, xi);
    auto below = b.cells_below(xi);
    std::vector<int> own;
    for (int c : dm.theta_cells) {
      if (b.cells[c].point == xi) own.push_back(c);
    }
    for (int k = 0; k <= b.top; ++k) {
      if (dm.module.dims[k] != sd.image[k].cols()) {
        res.fail("dimensions differ" + at + " in degree " + std::to_string(2 * k));
        continue;
      }
      Matrix comp = basis_of(cofiltered::selector(b, below, dm.theta_cells, k) * b.spaces[x][k]);
      Matrix via_module = dm.d[k] * comp;
      Matrix via_sheaf = own.empty() ? zeros(b.field, sd.d[k].rows(), comp.cols())
                                     : sd.d[k] * (cofiltered::selector(b, dm.theta_cells, own, k) * comp);
      std::size_t r1 = rank_of(via_module), r2 = rank_of(via_sheaf), r12 = rank_of(vstack(via_module, via_sheaf));
      if (r1 != r2 || r1 != r12 || r1 != sd.image[k].cols()) res.fail("the two delta spaces differ" + at + " in degree " + std::to_string(2 * k));
    }
  }
  return res;
}

GlobalSections global_sections_and_epi(const CofilteredSheaf& sh) {
  GlobalSections out;
  const SheafWindow& sw = sh.window;
  out.module = global_sections(sh);
  out.standard = cofiltered::standard_object(sw.order, sw.orbit_map, sw.points, sw.field, sw.rank(), sw.top(), sh.w);
  int wc = -1;
  for (std::size_t c = 0; c < out.module.cells.size(); ++c) {
    if (out.module.cells[c].point == sh.w) wc = static_cast<int>(c);
  }
  out.pi = cofiltered::cell_map(out.module, out.standard, {{wc, 0}});
  auto kern = cofiltered::kernel_module(out.module, out.standard, out.pi);
  out.epi = cofiltered::exactness_check(kern, out.module, out.standard, cofiltered::identity_morphism(kern), out.pi);
  out.delta_match = delta_match_check(sh, out.module);
  out.ranks = rank_table(sh);
  return out;
}

}  // namespace sheafbm::sheaf
