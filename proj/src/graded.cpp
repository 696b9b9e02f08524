#include "sheafbm/graded.hpp"

#include <mutex>
#include <sstream>

#include "sheafbm/error.hpp"

namespace sheafbm::graded {
namespace {

void lex_monomials(int rank, int j, int pos, Exponents& cur, std::vector<Exponents>& out) {
  if (pos == rank - 1) {
    cur[pos] = j;
    out.push_back(cur);
    return;
  }
  for (int e = j; e >= 0; --e) {
    cur[pos] = e;
    lex_monomials(rank, j - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

Matrix empty_columns(const FieldSpec& f, std::size_t rows) { return Matrix(f, rows, 0); }

Matrix hstack_all(const FieldSpec& f, std::size_t rows, const std::vector<Matrix>& parts) {
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

}  // namespace

std::size_t sym_component_dim(int rank, int degree) {
  if (rank < 1) throw Error(ErrorCode::DomainError, "lattice rank must be positive");
  if (degree < 0 || degree % 2 != 0) {
    throw Error(ErrorCode::DomainError, "degree " + std::to_string(degree) + " is not a nonnegative even integer");
  }
  // C(j + r - 1, r - 1)
  std::uint64_t j = static_cast<std::uint64_t>(degree / 2);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i < static_cast<std::uint64_t>(rank); ++i) result = result * (j + i) / i;
  return static_cast<std::size_t>(result);
}

MonomialTable::MonomialTable(int rank, int top) : rank_(rank), top_(top), basis_(top + 1), times_(top + 1) {
  Exponents cur(rank, 0);
  for (int j = 0; j <= top; ++j) {
    lex_monomials(rank, j, 0, cur, basis_[j]);
    for (std::size_t i = 0; i < basis_[j].size(); ++i) lookup_.emplace(basis_[j][i], i);
  }
  for (int j = 0; j < top; ++j) {
    times_[j].resize(basis_[j].size() * rank);
    for (std::size_t i = 0; i < basis_[j].size(); ++i) {
      for (int v = 0; v < rank; ++v) {
        Exponents e = basis_[j][i];
        ++e[v];
        times_[j][i * rank + v] = lookup_.at(e);
      }
    }
  }
}

std::size_t MonomialTable::index(const Exponents& e) const { return lookup_.at(e); }

std::shared_ptr<const MonomialTable> monomials(int rank, int top) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  // a table for a larger top serves every smaller one
  for (auto it = cache.lower_bound({rank, top}); it != cache.end() && it->first.first == rank; ++it) {
    return it->second;
  }
  auto t = std::make_shared<const MonomialTable>(rank, top);
  cache[{rank, top}] = t;
  return t;
}

RankPolynomial RankPolynomial::from_degrees(const std::vector<int>& degrees) {
  RankPolynomial p;
  for (int d : degrees) p.coeffs[d / 2] += 1;
  return p;
}

std::int64_t RankPolynomial::total() const {
  std::int64_t t = 0;
  for (const auto& [e, c] : coeffs) t += c;
  return t;
}

std::string RankPolynomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : coeffs) {
    if (c == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (e == 0) {
      os << c;
      continue;
    }
    if (c != 1) os << c;
    os << "q";
    if (e != 1) os << "^" << e;
  }
  if (first) return "0";
  return os.str();
}

bool DegreewiseModule::is_zero() const {
  for (auto d : dims) {
    if (d != 0) return false;
  }
  return true;
}

bool DegreewiseModule::well_formed() const {
  if (static_cast<int>(dims.size()) != top + 1) return false;
  if (static_cast<int>(action.size()) != top) return false;
  for (int k = 0; k < top; ++k) {
    if (static_cast<int>(action[k].size()) != rank) return false;
    for (const auto& a : action[k]) {
      if (a.rows() != dims[k + 1] || a.cols() != dims[k]) return false;
    }
  }
  for (int k = 0; k + 1 < top; ++k) {
    for (int i = 0; i < rank; ++i) {
      for (int j = i + 1; j < rank; ++j) {
        if (!(action[k + 1][i] * action[k][j] == action[k + 1][j] * action[k][i])) return false;
      }
    }
  }
  return true;
}

DegreewiseModule zero_module(FieldSpec field, int rank, int top) {
  DegreewiseModule m;
  m.field = field;
  m.rank = rank;
  m.top = top;
  m.dims.assign(top + 1, 0);
  m.action.assign(top, std::vector<Matrix>(rank, Matrix(field, 0, 0)));
  return m;
}

DegreewiseModule free_module(FieldSpec field, int rank, int top, const std::vector<int>& gen_degrees) {
  auto mono = monomials(rank, top);
  DegreewiseModule m = zero_module(field, rank, top);
  for (int d : gen_degrees) {
    if (d < 0 || d % 2 != 0) throw Error(ErrorCode::DomainError, "generator degree must be even and nonnegative");
  }
  for (int k = 0; k <= top; ++k) {
    std::size_t n = 0;
    for (int d : gen_degrees) {
      if (d / 2 <= k) n += mono->size(k - d / 2);
    }
    m.dims[k] = n;
  }
  for (int k = 0; k < top; ++k) {
    for (int i = 0; i < rank; ++i) {
      Matrix a(field, m.dims[k + 1], m.dims[k]);
      std::size_t src = 0, dst = 0;
      for (int d : gen_degrees) {
        int j = k - d / 2;
        if (j >= 0) {
          for (std::size_t s = 0; s < mono->size(j); ++s) a.set_canonical(dst + mono->times(j, s, i), src + s, Rational(1));
          src += mono->size(j);
        }
        if (j + 1 >= 0) dst += mono->size(j + 1);
      }
      m.action[k][i] = std::move(a);
    }
  }
  return m;
}

DegreewiseModule direct_sum(const DegreewiseModule& a, const DegreewiseModule& b) {
  if (a.rank != b.rank || a.top != b.top || !(a.field == b.field)) {
    throw Error(ErrorCode::DomainError, "direct sum of incompatible modules");
  }
  DegreewiseModule m = zero_module(a.field, a.rank, a.top);
  for (int k = 0; k <= a.top; ++k) m.dims[k] = a.dims[k] + b.dims[k];
  for (int k = 0; k < a.top; ++k) {
    for (int i = 0; i < a.rank; ++i) {
      Matrix x(a.field, m.dims[k + 1], m.dims[k]);
      x.set_block(0, 0, a.action[k][i]);
      x.set_block(a.dims[k + 1], a.dims[k], b.action[k][i]);
      m.action[k][i] = std::move(x);
    }
  }
  return m;
}

GradedMap identity_map(const DegreewiseModule& m) {
  GradedMap f;
  for (int k = 0; k <= m.top; ++k) f.blocks.push_back(Matrix::identity(m.field, m.dims[k]));
  return f;
}

GradedMap apply_form(const DegreewiseModule& m, const std::vector<std::int64_t>& lambda) {
  if (static_cast<int>(lambda.size()) != m.rank) throw Error(ErrorCode::DomainError, "form length differs from lattice rank");
  GradedMap f;
  f.shift = 2;
  for (int k = 0; k < m.top; ++k) {
    Matrix b(m.field, m.dims[k + 1], m.dims[k]);
    for (int i = 0; i < m.rank; ++i) {
      if (lambda[i] != 0) b = b + m.action[k][i].scaled(Rational(lambda[i]));
    }
    f.blocks.push_back(std::move(b));
  }
  return f;
}

bool is_module_map(const DegreewiseModule& source, const DegreewiseModule& target, const GradedMap& f) {
  int s = f.shift / 2;
  for (std::size_t k = 0; k + 1 < f.blocks.size(); ++k) {
    if (static_cast<int>(k) >= source.top || static_cast<int>(k) + s >= target.top) break;
    for (int i = 0; i < source.rank; ++i) {
      if (!(f.blocks[k + 1] * source.action[k][i] == target.action[k + s][i] * f.blocks[k])) return false;
    }
  }
  return true;
}

Submodule submodule(const DegreewiseModule& ambient, const std::vector<Matrix>& spans) {
  Submodule out;
  out.module = zero_module(ambient.field, ambient.rank, ambient.top);
  std::vector<linalg::LeftInverse> inv;
  for (int k = 0; k <= ambient.top; ++k) {
    Matrix b = linalg::column_basis(spans[k]);
    out.module.dims[k] = b.cols();
    inv.emplace_back(b);
    out.inclusion.push_back(std::move(b));
  }
  for (int k = 0; k < ambient.top; ++k) {
    for (int i = 0; i < ambient.rank; ++i) {
      out.module.action[k][i] = inv[k + 1].apply(ambient.action[k][i] * out.inclusion[k]);
    }
  }
  return out;
}

Quotient quotient(const DegreewiseModule& ambient, const std::vector<Matrix>& sub_spans) {
  Quotient out;
  out.module = zero_module(ambient.field, ambient.rank, ambient.top);
  for (int k = 0; k <= ambient.top; ++k) {
    std::size_t n = ambient.dims[k];
    Matrix u = linalg::column_basis(sub_spans[k]);
    auto comp = linalg::complement_coordinates(u);
    Matrix e(ambient.field, n, comp.size());
    for (std::size_t j = 0; j < comp.size(); ++j) e.set_canonical(comp[j], j, Rational(1));
    Matrix full = hstack(u, e);
    linalg::Solver s(full);
    auto inv = s.solve_columns(Matrix::identity(ambient.field, n));
    std::vector<std::size_t> rows(comp.size());
    for (std::size_t j = 0; j < comp.size(); ++j) rows[j] = u.cols() + j;
    out.projection.push_back(inv->select_rows(rows));
    out.lift.push_back(std::move(e));
    out.module.dims[k] = comp.size();
  }
  for (int k = 0; k < ambient.top; ++k) {
    for (int i = 0; i < ambient.rank; ++i) {
      out.module.action[k][i] = out.projection[k + 1] * (ambient.action[k][i] * out.lift[k]);
    }
  }
  return out;
}

Submodule image(const DegreewiseModule& target, const GradedMap& f) {
  int s = f.shift / 2;
  std::vector<Matrix> spans;
  for (int k = 0; k <= target.top; ++k) {
    int src = k - s;
    if (src >= 0 && src < static_cast<int>(f.blocks.size())) spans.push_back(f.blocks[src]);
    else spans.push_back(empty_columns(target.field, target.dims[k]));
  }
  return submodule(target, spans);
}

Submodule kernel(const DegreewiseModule& source, const GradedMap& f) {
  if (f.shift != 0) throw Error(ErrorCode::DomainError, "kernel of a degree-raising map is not determined up to the cutoff");
  std::vector<Matrix> spans;
  for (int k = 0; k <= source.top; ++k) spans.push_back(linalg::kernel_matrix(f.blocks[k]));
  return submodule(source, spans);
}

Quotient cokernel(const DegreewiseModule& target, const GradedMap& f) {
  return quotient(target, image(target, f).inclusion);
}

Matrix raised_span(const DegreewiseModule& ambient, const std::vector<Matrix>& spans, int k) {
  if (k == 0) return empty_columns(ambient.field, ambient.dims[0]);
  std::vector<Matrix> parts;
  for (int i = 0; i < ambient.rank; ++i) parts.push_back(ambient.action[k - 1][i] * spans[k - 1]);
  return hstack_all(ambient.field, ambient.dims[k], parts);
}

std::vector<Generator> minimal_generators_in(const DegreewiseModule& ambient, const std::vector<Matrix>& spans,
                                             bool guard) {
  std::vector<Generator> gens;
  for (int k = 0; k <= ambient.top; ++k) {
    if (spans[k].cols() == 0) continue;
    Matrix w = raised_span(ambient, spans, k);
    if (w.cols() > 0) w = linalg::column_basis(w);
    auto pivots = linalg::rref(hstack(w, spans[k])).pivots;
    for (auto p : pivots) {
      if (p < w.cols()) continue;
      if (guard && k == ambient.top) {
        throw Error(ErrorCode::CutoffTooLow,
                    "a generator appears in degree " + std::to_string(2 * k) + " at the cutoff; raise --cutoff");
      }
      gens.push_back({2 * k, spans[k].column(p - w.cols())});
    }
  }
  return gens;
}

std::vector<Generator> minimal_generators(const DegreewiseModule& m, bool guard) {
  std::vector<Matrix> spans;
  for (int k = 0; k <= m.top; ++k) spans.push_back(Matrix::identity(m.field, m.dims[k]));
  return minimal_generators_in(m, spans, guard);
}

GradedMap free_map(const DegreewiseModule& target, const std::vector<Generator>& images) {
  auto mono = monomials(target.rank, target.top);
  // cols[g][j]: images of (generator g) * (monomials of degree 2j)
  std::vector<std::vector<Matrix>> cols(images.size());
  for (std::size_t g = 0; g < images.size(); ++g) {
    int d = images[g].degree / 2;
    if (d > target.top) continue;
    if (images[g].vector.size() != target.dims[d]) throw Error(ErrorCode::DomainError, "generator image has wrong length");
    cols[g].push_back(Matrix::from_columns(target.field, target.dims[d], {images[g].vector}));
    for (int j = 1; d + j <= target.top; ++j) {
      Matrix c(target.field, target.dims[d + j], mono->size(j));
      const Matrix& prev = cols[g][j - 1];
      for (std::size_t idx = 0; idx < mono->size(j); ++idx) {
        const Exponents& e = mono->monomial(j, idx);
        int var = 0;
        while (e[var] == 0) ++var;
        Exponents lower = e;
        --lower[var];
        std::size_t li = mono->index(lower);
        Vector v = target.action[d + j - 1][var].apply(prev.column(li));
        for (std::size_t r = 0; r < v.size(); ++r) {
          if (!v[r].is_zero()) c.set_canonical(r, idx, std::move(v[r]));
        }
      }
      cols[g].push_back(std::move(c));
    }
  }
  GradedMap f;
  for (int k = 0; k <= target.top; ++k) {
    std::vector<Matrix> parts;
    for (std::size_t g = 0; g < images.size(); ++g) {
      int j = k - images[g].degree / 2;
      if (j >= 0) parts.push_back(cols[g][j]);
    }
    f.blocks.push_back(hstack_all(target.field, target.dims[k], parts));
  }
  return f;
}

ProjectiveCover projective_cover(const DegreewiseModule& m, bool guard) {
  ProjectiveCover pc;
  auto gens = minimal_generators(m, guard);
  for (const auto& g : gens) pc.gen_degrees.push_back(g.degree);
  pc.rank = RankPolynomial::from_degrees(pc.gen_degrees);
  pc.free = free_module(m.field, m.rank, m.top, pc.gen_degrees);
  pc.map = free_map(m, gens);
  return pc;
}

std::vector<std::size_t> map_ranks(const GradedMap& f) {
  std::vector<std::size_t> r;
  for (const auto& b : f.blocks) r.push_back(linalg::rank(b));
  return r;
}

bool is_surjective(const DegreewiseModule& target, const GradedMap& f) {
  int s = f.shift / 2;
  for (int k = 0; k <= target.top; ++k) {
    int src = k - s;
    std::size_t r = 0;
    if (src >= 0 && src < static_cast<int>(f.blocks.size())) r = linalg::rank(f.blocks[src]);
    if (r != target.dims[k]) return false;
  }
  return true;
}

}  // namespace sheafbm::graded
