#include "sheafbm/alcove.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "sheafbm/error.hpp"

namespace sheafbm::alcove {
namespace {

std::int64_t floor_of(const Rational& r) {
  if (r.is_small()) {
    std::int64_t n = r.small_num(), d = r.small_den();
    std::int64_t q = n / d;
    if (n % d != 0 && n < 0) --q;
    return q;
  }
  mpz_class out;
  mpq_class q = r.to_mpq();
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  if (!out.fits_slong_p()) throw Error(ErrorCode::DomainError, "alcove address out of range");
  return out.get_si();
}

Rational pair(const Point& c, const graph::Label& coroot) { return roots::pairing<Rational>(c, coroot); }

// Lambda in fundamental-weight coordinates -> simple-root coordinates.
Point to_simple_roots(const RootSystem& rs, const Point& lambda) {
  linalg::Matrix at(linalg::FieldSpec::rationals(), rs.rank, rs.rank);
  for (int k = 0; k < rs.rank; ++k) {
    for (int j = 0; j < rs.rank; ++j) at.set(k, j, Rational(rs.cartan[j][k]));
  }
  auto sol = linalg::Solver(at).solve(lambda);
  return *sol;
}

}  // namespace

bool Bounds::contains(const Address& a) const {
  return std::all_of(a.begin(), a.end(), [&](std::int64_t x) { return lo <= x && x <= hi; });
}

std::string Bounds::to_string() const { return std::to_string(lo) + ".." + std::to_string(hi); }

Bounds parse_bounds(const std::string& text) {
  auto pos = text.find("..");
  if (pos == std::string::npos) throw Error(ErrorCode::InputError, "expected bounds of the form lo..hi, got '" + text + "'");
  Bounds b;
  try {
    std::size_t used = 0;
    std::string lo = text.substr(0, pos), hi = text.substr(pos + 2);
    b.lo = std::stoll(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    b.hi = std::stoll(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InputError, "expected bounds of the form lo..hi, got '" + text + "'");
  }
  if (b.lo > b.hi) throw Error(ErrorCode::InputError, "empty bounds " + text);
  return b;
}

void require_affine_rank(const RootSystem& rs) {
  if (rs.rank > 2) throw Error(ErrorCode::UnsupportedType, "alcove geometry is implemented for rank 1 and 2 only");
}

std::optional<Point> sample_point(const RootSystem& rs, const Address& a) {
  require_affine_rank(rs);
  if (a.size() != rs.num_positive()) throw Error(ErrorCode::DomainError, "address has the wrong length");
  if (rs.rank == 1) {
    // the coroot alpha^vee pairs with omega coordinates as the identity
    return Point{Rational(2 * a[0] + 1, 2)};
  }
  // vertices of the polygon cut out by the strips k <= <x, beta^vee> <= k + 1
  struct Line {
    graph::Label coroot;
    Rational value;
  };
  std::vector<Line> lines;
  for (std::size_t k = 0; k < rs.num_positive(); ++k) {
    lines.push_back({rs.positive_coroot(k), Rational(a[k])});
    lines.push_back({rs.positive_coroot(k), Rational(a[k] + 1)});
  }
  auto feasible = [&](const Point& x) {
    for (std::size_t k = 0; k < rs.num_positive(); ++k) {
      Rational v = pair(x, rs.positive_coroot(k));
      if (v < Rational(a[k]) || v > Rational(a[k] + 1)) return false;
    }
    return true;
  };
  std::vector<Point> vertices;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& p = lines[i].coroot;
      const auto& q = lines[j].coroot;
      std::int64_t det = p[0] * q[1] - p[1] * q[0];
      if (det == 0) continue;
      Rational x0 = (lines[i].value * Rational(q[1]) - lines[j].value * Rational(p[1])) / Rational(det);
      Rational x1 = (lines[j].value * Rational(p[0]) - lines[i].value * Rational(q[0])) / Rational(det);
      Point x{x0, x1};
      if (feasible(x) && std::find(vertices.begin(), vertices.end(), x) == vertices.end()) vertices.push_back(x);
    }
  }
  if (vertices.size() < 3) return std::nullopt;
  Point c{Rational(0), Rational(0)};
  for (const auto& v : vertices) {
    c[0] += v[0];
    c[1] += v[1];
  }
  Rational n(static_cast<std::int64_t>(vertices.size()));
  c[0] /= n;
  c[1] /= n;
  // a degenerate (collinear) vertex set would put the centroid on a wall
  for (std::size_t k = 0; k < rs.num_positive(); ++k) {
    Rational v = pair(c, rs.positive_coroot(k));
    if (!(Rational(a[k]) < v && v < Rational(a[k] + 1))) return std::nullopt;
  }
  return c;
}

Address address_of(const RootSystem& rs, const Point& interior) {
  Address a;
  for (std::size_t k = 0; k < rs.num_positive(); ++k) a.push_back(floor_of(pair(interior, rs.positive_coroot(k))));
  return a;
}

Address reflect_alcove(const RootSystem& rs, const Address& a, std::size_t k, std::int64_t level) {
  auto c = sample_point(rs, a);
  if (!c) throw Error(ErrorCode::DomainError, "not an alcove address");
  Rational t = pair(*c, rs.positive_coroot(k)) - Rational(level);
  const auto& root = rs.positive_root_omega(k);
  Point d = *c;
  for (int i = 0; i < rs.rank; ++i) d[i] -= t * Rational(root[i]);
  return address_of(rs, d);
}

Address translate_alcove(const RootSystem& rs, const Address& a, const graph::Label& lambda) {
  Address out = a;
  for (std::size_t k = 0; k < rs.num_positive(); ++k) {
    const auto& c = rs.positive_coroot(k);
    std::int64_t shift = 0;
    for (int j = 0; j < rs.rank; ++j) {
      for (int i = 0; i < rs.rank; ++i) shift += lambda[j] * c[i] * rs.cartan[j][i];
    }
    out[k] += shift;
  }
  return out;
}

std::string alcove_id(const Address& a) {
  if (a.size() == 1) return "A" + std::to_string(a[0]);
  std::ostringstream os;
  os << "A(";
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  os << ")";
  return os.str();
}

Address parse_alcove(const RootSystem& rs, const std::string& text) {
  require_affine_rank(rs);
  std::size_t n = rs.num_positive();
  if (text == "fundamental") return Address(n, 0);
  std::string body = text;
  if (!body.empty() && body[0] == 'A') body = body.substr(1);
  if (body.size() >= 2 && body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
  Address a;
  std::stringstream ss(body);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      a.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InputError, "cannot parse alcove '" + text + "'");
  }
  if (a.size() != n) throw Error(ErrorCode::InputError, "alcove '" + text + "' needs " + std::to_string(n) + " address entries");
  if (!sample_point(rs, a)) throw Error(ErrorCode::InputError, "'" + text + "' is not the address of an alcove");
  return a;
}

std::vector<Address> enumerate_box(const RootSystem& rs, const Bounds& box) {
  require_affine_rank(rs);
  std::vector<Address> out;
  if (rs.rank == 1) {
    for (auto k = box.lo; k <= box.hi; ++k) out.push_back({k});
    return out;
  }
  // the two simple coroots come first; inside each unit square the other
  // coroots take a bounded range of floors
  std::size_t n = rs.num_positive();
  for (auto k0 = box.lo; k0 <= box.hi; ++k0) {
    for (auto k1 = box.lo; k1 <= box.hi; ++k1) {
      std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
      for (std::size_t k = 2; k < n; ++k) {
        const auto& c = rs.positive_coroot(k);
        std::int64_t lo = c[0] * k0 + c[1] * k1;
        std::int64_t hi = c[0] * (k0 + 1) + c[1] * (k1 + 1) - 1;
        ranges.emplace_back(std::max(lo, box.lo), std::min(hi, box.hi));
      }
      Address a(n);
      a[0] = k0;
      a[1] = k1;
      std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == n) {
          if (sample_point(rs, a)) out.push_back(a);
          return;
        }
        for (auto v = ranges[k - 2].first; v <= ranges[k - 2].second; ++v) {
          a[k] = v;
          rec(k + 1);
        }
      };
      rec(2);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Window::index_of(const Address& a) const {
  auto it = std::lower_bound(alcoves.begin(), alcoves.end(), a);
  if (it == alcoves.end() || *it != a) return -1;
  return static_cast<int>(it - alcoves.begin());
}

std::vector<std::vector<std::int64_t>> Window::keys() const { return {alcoves.begin(), alcoves.end()}; }

Window build_window(const RootSystem& rs, const Address& w, const Bounds& box, const Bounds& margin) {
  require_affine_rank(rs);
  if (!margin.contains(box)) throw Error(ErrorCode::InputError, "the margin " + margin.to_string() + " must contain the box " + box.to_string());
  if (!sample_point(rs, w)) throw Error(ErrorCode::InputError, "w is not an alcove");
  if (!box.contains(w)) throw Error(ErrorCode::WNotInBox, alcove_id(w) + " is outside the box " + box.to_string());

  auto all = enumerate_box(rs, margin);
  std::map<Address, int> lookup;
  std::vector<Point> centers;
  for (std::size_t i = 0; i < all.size(); ++i) {
    lookup[all[i]] = static_cast<int>(i);
    centers.push_back(*sample_point(rs, all[i]));
  }
  std::vector<std::pair<int, int>> relations;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t k = 0; k < rs.num_positive(); ++k) {
      Rational v = pair(centers[i], rs.positive_coroot(k));
      const auto& root = rs.positive_root_omega(k);
      for (auto level = margin.lo; level <= margin.hi + 1; ++level) {
        if (!(v < Rational(level))) continue;
        Point d = centers[i];
        Rational t = v - Rational(level);
        for (int j = 0; j < rs.rank; ++j) d[j] -= t * Rational(root[j]);
        auto it = lookup.find(address_of(rs, d));
        if (it != lookup.end()) relations.emplace_back(static_cast<int>(i), it->second);
      }
    }
  }
  auto order = graph::Poset::from_relations(all.size(), relations);
  int wi = lookup.at(w);

  Window win;
  win.rs = rs;
  win.box = box;
  win.margin = margin;
  win.margin_size = all.size();
  std::vector<int> chosen;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (box.contains(all[i]) && order.leq(wi, static_cast<int>(i))) chosen.push_back(static_cast<int>(i));
  }
  // certificate: every alcove on a chain from w to a window alcove has its
  // barycenter between the two in dominance order, so it suffices that this
  // region lies inside the margin and that the margin interval [w, x] lies in the box
  Point cw = centers[wi];
  for (int x : chosen) {
    Point diff(rs.rank);
    for (int j = 0; j < rs.rank; ++j) diff[j] = centers[x][j] - cw[j];
    Point coeffs = to_simple_roots(rs, diff);
    for (const auto& c : coeffs) {
      if (c.sign() < 0) throw Error(ErrorCode::DomainError, "order relation against dominance; internal error");
    }
    for (std::size_t k = 0; k < rs.num_positive(); ++k) {
      const auto& cor = rs.positive_coroot(k);
      Rational base = pair(cw, cor);
      Rational lo = base, hi = base;
      for (int j = 0; j < rs.rank; ++j) {
        // <alpha_j, beta^vee>
        std::int64_t aj = 0;
        for (int i = 0; i < rs.rank; ++i) aj += cor[i] * rs.cartan[j][i];
        Rational step = coeffs[j] * Rational(aj);
        if (step.sign() < 0) lo += step;
        else hi += step;
      }
      if (floor_of(lo) < margin.lo || floor_of(hi) > margin.hi) {
        throw Error(ErrorCode::ClosureUncertified, "the interval from " + alcove_id(all[wi]) + " to " + alcove_id(all[x]) +
                                                       " leaves the margin " + margin.to_string() + "; enlarge --margin");
      }
    }
    for (std::size_t y = 0; y < all.size(); ++y) {
      if (order.leq(wi, static_cast<int>(y)) && order.leq(static_cast<int>(y), x) && !box.contains(all[y])) {
        throw Error(ErrorCode::ClosureUncertified, alcove_id(all[y]) + " lies between " + alcove_id(all[wi]) + " and " +
                                                       alcove_id(all[x]) + " but outside the box " + box.to_string());
      }
    }
  }
  for (int x : chosen) {
    win.alcoves.push_back(all[x]);
    win.ids.push_back(alcove_id(all[x]));
  }
  std::vector<std::pair<int, int>> rel;
  for (std::size_t a = 0; a < chosen.size(); ++a) {
    for (std::size_t b = 0; b < chosen.size(); ++b) {
      if (order.less(chosen[a], chosen[b])) rel.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  win.order = graph::Poset::from_relations(chosen.size(), rel);
  win.base = win.index_of(w);
  return win;
}

int weyl_coordinate(const roots::WeylGroup& weyl, const Address& a) {
  const RootSystem& rs = weyl.root_system();
  auto c = sample_point(rs, a);
  if (!c) throw Error(ErrorCode::DomainError, "not an alcove address");
  Point c0 = *sample_point(rs, Address(rs.num_positive(), 0));
  for (std::size_t u = 0; u < weyl.size(); ++u) {
    const auto& m = weyl.matrix(static_cast<int>(u));
    Point diff(rs.rank);
    for (int i = 0; i < rs.rank; ++i) {
      Rational s(0);
      for (int j = 0; j < rs.rank; ++j) s += Rational(m[i][j]) * c0[j];
      diff[i] = (*c)[i] - s;
    }
    Point coeffs = to_simple_roots(rs, diff);
    if (std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& r) { return r.is_integer(); })) return static_cast<int>(u);
  }
  throw Error(ErrorCode::DomainError, "no Weyl group coordinate for " + alcove_id(a));
}

PeriodicQuotient periodic_quotient(const Window& window) {
  const RootSystem& rs = window.rs;
  PeriodicQuotient out{graph::MomentGraph{}, roots::WeylGroup(rs), graph::MomentGraph{}, {}};
  auto& g = out.periodic;
  g.lattice_rank = rs.rank;
  g.vertices = window.ids;
  std::int64_t lo = window.box.lo, hi = window.box.hi;
  for (std::size_t i = 0; i < window.size(); ++i) {
    for (std::size_t k = 0; k < rs.num_positive(); ++k) {
      for (auto level = lo; level <= hi + 1; ++level) {
        int j = window.index_of(reflect_alcove(rs, window.alcoves[i], k, level));
        if (j > static_cast<int>(i)) g.edges.push_back({static_cast<int>(i), j, rs.positive_coroot(k)});
      }
    }
  }
  g.order_covers = window.order.covers();
  for (int s = 0; s < rs.rank; ++s) {
    graph::Label lambda(rs.rank, 0);
    lambda[s] = 1;
    std::vector<int> gen;
    for (const auto& a : window.alcoves) gen.push_back(window.index_of(translate_alcove(rs, a, lambda)));
    g.action_generators.push_back(gen);
  }
  out.weyl_graph = out.weyl.bruhat_graph();
  out.weyl_graph.order_covers.clear();
  for (const auto& a : window.alcoves) out.orbit_map.push_back(weyl_coordinate(out.weyl, a));
  return out;
}

}  // namespace sheafbm::alcove
