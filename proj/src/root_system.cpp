#include "sheafbm/root_system.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

#include "sheafbm/error.hpp"

namespace sheafbm::roots {
namespace {

using IMat = std::vector<std::vector<std::int64_t>>;

IMat identity(int n) {
  IMat m(n, std::vector<std::int64_t>(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IMat mul(const IMat& a, const IMat& b) {
  std::size_t n = a.size();
  IMat c(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

// lambda -> lambda - <lambda, beta^vee> beta on fundamental-weight coordinates
IMat reflection_matrix(const Label& root_omega, const Label& coroot) {
  int n = static_cast<int>(coroot.size());
  IMat m = identity(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) m[k][j] -= coroot[j] * root_omega[k];
  }
  return m;
}

std::vector<std::vector<std::int64_t>> cartan_of(CartanType t) {
  switch (t) {
    case CartanType::A1: return {{2}};
    case CartanType::A2: return {{2, -1}, {-1, 2}};
    case CartanType::A3: return {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
    case CartanType::B2: return {{2, -2}, {-1, 2}};
    case CartanType::G2: return {{2, -1}, {-3, 2}};
  }
  throw Error(ErrorCode::UnsupportedType, "unknown Cartan type");
}

}  // namespace

CartanType parse_type(const std::string& text) {
  if (text == "A1") return CartanType::A1;
  if (text == "A2") return CartanType::A2;
  if (text == "A3") return CartanType::A3;
  if (text == "B2") return CartanType::B2;
  if (text == "G2") return CartanType::G2;
  throw Error(ErrorCode::UnsupportedType, "unsupported root system type '" + text + "'");
}

std::string to_string(CartanType t) {
  switch (t) {
    case CartanType::A1: return "A1";
    case CartanType::A2: return "A2";
    case CartanType::A3: return "A3";
    case CartanType::B2: return "B2";
    case CartanType::G2: return "G2";
  }
  return "?";
}

int RootSystem::positive_index_of_coroot(const Label& c) const {
  Label canon = graph::canonical_label(c);
  for (std::size_t k = 0; k < positive.size(); ++k) {
    if (coroots[positive[k]] == canon) return static_cast<int>(k);
  }
  return -1;
}

RootSystem build_root_system(CartanType type) {
  RootSystem rs;
  rs.type = type;
  rs.cartan = cartan_of(type);
  rs.rank = static_cast<int>(rs.cartan.size());
  int n = rs.rank;
  const auto& a = rs.cartan;
  // orbit of the simple (root, coroot) pairs under the simple reflections
  std::set<std::pair<Label, Label>> seen;
  std::deque<std::pair<Label, Label>> queue;
  for (int i = 0; i < n; ++i) {
    Label r(n, 0), c(n, 0);
    r[i] = 1;
    c[i] = 1;
    if (seen.insert({r, c}).second) queue.push_back({r, c});
  }
  while (!queue.empty()) {
    auto [r, c] = queue.front();
    queue.pop_front();
    for (int i = 0; i < n; ++i) {
      std::int64_t ri = 0, ci = 0;
      for (int j = 0; j < n; ++j) {
        ri += r[j] * a[j][i];  // <beta, alpha_i^vee>
        ci += c[j] * a[i][j];  // <alpha_i, beta^vee>
      }
      Label r2 = r, c2 = c;
      r2[i] -= ri;
      c2[i] -= ci;
      if (seen.insert({r2, c2}).second) queue.push_back({r2, c2});
    }
  }
  for (const auto& [r, c] : seen) {
    rs.roots.push_back(r);
    rs.coroots.push_back(c);
    Label omega(n, 0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) omega[i] += r[j] * a[j][i];
    }
    rs.roots_omega.push_back(omega);
  }
  for (std::size_t k = 0; k < rs.roots.size(); ++k) {
    const auto& r = rs.roots[k];
    if (std::all_of(r.begin(), r.end(), [](std::int64_t x) { return x >= 0; })) rs.positive.push_back(static_cast<int>(k));
  }
  auto height = [&](int k) {
    std::int64_t h = 0;
    for (auto x : rs.roots[k]) h += x;
    return h;
  };
  std::sort(rs.positive.begin(), rs.positive.end(), [&](int x, int y) {
    if (height(x) != height(y)) return height(x) < height(y);
    return rs.roots[x] > rs.roots[y];
  });
  return rs;
}

WeylGroup::WeylGroup(const RootSystem& rs) : rs_(rs) {
  int n = rs.rank;
  std::vector<IMat> gens;
  for (int i = 0; i < n; ++i) {
    Label c(n, 0);
    c[i] = 1;
    Label r(n);
    for (int k = 0; k < n; ++k) r[k] = rs.cartan[i][k];
    gens.push_back(reflection_matrix(r, c));
  }
  mats_.push_back(identity(n));
  lookup_[mats_[0]] = 0;
  length_.push_back(0);
  for (std::size_t head = 0; head < mats_.size(); ++head) {
    for (int i = 0; i < n; ++i) {
      IMat y = mul(gens[i], mats_[head]);
      if (lookup_.count(y)) continue;
      lookup_[y] = static_cast<int>(mats_.size());
      length_.push_back(length_[head] + 1);
      mats_.push_back(std::move(y));
    }
  }
  for (int i = 0; i < n; ++i) simple_.push_back(lookup_.at(gens[i]));
  names_.assign(size(), "");
  names_[0] = "e";
  for (std::size_t y = 1; y < size(); ++y) {
    std::string best;
    for (int i = 0; i < n; ++i) {
      int ys = multiply(static_cast<int>(y), simple_[i]);
      if (length_[ys] >= length_[y]) continue;
      std::string cand = (ys == 0 ? "" : names_[ys]) + "s" + std::to_string(i + 1);
      if (best.empty() || cand < best) best = cand;
    }
    names_[y] = best;
  }
  longest_ = static_cast<int>(std::max_element(length_.begin(), length_.end()) - length_.begin());
  reflect_left_.resize(rs.num_positive());
  for (std::size_t k = 0; k < rs.num_positive(); ++k) {
    IMat s = reflection_matrix(rs.positive_root_omega(k), rs.positive_coroot(k));
    for (std::size_t x = 0; x < size(); ++x) reflect_left_[k].push_back(lookup_.at(mul(s, mats_[x])));
  }
}

int WeylGroup::index_of_name(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

int WeylGroup::from_word(const std::string& word) const {
  if (word == "e" || word.empty()) return 0;
  int x = 0;
  std::size_t pos = 0;
  while (pos < word.size()) {
    if (word[pos] != 's') throw Error(ErrorCode::InputError, "cannot parse Weyl group word '" + word + "'");
    std::size_t end = pos + 1;
    while (end < word.size() && std::isdigit(static_cast<unsigned char>(word[end]))) ++end;
    if (end == pos + 1) throw Error(ErrorCode::InputError, "cannot parse Weyl group word '" + word + "'");
    int i = std::stoi(word.substr(pos + 1, end - pos - 1));
    if (i < 1 || i > rs_.rank) throw Error(ErrorCode::InputError, "simple reflection index out of range in '" + word + "'");
    x = multiply(x, simple_[i - 1]);
    pos = end;
  }
  return x;
}

int WeylGroup::multiply(int x, int y) const { return lookup_.at(mul(mats_[x], mats_[y])); }

int WeylGroup::inverse(int x) const {
  for (std::size_t y = 0; y < size(); ++y) {
    if (multiply(x, static_cast<int>(y)) == 0) return static_cast<int>(y);
  }
  throw Error(ErrorCode::DomainError, "element without inverse");
}

std::vector<std::pair<int, int>> WeylGroup::bruhat_covers() const {
  std::set<std::pair<int, int>> out;
  for (std::size_t k = 0; k < rs_.num_positive(); ++k) {
    for (std::size_t x = 0; x < size(); ++x) {
      int y = reflect_left_[k][x];
      if (length_[y] == length_[x] + 1) out.emplace(static_cast<int>(x), y);
    }
  }
  return {out.begin(), out.end()};
}

graph::Poset WeylGroup::bruhat_order() const { return graph::Poset::from_relations(size(), bruhat_covers()); }

graph::MomentGraph WeylGroup::bruhat_graph() const {
  graph::MomentGraph g;
  g.lattice_rank = rs_.rank;
  g.vertices = names_;
  for (std::size_t k = 0; k < rs_.num_positive(); ++k) {
    for (std::size_t x = 0; x < size(); ++x) {
      int y = reflect_left_[k][x];
      if (static_cast<int>(x) < y) g.edges.push_back({static_cast<int>(x), y, rs_.positive_coroot(k)});
    }
  }
  g.order_covers = bruhat_covers();
  return g;
}

}  // namespace sheafbm::roots
