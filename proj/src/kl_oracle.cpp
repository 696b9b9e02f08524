#include "sheafbm/kl_oracle.hpp"

#include <algorithm>
#include <cctype>

#include "sheafbm/error.hpp"
#include "sheafbm/exact_linalg.hpp"

namespace sheafbm::kl {
namespace {

using linalg::FieldSpec;
using linalg::Matrix;
using linalg::Rational;

std::vector<std::vector<int>> cartan(const std::string& type) {
  if (type == "A1") return {{2}};
  if (type == "A2") return {{2, -1}, {-1, 2}};
  if (type == "A3") return {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
  if (type == "B2") return {{2, -2}, {-1, 2}};
  if (type == "G2") return {{2, -1}, {-3, 2}};
  throw Error(ErrorCode::UnsupportedType, "no Weyl group of type '" + type + "'");
}

void trim(KLPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

void add_shifted(KLPoly& acc, const KLPoly& p, int shift, std::int64_t factor) {
  if (p.empty() || factor == 0) return;
  if (acc.size() < p.size() + shift) acc.resize(p.size() + shift, 0);
  for (std::size_t i = 0; i < p.size(); ++i) acc[i + shift] += factor * p[i];
}

}  // namespace

std::string poly_to_string(const KLPoly& p) {
  std::string out;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0) continue;
    if (!out.empty()) out += p[j] < 0 ? " - " : " + ";
    else if (p[j] < 0) out += "-";
    std::int64_t c = p[j] < 0 ? -p[j] : p[j];
    std::string mono = j == 0 ? "" : (j == 1 ? "q" : "q^" + std::to_string(j));
    if (c != 1 || mono.empty()) out += std::to_string(c);
    out += mono;
  }
  return out.empty() ? "0" : out;
}

CoxeterGroup::CoxeterGroup(const std::string& type) : type_(type) {
  auto a = cartan(type);
  rank_ = static_cast<int>(a.size());
  const FieldSpec Q = FieldSpec::rationals();
  // s_i(alpha_j) = alpha_j - <alpha_j, alpha_i^vee> alpha_i, images as columns
  std::vector<Matrix> gens;
  for (int i = 0; i < rank_; ++i) {
    Matrix s = Matrix::identity(Q, rank_);
    for (int j = 0; j < rank_; ++j) s.set(i, j, s(i, j) - Rational(a[j][i]));
    gens.push_back(std::move(s));
  }
  // all roots: orbit of the simple roots
  std::vector<linalg::Vector> roots;
  for (int i = 0; i < rank_; ++i) {
    linalg::Vector e(rank_, Rational(0));
    e[i] = Rational(1);
    roots.push_back(e);
  }
  for (std::size_t head = 0; head < roots.size(); ++head) {
    for (const auto& s : gens) {
      auto r = s.apply(roots[head]);
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
  }
  auto negative = [](const linalg::Vector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& c) { return c.sign() <= 0; });
  };
  std::vector<Matrix> elems{Matrix::identity(Q, rank_)};
  std::map<std::string, int> lookup{{elems[0].to_string(), 0}};
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& s : gens) {
      Matrix y = elems[head] * s;
      auto key = y.to_string();
      if (lookup.count(key)) continue;
      lookup[key] = static_cast<int>(elems.size());
      elems.push_back(std::move(y));
    }
  }
  std::size_t n = elems.size();
  for (const auto& m : elems) {
    int len = 0;
    for (const auto& r : roots) {
      if (!negative(r) && negative(m.apply(r))) ++len;
    }
    length_.push_back(len);
  }
  right_.assign(n, std::vector<int>(rank_));
  left_.assign(n, std::vector<int>(rank_));
  inverse_.assign(n, -1);
  for (std::size_t x = 0; x < n; ++x) {
    for (int i = 0; i < rank_; ++i) {
      right_[x][i] = lookup.at((elems[x] * gens[i]).to_string());
      left_[x][i] = lookup.at((gens[i] * elems[x]).to_string());
    }
  }
  const std::string id = elems[0].to_string();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if ((elems[x] * elems[y]).to_string() == id) inverse_[x] = static_cast<int>(y);
    }
  }
  longest_ = static_cast<int>(std::max_element(length_.begin(), length_.end()) - length_.begin());

  std::vector<int> by_length(n);
  for (std::size_t x = 0; x < n; ++x) by_length[x] = static_cast<int>(x);
  std::stable_sort(by_length.begin(), by_length.end(), [&](int x, int y) { return length_[x] < length_[y]; });
  names_.assign(n, "");
  for (int y : by_length) {
    if (length_[y] == 0) {
      names_[y] = "e";
      continue;
    }
    std::string best;
    for (int i = 0; i < rank_; ++i) {
      int ys = right_[y][i];
      if (length_[ys] > length_[y]) continue;
      std::string cand = (length_[ys] == 0 ? "" : names_[ys]) + "s" + std::to_string(i + 1);
      if (best.empty() || cand < best) best = cand;
    }
    names_[y] = best;
  }

  // Bruhat order by the lifting property: if ws < w then x <= w iff min(x, xs) <= ws
  leq_.assign(n * n, 0);
  for (int w : by_length) {
    for (std::size_t x = 0; x < n; ++x) {
      bool r;
      if (length_[w] == 0) {
        r = length_[x] == 0;
      } else {
        int s = 0;
        while (length_[right_[w][s]] > length_[w]) ++s;
        int v = right_[w][s];
        int xs = right_[x][s];
        int lower = length_[xs] < length_[x] ? xs : static_cast<int>(x);
        r = leq_[lower * n + v] != 0;
      }
      leq_[x * n + w] = r ? 1 : 0;
    }
  }
}

int CoxeterGroup::index_of_name(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

int CoxeterGroup::from_word(const std::string& word) const {
  int x = index_of_name("e");
  if (word == "e" || word.empty()) return x;
  std::size_t pos = 0;
  while (pos < word.size()) {
    std::size_t end = pos + 1;
    while (end < word.size() && std::isdigit(static_cast<unsigned char>(word[end]))) ++end;
    if (word[pos] != 's' || end == pos + 1) throw Error(ErrorCode::InputError, "cannot parse word '" + word + "'");
    int i = std::stoi(word.substr(pos + 1, end - pos - 1));
    if (i < 1 || i > rank_) throw Error(ErrorCode::InputError, "reflection index out of range in '" + word + "'");
    x = right_[x][i - 1];
    pos = end;
  }
  return x;
}

bool CoxeterGroup::leq(int x, int w) const { return leq_[static_cast<std::size_t>(x) * size() + w] != 0; }

const KLPoly& KLOracle::polynomial(int x, int w) {
  if (!g_.leq(x, w)) throw Error(ErrorCode::NotComparable, g_.name(x) + " is not below " + g_.name(w));
  auto key = std::make_pair(x, w);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  KLPoly p = compute(x, w);
  return memo_.emplace(key, std::move(p)).first->second;
}

std::int64_t KLOracle::mu(int x, int w) {
  if (!g_.leq(x, w) || x == w) return 0;
  int d = g_.length(w) - g_.length(x) - 1;
  if (d % 2 != 0) return 0;
  const KLPoly& p = polynomial(x, w);
  std::size_t j = static_cast<std::size_t>(d / 2);
  return j < p.size() ? p[j] : 0;
}

KLPoly KLOracle::compute(int x, int w) {
  if (x == w) return {1};
  auto get = [&](int a, int b) -> KLPoly { return g_.leq(a, b) ? polynomial(a, b) : KLPoly{}; };
  int s = 0;
  while (g_.length(g_.right(w, s)) > g_.length(w)) ++s;
  int v = g_.right(w, s);
  int xs = g_.right(x, s);
  int c = g_.length(xs) < g_.length(x) ? 1 : 0;
  KLPoly p;
  add_shifted(p, get(xs, v), 1 - c, 1);
  add_shifted(p, get(x, v), c, 1);
  for (std::size_t z = 0; z < g_.size(); ++z) {
    int zi = static_cast<int>(z);
    if (zi == v || !g_.leq(x, zi) || !g_.leq(zi, v)) continue;
    if (g_.length(g_.right(zi, s)) > g_.length(zi)) continue;
    std::int64_t m = mu(zi, v);
    if (m == 0) continue;
    add_shifted(p, get(x, zi), (g_.length(w) - g_.length(zi)) / 2, -m);
  }
  trim(p);
  return p;
}

std::vector<std::pair<int, KLPoly>> KLOracle::table(int w) {
  std::vector<std::pair<int, KLPoly>> out;
  for (std::size_t x = 0; x < g_.size(); ++x) {
    if (g_.leq(static_cast<int>(x), w)) out.emplace_back(static_cast<int>(x), polynomial(static_cast<int>(x), w));
  }
  return out;
}

}  // namespace sheafbm::kl
