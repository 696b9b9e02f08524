#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

// Kazhdan-Lusztig polynomials of finite Weyl groups. This code path shares
// nothing with the sheaf engine beyond exact linear algebra.

namespace sheafbm::kl {

using KLPoly = std::vector<std::int64_t>;  // coefficient of q^j at index j; no trailing zeros

std::string poly_to_string(const KLPoly& p);  // "1 + q + 2q^2"

// Weyl group in its reflection representation on the span of the simple roots.
class CoxeterGroup {
 public:
  // "A1", "A2", "A3", "B2", "G2"
  explicit CoxeterGroup(const std::string& type);

  const std::string& type() const { return type_; }
  int rank() const { return rank_; }
  std::size_t size() const { return length_.size(); }
  int length(int x) const { return length_[x]; }
  const std::string& name(int x) const { return names_[x]; }
  int index_of_name(const std::string& name) const;
  int from_word(const std::string& word) const;
  int right(int x, int s) const { return right_[x][s]; }  // x s
  int left(int s, int x) const { return left_[x][s]; }    // s x
  int inverse(int x) const { return inverse_[x]; }
  int longest() const { return longest_; }
  bool leq(int x, int w) const;

 private:
  std::string type_;
  int rank_ = 0;
  std::vector<int> length_;
  std::vector<std::string> names_;
  std::vector<std::vector<int>> right_, left_;
  std::vector<int> inverse_;
  int longest_ = 0;
  std::vector<signed char> leq_;
};

class KLOracle {
 public:
  explicit KLOracle(const CoxeterGroup& group) : g_(group) {}

  // Throws NOT_COMPARABLE unless x <= w.
  const KLPoly& polynomial(int x, int w);
  std::int64_t mu(int x, int w);
  // (x, P_{x,w}) for all x <= w, in group order.
  std::vector<std::pair<int, KLPoly>> table(int w);

 private:
  KLPoly compute(int x, int w);
  const CoxeterGroup& g_;
  std::map<std::pair<int, int>, KLPoly> memo_;
};

}  // namespace sheafbm::kl
