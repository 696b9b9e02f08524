#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sheafbm/moment_graph.hpp"

namespace sheafbm::roots {

using graph::Label;

enum class CartanType { A1, A2, A3, B2, G2 };

// "A1", "A2", "A3", "B2", "G2"; anything else is UNSUPPORTED_TYPE.
CartanType parse_type(const std::string& text);
std::string to_string(CartanType t);

// Roots are stored in simple-root and fundamental-weight coordinates, coroots
// in simple-coroot coordinates. roots[i] and coroots[i] correspond.
struct RootSystem {
  CartanType type = CartanType::A1;
  int rank = 1;
  std::vector<std::vector<std::int64_t>> cartan;  // cartan[i][j] = <alpha_i, alpha_j^vee>
  std::vector<Label> roots;        // simple-root coordinates
  std::vector<Label> roots_omega;  // fundamental-weight coordinates
  std::vector<Label> coroots;      // simple-coroot coordinates
  std::vector<int> positive;       // indices into roots, by height then lex descending

  std::size_t num_positive() const { return positive.size(); }
  const Label& positive_coroot(std::size_t k) const { return coroots[positive[k]]; }
  const Label& positive_root_omega(std::size_t k) const { return roots_omega[positive[k]]; }
  // Index k into `positive` for a coroot given up to sign; -1 if not a coroot.
  int positive_index_of_coroot(const Label& c) const;
};

RootSystem build_root_system(CartanType type);

// <lambda, beta^vee> for lambda in fundamental-weight coordinates and
// beta^vee in simple-coroot coordinates.
template <class T>
T pairing(const std::vector<T>& lambda, const Label& coroot) {
  T s = T(0);
  for (std::size_t i = 0; i < coroot.size(); ++i) s += lambda[i] * T(coroot[i]);
  return s;
}

// Finite Weyl group acting on fundamental-weight coordinates by integer
// matrices. Elements are numbered in breadth-first order from the identity.
class WeylGroup {
 public:
  explicit WeylGroup(const RootSystem& rs);

  const RootSystem& root_system() const { return rs_; }
  std::size_t size() const { return mats_.size(); }
  int length(int x) const { return length_[x]; }
  // Lexicographically smallest reduced word, "e" for the identity.
  const std::string& name(int x) const { return names_[x]; }
  int index_of_name(const std::string& name) const;  // -1 if absent
  // Parses words like "s2s1s3s2" (any word, not necessarily reduced).
  int from_word(const std::string& word) const;
  int longest() const { return longest_; }
  int multiply(int x, int y) const;
  int inverse(int x) const;
  int simple(int i) const { return simple_[i]; }
  // s_beta * x for the k-th positive root.
  int reflect_left(std::size_t k, int x) const { return reflect_left_[k][x]; }
  const std::vector<std::vector<std::int64_t>>& matrix(int x) const { return mats_[x]; }

  // Bruhat order as cover pairs (lower, upper).
  std::vector<std::pair<int, int>> bruhat_covers() const;
  graph::Poset bruhat_order() const;
  // Moment graph: vertices named by reduced words, edges x -- s_beta x
  // labeled beta^vee, Bruhat order attached.
  graph::MomentGraph bruhat_graph() const;

 private:
  RootSystem rs_;
  std::vector<std::vector<std::vector<std::int64_t>>> mats_;
  std::map<std::vector<std::vector<std::int64_t>>, int> lookup_;
  std::vector<int> length_;
  std::vector<std::string> names_;
  std::vector<int> simple_;
  std::vector<std::vector<int>> reflect_left_;
  int longest_ = 0;
};

}  // namespace sheafbm::roots
