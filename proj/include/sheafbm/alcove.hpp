#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sheafbm/exact_linalg.hpp"
#include "sheafbm/moment_graph.hpp"
#include "sheafbm/root_system.hpp"

namespace sheafbm::alcove {

using linalg::Rational;
using roots::RootSystem;
using Point = std::vector<Rational>;        // fundamental-weight coordinates
using Address = std::vector<std::int64_t>;  // k_beta = floor <c, beta^vee>, positive coroots in RootSystem order

struct Bounds {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool contains(const Address& a) const;
  bool contains(const Bounds& b) const { return lo <= b.lo && b.hi <= hi; }
  std::string to_string() const;
};

// "lo..hi"
Bounds parse_bounds(const std::string& text);

// Rank 1 and 2 only; rank 3 root systems raise UNSUPPORTED_TYPE.
void require_affine_rank(const RootSystem& rs);

// Exact barycenter of the alcove; nullopt if no alcove has this address.
std::optional<Point> sample_point(const RootSystem& rs, const Address& a);
Address address_of(const RootSystem& rs, const Point& interior);
Address reflect_alcove(const RootSystem& rs, const Address& a, std::size_t k, std::int64_t level);
// lambda in simple-root coordinates
Address translate_alcove(const RootSystem& rs, const Address& a, const graph::Label& lambda);

// "A3" in rank 1, "A(0,1,1)" otherwise
std::string alcove_id(const Address& a);
// Accepts an id as above, "fundamental", or a bare comma-separated address.
Address parse_alcove(const RootSystem& rs, const std::string& text);

// All alcoves whose address entries lie in [lo, hi], sorted.
std::vector<Address> enumerate_box(const RootSystem& rs, const Bounds& box);

struct Window {
  RootSystem rs;
  Bounds box;
  Bounds margin;
  std::vector<Address> alcoves;  // sorted by address
  std::vector<std::string> ids;
  int base = 0;
  graph::Poset order;             // generic Bruhat order restricted to the window
  std::size_t margin_size = 0;    // alcoves used for the order closure

  std::size_t size() const { return alcoves.size(); }
  int index_of(const Address& a) const;
  // Keys for the lexicographic-on-address linear extension.
  std::vector<std::vector<std::int64_t>> keys() const;
};

// The order is generated by A < s_{beta,n}(A) for A on the negative side,
// with both ends in the margin box. Throws W_NOT_IN_BOX, CLOSURE_UNCERTIFIED.
Window build_window(const RootSystem& rs, const Address& w, const Bounds& box, const Bounds& margin);

// The Weyl group element u with A = t_lambda u(A_0).
int weyl_coordinate(const roots::WeylGroup& weyl, const Address& a);

struct PeriodicQuotient {
  graph::MomentGraph periodic;    // window alcoves, reflection edges, order, translation generators
  roots::WeylGroup weyl;
  graph::MomentGraph weyl_graph;  // quotient: W with edges x -- s_beta x, no order
  std::vector<int> orbit_map;     // window index -> Weyl group element
};

PeriodicQuotient periodic_quotient(const Window& window);

}  // namespace sheafbm::alcove
