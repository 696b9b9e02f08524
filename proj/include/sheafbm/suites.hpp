#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sheafbm/sheaf.hpp"

// Randomized invariant suites over generated sheaves. A fixture is a random
// subset of one of a few base windows with a random w and cutoff; half of the
// fixtures carry redundant generators, which keeps every sheaf axiom but
// breaks minimality.

namespace sheafbm::suites {

struct Instance {
  sheaf::CofilteredSheaf sheaf;
  bool redundant = false;
};

const std::vector<sheaf::SheafWindow>& base_windows();
// Draws until a build succeeds; `mutate` drops one generator at a point above w.
Instance random_instance(std::mt19937_64& rng, bool allow_redundant = true, bool mutate = false);
// Union of the lower sets of a few random points (possibly empty).
std::vector<int> random_open(const graph::Poset& order, std::size_t n, std::mt19937_64& rng);

struct SuiteResult {
  std::string name;
  int runs = 0;
  int failures = 0;
  std::string first_failure;
  bool ok() const { return failures == 0 && runs > 0; }
};

// gluing, flabby, fiber_square, fitting, delta_match, extension, reordering, mutations
const std::vector<std::string>& suite_names();
// Throws DOMAIN_ERROR for an unknown name.
SuiteResult run_suite(const std::string& name, std::uint64_t seed, int runs, bool inject_mutation = false);

}  // namespace sheafbm::suites
