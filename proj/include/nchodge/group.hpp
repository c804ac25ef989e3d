#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "nchodge/scalar.hpp"

namespace nchodge {

/// (G_m)^r x Z/m_1 x ... x Z/m_s.
struct GroupSpec {
  int torus_rank = 0;
  std::vector<int> finite_factors;

  int finite_order() const;
  bool is_trivial() const { return torus_rank == 0 && finite_factors.empty(); }
  /// Validates r >= 0 and every m_j >= 2.
  void validate() const;
};

/// Element of the finite part, as residues g_j mod m_j.
using FiniteElement = std::vector<int>;

/// All elements of the finite part in lexicographic order; index 0 is the identity.
std::vector<FiniteElement> finite_elements(const GroupSpec& group);

struct Character {
  std::vector<long> torus;
  std::vector<long> finite;

  auto operator<=>(const Character&) const = default;
  bool operator==(const Character&) const = default;
};

Character zero_character(const GroupSpec& group);
/// Reduces finite residues into [0, m_j).
Character normalized(Character c, const GroupSpec& group);
Character add(const Character& a, const Character& b, const GroupSpec& group);
Character scaled(const Character& a, long k, const GroupSpec& group);
bool is_zero(const Character& c);
std::string to_string(const Character& c);

/// chi(g) = exp(2 pi i * phase), phase in [0, 1).
Scalar phase(const Character& c, const GroupSpec& group, const FiniteElement& g);

/// chi(g) when it is rational (+1 or -1); nullopt for other roots of unity.
std::optional<int> rational_value(const Character& c, const GroupSpec& group, const FiniteElement& g);

}  // namespace nchodge
