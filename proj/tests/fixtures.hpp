#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nchodge/models.hpp"

namespace fixtures {

inline nchodge::Character tor(std::vector<long> t) { return nchodge::Character{std::move(t), {}}; }
inline nchodge::Character fin(std::vector<long> f) { return nchodge::Character{{}, std::move(f)}; }

inline nchodge::ModelSpec spec(nchodge::GroupSpec g, std::vector<nchodge::Character> w, nchodge::ModelKind kind,
                               std::optional<int> cap = {}, const std::string& potential = "") {
  nchodge::ModelSpec s;
  s.group = std::move(g);
  s.weights = std::move(w);
  s.kind = kind;
  s.degree_cap = cap;
  if (!potential.empty()) s.potential = nchodge::parse_poly(potential, static_cast<int>(s.weights.size()));
  return s;
}

/// n coordinates with trivial group.
inline nchodge::ModelSpec affine(int n, nchodge::ModelKind kind, int cap, const std::string& potential = "") {
  return spec(nchodge::GroupSpec{}, std::vector<nchodge::Character>(n), kind, cap, potential);
}

}  // namespace fixtures
