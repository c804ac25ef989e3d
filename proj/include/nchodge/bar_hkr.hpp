#pragma once

#include <compare>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nchodge/complex.hpp"
#include "nchodge/group.hpp"
#include "nchodge/mixed.hpp"
#include "nchodge/models.hpp"
#include "nchodge/poly.hpp"

namespace nchodge {

/// Group, coordinate weights and truncation window for bar chains.
struct BarContext {
  GroupSpec group;
  std::vector<Character> weights;
  int max_length = 4;  // L
  int max_degree = 6;  // D
  int order = 1;       // k: functions on the torus Lie algebra mod m^k

  int nvars() const { return static_cast<int>(weights.size()); }
};

/// psi (x) a_0 (x) ... (x) a_n with psi = delta_g (finite part) times z^zexp (torus part).
struct BarTerm {
  int sector = 0;
  std::vector<int> zexp;
  std::vector<Monomial> factors;

  int length() const { return static_cast<int>(factors.size()) - 1; }
  int degree() const;
  auto operator<=>(const BarTerm&) const = default;
  bool operator==(const BarTerm&) const = default;
};

struct BarChain {
  std::map<BarTerm, Scalar> terms;
  bool window_exceeded = false;

  void add(const BarTerm& t, const Scalar& c);
  BarChain& operator+=(const BarChain& o);
  BarChain& operator*=(const Scalar& c);
  bool is_zero() const { return terms.empty(); }
  bool operator==(const BarChain& o) const { return terms == o.terms; }
};

std::string to_string(const BarChain& c);

/// Up to `terms` random normalized chains of length <= max_length with exponents <= 2 and
/// small rational coefficients. `identity_only` keeps sector 0; `invariant` keeps terms of
/// total weight zero. Uses raw engine output only, so results are portable.
BarChain random_chain(const BarContext& ctx, std::mt19937& rng, int max_length, bool invariant,
                      bool identity_only = false, std::size_t terms = 4);

/// Normalized chains: factors a_1..a_n are nonconstant.
bool is_normalized(const BarTerm& t);

BarChain bar_differential(const BarContext& ctx, const BarChain& c);
/// Normalized g-twisted cyclic operator.
BarChain connes_B_bar(const BarContext& ctx, const BarChain& c);
BarChain delta_w_bar(const BarContext& ctx, const Poly& w, const BarChain& c);

/// z^zexp x^x dx_mask.
struct CartanTerm {
  std::vector<int> zexp;
  Monomial x;
  unsigned mask = 0;

  auto operator<=>(const CartanTerm&) const = default;
  bool operator==(const CartanTerm&) const = default;
};

struct CartanElement {
  std::map<CartanTerm, Scalar> terms;

  void add(const CartanTerm& t, const Scalar& c);
  CartanElement& operator+=(const CartanElement& o);
  bool is_zero() const { return terms.empty(); }
  bool operator==(const CartanElement& o) const { return terms == o.terms; }
};

std::string to_string(const CartanElement& e);

/// b_0 (x) ... (x) b_n -> (1/n!) b_0 db_1 ... db_n.
CartanElement hkr_classical(const BarContext& ctx, const BarChain& c);

/// Integral of prod t_i^{e_i} over 0 <= t_1 <= ... <= t_n <= 1.
/// (With the standard simplex {sum t_i <= 1} instead, the chain-map test fails.)
Scalar simplex_integral(std::span<const int> exponents);

/// psi b_0 (x) ... (x) b_n -> psi b_0 Int_{simplex} prod_i exp(t_i <a_i, z>) db_i, mod m^k.
CartanElement hkr_equivariant(const BarContext& ctx, const BarChain& c);

/// Cartan differential: contraction with dx_i -> -<a_i, z> x_i, mod m^k.
CartanElement cartan_contract(const BarContext& ctx, const CartanElement& w);

/// Invariant part of Sym(z*)/m^k (x) forms, d = contraction, B = de Rham.
MixedComplex cartan_complex(const ModelSpec& spec, int k);

/// Normalized invariant bar chains of length <= L and degree <= D with b; pieces keyed by
/// (length, degree, sector). Top-length pieces are marked as missing incoming boundaries.
GradedComplex bar_complex(const BarContext& ctx);

}  // namespace nchodge
