#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nchodge/group.hpp"
#include "nchodge/scalar.hpp"

namespace nchodge {

using Monomial = std::vector<int>;

int total_degree(const Monomial& m);

/// Graded lexicographic order: larger total degree first, then lexicographically larger first.
struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial over Q in a fixed number of variables.
/// Terms iterate in grlex-descending order; zero coefficients are never stored.
class Poly {
 public:
  using Terms = std::map<Monomial, Scalar, GrlexGreater>;

  Poly() = default;
  explicit Poly(int nvars) : nvars_(nvars) {}

  static Poly constant(int nvars, const Scalar& c);
  static Poly variable(int nvars, int index);
  static Poly monomial(const Monomial& m, const Scalar& c);

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  Scalar coefficient(const Monomial& m) const;

  void add_term(const Monomial& m, const Scalar& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Scalar& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Scalar& c) { return a *= c; }
  friend Poly operator*(const Scalar& c, Poly a) { return a *= c; }
  Poly operator-() const { return *this * Scalar(-1); }
  bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  Poly pow(unsigned e) const;
  Poly derivative(int var) const;
  /// Replaces variable i by images[i]; all images must share one variable count.
  Poly substitute(std::span<const Poly> images) const;

 private:
  int nvars_ = 0;
  Terms terms_;
};

std::string to_string(const Poly& p);

/// Parses the minimal grammar: integers/rationals, x1..xn, + - * ^ and parentheses.
Poly parse_poly(std::string_view text, int nvars);

/// Weight of a monomial given one character per variable.
Character monomial_weight(const Monomial& m, std::span<const Character> weights, const GroupSpec& group);

/// True iff every monomial of p has weight `expected`.
bool poly_weight_check(const Poly& p, std::span<const Character> weights, const GroupSpec& group,
                       const Character& expected);

/// A_j(W) in variables x_1..x_n, y_1..y_n (y_i has index n + i - 1); j is 1-based.
Poly divided_difference(const Poly& w, int j);

/// Exact quotient num / (var_a - var_b). Throws InvariantViolation on nonzero remainder.
Poly divide_by_difference(const Poly& num, int var_a, int var_b);

}  // namespace nchodge
