#include "nchodge/group.hpp"

#include <numeric>
#include <sstream>

#include "nchodge/errors.hpp"

namespace nchodge {

int GroupSpec::finite_order() const {
  return std::accumulate(finite_factors.begin(), finite_factors.end(), 1, std::multiplies<>());
}

void GroupSpec::validate() const {
  if (torus_rank < 0) throw InputError("torus_rank must be nonnegative");
  for (int m : finite_factors)
    if (m < 2) throw InputError("finite factors must be >= 2, got " + std::to_string(m));
}

std::vector<FiniteElement> finite_elements(const GroupSpec& group) {
  std::vector<FiniteElement> out;
  FiniteElement g(group.finite_factors.size(), 0);
  const int order = group.finite_order();
  out.reserve(order);
  for (int i = 0; i < order; ++i) {
    out.push_back(g);
    // odometer, last factor fastest
    for (std::size_t j = g.size(); j-- > 0;) {
      if (++g[j] < group.finite_factors[j]) break;
      g[j] = 0;
    }
  }
  return out;
}

Character zero_character(const GroupSpec& group) {
  return Character{std::vector<long>(group.torus_rank, 0), std::vector<long>(group.finite_factors.size(), 0)};
}

Character normalized(Character c, const GroupSpec& group) {
  for (std::size_t j = 0; j < c.finite.size(); ++j) {
    const long m = group.finite_factors.at(j);
    c.finite[j] = ((c.finite[j] % m) + m) % m;
  }
  return c;
}

Character add(const Character& a, const Character& b, const GroupSpec& group) {
  Character c = a;
  for (std::size_t i = 0; i < c.torus.size(); ++i) c.torus[i] += b.torus.at(i);
  for (std::size_t j = 0; j < c.finite.size(); ++j) c.finite[j] += b.finite.at(j);
  return normalized(std::move(c), group);
}

Character scaled(const Character& a, long k, const GroupSpec& group) {
  Character c = a;
  for (auto& t : c.torus) t *= k;
  for (auto& f : c.finite) f *= k;
  return normalized(std::move(c), group);
}

bool is_zero(const Character& c) {
  for (long t : c.torus)
    if (t != 0) return false;
  for (long f : c.finite)
    if (f != 0) return false;
  return true;
}

std::string to_string(const Character& c) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c.torus.size(); ++i) os << (i ? "," : "") << c.torus[i];
  if (!c.finite.empty()) {
    os << ';';
    for (std::size_t j = 0; j < c.finite.size(); ++j) os << (j ? "," : "") << c.finite[j];
  }
  os << ')';
  return os.str();
}

Scalar phase(const Character& c, const GroupSpec& group, const FiniteElement& g) {
  Scalar p = 0;
  for (std::size_t j = 0; j < group.finite_factors.size(); ++j)
    p += Scalar(c.finite.at(j) * static_cast<long>(g.at(j)), group.finite_factors[j]);
  p.canonicalize();
  // fractional part
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), p.get_num_mpz_t(), p.get_den_mpz_t());
  return p - Scalar(fl);
}

std::optional<int> rational_value(const Character& c, const GroupSpec& group, const FiniteElement& g) {
  const Scalar p = phase(c, group, g);
  if (p == 0) return 1;
  if (p == Scalar(1, 2)) return -1;
  return std::nullopt;
}

}  // namespace nchodge
