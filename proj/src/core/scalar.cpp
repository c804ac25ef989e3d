#include "nchodge/scalar.hpp"

#include <cctype>

#include "nchodge/errors.hpp"

namespace nchodge {

std::string to_string(const Scalar& s) { return s.get_str(); }

Scalar parse_scalar(std::string_view text) {
  std::string t(text);
  if (!t.empty() && t.front() == '+') t.erase(t.begin());
  const auto slash = t.find('/');
  auto digits_ok = [](std::string_view s, bool allow_sign) {
    if (allow_sign && !s.empty() && s.front() == '-') s.remove_prefix(1);
    if (s.empty()) return false;
    for (char ch : s)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
  };
  std::string_view num = std::string_view(t).substr(0, slash);
  std::string_view den = slash == std::string::npos ? std::string_view("1") : std::string_view(t).substr(slash + 1);
  if (!digits_ok(num, true) || !digits_ok(den, false)) throw InputError("malformed rational '" + std::string(text) + "'");
  mpz_class n{std::string(num)}, d{std::string(den)};
  if (d == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  Scalar q(n, d);
  q.canonicalize();
  return q;
}

Scalar factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Scalar(f);
}

}  // namespace nchodge
