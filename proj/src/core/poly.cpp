#include "nchodge/poly.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "nchodge/errors.hpp"

namespace nchodge {

int total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0); }

bool GrlexGreater::operator()(const Monomial& a, const Monomial& b) const {
  const int da = total_degree(a), db = total_degree(b);
  if (da != db) return da > db;
  return a > b;
}

Poly Poly::constant(int nvars, const Scalar& c) {
  Poly p(nvars);
  p.add_term(Monomial(nvars, 0), c);
  return p;
}

Poly Poly::variable(int nvars, int index) {
  Monomial m(nvars, 0);
  m.at(index) = 1;
  return monomial(m, 1);
}

Poly Poly::monomial(const Monomial& m, const Scalar& c) {
  Poly p(static_cast<int>(m.size()));
  p.add_term(m, c);
  return p;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, total_degree(m));
  return d;
}

Scalar Poly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Scalar(0) : it->second;
}

void Poly::add_term(const Monomial& m, const Scalar& c) {
  if (static_cast<int>(m.size()) != nvars_) throw std::invalid_argument("monomial arity mismatch");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  if (nvars_ == 0 && terms_.empty()) nvars_ = o.nvars_;
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (nvars_ == 0 && terms_.empty()) nvars_ = o.nvars_;
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const Scalar& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out(std::max(a.nvars_, b.nvars_));
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m(ma);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
      out.add_term(m, ca * cb);
    }
  return out;
}

Poly Poly::pow(unsigned e) const {
  Poly result = constant(nvars_, 1);
  for (unsigned i = 0; i < e; ++i) result = result * *this;
  return result;
}

Poly Poly::derivative(int var) const {
  Poly out(nvars_);
  for (const auto& [m, c] : terms_) {
    if (m.at(var) == 0) continue;
    Monomial d(m);
    --d[var];
    out.add_term(d, c * m[var]);
  }
  return out;
}

Poly Poly::substitute(std::span<const Poly> images) const {
  if (static_cast<int>(images.size()) != nvars_) throw std::invalid_argument("substitute: arity mismatch");
  const int target = images.empty() ? 0 : images.front().nvars();
  Poly out(target);
  for (const auto& [m, c] : terms_) {
    Poly t = constant(target, c);
    for (int i = 0; i < nvars_; ++i)
      if (m[i] > 0) t = t * images[i].pow(m[i]);
    out += t;
  }
  return out;
}

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    Scalar mag = abs(c);
    const bool is_const = total_degree(m) == 0;
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    bool need_star = false;
    if (mag != 1 || is_const) {
      os << mag.get_str();
      need_star = true;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (need_star) os << '*';
      os << 'x' << (i + 1);
      if (m[i] > 1) os << '^' << m[i];
      need_star = true;
    }
  }
  return os.str();
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, int nvars) : text_(text), nvars_(nvars) {}

  Poly parse() {
    Poly p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("polynomial parse error at column " + std::to_string(pos_ + 1) + ": " + what + " in '" +
                     std::string(text_) + "'");
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char ch) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::string digits() {
    std::string s;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) s += text_[pos_++];
    return s;
  }

  Poly expr() {
    Poly p(nvars_);
    bool negate = false;
    if (accept('-'))
      negate = true;
    else
      accept('+');
    Poly t = term();
    p += negate ? -t : t;
    while (true) {
      if (accept('+'))
        p += term();
      else if (accept('-'))
        p -= term();
      else
        break;
    }
    return p;
  }

  Poly term() {
    Poly p = factor();
    while (accept('*')) p = p * factor();
    return p;
  }

  Poly factor() {
    Poly b = base();
    if (accept('^')) {
      skip_ws();
      const std::string e = digits();
      if (e.empty()) fail("expected exponent");
      b = b.pow(static_cast<unsigned>(std::stoul(e)));
    }
    return b;
  }

  Poly base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char ch = text_[pos_];
    if (ch == '(') {
      ++pos_;
      Poly p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string num = digits();
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        const std::string den = digits();
        if (den.empty()) fail("expected denominator");
        num += "/" + den;
      }
      return Poly::constant(nvars_, parse_scalar(num));
    }
    if (ch == 'x') {
      ++pos_;
      const std::string idx = digits();
      if (idx.empty()) fail("expected variable index after 'x'");
      const int i = std::stoi(idx);
      if (i < 1 || i > nvars_) fail("variable x" + idx + " out of range 1.." + std::to_string(nvars_));
      return Poly::variable(nvars_, i - 1);
    }
    fail(std::string("unexpected '") + ch + "'");
  }

  std::string_view text_;
  int nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, int nvars) { return PolyParser(text, nvars).parse(); }

Character monomial_weight(const Monomial& m, std::span<const Character> weights, const GroupSpec& group) {
  Character w = zero_character(group);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] != 0) w = add(w, scaled(weights[i], m[i], group), group);
  return w;
}

bool poly_weight_check(const Poly& p, std::span<const Character> weights, const GroupSpec& group,
                       const Character& expected) {
  const Character target = normalized(expected, group);
  for (const auto& [m, c] : p.terms())
    if (monomial_weight(m, weights, group) != target) return false;
  return true;
}

Poly divide_by_difference(const Poly& num, int var_a, int var_b) {
  // Synthetic division in var_a: each term c*m with var_a-exponent e >= 1 contributes
  // q = c*m/var_a to the quotient, and leaves c*m*var_b/var_a behind.
  Poly quotient(num.nvars());
  Poly rest = num;
  while (true) {
    auto it = std::find_if(rest.terms().begin(), rest.terms().end(),
                           [&](const auto& t) { return t.first[var_a] > 0; });
    if (it == rest.terms().end()) break;
    Monomial q = it->first;
    const Scalar c = it->second;
    --q[var_a];
    Poly qt = Poly::monomial(q, c);
    quotient += qt;
    rest -= qt * (Poly::variable(num.nvars(), var_a) - Poly::variable(num.nvars(), var_b));
  }
  if (!rest.is_zero())
    throw InvariantViolation("divided difference: nonzero remainder " + to_string(rest));
  return quotient;
}

Poly divided_difference(const Poly& w, int j) {
  const int n = w.nvars();
  if (j < 1 || j > n) throw std::invalid_argument("divided_difference: index out of range");
  const int jj = j - 1;
  auto images = [&](int first_y) {
    // x_i for i < first_y, y_i for i >= first_y
    std::vector<Poly> img;
    for (int i = 0; i < n; ++i) img.push_back(Poly::variable(2 * n, i < first_y ? i : n + i));
    return img;
  };
  const auto hi = images(jj);
  const auto lo = images(jj + 1);
  const Poly numerator = w.substitute(hi) - w.substitute(lo);
  return divide_by_difference(numerator, n + jj, jj);
}

}  // namespace nchodge
