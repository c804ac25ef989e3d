#include "nchodge/bar_hkr.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

#include "nchodge/errors.hpp"

namespace nchodge {

namespace {

using ZPoly = std::map<std::vector<int>, Scalar>;

int zdeg(const std::vector<int>& z) { return std::accumulate(z.begin(), z.end(), 0); }

Monomial product(const Monomial& a, const Monomial& b) {
  Monomial m = a;
  for (std::size_t i = 0; i < m.size(); ++i) m[i] += b[i];
  return m;
}

bool is_constant(const Monomial& m) {
  return std::all_of(m.begin(), m.end(), [](int e) { return e == 0; });
}

// (sum_k c_k z_k)^s, dropping z-degree >= order.
ZPoly linear_power(const std::vector<long>& c, int s, int order, const std::vector<int>& base) {
  ZPoly out{{base, Scalar(1)}};
  if (zdeg(base) + s >= order) return s == 0 && zdeg(base) < order ? out : ZPoly{};
  for (int step = 0; step < s; ++step) {
    ZPoly next;
    for (const auto& [z, v] : out)
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] == 0) continue;
        auto w = z;
        ++w[k];
        next[w] += v * c[k];
      }
    std::erase_if(next, [](const auto& e) { return e.second == 0; });
    out = std::move(next);
  }
  return out;
}

// psi * (g acting on a monomial of weight wt(a)): chi(g)^a on the finite part and
// exp(<a, z>) mod m^k on the torus part.
ZPoly act(const BarContext& ctx, int sector, const std::vector<int>& zexp, const Monomial& a) {
  const Character wt = monomial_weight(a, ctx.weights, ctx.group);
  Scalar finite = 1;
  if (!ctx.group.finite_factors.empty()) {
    const auto g = finite_elements(ctx.group).at(sector);
    const auto chi = rational_value(wt, ctx.group, g);
    if (!chi) throw InputError("unsupported: group element acts on " + to_string(Poly::monomial(a, 1)) +
                               " by a non-rational root of unity");
    finite = *chi;
  }
  ZPoly out;
  for (int s = 0; zdeg(zexp) + s < std::max(ctx.order, 1); ++s) {
    const Scalar inv = Scalar(1) / factorial(static_cast<unsigned>(s));
    for (const auto& [z, v] : linear_power(wt.torus, s, std::max(ctx.order, 1), zexp)) out[z] += v * inv * finite;
    if (ctx.group.torus_rank == 0) break;
  }
  std::erase_if(out, [](const auto& e) { return e.second == 0; });
  return out;
}

void mark_window(const BarContext& ctx, BarChain& c) {
  for (const auto& [t, v] : c.terms)
    if (t.length() > ctx.max_length || t.degree() > ctx.max_degree) c.window_exceeded = true;
}

int sign_pow(long e) { return e % 2 ? -1 : 1; }

std::string monomial_string(const Monomial& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (m[i] > 1) s += "^" + std::to_string(m[i]);
  }
  return s.empty() ? "1" : s;
}

std::string zstring(const std::vector<int>& z) {
  std::string s;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (z[k] == 0) continue;
    s += "z" + std::to_string(k + 1) + (z[k] > 1 ? "^" + std::to_string(z[k]) : "") + "*";
  }
  return s;
}

// Sign of w ^ dx_j with dx_j moved to its sorted place.
int append_sign(unsigned mask, int j) { return std::popcount(mask >> (j + 1)) % 2 ? -1 : 1; }

// b_0 db_1 ... db_n as (x, mask) -> coefficient.
std::map<std::pair<Monomial, unsigned>, Scalar> wedge_of_differentials(const std::vector<Monomial>& f) {
  std::map<std::pair<Monomial, unsigned>, Scalar> cur{{{f.front(), 0u}, Scalar(1)}};
  for (std::size_t i = 1; i < f.size(); ++i) {
    std::map<std::pair<Monomial, unsigned>, Scalar> next;
    for (const auto& [key, v] : cur) {
      const auto& [x, mask] = key;
      for (std::size_t j = 0; j < f[i].size(); ++j) {
        if (f[i][j] == 0 || (mask & (1u << j))) continue;
        Monomial y = product(x, f[i]);
        --y[j];
        next[{y, mask | (1u << j)}] += v * f[i][j] * append_sign(mask, static_cast<int>(j));
      }
    }
    std::erase_if(next, [](const auto& e) { return e.second == 0; });
    cur = std::move(next);
  }
  return cur;
}

void require_identity(const BarTerm& t) {
  if (t.sector != 0) throw InputError("unsupported: HKR maps are only available at the identity element");
}

std::vector<Monomial> monomials_of_degree(int n, int d) {
  std::vector<Monomial> out;
  Monomial m(n, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      m[pos] = left;
      out.push_back(m);
      return;
    }
    for (int e = left; e >= 0; --e) {
      m[pos] = e;
      self(self, pos + 1, left - e);
    }
  };
  if (n == 0) {
    if (d == 0) out.push_back(m);
    return out;
  }
  rec(rec, 0, d);
  return out;
}

}  // namespace

int BarTerm::degree() const {
  int d = 0;
  for (const auto& f : factors) d += total_degree(f);
  return d;
}

bool is_normalized(const BarTerm& t) {
  for (std::size_t i = 1; i < t.factors.size(); ++i)
    if (is_constant(t.factors[i])) return false;
  return true;
}

void BarChain::add(const BarTerm& t, const Scalar& c) {
  if (c == 0 || !is_normalized(t)) return;
  auto it = terms.find(t);
  if (it == terms.end()) {
    terms.emplace(t, c);
  } else {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

BarChain& BarChain::operator+=(const BarChain& o) {
  for (const auto& [t, c] : o.terms) add(t, c);
  window_exceeded = window_exceeded || o.window_exceeded;
  return *this;
}

BarChain& BarChain::operator*=(const Scalar& c) {
  if (c == 0) terms.clear();
  for (auto& [t, v] : terms) v *= c;
  return *this;
}

std::string to_string(const BarChain& c) {
  if (c.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, v] : c.terms) {
    os << (first ? "" : " + ") << "(" << to_string(v) << ")*";
    first = false;
    if (t.sector != 0) os << "[g" << t.sector << "]";
    os << zstring(t.zexp);
    for (std::size_t i = 0; i < t.factors.size(); ++i) os << (i ? "|" : "") << monomial_string(t.factors[i]);
  }
  if (c.window_exceeded) os << " [window exceeded]";
  return os.str();
}

BarChain random_chain(const BarContext& ctx, std::mt19937& rng, int max_length, bool invariant, bool identity_only,
                      std::size_t terms) {
  BarChain c;
  const Character zero = zero_character(ctx.group);
  const int sectors = identity_only ? 1 : ctx.group.finite_order();
  auto monomial = [&](bool nonconstant) {
    Monomial m(ctx.nvars(), 0);
    do {
      for (auto& e : m) e = static_cast<int>(rng() % 3);
    } while (nonconstant && is_constant(m));
    return m;
  };
  if (ctx.nvars() == 0) max_length = 0;
  for (int tries = 0; tries < 200 && c.terms.size() < terms; ++tries) {
    const int len = static_cast<int>(rng() % static_cast<unsigned>(max_length + 1));
    BarTerm t;
    t.sector = static_cast<int>(rng() % static_cast<unsigned>(sectors));
    t.zexp.assign(ctx.group.torus_rank, 0);
    if (ctx.group.torus_rank > 0 && ctx.order > 1 && rng() % 2) t.zexp[rng() % ctx.group.torus_rank] = 1;
    Monomial total(ctx.nvars(), 0);
    for (int i = 0; i <= len; ++i) {
      t.factors.push_back(monomial(i > 0));
      total = product(total, t.factors.back());
    }
    if (invariant && monomial_weight(total, ctx.weights, ctx.group) != zero) continue;
    Scalar coef(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 2));
    coef.canonicalize();
    c.add(t, coef);
  }
  return c;
}

BarChain bar_differential(const BarContext& ctx, const BarChain& c) {
  BarChain out;
  for (const auto& [t, v] : c.terms) {
    const int n = t.length();
    if (n < 1) continue;
    for (int i = 0; i < n; ++i) {
      BarTerm s{t.sector, t.zexp, {}};
      for (int j = 0; j <= n; ++j) {
        if (j == i + 1) continue;
        s.factors.push_back(j == i ? product(t.factors[i], t.factors[i + 1]) : t.factors[j]);
      }
      out.add(s, v * sign_pow(i));
    }
    BarTerm s{t.sector, {}, {product(t.factors[n], t.factors[0])}};
    for (int j = 1; j < n; ++j) s.factors.push_back(t.factors[j]);
    for (const auto& [z, a] : act(ctx, t.sector, t.zexp, t.factors[n])) {
      s.zexp = z;
      out.add(s, v * a * sign_pow(n));
    }
  }
  mark_window(ctx, out);
  return out;
}

BarChain connes_B_bar(const BarContext& ctx, const BarChain& c) {
  BarChain out;
  const Monomial one(ctx.nvars(), 0);
  for (const auto& [t, v] : c.terms) {
    const int n = t.length();
    for (int i = 0; i <= n; ++i) {
      // 1 (x) g.a_{n-i+1} .. g.a_n (x) a_0 .. a_{n-i}
      BarTerm s{t.sector, {}, {one}};
      Monomial crossing = one;
      for (int j = n - i + 1; j <= n; ++j) {
        s.factors.push_back(t.factors[j]);
        crossing = product(crossing, t.factors[j]);
      }
      for (int j = 0; j <= n - i; ++j) s.factors.push_back(t.factors[j]);
      for (const auto& [z, a] : act(ctx, t.sector, t.zexp, crossing)) {
        s.zexp = z;
        out.add(s, v * a * sign_pow(static_cast<long>(n) * i));
      }
    }
  }
  mark_window(ctx, out);
  return out;
}

BarChain delta_w_bar(const BarContext& ctx, const Poly& w, const BarChain& c) {
  if (!poly_weight_check(w, ctx.weights, ctx.group, zero_character(ctx.group)))
    throw InputError("potential is not invariant");
  BarChain out;
  for (const auto& [t, v] : c.terms) {
    const int n = t.length();
    for (const auto& [m, wc] : w.terms()) {
      for (int i = 1; i <= n + 1; ++i) {
        BarTerm s = t;
        s.factors.insert(s.factors.begin() + i, m);
        out.add(s, v * wc * (i <= n ? sign_pow(i) : sign_pow(n + 1)));
      }
    }
  }
  mark_window(ctx, out);
  return out;
}

void CartanElement::add(const CartanTerm& t, const Scalar& c) {
  if (c == 0) return;
  auto it = terms.find(t);
  if (it == terms.end()) {
    terms.emplace(t, c);
  } else {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

CartanElement& CartanElement::operator+=(const CartanElement& o) {
  for (const auto& [t, c] : o.terms) add(t, c);
  return *this;
}

std::string to_string(const CartanElement& e) {
  if (e.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, v] : e.terms) {
    os << (first ? "" : " + ") << "(" << to_string(v) << ")*" << zstring(t.zexp) << monomial_string(t.x);
    first = false;
    for (std::size_t i = 0; i < t.x.size(); ++i)
      if (t.mask & (1u << i)) os << "*dx" << i + 1;
  }
  return os.str();
}

CartanElement hkr_classical(const BarContext& ctx, const BarChain& c) {
  CartanElement out;
  const std::vector<int> zero(ctx.group.torus_rank, 0);
  for (const auto& [t, v] : c.terms) {
    require_identity(t);
    if (zdeg(t.zexp) != 0) continue;
    const Scalar scale = v / factorial(static_cast<unsigned>(t.length()));
    for (const auto& [key, w] : wedge_of_differentials(t.factors)) out.add({zero, key.first, key.second}, scale * w);
  }
  return out;
}

Scalar simplex_integral(std::span<const int> exponents) {
  Scalar value = 1;
  long acc = 0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0) throw std::invalid_argument("simplex_integral needs nonnegative exponents");
    acc += exponents[i] + 1;
    value /= acc;
  }
  return value;
}

CartanElement hkr_equivariant(const BarContext& ctx, const BarChain& c) {
  CartanElement out;
  const int k = std::max(ctx.order, 1);
  for (const auto& [t, v] : c.terms) {
    require_identity(t);
    const int n = t.length();
    const int budget = k - 1 - zdeg(t.zexp);
    if (budget < 0) continue;
    const auto form = wedge_of_differentials(t.factors);
    if (form.empty()) continue;
    std::vector<std::vector<long>> w;
    for (int i = 1; i <= n; ++i) w.push_back(monomial_weight(t.factors[i], ctx.weights, ctx.group).torus);
    std::vector<int> s(n, 0);
    // All s with |s| <= budget.
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == n) {
        ZPoly z{{t.zexp, Scalar(1)}};
        for (int i = 0; i < n && !z.empty(); ++i) {
          ZPoly next;
          for (const auto& [base, a] : z)
            for (const auto& [zz, b] : linear_power(w[i], s[i], k, base)) next[zz] += a * b;
          std::erase_if(next, [](const auto& e) { return e.second == 0; });
          z = std::move(next);
        }
        Scalar coef = v * simplex_integral(s);
        for (int i = 0; i < n; ++i) coef /= factorial(static_cast<unsigned>(s[i]));
        for (const auto& [zz, a] : z)
          for (const auto& [key, f] : form) out.add({zz, key.first, key.second}, coef * a * f);
        return;
      }
      for (int e = 0; e <= left; ++e) {
        s[pos] = e;
        self(self, pos + 1, left - e);
      }
      s[pos] = 0;
    };
    rec(rec, 0, budget);
  }
  return out;
}

CartanElement cartan_contract(const BarContext& ctx, const CartanElement& w) {
  CartanElement out;
  const int k = std::max(ctx.order, 1);
  for (const auto& [t, v] : w.terms) {
    for (int i = 0; i < ctx.nvars(); ++i) {
      if (!(t.mask & (1u << i))) continue;
      const int sign = std::popcount(t.mask & ((1u << i) - 1)) % 2 ? -1 : 1;
      Monomial x = t.x;
      ++x[i];
      const auto& a = ctx.weights[i].torus;
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] == 0) continue;
        auto z = t.zexp;
        ++z[j];
        if (zdeg(z) >= k) continue;
        out.add({z, x, t.mask & ~(1u << i)}, -v * sign * a[j]);
      }
    }
  }
  return out;
}

MixedComplex cartan_complex(const ModelSpec& spec, int k) {
  if (k < 1) throw InputError("Cartan complex needs order k >= 1");
  ModelSpec s = spec;
  s.kind = ModelKind::Forms;
  s.potential.reset();
  validate(s);
  const int cap = analysis_cap(s);
  const int n = s.nvars(), r = s.group.torus_rank;
  BarContext ctx{s.group, s.weights, 0, 0, k};
  const Character zero = zero_character(s.group);

  std::vector<std::vector<int>> zs;
  for (int d = 0; d < k; ++d) {
    if (r == 0) {
      if (d == 0) zs.push_back({});
      continue;
    }
    for (const auto& m : monomials_of_degree(r, d)) zs.push_back(m);
  }
  std::map<PieceKey, std::vector<CartanTerm>> pieces;
  for (int deg = 0; deg <= cap; ++deg) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      const int h = std::popcount(mask);
      if (h > deg) continue;
      for (const auto& x : monomials_of_degree(n, deg - h)) {
        Monomial e = x;
        for (int i = 0; i < n; ++i)
          if (mask & (1u << i)) ++e[i];
        if (monomial_weight(e, s.weights, s.group) != zero) continue;
        for (const auto& z : zs) pieces[PieceKey{h, zero, deg, {}, 0, 0}].push_back({z, x, mask});
      }
    }
  }
  MixedComplex m;
  std::map<CartanTerm, std::pair<PieceKey, std::size_t>> index;
  for (auto& [key, basis] : pieces) {
    std::sort(basis.begin(), basis.end(), [](const CartanTerm& a, const CartanTerm& b) {
      if (a.mask != b.mask) return a.mask < b.mask;
      if (a.x != b.x) return GrlexGreater{}(a.x, b.x);
      return GrlexGreater{}(a.zexp, b.zexp);
    });
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      index[basis[i]] = {key, i};
      CartanElement e;
      e.add(basis[i], 1);
      const std::string l = to_string(e);
      labels.push_back(l.substr(l.find('*') + 1));
    }
    m.base.add_piece(key, std::move(labels));
  }
  auto emit = [&](const PieceKey& key, const std::vector<CartanTerm>& basis, bool is_b) {
    std::map<PieceKey, SparseMatrix> blocks;
    for (std::size_t col = 0; col < basis.size(); ++col) {
      CartanElement src;
      src.add(basis[col], 1);
      CartanElement img;
      if (is_b) {
        for (int i = 0; i < n; ++i) {
          const CartanTerm& t = basis[col];
          if (t.x[i] == 0 || (t.mask & (1u << i))) continue;
          Monomial x = t.x;
          --x[i];
          const int sign = std::popcount(t.mask & ((1u << i) - 1)) % 2 ? -1 : 1;
          img.add({t.zexp, x, t.mask | (1u << i)}, Scalar(sign * t.x[i]));
        }
      } else {
        img = cartan_contract(ctx, src);
      }
      for (const auto& [t, v] : img.terms) {
        auto it = index.find(t);
        if (it == index.end()) throw InvariantViolation("Cartan operator leaves the built complex");
        const PieceKey& tgt = it->second.first;
        auto b = blocks.try_emplace(tgt, m.base.dim(tgt), basis.size()).first;
        b->second.add(it->second.second, col, v);
      }
    }
    for (const auto& [tgt, block] : blocks) {
      if (is_b)
        m.add_connes_block(key, tgt, block);
      else
        m.base.add_block(key, tgt, block);
    }
  };
  for (const auto& [key, basis] : pieces) {
    emit(key, basis, false);
    emit(key, basis, true);
  }
  return m;
}

GradedComplex bar_complex(const BarContext& ctx) {
  if (ctx.group.torus_rank != 0) throw InputError("unsupported: bar complexes are built for finite groups only");
  ctx.group.validate();
  const int n = ctx.nvars();
  const Character zero = zero_character(ctx.group);
  const int order = ctx.group.finite_order();
  GradedComplex c;
  std::map<BarTerm, std::pair<PieceKey, std::size_t>> index;
  std::map<PieceKey, std::vector<BarTerm>> pieces;
  for (int g = 0; g < order; ++g) {
    for (int len = 0; len <= ctx.max_length; ++len) {
      std::vector<Monomial> factors(len + 1);
      auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos > len) {
          Monomial total(n, 0);
          for (const auto& f : factors) total = product(total, f);
          if (monomial_weight(total, ctx.weights, ctx.group) != zero) return;
          BarTerm t{g, {}, factors};
          pieces[PieceKey{len, zero, t.degree(), {}, g, 0}].push_back(std::move(t));
          return;
        }
        for (int d = pos == 0 ? 0 : 1; d <= left; ++d)
          for (const auto& m : monomials_of_degree(n, d)) {
            factors[pos] = m;
            self(self, pos + 1, left - d);
          }
      };
      rec(rec, 0, ctx.max_degree);
    }
  }
  for (auto& [key, basis] : pieces) {
    std::sort(basis.begin(), basis.end());
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      index[basis[i]] = {key, i};
      BarChain e;
      e.add(basis[i], 1);
      const std::string l = to_string(e);
      labels.push_back(l.substr(l.find('*') + 1));
    }
    c.add_piece(key, std::move(labels));
    if (key.hdeg == ctx.max_length) c.mark_incoming_incomplete(key);
  }
  for (const auto& [key, basis] : pieces) {
    std::map<PieceKey, SparseMatrix> blocks;
    for (std::size_t col = 0; col < basis.size(); ++col) {
      BarChain src;
      src.add(basis[col], 1);
      for (const auto& [t, v] : bar_differential(ctx, src).terms) {
        auto it = index.find(t);
        if (it == index.end()) throw InvariantViolation("bar differential leaves the built complex");
        const PieceKey& tgt = it->second.first;
        auto b = blocks.try_emplace(tgt, c.dim(tgt), basis.size()).first;
        b->second.add(it->second.second, col, v);
      }
    }
    for (const auto& [tgt, block] : blocks) c.add_block(key, tgt, block);
  }
  return c;
}

}  // namespace nchodge
