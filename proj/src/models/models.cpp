#include "nchodge/models.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>
#include <tuple>

#include "nchodge/errors.hpp"
#include "nchodge/parallel.hpp"

namespace nchodge {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Forms: return "forms";
    case ModelKind::InertiaForms: return "inertia-forms";
    case ModelKind::KoszulLoop: return "koszul-loop";
    case ModelKind::KoszulMF: return "koszul-mf";
    case ModelKind::BGa: return "bga";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  for (ModelKind k : {ModelKind::Forms, ModelKind::InertiaForms, ModelKind::KoszulLoop, ModelKind::KoszulMF,
                      ModelKind::BGa})
    if (to_string(k) == s) return k;
  throw InputError("unknown model kind '" + s + "'");
}

void validate(const ModelSpec& spec) {
  spec.group.validate();
  if (spec.kind == ModelKind::BGa) {
    if (spec.max_weight < 1) throw InputError("bga model needs max_weight >= 1");
    return;
  }
  for (std::size_t i = 0; i < spec.weights.size(); ++i) {
    const Character& w = spec.weights[i];
    if (w.torus.size() != static_cast<std::size_t>(spec.group.torus_rank) ||
        w.finite.size() != spec.group.finite_factors.size())
      throw InputError("weight of x" + std::to_string(i + 1) + " has " +
                       std::to_string(w.torus.size() + w.finite.size()) + " entries; the group needs " +
                       std::to_string(spec.group.torus_rank + spec.group.finite_factors.size()));
  }
  if (spec.nvars() > 16) throw InputError("at most 16 coordinates are supported");
  if (spec.degree_cap && *spec.degree_cap < 0) throw InputError("degree_cap must be nonnegative");
  if (spec.loop_window < 0) throw InputError("loop window must be [-J, J] with J >= 0");
  if (spec.potential) {
    const Poly& w = *spec.potential;
    if (w.nvars() != spec.nvars()) throw InputError("potential and weights disagree on the number of coordinates");
    const Character zero = zero_character(spec.group);
    for (const auto& [m, c] : w.terms()) {
      const Character wt = monomial_weight(m, spec.weights, spec.group);
      if (wt != zero)
        throw InputError("potential is not invariant: monomial " + to_string(Poly::monomial(m, 1)) +
                         " has weight " + to_string(wt));
    }
  }
  if (spec.kind == ModelKind::KoszulMF && !spec.potential)
    throw InputError("koszul-mf model needs a potential");
}

bool in_open_half_space(const std::vector<std::vector<long>>& torus_weights) {
  if (torus_weights.empty()) return true;
  const std::size_t r = torus_weights.front().size();
  // c . lambda >= b
  using Ineq = std::pair<std::vector<Scalar>, Scalar>;
  std::set<Ineq> sys;
  for (const auto& a : torus_weights) {
    std::vector<Scalar> c;
    for (long v : a) c.emplace_back(v);
    sys.emplace(std::move(c), Scalar(1));
  }
  for (std::size_t v = r; v-- > 0;) {
    std::vector<Ineq> pos, neg;
    std::set<Ineq> next;
    for (const auto& q : sys) {
      if (q.first[v] > 0)
        pos.push_back(q);
      else if (q.first[v] < 0)
        neg.push_back(q);
      else
        next.insert(q);
    }
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        const Scalar sp = -q.first[v], sq = p.first[v];
        Ineq n{std::vector<Scalar>(r), sp * p.second + sq * q.second};
        Scalar scale = 0;
        for (std::size_t k = 0; k < r; ++k) {
          n.first[k] = sp * p.first[k] + sq * q.first[k];
          if (scale == 0 && n.first[k] != 0) scale = abs(n.first[k]);
        }
        if (scale == 0) scale = abs(n.second) == 0 ? Scalar(1) : Scalar(abs(n.second));
        for (auto& x : n.first) x /= scale;
        n.second /= scale;
        next.insert(std::move(n));
      }
    }
    sys = std::move(next);
  }
  return std::all_of(sys.begin(), sys.end(), [](const Ineq& q) { return q.second <= 0; });
}

bool is_proper(const ModelSpec& spec) {
  std::vector<std::vector<long>> a;
  for (const auto& w : spec.weights) a.push_back(w.torus);
  return in_open_half_space(a);
}

int analysis_cap(const ModelSpec& spec) {
  if (spec.degree_cap) return *spec.degree_cap;
  if (is_proper(spec)) return 0;
  throw InputError("not cohomologically proper: weights do not lie in an open half-space; supply truncation "
                   "(degree_cap)");
}

namespace {

bool aux_raising(const ModelSpec& spec) { return spec.potential && spec.potential->degree() >= 1; }

}  // namespace

int build_cap(const ModelSpec& spec) {
  const int cap = analysis_cap(spec);
  return aux_raising(spec) ? cap + 2 * spec.potential->degree() : cap;
}

std::vector<InertiaComponent> inertia_components(const ModelSpec& spec) {
  std::vector<InertiaComponent> out;
  const auto elements = finite_elements(spec.group);
  for (std::size_t s = 0; s < elements.size(); ++s) {
    InertiaComponent comp;
    comp.sector = static_cast<int>(s);
    comp.g = elements[s];
    std::vector<Poly> images;
    for (int i = 0; i < spec.nvars(); ++i) {
      const bool fixed = phase(spec.weights[i], spec.group, comp.g) == 0;
      if (fixed) comp.fixed.push_back(i);
      images.push_back(fixed ? Poly::variable(spec.nvars(), i) : Poly(spec.nvars()));
    }
    if (spec.potential) comp.potential = spec.potential->substitute(images);
    out.push_back(std::move(comp));
  }
  return out;
}

namespace {

struct Elem {
  int sector = 0;
  std::vector<int> loop;
  Monomial alpha;
  unsigned mask = 0;

  auto operator<=>(const Elem&) const = default;
  bool operator==(const Elem&) const = default;
};

int popcount(unsigned m) { return std::popcount(m); }

// Sign of e_i ^ e_I relative to the sorted wedge e_{I u i}.
int wedge_sign(unsigned mask, int i) { return popcount(mask & ((1u << i) - 1)) % 2 ? -1 : 1; }

// Sign of removing the p-th factor (0-based) of a sorted wedge.
int removal_sign(unsigned mask, int i) { return wedge_sign(mask, i); }

enum Op { D = 0, Connes = 1 };

struct Term {
  Op op;
  Elem src;
  Elem tgt;
  Scalar coef;
};

struct SectorData {
  std::vector<Elem> elems;
  std::vector<Term> terms;
};

std::string label(const Elem& e, const std::string& odd, bool show_sector, bool show_loop) {
  std::ostringstream os;
  if (show_sector) os << "[g" << e.sector << "]";
  std::vector<std::string> parts;
  if (show_loop) {
    std::ostringstream t;
    t << "t^(";
    for (std::size_t k = 0; k < e.loop.size(); ++k) t << (k ? "," : "") << e.loop[k];
    t << ")";
    parts.push_back(t.str());
  }
  for (std::size_t i = 0; i < e.alpha.size(); ++i) {
    if (e.alpha[i] == 0) continue;
    parts.push_back("x" + std::to_string(i + 1) + (e.alpha[i] > 1 ? "^" + std::to_string(e.alpha[i]) : ""));
  }
  std::string wedge;
  for (std::size_t i = 0; i < e.alpha.size(); ++i)
    if (e.mask & (1u << i)) wedge += (wedge.empty() ? "" : "^") + odd + std::to_string(i + 1);
  if (!wedge.empty()) parts.push_back(wedge);
  if (parts.empty()) parts.push_back("1");
  for (std::size_t k = 0; k < parts.size(); ++k) os << (k ? "*" : "") << parts[k];
  return os.str();
}

class Assembler {
 public:
  Assembler(const ModelSpec& spec, std::string odd, bool show_loop)
      : spec_(spec), odd_(std::move(odd)), show_loop_(show_loop), zero_(zero_character(spec.group)) {}

  PieceKey key_of(const Elem& e) const {
    const int h = popcount(e.mask);
    return PieceKey{h, zero_, total_degree(e.alpha) + h, e.loop, e.sector, 0};
  }

  void add(const Elem& e) { by_key_[key_of(e)].push_back(e); }

  void finalize() {
    for (auto& [key, elems] : by_key_) {
      std::sort(elems.begin(), elems.end(), [](const Elem& a, const Elem& b) {
        if (a.mask != b.mask) return a.mask < b.mask;
        return GrlexGreater{}(a.alpha, b.alpha);
      });
      elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
      for (std::size_t i = 0; i < elems.size(); ++i) index_[elems[i]] = i;
    }
  }

  void term(const Term& t) {
    if (t.coef == 0) return;
    const PieceKey sk = key_of(t.src);
    if (!index_.contains(t.tgt)) {
      const bool outside_loop = std::any_of(t.tgt.loop.begin(), t.tgt.loop.end(),
                                            [&](int l) { return l < -spec_.loop_window || l > spec_.loop_window; });
      if (outside_loop) {
        inexact_.insert(sk);
      } else if (key_of(t.tgt).aux > cap_) {
        frontier_.insert(sk);
      } else {
        throw InvariantViolation("operator image " + label(t.tgt, odd_, true, true) + " is not a basis element");
      }
      return;
    }
    auto& entries = terms_[{t.op, sk, key_of(t.tgt)}];
    entries.emplace_back(index_.at(t.tgt), index_.at(t.src), t.coef);
  }

  void set_cap(int cap) { cap_ = cap; }

  MixedComplex emit(bool periodic) const {
    MixedComplex m;
    m.base.periodic = periodic;
    const bool show_sector = !spec_.group.finite_factors.empty();
    for (const auto& [key, elems] : by_key_) {
      std::vector<std::string> basis;
      for (const auto& e : elems) basis.push_back(label(e, odd_, show_sector, show_loop_));
      m.base.add_piece(key, std::move(basis));
      if (frontier_.contains(key)) m.base.mark_outgoing_incomplete(key);
      if (inexact_.contains(key)) m.base.mark_inexact(key);
    }
    for (const auto& [id, entries] : terms_) {
      const auto& [op, src, tgt] = id;
      if (op == Op::D && frontier_.contains(src)) continue;
      SparseMatrix block(m.base.dim(tgt), m.base.dim(src));
      for (const auto& [r, c, v] : entries) block.add(r, c, v);
      if (op == Op::D)
        m.base.add_block(src, tgt, block);
      else
        m.add_connes_block(src, tgt, block);
    }
    if (!inexact_.empty()) {
      m.base.truncated = true;
      m.base.add_warning("loop window [-" + std::to_string(spec_.loop_window) + ", " +
                         std::to_string(spec_.loop_window) +
                         "] truncates the differential; terms leaving the window were dropped");
    }
    return m;
  }

 private:
  const ModelSpec& spec_;
  std::string odd_;
  bool show_loop_;
  Character zero_;
  int cap_ = 0;
  std::map<PieceKey, std::vector<Elem>> by_key_;
  std::map<Elem, std::size_t> index_;
  std::map<std::tuple<Op, PieceKey, PieceKey>, std::vector<std::tuple<std::size_t, std::size_t, Scalar>>> terms_;
  std::set<PieceKey> frontier_, inexact_;
};

// Monomials x^alpha and exterior masks over `vars` with |alpha| + |mask| <= cap and weight 0.
template <typename Fn>
void enumerate(const ModelSpec& spec, const std::vector<int>& vars, int cap, Fn&& fn) {
  const int n = spec.nvars();
  const Character zero = zero_character(spec.group);
  Monomial alpha(n, 0);
  std::vector<unsigned> masks;
  const std::size_t k = vars.size();
  for (unsigned sub = 0; sub < (1u << k); ++sub) {
    unsigned mask = 0;
    for (std::size_t b = 0; b < k; ++b)
      if (sub & (1u << b)) mask |= 1u << vars[b];
    masks.push_back(mask);
  }
  auto weight_of = [&](const Monomial& a, unsigned mask) {
    Monomial e = a;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) ++e[i];
    return monomial_weight(e, spec.weights, spec.group);
  };
  auto rec = [&](auto&& self, std::size_t pos, int budget) -> void {
    if (pos == k) {
      for (unsigned mask : masks)
        if (popcount(mask) <= budget && weight_of(alpha, mask) == zero) fn(alpha, mask);
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      alpha[vars[pos]] = e;
      self(self, pos + 1, budget - e);
    }
    alpha[vars[pos]] = 0;
  };
  rec(rec, 0, cap);
}

std::vector<std::vector<int>> loop_degrees(const ModelSpec& spec) {
  std::vector<std::vector<int>> out{{}};
  for (int t = 0; t < spec.group.torus_rank; ++t) {
    std::vector<std::vector<int>> next;
    for (const auto& l : out)
      for (int j = -spec.loop_window; j <= spec.loop_window; ++j) {
        auto m = l;
        m.push_back(j);
        next.push_back(std::move(m));
      }
    out = std::move(next);
  }
  return out;
}

MixedComplex build_forms(const ModelSpec& spec, bool all_sectors) {
  validate(spec);
  const int cap = build_cap(spec);
  std::vector<InertiaComponent> comps = inertia_components(spec);
  if (!all_sectors) comps.resize(1);
  const int n = spec.nvars();
  std::vector<SectorData> data(comps.size());
  parallel_for(comps.size(), spec.threads, [&](std::size_t s) {
    const InertiaComponent& comp = comps[s];
    SectorData& out = data[s];
    std::vector<Poly> grad;
    if (comp.potential)
      for (int i = 0; i < n; ++i) grad.push_back(comp.potential->derivative(i));
    enumerate(spec, comp.fixed, cap, [&](const Monomial& alpha, unsigned mask) {
      Elem e{comp.sector, {}, alpha, mask};
      out.elems.push_back(e);
      for (int i : comp.fixed) {
        if (mask & (1u << i)) continue;
        const int sign = wedge_sign(mask, i);
        if (alpha[i] > 0) {
          Elem t = e;
          --t.alpha[i];
          t.mask |= 1u << i;
          out.terms.push_back({Op::Connes, e, t, Scalar(sign * alpha[i])});
        }
        if (!grad.empty()) {
          for (const auto& [beta, c] : grad[i].terms()) {
            Elem t = e;
            for (int v = 0; v < n; ++v) t.alpha[v] += beta[v];
            t.mask |= 1u << i;
            out.terms.push_back({Op::D, e, t, -c * sign});
          }
        }
      }
    });
  });
  Assembler a(spec, "dx", false);
  a.set_cap(cap);
  for (const auto& d : data)
    for (const auto& e : d.elems) a.add(e);
  a.finalize();
  for (const auto& d : data)
    for (const auto& t : d.terms) a.term(t);
  const bool periodic = spec.potential && !spec.potential->is_zero();
  MixedComplex m = a.emit(periodic);
  if (const auto v = validate_mixed(m); !v.empty())
    throw InvariantViolation("forms model violates " + v.front().identity + " at " + to_string(v.front().piece));
  return m;
}

// Koszul coefficient c_i = 1 - chi_i(g) t^{a_i} as (loop shift, coefficient) pairs.
std::vector<std::pair<std::vector<int>, Scalar>> koszul_coefficient(const ModelSpec& spec, int i,
                                                                    const FiniteElement& g, bool allow_rescale) {
  const Character& w = spec.weights[i];
  std::vector<int> shift(w.torus.begin(), w.torus.end());
  const bool torus_trivial = std::all_of(shift.begin(), shift.end(), [](int a) { return a == 0; });
  const std::optional<int> chi = rational_value(w, spec.group, g);
  const std::vector<int> none(shift.size(), 0);
  if (!chi) {
    if (torus_trivial && allow_rescale) return {{none, Scalar(1)}};
    throw InputError("unsupported: x" + std::to_string(i + 1) +
                     " has a non-rational character value on a group element" +
                     (allow_rescale ? " together with a torus weight" : " in a matrix factorization model"));
  }
  if (torus_trivial) {
    if (*chi == 1) return {};
    return {{none, Scalar(2)}};
  }
  return {{none, Scalar(1)}, {shift, Scalar(-*chi)}};
}

std::vector<int> shifted(std::vector<int> l, const std::vector<int>& s) {
  for (std::size_t k = 0; k < l.size(); ++k) l[k] += s[k];
  return l;
}

struct ATerm {
  std::vector<int> shift;
  Monomial mono;
  Scalar coef;
};

// A_j(W) with y_i replaced by chi_i(g) t^{a_i} x_i.
std::vector<ATerm> special_element(const ModelSpec& spec, int j, const FiniteElement& g) {
  const int n = spec.nvars();
  const Poly a = divided_difference(*spec.potential, j + 1);
  std::map<std::pair<std::vector<int>, Monomial>, Scalar> acc;
  for (const auto& [m, c] : a.terms()) {
    std::vector<int> shift(spec.group.torus_rank, 0);
    Monomial mono(n, 0);
    Scalar coef = c;
    for (int i = 0; i < n; ++i) {
      mono[i] += m[i];
      const int e = m[n + i];
      if (e == 0) continue;
      mono[i] += e;
      const std::optional<int> chi = rational_value(spec.weights[i], spec.group, g);
      if (!chi)
        throw InputError("unsupported: x" + std::to_string(i + 1) +
                         " has a non-rational character value in a matrix factorization model");
      if (*chi == -1 && e % 2) coef = -coef;
      for (int k = 0; k < spec.group.torus_rank; ++k) shift[k] += e * static_cast<int>(spec.weights[i].torus[k]);
    }
    acc[{shift, mono}] += coef;
  }
  std::vector<ATerm> out;
  for (auto& [k, c] : acc)
    if (c != 0) out.push_back({k.first, k.second, c});
  return out;
}

MixedComplex build_koszul(const ModelSpec& spec, bool with_potential) {
  validate(spec);
  const int cap = build_cap(spec);
  const int n = spec.nvars();
  const auto elements = finite_elements(spec.group);
  const auto loops = loop_degrees(spec);
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  std::vector<SectorData> data(elements.size());
  parallel_for(elements.size(), spec.threads, [&](std::size_t s) {
    const FiniteElement& g = elements[s];
    SectorData& out = data[s];
    std::vector<std::vector<std::pair<std::vector<int>, Scalar>>> coeffs;
    for (int i = 0; i < n; ++i) coeffs.push_back(koszul_coefficient(spec, i, g, !with_potential));
    std::vector<std::vector<ATerm>> special;
    if (with_potential)
      for (int j = 0; j < n; ++j) special.push_back(special_element(spec, j, g));
    enumerate(spec, all, cap, [&](const Monomial& alpha, unsigned mask) {
      for (const auto& loop : loops) {
        Elem e{static_cast<int>(s), loop, alpha, mask};
        out.elems.push_back(e);
        for (int i = 0; i < n; ++i) {
          if (mask & (1u << i)) {
            const int sign = removal_sign(mask, i);
            for (const auto& [shift, c] : coeffs[i]) {
              Elem t{e.sector, shifted(loop, shift), alpha, mask & ~(1u << i)};
              ++t.alpha[i];
              out.terms.push_back({Op::D, e, t, c * sign});
            }
          } else if (with_potential) {
            const int sign = wedge_sign(mask, i);
            for (const auto& at : special[i]) {
              Elem t{e.sector, shifted(loop, at.shift), alpha, mask | (1u << i)};
              for (int v = 0; v < n; ++v) t.alpha[v] += at.mono[v];
              out.terms.push_back({Op::D, e, t, at.coef * sign});
            }
          }
        }
      }
    });
  });
  Assembler a(spec, "n", spec.group.torus_rank > 0);
  a.set_cap(cap);
  for (const auto& d : data)
    for (const auto& e : d.elems) a.add(e);
  a.finalize();
  for (const auto& d : data)
    for (const auto& t : d.terms) a.term(t);
  MixedComplex m = a.emit(with_potential);
  if (const auto v = validate_complex(m.base); !v.empty())
    throw InvariantViolation("Koszul model violates " + v.front().identity + " at " + to_string(v.front().piece));
  return m;
}

}  // namespace

MixedComplex forms_model(const ModelSpec& spec) { return build_forms(spec, false); }

MixedComplex inertia_forms_model(const ModelSpec& spec) { return build_forms(spec, true); }

GradedComplex koszul_loop_model(const ModelSpec& spec) {
  if (spec.potential && !spec.potential->is_zero())
    throw InputError("koszul-loop model takes no potential; use koszul-mf");
  return build_koszul(spec, false).base;
}

GradedComplex koszul_mf_model(const ModelSpec& spec) {
  if (!spec.potential) throw InputError("koszul-mf model needs a potential");
  return build_koszul(spec, true).base;
}

MixedComplex bga_model(int max_weight) {
  if (max_weight < 1) throw InputError("bga model needs max_weight >= 1");
  MixedComplex m;
  m.base.add_piece(PieceKey{0, Character{}, 0, {}, 0, 0}, {"1"});
  for (int a = 1; a <= max_weight; ++a) {
    const PieceKey odd{-1, Character{}, a, {}, 0, 0}, even{0, Character{}, a, {}, 0, 0};
    const std::string p = a - 1 > 1 ? "^" + std::to_string(a - 1) : "";
    m.base.add_piece(odd, {a == 1 ? "eps" : "eps*deps" + p});
    m.base.add_piece(even, {"deps" + (a > 1 ? "^" + std::to_string(a) : std::string())});
    SparseMatrix b(1, 1);
    b.add(0, 0, 1);
    m.add_connes_block(odd, even, b);
  }
  return m;
}

MixedComplex build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Forms: return forms_model(spec);
    case ModelKind::InertiaForms: return inertia_forms_model(spec);
    case ModelKind::KoszulLoop: return MixedComplex{koszul_loop_model(spec), {}};
    case ModelKind::KoszulMF: return MixedComplex{koszul_mf_model(spec), {}};
    case ModelKind::BGa: return bga_model(spec.max_weight);
  }
  throw InputError("unknown model kind");
}

OracleComparison oracle_compare(const ModelSpec& spec) {
  if (spec.group.torus_rank != 0) throw InputError("oracle-compare needs a finite group (torus_rank 0)");
  if (spec.potential) throw InputError("oracle-compare takes no potential");
  ModelSpec s = spec;
  s.kind = ModelKind::KoszulLoop;
  const GradedComplex loop = koszul_loop_model(s);
  const MixedComplex forms = inertia_forms_model(s);
  HomologyOptions opt;
  opt.aux_cap = analysis_cap(s);
  opt.threads = spec.threads;
  OracleComparison out;
  auto collect = [&](const GradedComplex& c, bool is_loop) {
    for (const auto& [slice, h] : homology(c, opt)) {
      if (!slice.aux) throw InvariantViolation("oracle models must be graded by aux degree");
      for (const auto& [hdeg, d] : h.dims) {
        if (d == 0) continue;
        auto& row = out.table[{hdeg, *slice.aux}];
        (is_loop ? row.loop : row.forms) += d;
      }
    }
  };
  collect(loop, true);
  collect(forms.base, false);
  for (const auto& [k, row] : out.table) out.agree = out.agree && row.loop == row.forms;
  return out;
}

}  // namespace nchodge
