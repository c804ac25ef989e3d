#include "nchodge/mixed.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "nchodge/errors.hpp"
#include "nchodge/parallel.hpp"

namespace nchodge {

namespace {

int parity_of(int h) { return ((h % 2) + 2) % 2; }

int parity_of_label(int label, Grading g) { return g == Grading::Parity ? label : parity_of(label); }

PieceKey lift(PieceKey key, int k) {
  key.hdeg -= 2 * k;
  key.upow = k;
  return key;
}

void copy_piece(GradedComplex& out, const PieceKey& key, const Piece& p, std::vector<std::string> basis) {
  out.add_piece(key, std::move(basis));
  if (!p.exact) out.mark_inexact(key);
  if (!p.outgoing_complete) out.mark_outgoing_incomplete(key);
  if (!p.incoming_complete) out.mark_incoming_incomplete(key);
}

void check_operator(const GradedComplex& c, const BlockMap& ops, const std::string& name, int shift,
                    std::vector<Violation>& out) {
  for (const auto& [src, row] : ops) {
    for (const auto& [tgt, m] : row) {
      if (m.is_zero()) continue;
      if (!c.has_piece(src) || !c.has_piece(tgt)) {
        out.push_back({name + " block", src, "block references a missing piece"});
        continue;
      }
      if (tgt.weight != src.weight || tgt.sector != src.sector)
        out.push_back({name + " preserves weight", src, "block to " + to_string(tgt)});
      const int delta = tgt.hdeg - src.hdeg;
      const bool ok = c.periodic ? parity_of(delta) == 1 : delta == shift;
      if (!ok) out.push_back({name + " degree", src, "block to " + to_string(tgt)});
    }
  }
}

bool reliable(const GradedComplex& c, const PieceKey& key) {
  if (!c.has_piece(key)) return false;
  const Piece& p = c.piece(key);
  return p.outgoing_complete && p.exact;
}

// Sources whose identities can be checked: they and their one-step targets are fully built.
std::set<PieceKey> checkable(const GradedComplex& c, std::initializer_list<const BlockMap*> ops) {
  std::set<PieceKey> out;
  for (const auto& [key, p] : c.pieces()) {
    bool ok = reliable(c, key);
    for (const BlockMap* m : ops) {
      auto it = m->find(key);
      if (it == m->end()) continue;
      for (const auto& [tgt, block] : it->second) ok = ok && reliable(c, tgt);
    }
    if (ok) out.insert(key);
  }
  return out;
}

void check_zero(const BlockMap& m, const std::set<PieceKey>& sources, const std::string& name,
                std::vector<Violation>& out) {
  for (const auto& [src, row] : m) {
    if (!sources.contains(src)) continue;
    for (const auto& [tgt, block] : row)
      if (!block.is_zero()) out.push_back({name, src, "nonzero block to " + to_string(tgt)});
  }
}

std::map<int, std::size_t> by_parity(const SliceHomology& h) {
  std::map<int, std::size_t> out{{0, 0}, {1, 0}};
  for (const auto& [label, d] : h.dims) out[parity_of_label(label, h.grading)] += d;
  return out;
}

ModuleDecomposition decompose(const std::vector<std::size_t>& ranks, int n, int parity) {
  ModuleDecomposition d;
  d.n = n;
  d.parity = parity;
  d.dim = ranks.at(0);
  if (ranks.at(n) != 0) throw InvariantViolation("u^n acts nontrivially on truncated homology");
  auto r = [&](int j) -> long { return j > n ? 0 : static_cast<long>(ranks[j]); };
  for (int j = 1; j <= n; ++j) {
    const long mu = (r(j - 1) - r(j)) - (r(j) - r(j + 1));
    if (mu < 0) throw InvariantViolation("negative cyclic multiplicity");
    d.mu.push_back(static_cast<std::size_t>(mu));
  }
  return d;
}

void accumulate(ModuleDecomposition& into, const ModuleDecomposition& d) {
  if (into.mu.empty()) into.mu.assign(d.mu.size(), 0);
  for (std::size_t j = 0; j < d.mu.size(); ++j) into.mu[j] += d.mu[j];
  into.dim += d.dim;
}

TruncatedHomology merged_module(const MixedComplex& sub, const SliceKey& slice, int n, std::optional<int> aux_cap) {
  const CyclicTruncation t = cyclic_truncation(sub, n);
  TruncatedHomology out;
  out.slice = slice;
  out.n = n;
  for (int p : {0, 1}) {
    out.by_parity[p].n = n;
    out.by_parity[p].parity = p;
    out.by_parity[p].mu.assign(n, 0);
  }
  for (const auto& [s, th] : truncated_homology_module(t, aux_cap))
    for (const auto& [p, d] : th.by_parity) accumulate(out.by_parity[p], d);
  return out;
}

}  // namespace

void MixedComplex::add_connes_block(const PieceKey& src, const PieceKey& tgt, const SparseMatrix& m) {
  if (m.cols() != base.dim(src) || m.rows() != base.dim(tgt))
    throw std::invalid_argument("Connes block shape mismatch " + to_string(src) + " -> " + to_string(tgt));
  add_block(connes, src, tgt, m);
}

BlockMap compose(const BlockMap& x, const BlockMap& y) {
  BlockMap out;
  for (const auto& [src, row] : y) {
    for (const auto& [mid, m1] : row) {
      auto it = x.find(mid);
      if (it == x.end()) continue;
      for (const auto& [tgt, m2] : it->second) add_block(out, src, tgt, m2 * m1);
    }
  }
  return out;
}

BlockMap sum(const BlockMap& x, const BlockMap& y) {
  BlockMap out = x;
  for (const auto& [src, row] : y)
    for (const auto& [tgt, m] : row) add_block(out, src, tgt, m);
  return out;
}

bool is_zero(const BlockMap& m) {
  for (const auto& [src, row] : m)
    for (const auto& [tgt, block] : row)
      if (!block.is_zero()) return false;
  return true;
}

std::vector<Violation> validate_complex(const GradedComplex& c) {
  std::vector<Violation> out;
  check_operator(c, c.blocks(), "d", -1, out);
  check_zero(compose(c.blocks(), c.blocks()), checkable(c, {&c.blocks()}), "d^2 = 0", out);
  return out;
}

std::vector<Violation> validate_mixed(const MixedComplex& m) {
  std::vector<Violation> out = validate_complex(m.base);
  check_operator(m.base, m.connes, "B", 1, out);
  const auto sources = checkable(m.base, {&m.base.blocks(), &m.connes});
  check_zero(compose(m.connes, m.connes), sources, "B^2 = 0", out);
  check_zero(sum(compose(m.base.blocks(), m.connes), compose(m.connes, m.base.blocks())), sources, "dB + Bd = 0",
             out);
  return out;
}

MixedComplex restrict(const MixedComplex& m, const SliceKey& slice) {
  MixedComplex out;
  out.base.periodic = m.base.periodic;
  out.base.truncated = m.base.truncated;
  out.base.warnings = m.base.warnings;
  for (const auto& [key, p] : m.base.pieces())
    if (in_slice(slice, key)) copy_piece(out.base, key, p, p.basis);
  auto copy_ops = [&](const BlockMap& ops, auto&& add) {
    for (const auto& [src, row] : ops) {
      if (!in_slice(slice, src)) continue;
      for (const auto& [tgt, block] : row) {
        if (block.is_zero()) continue;
        if (!in_slice(slice, tgt))
          throw InvariantViolation("operator block " + to_string(src) + " -> " + to_string(tgt) +
                                   " leaves slice " + to_string(slice));
        add(src, tgt, block);
      }
    }
  };
  copy_ops(m.base.blocks(), [&](auto& s, auto& t, auto& b) { out.base.add_block(s, t, b); });
  copy_ops(m.connes, [&](auto& s, auto& t, auto& b) { out.add_connes_block(s, t, b); });
  return out;
}

MixedComplex direct_sum(const MixedComplex& a, const MixedComplex& b) {
  if (a.base.periodic != b.base.periodic) throw std::invalid_argument("direct sum of periodic and graded complexes");
  MixedComplex out;
  out.base.periodic = a.base.periodic;
  out.base.truncated = a.base.truncated || b.base.truncated;
  auto dim_in = [](const MixedComplex& m, const PieceKey& k) { return m.base.has_piece(k) ? m.base.dim(k) : 0; };
  std::map<PieceKey, std::pair<std::vector<std::string>, bool>> merged;
  for (const MixedComplex* m : {&a, &b}) {
    for (const auto& [key, p] : m->base.pieces()) {
      auto& [basis, complete] = merged.try_emplace(key, std::vector<std::string>{}, true).first->second;
      basis.insert(basis.end(), p.basis.begin(), p.basis.end());
      complete = complete && p.outgoing_complete && p.incoming_complete;
    }
  }
  for (auto& [key, entry] : merged) {
    out.base.add_piece(key, entry.first);
    if (!entry.second) out.base.mark_outgoing_incomplete(key);
  }
  auto embed = [&](const BlockMap& ops, bool second, auto&& add) {
    for (const auto& [src, row] : ops) {
      for (const auto& [tgt, block] : row) {
        const std::size_t r0 = second ? dim_in(a, tgt) : 0, c0 = second ? dim_in(a, src) : 0;
        SparseMatrix big(out.base.dim(tgt), out.base.dim(src));
        for (std::size_t j = 0; j < block.cols(); ++j)
          for (const auto& [i, v] : block.column(j)) big.add(r0 + i, c0 + j, v);
        add(src, tgt, big);
      }
    }
  };
  auto add_d = [&](auto& s, auto& t, auto& m) { out.base.add_block(s, t, m); };
  auto add_b = [&](auto& s, auto& t, auto& m) { out.add_connes_block(s, t, m); };
  embed(a.base.blocks(), false, add_d);
  embed(b.base.blocks(), true, add_d);
  embed(a.connes, false, add_b);
  embed(b.connes, true, add_b);
  return out;
}

CyclicTruncation cyclic_truncation(const MixedComplex& m, int n) {
  if (n < 1) throw std::invalid_argument("cyclic truncation needs n >= 1");
  CyclicTruncation t;
  t.n = n;
  t.complex.periodic = m.base.periodic;
  t.complex.truncated = m.base.truncated;
  t.complex.warnings = m.base.warnings;
  for (const auto& [key, p] : m.base.pieces()) {
    for (int k = 0; k < n; ++k) {
      std::vector<std::string> basis;
      for (const auto& b : p.basis) basis.push_back(k == 0 ? b : "u^" + std::to_string(k) + "*" + b);
      copy_piece(t.complex, lift(key, k), p, std::move(basis));
    }
  }
  for (int k = 0; k < n; ++k) {
    for (const auto& [src, row] : m.base.blocks())
      for (const auto& [tgt, block] : row) t.complex.add_block(lift(src, k), lift(tgt, k), block);
    if (k + 1 < n) {
      for (const auto& [src, row] : m.connes)
        for (const auto& [tgt, block] : row) t.complex.add_block(lift(src, k), lift(tgt, k + 1), block);
      for (const auto& [key, p] : m.base.pieces())
        add_block(t.u, lift(key, k), lift(key, k + 1), SparseMatrix::identity(p.basis.size()));
    }
  }
  return t;
}

bool ModuleDecomposition::is_free() const {
  for (std::size_t j = 0; j + 1 < mu.size(); ++j)
    if (mu[j] != 0) return false;
  return true;
}

std::string ModuleDecomposition::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (mu[j] == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << mu[j] << "*k[u]/u^" << j + 1;
  }
  if (first) os << "0";
  return os.str();
}

bool TruncatedHomology::is_free() const {
  return std::all_of(by_parity.begin(), by_parity.end(), [](const auto& e) { return e.second.is_free(); });
}

std::size_t TruncatedHomology::dim() const {
  std::size_t n = 0;
  for (const auto& [p, d] : by_parity) n += d.dim;
  return n;
}

std::map<SliceKey, TruncatedHomology> truncated_homology_module(const CyclicTruncation& t, std::optional<int> aux_cap,
                                                               unsigned threads) {
  const BlockMap* ops[] = {&t.complex.blocks(), &t.u};
  const std::vector<SliceKey> keys = slices(t.complex, ops);
  std::vector<TruncatedHomology> results(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t i) {
    SliceLayout layout(t.complex, keys[i], Grading::Parity, aux_cap);
    TruncatedHomology th;
    th.slice = keys[i];
    th.n = t.n;
    for (int label : layout.labels()) {
      const Subquotient sq = subquotient(layout, label, &t.u, t.n);
      th.by_parity[label] = decompose(sq.op_ranks, t.n, label);
    }
    results[i] = std::move(th);
  });
  std::map<SliceKey, TruncatedHomology> out;
  for (std::size_t i = 0; i < keys.size(); ++i) out.emplace(keys[i], std::move(results[i]));
  return out;
}

std::vector<SliceKey> mixed_slices(const MixedComplex& m) {
  const BlockMap* ops[] = {&m.base.blocks(), &m.connes};
  return slices(m.base, ops);
}

SliceHomology base_homology(const MixedComplex& m, const SliceKey& slice, std::optional<int> aux_cap) {
  return slice_homology(m.base, slice, aux_cap);
}

int amplitude(const MixedComplex& m, const SliceKey& slice, std::optional<int> aux_cap) {
  std::optional<int> lo, hi;
  for (const auto& [key, p] : m.base.pieces()) {
    if (!in_slice(slice, key) || (aux_cap && key.aux > *aux_cap) || p.basis.empty()) continue;
    lo = std::min(lo.value_or(key.hdeg), key.hdeg);
    hi = std::max(hi.value_or(key.hdeg), key.hdeg);
  }
  return lo ? *hi - *lo : 0;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::PassStructural: return "PASS-structural";
    case Verdict::Fail: return "FAIL";
  }
  return "?";
}

DegenerationResult degeneration_check(const MixedComplex& m, const SliceKey& slice, std::optional<int> aux_cap,
                                      bool allow_structural) {
  DegenerationResult res;
  res.slice = slice;
  res.amplitude = amplitude(m, slice, aux_cap);
  res.hochschild = by_parity(base_homology(m, slice, aux_cap));
  if (allow_structural && (res.hochschild[0] == 0 || res.hochschild[1] == 0)) {
    res.verdict = Verdict::PassStructural;
    return res;
  }
  const MixedComplex sub = restrict(m, slice);
  for (int n = 1; n <= res.amplitude + 1; ++n) {
    const TruncatedHomology th = merged_module(sub, slice, n, aux_cap);
    for (const auto& [p, d] : th.by_parity) {
      if (!d.is_free() || d.free_rank() != res.hochschild[p]) {
        res.verdict = Verdict::Fail;
        res.failing_n = n;
        res.witness = th.by_parity;
        return res;
      }
    }
  }
  res.verdict = Verdict::Pass;
  return res;
}

std::map<SliceKey, DegenerationResult> degeneration_report(const MixedComplex& m, const MixedOptions& options) {
  std::vector<SliceKey> keys;
  for (auto& s : mixed_slices(m))
    if (!options.filter || options.filter(s)) keys.push_back(std::move(s));
  std::vector<DegenerationResult> results(keys.size());
  parallel_for(keys.size(), options.threads,
               [&](std::size_t i) { results[i] = degeneration_check(m, keys[i], options.aux_cap); });
  std::map<SliceKey, DegenerationResult> out;
  for (std::size_t i = 0; i < keys.size(); ++i) out.emplace(keys[i], std::move(results[i]));
  return out;
}

std::map<int, std::size_t> periodic_dimensions(const MixedComplex& m, const SliceKey& slice,
                                               std::optional<int> aux_cap, std::optional<int> n) {
  const int level = n.value_or(amplitude(m, slice, aux_cap) + 1);
  const TruncatedHomology th = merged_module(restrict(m, slice), slice, level, aux_cap);
  std::map<int, std::size_t> out;
  for (const auto& [p, d] : th.by_parity) out[p] = d.free_rank();
  return out;
}

NegativeCyclicReport negative_cyclic_report(const MixedComplex& m, const SliceKey& slice, int n,
                                            std::optional<int> aux_cap) {
  NegativeCyclicReport r;
  r.slice = slice;
  r.n = n;
  r.hochschild = by_parity(base_homology(m, slice, aux_cap));
  r.module = merged_module(restrict(m, slice), slice, n, aux_cap);
  r.free_of_hochschild_rank = true;
  for (const auto& [p, d] : r.module.by_parity)
    if (!d.is_free() || d.free_rank() != r.hochschild[p]) r.free_of_hochschild_rank = false;
  std::ostringstream os;
  if (r.free_of_hochschild_rank) {
    os << "free of rank " << r.hochschild[0] + r.hochschild[1] << " over k[u]/u^" << n
       << "; agrees with H(C^-) = H(C)[[u]] at this level";
  } else {
    os << "not free of rank dim H(C) over k[u]/u^" << n << " (even: " << r.module.by_parity[0].to_string()
       << ", odd: " << r.module.by_parity[1].to_string() << "); H(C^-) = H(C)[[u]] fails";
  }
  r.commentary = os.str();
  return r;
}

std::size_t SpectralPages::total(std::size_t page) const {
  std::size_t n = 0;
  for (const auto& [h, d] : pages.at(page)) n += d;
  return n;
}

SpectralPages ss_pages(const MixedComplex& m, const SliceKey& slice, int r_max, std::optional<int> aux_cap) {
  if (r_max < 1) throw std::invalid_argument("ss_pages needs r_max >= 1");
  const GradedComplex& c = m.base;
  const Grading g = c.periodic ? Grading::Parity : Grading::Homological;
  const SliceLayout layout(c, slice, g, aux_cap);
  auto shift = [&](int label, int s) { return g == Grading::Parity ? parity_of(label + s) : label + s; };

  for (const auto& label : layout.labels())
    for (const auto& key : layout.pieces(label))
      if (layout.selected(key) && !c.piece(key).outgoing_complete)
        throw IncompleteWindow("incomplete window: differential of piece " + to_string(key) +
                               " leaves the built truncation; supply a larger aux cap");

  std::map<std::pair<int, bool>, SparseMatrix> cache;
  auto op = [&](int from, bool is_b) -> const SparseMatrix& {
    auto [it, fresh] = cache.try_emplace({from, is_b});
    if (fresh)
      it->second = is_b ? layout.assemble(m.connes, from, shift(from, 1))
                        : layout.assemble(c.blocks(), from, shift(from, -1));
    return it->second;
  };
  // Coordinates usable as chain variables at a label.
  auto coords = [&](int label, bool selected_only) {
    std::vector<std::size_t> out;
    for (const auto& key : layout.pieces(label)) {
      if (selected_only ? !layout.selected(key) : !c.piece(key).outgoing_complete) continue;
      const std::size_t off = layout.offset(key);
      for (std::size_t i = 0; i < c.dim(key); ++i) out.push_back(off + i);
    }
    return out;
  };

  struct Var {
    int label;
    std::vector<std::size_t> idx;
  };
  // Kernel of the zig-zag system: eq_j = d v_j + B v_{j-1}, for j in [0, neq).
  auto zigzag_kernel = [&](const std::vector<Var>& vars, std::size_t neq) {
    std::vector<std::size_t> col_off, row_off;
    std::size_t cols = 0, rows = 0;
    for (const auto& v : vars) {
      col_off.push_back(cols);
      cols += v.idx.size();
    }
    for (std::size_t j = 0; j < neq; ++j) {
      row_off.push_back(rows);
      rows += layout.dim(shift(vars[j].label, -1));
    }
    SparseMatrix big(rows, cols);
    auto place = [&](std::size_t var, std::size_t eq, const SparseMatrix& o) {
      for (std::size_t cidx = 0; cidx < vars[var].idx.size(); ++cidx)
        for (const auto& [r, val] : o.column(vars[var].idx[cidx])) big.add(row_off[eq] + r, col_off[var] + cidx, val);
    };
    for (std::size_t j = 0; j < neq; ++j) {
      place(j, j, op(vars[j].label, false));
      if (j > 0) place(j - 1, j, op(vars[j - 1].label, true));
    }
    return std::make_pair(kernel(big), col_off);
  };
  auto expand = [&](const SparseVector& v, std::size_t begin, const Var& var) {
    SparseVector out;
    for (const auto& [i, val] : v)
      if (i >= begin && i < begin + var.idx.size()) out.emplace_back(var.idx[i - begin], val);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  };

  SpectralPages out;
  out.slice = slice;
  for (int r = 1; r <= r_max; ++r) {
    std::map<int, std::size_t> page;
    for (int h : layout.labels()) {
      // Z_r: x_0 in C_h with x_i in C_{h+2i}, d x_0 = 0, d x_i + B x_{i-1} = 0 for i < r.
      std::vector<Var> xs;
      for (int i = 0; i < r; ++i) xs.push_back({shift(h, 2 * i), coords(shift(h, 2 * i), i == 0)});
      const auto [zker, zoff] = zigzag_kernel(xs, static_cast<std::size_t>(r));
      EchelonBasis z;
      for (const auto& v : zker) z.insert(expand(v, zoff[0], xs[0]));

      // B_r: B y_{r-2} + d y_{r-1} with y_k in C_{h+1-2(r-1)+2k}, d y_0 = 0, d y_k + B y_{k-1} = 0 for k < r-1.
      EchelonBasis all;
      const int top = shift(h, 1);
      {
        const SparseMatrix& d = op(top, false);
        for (std::size_t i : coords(top, false)) all.insert(d.column(i));
      }
      if (r >= 2) {
        std::vector<Var> ys;
        for (int k = 0; k <= r - 2; ++k) {
          const int l = shift(h, 1 - 2 * (r - 1) + 2 * k);
          ys.push_back({l, coords(l, false)});
        }
        const auto [yker, yoff] = zigzag_kernel(ys, static_cast<std::size_t>(r - 1));
        const SparseMatrix& b = op(ys.back().label, true);
        for (const auto& v : yker) all.insert(b.apply(expand(v, yoff.back(), ys.back())));
      }
      const std::size_t begin = layout.selected_begin(h);
      std::size_t bdim = 0;
      for (const auto& v : all.vectors())
        if (v.front().first >= begin) ++bdim;
      if (bdim > z.dim()) throw InvariantViolation("spectral sequence boundaries exceed cycles at " + to_string(slice));
      page[h] = z.dim() - bdim;
    }
    out.pages.push_back(std::move(page));
  }
  return out;
}

std::size_t HodgeTable::at(int p, int n) const {
  auto it = entries.find({p, n});
  return it == entries.end() ? 0 : it->second;
}

std::size_t HodgeTable::total() const {
  std::size_t t = 0;
  for (const auto& [k, v] : entries) t += v;
  return t;
}

namespace {

void add_homology(HodgeTable& table, const SliceHomology& h) {
  for (const auto& [label, d] : h.dims) {
    if (d == 0) continue;
    if (h.grading == Grading::Parity) {
      table.entries[{0, label}] += d;
    } else {
      const int n = parity_of(label);
      table.entries[{(label + n) / 2, n}] += d;
    }
  }
}

}  // namespace

HodgeTable hodge_table(const MixedComplex& m, const MixedOptions& options) {
  HodgeTable table;
  for (const auto& [slice, res] : degeneration_report(m, options)) {
    if (res.verdict == Verdict::Fail)
      throw Refused("Hodge table refused: degeneration fails at n = " + std::to_string(res.failing_n) +
                    " on slice " + to_string(slice));
    add_homology(table, base_homology(m, slice, options.aux_cap));
  }
  return table;
}

HodgeTable hodge_table(const GradedComplex& c, const MixedOptions& options) {
  HomologyOptions ho;
  ho.aux_cap = options.aux_cap;
  ho.filter = options.filter;
  ho.threads = options.threads;
  HodgeTable table;
  for (const auto& [slice, h] : homology(c, ho)) {
    const auto p = by_parity(h);
    if (p.at(0) != 0 && p.at(1) != 0)
      throw Refused("Hodge table refused: no Connes operator and homology in both parities on slice " +
                    to_string(slice));
    add_homology(table, h);
  }
  return table;
}

}  // namespace nchodge
