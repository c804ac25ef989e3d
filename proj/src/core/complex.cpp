#include "nchodge/complex.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "nchodge/errors.hpp"
#include "nchodge/parallel.hpp"

namespace nchodge {

std::string to_string(const PieceKey& key) {
  std::ostringstream os;
  os << "{hdeg=" << key.hdeg << ", weight=" << to_string(key.weight) << ", aux=" << key.aux;
  if (!key.loop.empty()) {
    os << ", loop=(";
    for (std::size_t i = 0; i < key.loop.size(); ++i) os << (i ? "," : "") << key.loop[i];
    os << ')';
  }
  if (key.sector != 0) os << ", sector=" << key.sector;
  if (key.upow != 0) os << ", u^" << key.upow;
  os << '}';
  return os.str();
}

void add_block(BlockMap& blocks, const PieceKey& src, const PieceKey& tgt, const SparseMatrix& m) {
  auto& row = blocks[src];
  auto it = row.find(tgt);
  if (it == row.end())
    row.emplace(tgt, m);
  else
    it->second += m;
}

void GradedComplex::add_piece(const PieceKey& key, std::vector<std::string> basis) {
  auto [it, inserted] = pieces_.try_emplace(key);
  if (!inserted) throw std::invalid_argument("duplicate piece " + to_string(key));
  it->second.basis = std::move(basis);
}

const Piece& GradedComplex::piece(const PieceKey& key) const {
  auto it = pieces_.find(key);
  if (it == pieces_.end()) throw IncompleteWindow("missing piece " + to_string(key));
  return it->second;
}

void GradedComplex::add_block(const PieceKey& src, const PieceKey& tgt, const SparseMatrix& m) {
  if (m.cols() != dim(src) || m.rows() != dim(tgt))
    throw std::invalid_argument("block shape mismatch " + to_string(src) + " -> " + to_string(tgt));
  nchodge::add_block(blocks_, src, tgt, m);
}

void GradedComplex::mark_outgoing_incomplete(const PieceKey& key) { pieces_.at(key).outgoing_complete = false; }
void GradedComplex::mark_incoming_incomplete(const PieceKey& key) { pieces_.at(key).incoming_complete = false; }

void GradedComplex::mark_inexact(const PieceKey& key) { pieces_.at(key).exact = false; }

void GradedComplex::add_warning(std::string w) {
  if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(std::move(w));
}

std::size_t GradedComplex::total_dim() const {
  std::size_t n = 0;
  for (const auto& [k, p] : pieces_) n += p.basis.size();
  return n;
}

bool preserves_aux(const BlockMap& blocks) {
  for (const auto& [src, row] : blocks)
    for (const auto& [tgt, m] : row)
      if (tgt.aux != src.aux && !m.is_zero()) return false;
  return true;
}

bool preserves_loop(const BlockMap& blocks) {
  for (const auto& [src, row] : blocks)
    for (const auto& [tgt, m] : row)
      if (tgt.loop != src.loop && !m.is_zero()) return false;
  return true;
}

std::string to_string(const SliceKey& s) {
  std::ostringstream os;
  os << "{weight=" << to_string(s.weight) << ", sector=" << s.sector;
  if (s.aux) os << ", aux=" << *s.aux;
  if (s.loop) {
    os << ", loop=(";
    for (std::size_t i = 0; i < s.loop->size(); ++i) os << (i ? "," : "") << (*s.loop)[i];
    os << ')';
  }
  os << '}';
  return os.str();
}

bool in_slice(const SliceKey& s, const PieceKey& key) {
  if (key.weight != s.weight || key.sector != s.sector) return false;
  if (s.aux && key.aux != *s.aux) return false;
  if (s.loop && key.loop != *s.loop) return false;
  return true;
}

SliceKey slice_of(const PieceKey& key, bool by_aux, bool by_loop) {
  SliceKey s{key.weight, key.sector, std::nullopt, std::nullopt};
  if (by_aux) s.aux = key.aux;
  if (by_loop) s.loop = key.loop;
  return s;
}

std::vector<SliceKey> slices(const GradedComplex& c, std::span<const BlockMap* const> operators) {
  bool by_aux = true, by_loop = true;
  for (const BlockMap* ops : operators) {
    by_aux = by_aux && preserves_aux(*ops);
    by_loop = by_loop && preserves_loop(*ops);
  }
  std::set<SliceKey> out;
  for (const auto& [key, piece] : c.pieces()) out.insert(slice_of(key, by_aux, by_loop));
  return {out.begin(), out.end()};
}

std::vector<SliceKey> slices(const GradedComplex& c) {
  const BlockMap* ops[] = {&c.blocks()};
  return slices(c, ops);
}

int label_of(const PieceKey& key, Grading g) {
  if (g == Grading::Homological) return key.hdeg;
  return ((key.hdeg % 2) + 2) % 2;
}

int next_label(int label, Grading g) { return g == Grading::Homological ? label - 1 : 1 - label; }
int prev_label(int label, Grading g) { return g == Grading::Homological ? label + 1 : 1 - label; }

SliceLayout::SliceLayout(const GradedComplex& c, const SliceKey& slice, Grading grading, std::optional<int> aux_cap)
    : complex_(&c), slice_(slice), grading_(grading), cap_(aux_cap) {
  std::map<int, std::vector<PieceKey>> outside, inside;
  for (const auto& [key, piece] : c.pieces()) {
    if (!in_slice(slice, key)) continue;
    const int l = label_of(key, grading);
    (selected(key) ? inside : outside)[l].push_back(key);
    by_label_[l];
  }
  for (auto& [l, keys] : by_label_) {
    std::size_t off = 0;
    for (const auto& k : outside[l]) {
      keys.push_back(k);
      offsets_[k] = off;
      off += c.dim(k);
    }
    selected_begin_[l] = off;
    for (const auto& k : inside[l]) {
      keys.push_back(k);
      offsets_[k] = off;
      off += c.dim(k);
    }
  }
}

std::vector<int> SliceLayout::labels() const {
  std::vector<int> out;
  for (const auto& [l, k] : by_label_) out.push_back(l);
  return out;
}

std::span<const PieceKey> SliceLayout::pieces(int label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return {};
  return it->second;
}

std::size_t SliceLayout::dim(int label) const {
  std::size_t n = 0;
  for (const auto& k : pieces(label)) n += complex_->dim(k);
  return n;
}

std::size_t SliceLayout::selected_begin(int label) const {
  auto it = selected_begin_.find(label);
  return it == selected_begin_.end() ? 0 : it->second;
}

std::size_t SliceLayout::offset(const PieceKey& key) const {
  auto it = offsets_.find(key);
  if (it == offsets_.end()) throw InvariantViolation("piece " + to_string(key) + " not in slice " + to_string(slice_));
  return it->second;
}

bool SliceLayout::selected(const PieceKey& key) const { return !cap_ || key.aux <= *cap_; }

SparseMatrix SliceLayout::assemble(const BlockMap& ops, int from, int to,
                                   const std::function<bool(const PieceKey&)>& use_source) const {
  SparseMatrix out(dim(to), dim(from));
  for (const auto& src : pieces(from)) {
    if (use_source && !use_source(src)) continue;
    auto row = ops.find(src);
    if (row == ops.end()) continue;
    const std::size_t so = offset(src);
    for (const auto& [tgt, m] : row->second) {
      if (m.is_zero()) continue;
      if (!in_slice(slice_, tgt) || label_of(tgt, grading_) != to)
        throw InvariantViolation("operator block " + to_string(src) + " -> " + to_string(tgt) +
                                 " leaves slice " + to_string(slice_));
      const std::size_t to_off = offset(tgt);
      for (std::size_t j = 0; j < m.cols(); ++j)
        for (const auto& [i, v] : m.column(j)) out.add(to_off + i, so + j, v);
    }
  }
  return out;
}

SparseMatrix SliceLayout::assemble(const BlockMap& ops, int from, int to) const { return assemble(ops, from, to, {}); }

Subquotient subquotient(const SliceLayout& layout, int label, const BlockMap* nilpotent, int max_power,
                        bool want_representatives) {
  const GradedComplex& c = layout.complex();
  const Grading g = layout.grading();
  const std::size_t begin = layout.selected_begin(label);
  const std::size_t n = layout.dim(label);
  for (const auto& key : layout.pieces(label)) {
    if (!layout.selected(key)) continue;
    const Piece& p = c.piece(key);
    if (!p.outgoing_complete)
      throw IncompleteWindow("incomplete window: differential of piece " + to_string(key) +
                             " leaves the built truncation; supply a larger aux cap");
    if (!p.incoming_complete)
      throw IncompleteWindow("incomplete window: boundaries into piece " + to_string(key) +
                             " need pieces that were not built");
  }

  Subquotient out;
  out.chain_dim = n - begin;

  // cycles supported on the selection
  const SparseMatrix d = layout.assemble(c.blocks(), label, next_label(label, g),
                                         [&](const PieceKey& k) { return layout.selected(k); });
  SparseMatrix dv(d.rows(), n - begin);
  for (std::size_t j = begin; j < n; ++j)
    for (const auto& [i, v] : d.column(j)) dv.add(i, j - begin, v);
  std::vector<SparseVector> cycles = kernel(dv);
  for (auto& z : cycles)
    for (auto& [i, v] : z) i += begin;
  out.cycles = cycles.size();

  // boundaries from complete sources, intersected with the selection
  const SparseMatrix db = layout.assemble(c.blocks(), prev_label(label, g), label,
                                          [&](const PieceKey& k) { return c.piece(k).outgoing_complete; });
  EchelonBasis all;
  for (std::size_t j = 0; j < db.cols(); ++j) all.insert(db.column(j));
  EchelonBasis boundaries;
  for (auto& v : all.vectors())
    if (v.front().first >= begin) boundaries.insert(std::move(v));
  out.boundaries = boundaries.dim();
  if (out.boundaries > out.cycles) throw InvariantViolation("more boundaries than cycles; d^2 != 0?");
  out.dim = out.cycles - out.boundaries;

  if (nilpotent) {
    const SparseMatrix u = layout.assemble(*nilpotent, label, label);
    out.op_ranks.push_back(out.dim);
    std::vector<SparseVector> cur = cycles;
    for (int j = 1; j <= max_power; ++j) {
      EchelonBasis e = boundaries;
      for (auto& z : cur) {
        z = u.apply(z);
        e.insert(z);
      }
      out.op_ranks.push_back(e.dim() - boundaries.dim());
    }
  }
  if (want_representatives) {
    EchelonBasis e = boundaries;
    for (const auto& z : cycles)
      if (e.insert(z)) out.representatives.push_back(z);
  }
  return out;
}

std::size_t SliceHomology::total() const {
  std::size_t n = 0;
  for (const auto& [l, d] : dims) n += d;
  return n;
}

SliceHomology slice_homology(const GradedComplex& c, const SliceKey& slice, std::optional<int> aux_cap,
                             bool want_representatives) {
  const Grading g = c.periodic ? Grading::Parity : Grading::Homological;
  SliceLayout layout(c, slice, g, aux_cap);
  SliceHomology out;
  out.slice = slice;
  out.grading = g;
  out.truncated = c.truncated;
  for (int label : layout.labels()) {
    Subquotient sq = subquotient(layout, label, nullptr, 0, want_representatives);
    out.chain_dims[label] = sq.chain_dim;
    out.dims[label] = sq.dim;
    if (want_representatives) out.representatives[label] = std::move(sq.representatives);
  }
  return out;
}

HomologyReport homology(const GradedComplex& c, const HomologyOptions& options) {
  std::vector<SliceKey> keys;
  for (auto& s : slices(c))
    if (!options.filter || options.filter(s)) keys.push_back(std::move(s));
  std::vector<SliceHomology> results(keys.size());
  parallel_for(keys.size(), options.threads,
               [&](std::size_t i) { results[i] = slice_homology(c, keys[i], options.aux_cap); });
  HomologyReport report;
  for (std::size_t i = 0; i < keys.size(); ++i) report.emplace(keys[i], std::move(results[i]));
  return report;
}

}  // namespace nchodge
