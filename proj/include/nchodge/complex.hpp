#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nchodge/group.hpp"
#include "nchodge/sparse.hpp"

namespace nchodge {

/// Index of one based piece of a complex.
///
/// `hdeg` is the chain-level homological degree (form degree, exterior degree or bar length
/// up to sign conventions). `aux` is the total polynomial degree or internal weight, `loop`
/// the torus loop degree (empty without a torus), `sector` the inertia component / group
/// element of the finite part, and `upow` the power of u in a cyclic truncation.
struct PieceKey {
  int hdeg = 0;
  Character weight;
  int aux = 0;
  std::vector<int> loop;
  int sector = 0;
  int upow = 0;

  auto operator<=>(const PieceKey&) const = default;
  bool operator==(const PieceKey&) const = default;
};

std::string to_string(const PieceKey& key);

struct Piece {
  std::vector<std::string> basis;
  // False when some differential image left the built truncation.
  bool outgoing_complete = true;
  // False when boundaries into this piece come from pieces that were not built.
  bool incoming_complete = true;
  // False when image terms outside a loop window were dropped.
  bool exact = true;
};

/// src -> tgt -> matrix of shape dim(tgt) x dim(src).
using BlockMap = std::map<PieceKey, std::map<PieceKey, SparseMatrix>>;

void add_block(BlockMap& blocks, const PieceKey& src, const PieceKey& tgt, const SparseMatrix& m);

/// A finite family of based pieces with differential blocks.
///
/// Non-periodic complexes have d of homological degree -1. Periodic complexes are
/// beta-specialized Z/2-graded complexes: d may shift hdeg by any odd amount and homology is
/// collected per parity.
class GradedComplex {
 public:
  bool periodic = false;
  bool truncated = false;
  std::vector<std::string> warnings;

  void add_piece(const PieceKey& key, std::vector<std::string> basis);
  bool has_piece(const PieceKey& key) const { return pieces_.contains(key); }
  const Piece& piece(const PieceKey& key) const;
  std::size_t dim(const PieceKey& key) const { return piece(key).basis.size(); }
  void add_block(const PieceKey& src, const PieceKey& tgt, const SparseMatrix& m);
  void mark_outgoing_incomplete(const PieceKey& key);
  void mark_incoming_incomplete(const PieceKey& key);
  void mark_inexact(const PieceKey& key);
  void add_warning(std::string w);

  const std::map<PieceKey, Piece>& pieces() const { return pieces_; }
  const BlockMap& blocks() const { return blocks_; }
  std::size_t total_dim() const;

 private:
  std::map<PieceKey, Piece> pieces_;
  BlockMap blocks_;
};

bool preserves_aux(const BlockMap& blocks);
bool preserves_loop(const BlockMap& blocks);

/// Set of pieces closed under the differential; unset fields are summed over.
struct SliceKey {
  Character weight;
  int sector = 0;
  std::optional<int> aux;
  std::optional<std::vector<int>> loop;

  auto operator<=>(const SliceKey&) const = default;
  bool operator==(const SliceKey&) const = default;
};

std::string to_string(const SliceKey& s);
bool in_slice(const SliceKey& s, const PieceKey& key);
SliceKey slice_of(const PieceKey& key, bool by_aux, bool by_loop);
/// Finest slicing compatible with all the given operators.
std::vector<SliceKey> slices(const GradedComplex& c, std::span<const BlockMap* const> operators);
std::vector<SliceKey> slices(const GradedComplex& c);

enum class Grading { Homological, Parity };

int label_of(const PieceKey& key, Grading g);

/// Coordinates of one slice, grouped by label. Within a label, pieces above the aux cap
/// come first so that eliminating in index order projects them out first.
class SliceLayout {
 public:
  SliceLayout(const GradedComplex& c, const SliceKey& slice, Grading grading, std::optional<int> aux_cap);

  Grading grading() const { return grading_; }
  const SliceKey& slice() const { return slice_; }
  std::vector<int> labels() const;
  std::span<const PieceKey> pieces(int label) const;
  std::size_t dim(int label) const;
  /// First coordinate of the selected (aux <= cap) part.
  std::size_t selected_begin(int label) const;
  std::size_t offset(const PieceKey& key) const;
  bool selected(const PieceKey& key) const;
  const GradedComplex& complex() const { return *complex_; }

  /// Matrix of `ops` from label `from` to label `to`, using only sources that pass `use_source`.
  SparseMatrix assemble(const BlockMap& ops, int from, int to,
                        const std::function<bool(const PieceKey&)>& use_source) const;
  SparseMatrix assemble(const BlockMap& ops, int from, int to) const;

 private:
  const GradedComplex* complex_;
  SliceKey slice_;
  Grading grading_;
  std::optional<int> cap_;
  std::map<int, std::vector<PieceKey>> by_label_;
  std::map<int, std::size_t> selected_begin_;
  std::map<PieceKey, std::size_t> offsets_;
};

int next_label(int label, Grading g);  // target of d
int prev_label(int label, Grading g);  // source of boundaries

/// Homology at one label of a slice, restricted to the selected (aux <= cap) part:
/// cycles supported in the selection modulo boundaries that lie in the selection.
struct Subquotient {
  std::size_t chain_dim = 0;
  std::size_t cycles = 0;
  std::size_t boundaries = 0;
  std::size_t dim = 0;
  /// rank of U^j on homology for j = 0..max_power (only when a nilpotent operator is given).
  std::vector<std::size_t> op_ranks;
  std::vector<SparseVector> representatives;
};

Subquotient subquotient(const SliceLayout& layout, int label, const BlockMap* nilpotent = nullptr,
                        int max_power = 0, bool want_representatives = false);

struct SliceHomology {
  SliceKey slice;
  Grading grading = Grading::Homological;
  std::map<int, std::size_t> chain_dims;
  std::map<int, std::size_t> dims;
  std::map<int, std::vector<SparseVector>> representatives;
  bool truncated = false;

  std::size_t total() const;
};

SliceHomology slice_homology(const GradedComplex& c, const SliceKey& slice, std::optional<int> aux_cap = {},
                             bool want_representatives = false);

struct HomologyOptions {
  std::optional<int> aux_cap;
  std::function<bool(const SliceKey&)> filter;
  unsigned threads = 1;
};

using HomologyReport = std::map<SliceKey, SliceHomology>;

/// Homology of every slice that passes the filter; slices run in parallel, merged by key.
HomologyReport homology(const GradedComplex& c, const HomologyOptions& options = {});

}  // namespace nchodge
