#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nchodge/complex.hpp"

namespace nchodge {

/// A complex with a square-zero operator B of homological degree +1 anticommuting with d.
struct MixedComplex {
  GradedComplex base;
  BlockMap connes;

  void add_connes_block(const PieceKey& src, const PieceKey& tgt, const SparseMatrix& m);
};

struct Violation {
  std::string identity;
  PieceKey piece;
  std::string detail;
};

/// Composition x o y of block operators.
BlockMap compose(const BlockMap& x, const BlockMap& y);
BlockMap sum(const BlockMap& x, const BlockMap& y);
bool is_zero(const BlockMap& m);

/// d^2 = 0, degree and weight behavior of d.
std::vector<Violation> validate_complex(const GradedComplex& c);
/// Additionally B^2 = 0, dB + Bd = 0 and degree/weight behavior of B.
std::vector<Violation> validate_mixed(const MixedComplex& m);

/// Pieces and blocks of one slice.
MixedComplex restrict(const MixedComplex& m, const SliceKey& slice);
/// Direct sum; pieces with equal keys are merged block-diagonally.
MixedComplex direct_sum(const MixedComplex& a, const MixedComplex& b);

/// C tensor k[u]/u^n with differential d + uB. Piece (key, k) holds u^k C at hdeg key.hdeg - 2k.
struct CyclicTruncation {
  int n = 1;
  GradedComplex complex;
  BlockMap u;
};

CyclicTruncation cyclic_truncation(const MixedComplex& m, int n);

/// Cyclic factors k[u]/u^j of the homology in one parity.
struct ModuleDecomposition {
  int n = 1;
  int parity = 0;
  std::vector<std::size_t> mu;  // mu[j-1] = multiplicity of k[u]/u^j
  std::size_t dim = 0;

  bool is_free() const;
  std::size_t free_rank() const { return mu.empty() ? 0 : mu.back(); }
  std::string to_string() const;
};

struct TruncatedHomology {
  SliceKey slice;
  int n = 1;
  std::map<int, ModuleDecomposition> by_parity;

  bool is_free() const;
  std::size_t dim() const;
};

/// Per-slice module structure of H(C^(n)); slices run in parallel.
std::map<SliceKey, TruncatedHomology> truncated_homology_module(const CyclicTruncation& t,
                                                               std::optional<int> aux_cap = {},
                                                               unsigned threads = 1);

struct MixedOptions {
  std::optional<int> aux_cap;
  std::function<bool(const SliceKey&)> filter;
  unsigned threads = 1;
};

/// Slices of m that are closed under both d and B.
std::vector<SliceKey> mixed_slices(const MixedComplex& m);

/// H(M, d) of one slice, per label of the complex's grading.
SliceHomology base_homology(const MixedComplex& m, const SliceKey& slice, std::optional<int> aux_cap = {});

/// Span of homological degrees occurring in the selected pieces of a slice.
int amplitude(const MixedComplex& m, const SliceKey& slice, std::optional<int> aux_cap = {});

enum class Verdict { Pass, PassStructural, Fail };
std::string to_string(Verdict v);

struct DegenerationResult {
  SliceKey slice;
  Verdict verdict = Verdict::Pass;
  int amplitude = 0;
  std::map<int, std::size_t> hochschild;  // dim H(M, d) per parity
  int failing_n = 0;
  std::map<int, ModuleDecomposition> witness;
};

/// With `allow_structural`, single-parity homology passes without checking truncations.
DegenerationResult degeneration_check(const MixedComplex& m, const SliceKey& slice,
                                      std::optional<int> aux_cap = {}, bool allow_structural = true);
std::map<SliceKey, DegenerationResult> degeneration_report(const MixedComplex& m, const MixedOptions& options = {});

/// Rank over k((u)) per parity, read off as the free rank of H(C^(n)) at n = amplitude + 1
/// (or at `n` when given).
std::map<int, std::size_t> periodic_dimensions(const MixedComplex& m, const SliceKey& slice,
                                               std::optional<int> aux_cap = {}, std::optional<int> n = {});

struct NegativeCyclicReport {
  SliceKey slice;
  int n = 1;
  TruncatedHomology module;
  std::map<int, std::size_t> hochschild;
  bool free_of_hochschild_rank = false;
  std::string commentary;
};

NegativeCyclicReport negative_cyclic_report(const MixedComplex& m, const SliceKey& slice, int n,
                                            std::optional<int> aux_cap = {});

/// Dimensions of E_r in the column p = 0, keyed by total degree (or parity for periodic
/// complexes); pages[0] is E_1.
struct SpectralPages {
  SliceKey slice;
  std::vector<std::map<int, std::size_t>> pages;

  std::size_t total(std::size_t page) const;
};

SpectralPages ss_pages(const MixedComplex& m, const SliceKey& slice, int r_max, std::optional<int> aux_cap = {});

/// h^{p,n}, keyed by (p, n) with n in {0, 1}.
struct HodgeTable {
  std::map<std::pair<int, int>, std::size_t> entries;

  std::size_t at(int p, int n) const;
  std::size_t total() const;
};

/// Refuses unless every selected slice degenerates.
HodgeTable hodge_table(const MixedComplex& m, const MixedOptions& options = {});
/// For complexes without an explicit B; only single-parity homology is accepted.
HodgeTable hodge_table(const GradedComplex& c, const MixedOptions& options = {});

}  // namespace nchodge
