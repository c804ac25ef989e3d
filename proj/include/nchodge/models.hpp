#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nchodge/complex.hpp"
#include "nchodge/group.hpp"
#include "nchodge/mixed.hpp"
#include "nchodge/poly.hpp"

namespace nchodge {

enum class ModelKind { Forms, InertiaForms, KoszulLoop, KoszulMF, BGa };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

struct ModelSpec {
  GroupSpec group;
  std::vector<Character> weights;  // one per coordinate x1..xn
  std::optional<Poly> potential;
  ModelKind kind = ModelKind::Forms;
  std::optional<int> degree_cap;
  int loop_window = 0;  // loop degrees in [-J, J] per torus factor
  std::optional<std::pair<int, int>> weight_window;
  int max_weight = 1;
  std::optional<int> trunc_n;
  unsigned threads = 1;

  int nvars() const { return static_cast<int>(weights.size()); }
};

/// Schema-level checks: group, weight shapes, invariance of W. Throws InputError.
void validate(const ModelSpec& spec);

/// True iff some lambda has <lambda, a_i> > 0 for every torus weight a_i (exact Fourier-Motzkin).
bool in_open_half_space(const std::vector<std::vector<long>>& torus_weights);
/// Cohomological properness of the weight-0 part: torus weights strictly inside an open half-space.
bool is_proper(const ModelSpec& spec);

/// Largest aux degree whose homology is requested: the degree cap, or 0 when the
/// weight-0 part is just the constants. Throws InputError otherwise.
int analysis_cap(const ModelSpec& spec);
/// Aux degree up to which pieces are built; exceeds analysis_cap for aux-raising potentials.
int build_cap(const ModelSpec& spec);

struct InertiaComponent {
  int sector = 0;
  FiniteElement g;
  std::vector<int> fixed;  // 0-based coordinates with chi_i(g) = 1
  std::optional<Poly> potential;
};

std::vector<InertiaComponent> inertia_components(const ModelSpec& spec);

/// Forms on V (identity sector), d = -dW^ (periodic when W is present), B = d_dR.
MixedComplex forms_model(const ModelSpec& spec);
/// Direct sum over g of forms on the fixed loci, invariant part.
MixedComplex inertia_forms_model(const ModelSpec& spec);
/// k[t^+-] (x) k[x] (x) Lambda(n) with d(n_i) = (1 - chi_i(g) t^{a_i}) x_i, weight-0 part.
GradedComplex koszul_loop_model(const ModelSpec& spec);
/// The loop model with Delta_W = A^ added, parity-graded.
GradedComplex koszul_mf_model(const ModelSpec& spec);
/// k[eps]/eps^2 (x) Sym(d eps) by internal weight a <= max_weight; aux holds a.
MixedComplex bga_model(int max_weight);

/// Builds the complex of the spec's kind; koszul models come with an empty B.
MixedComplex build_model(const ModelSpec& spec);

struct OracleRow {
  std::size_t loop = 0;
  std::size_t forms = 0;
};

struct OracleComparison {
  std::map<std::pair<int, int>, OracleRow> table;  // (hdeg, aux) -> dims
  bool agree = true;
};

/// Koszul loop model against inertia forms, per (hdeg, aux) up to the degree cap.
OracleComparison oracle_compare(const ModelSpec& spec);

}  // namespace nchodge
