#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "nchodge/bar_hkr.hpp"
#include "nchodge/errors.hpp"

using namespace nchodge;
using fixtures::affine;
using fixtures::fin;
using fixtures::tor;

namespace {

BarChain chain(int sector, std::vector<Monomial> factors, std::vector<int> zexp = {}) {
  BarChain c;
  c.add(BarTerm{sector, std::move(zexp), std::move(factors)}, 1);
  return c;
}

CartanElement form(std::vector<int> z, Monomial x, unsigned mask, Scalar c = 1) {
  CartanElement e;
  e.add({std::move(z), std::move(x), mask}, c);
  return e;
}

struct ChainGen {
  const BarContext& ctx;
  std::mt19937 rng;
  bool invariant;

  BarChain operator()(int max_len) { return random_chain(ctx, rng, max_len, invariant); }
};

std::vector<BarContext> contexts() {
  return {
      BarContext{GroupSpec{}, {Character{}}, 6, 20, 1},
      BarContext{GroupSpec{}, {Character{}, Character{}}, 6, 20, 1},
      BarContext{GroupSpec{0, {2}}, {fin({1})}, 6, 20, 1},
      BarContext{GroupSpec{0, {2}}, {fin({1}), fin({0})}, 6, 20, 1},
      BarContext{GroupSpec{0, {2, 2}}, {fin({1, 0}), fin({1, 1})}, 6, 20, 1},
      BarContext{GroupSpec{1, {}}, {tor({1}), tor({-1})}, 6, 20, 3},
      BarContext{GroupSpec{1, {}}, {tor({2}), tor({-1})}, 6, 20, 2},
  };
}

}  // namespace

TEST_CASE("bar differential examples") {
  const BarContext triv{GroupSpec{}, {Character{}}, 4, 6, 1};
  CHECK(bar_differential(triv, chain(0, {{1}, {2}})).is_zero());
  const BarContext sign{GroupSpec{0, {2}}, {fin({1})}, 4, 6, 1};
  BarChain expected;
  expected.add(BarTerm{1, {}, {{2}}}, 2);
  CHECK(bar_differential(sign, chain(1, {{1}, {1}})) == expected);
}

TEST_CASE("Connes operator example") {
  const BarContext triv{GroupSpec{}, {Character{}}, 4, 6, 1};
  CHECK(connes_B_bar(triv, chain(0, {{3}})) == chain(0, {{0}, {3}}));
  CHECK(connes_B_bar(triv, chain(0, {{0}})).is_zero());
}

TEST_CASE("window markers") {
  const BarContext small{GroupSpec{}, {Character{}}, 1, 6, 1};
  const BarChain b = connes_B_bar(small, chain(0, {{1}, {2}}));
  CHECK(b.window_exceeded);
  CHECK_FALSE(b.is_zero());
}

TEST_CASE("Delta_W examples") {
  const BarContext triv{GroupSpec{}, {Character{}}, 4, 6, 1};
  const Poly w = parse_poly("x1^2", 1);
  BarChain expected;
  expected.add(BarTerm{0, {}, {{0}, {2}}}, -1);
  CHECK(delta_w_bar(triv, w, chain(0, {{0}})) == expected);
  CHECK_THROWS_AS(delta_w_bar(BarContext{GroupSpec{1, {}}, {tor({1})}, 4, 6, 1}, w, chain(0, {{0}}, {0})),
                  InputError);
}

TEST_CASE("bar identities on random chains") {
  for (const auto& ctx : contexts()) {
    ChainGen gen{ctx, std::mt19937(11), false};
    ChainGen inv{ctx, std::mt19937(12), true};
    for (int trial = 0; trial < 25; ++trial) {
      const BarChain c = gen(3);
      CHECK(bar_differential(ctx, bar_differential(ctx, c)).is_zero());
      const BarChain v = inv(3);
      CHECK(connes_B_bar(ctx, connes_B_bar(ctx, v)).is_zero());
      BarChain anti = bar_differential(ctx, connes_B_bar(ctx, v));
      anti += connes_B_bar(ctx, bar_differential(ctx, v));
      CHECK_MESSAGE(anti.is_zero(), to_string(v) << " -> " << to_string(anti));
    }
  }
}

TEST_CASE("Delta_W identities") {
  const BarContext triv{GroupSpec{}, {Character{}}, 6, 20, 1};
  const Poly w = parse_poly("x1^2", 1);
  ChainGen gen{triv, std::mt19937(5), false};
  for (int trial = 0; trial < 30; ++trial) {
    const BarChain c = gen(2);
    CHECK(delta_w_bar(triv, w, delta_w_bar(triv, w, c)).is_zero());
    BarChain anti = bar_differential(triv, delta_w_bar(triv, w, c));
    anti += delta_w_bar(triv, w, bar_differential(triv, c));
    CHECK(anti.is_zero());
  }
  const BarContext z2{GroupSpec{0, {2}}, {fin({1}), fin({1})}, 6, 20, 1};
  const Poly w2 = parse_poly("x1^2 + x1*x2 - 2*x2^2", 2);
  ChainGen inv{z2, std::mt19937(6), true};
  for (int trial = 0; trial < 30; ++trial) {
    const BarChain c = inv(2);
    BarChain anti = bar_differential(z2, delta_w_bar(z2, w2, c));
    anti += delta_w_bar(z2, w2, bar_differential(z2, c));
    CHECK(anti.is_zero());
    CHECK(delta_w_bar(z2, w2, delta_w_bar(z2, w2, c)).is_zero());
  }
}

TEST_CASE("classical HKR examples") {
  const BarContext triv{GroupSpec{}, {Character{}}, 4, 6, 1};
  CHECK(hkr_classical(triv, chain(0, {{1}, {1}})) == form({}, {1}, 1));
  CHECK(hkr_classical(triv, chain(0, {{0}, {1}, {1}})).is_zero());
  CHECK(hkr_classical(triv, chain(0, {{2}})) == form({}, {2}, 0));
  const BarContext plane{GroupSpec{}, {Character{}, Character{}}, 4, 6, 1};
  CHECK(hkr_classical(plane, chain(0, {{0, 0}, {1, 0}, {0, 1}})) == form({}, {0, 0}, 3, Scalar(1, 2)));
}

TEST_CASE("simplex integrals") {
  CHECK(simplex_integral(std::vector<int>{0}) == 1);
  CHECK(simplex_integral(std::vector<int>{0, 0}) == Scalar(1, 2));
  CHECK(simplex_integral(std::vector<int>{1, 0}) == Scalar(1, 6));
  CHECK(simplex_integral(std::vector<int>{0, 1}) == Scalar(1, 3));
  CHECK(simplex_integral(std::vector<int>{2, 1, 0}) == Scalar(1, 90));
  CHECK(simplex_integral(std::vector<int>{0, 0, 0, 0}) == Scalar(1, 24));
  CHECK(simplex_integral(std::vector<int>{}) == 1);
}

TEST_CASE("equivariant HKR") {
  const BarContext k2{GroupSpec{1, {}}, {tor({1})}, 4, 6, 2};
  CartanElement expected = form({0}, {0}, 1);
  expected += form({1}, {0}, 1, Scalar(1, 2));
  CHECK(hkr_equivariant(k2, chain(0, {{0}, {1}}, {0})) == expected);
  CHECK_THROWS_AS(hkr_equivariant(BarContext{GroupSpec{0, {2}}, {fin({1})}, 4, 6, 1}, chain(1, {{1}})), InputError);
}

TEST_CASE("equivariant HKR at k = 1 is classical") {
  for (const auto& ctx : contexts()) {
    if (!ctx.group.finite_factors.empty()) continue;
    BarContext k1 = ctx;
    k1.order = 1;
    ChainGen gen{k1, std::mt19937(21), false};
    for (int trial = 0; trial < 50; ++trial) {
      BarChain c = gen(3);
      CHECK(hkr_equivariant(k1, c) == hkr_classical(k1, c));
    }
  }
}

TEST_CASE("equivariant HKR is a chain map") {
  for (long a : {1, 2, -1}) {
    for (long b : {1, -2}) {
      for (int k = 1; k <= 3; ++k) {
        const BarContext ctx{GroupSpec{1, {}}, {tor({a}), tor({b})}, 6, 20, k};
        ChainGen gen{ctx, std::mt19937(static_cast<unsigned>(100 * k + a)), false};
        for (int trial = 0; trial < 10; ++trial) {
          const BarChain c = gen(2);
          CHECK(cartan_contract(ctx, hkr_equivariant(ctx, c)) == hkr_equivariant(ctx, bar_differential(ctx, c)));
        }
      }
    }
  }
}

TEST_CASE("Cartan complex") {
  const BarContext k2{GroupSpec{1, {}}, {tor({1})}, 4, 6, 2};
  CHECK(cartan_contract(k2, form({0}, {0}, 1)) == form({1}, {1}, 0, -1));
  CHECK(cartan_contract(k2, form({1}, {0}, 1)).is_zero());

  SUBCASE("k = 1 is the forms model") {
    const ModelSpec s = affine(2, ModelKind::Forms, 3);
    const MixedComplex c = cartan_complex(s, 1);
    const MixedComplex f = forms_model(s);
    CHECK(c.base.total_dim() == f.base.total_dim());
    CHECK(is_zero(c.base.blocks()));
    CHECK(c.connes == f.connes);
  }
  SUBCASE("identities hold") {
    ModelSpec s = fixtures::spec(GroupSpec{1, {}}, {tor({1}), tor({-1})}, ModelKind::Forms, 4);
    for (int k = 1; k <= 3; ++k) {
      const MixedComplex c = cartan_complex(s, k);
      CHECK(validate_mixed(c).empty());
      CHECK_FALSE(is_zero(c.connes));
      if (k > 1) CHECK_FALSE(is_zero(c.base.blocks()));
    }
  }
}

TEST_CASE("bar truncation homology matches forms") {
  const BarContext ctx{GroupSpec{}, {Character{}}, 4, 6, 1};
  const GradedComplex bar = bar_complex(ctx);
  const MixedComplex forms = forms_model(affine(1, ModelKind::Forms, 6));
  HomologyOptions opt;
  opt.filter = [](const SliceKey&) { return true; };
  std::map<std::pair<int, int>, std::size_t> hb, hf;
  for (const auto& [s, h] : homology(forms.base))
    for (const auto& [l, d] : h.dims) hf[{l, *s.aux}] += d;
  for (int aux = 0; aux <= 6; ++aux) {
    SliceKey s{zero_character(ctx.group), 0, aux, std::nullopt};
    SliceLayout layout(bar, s, Grading::Homological, std::nullopt);
    for (int i = 0; i <= 2; ++i) CHECK(subquotient(layout, i).dim == hf[{i, aux}]);
    if (aux >= 4) CHECK_THROWS_AS(subquotient(layout, 4), IncompleteWindow);
  }
}

TEST_CASE("equivariant bar homology matches inertia forms") {
  const BarContext ctx{GroupSpec{0, {2}}, {fin({1})}, 4, 5, 1};
  const GradedComplex bar = bar_complex(ctx);
  ModelSpec s = fixtures::spec(ctx.group, ctx.weights, ModelKind::InertiaForms, 5);
  const MixedComplex forms = inertia_forms_model(s);
  std::map<std::tuple<int, int, int>, std::size_t> hf;
  for (const auto& [sl, h] : homology(forms.base))
    for (const auto& [l, d] : h.dims) hf[{sl.sector, l, *sl.aux}] += d;
  for (int g = 0; g < 2; ++g)
    for (int aux = 0; aux <= 5; ++aux) {
      SliceKey sl{zero_character(ctx.group), g, aux, std::nullopt};
      SliceLayout layout(bar, sl, Grading::Homological, std::nullopt);
      for (int i = 0; i <= 2; ++i) CHECK(subquotient(layout, i).dim == hf[{g, i, aux}]);
    }
}
