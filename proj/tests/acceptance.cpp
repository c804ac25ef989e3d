// Acceptance suite: one line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "nchodge/bar_hkr.hpp"
#include "nchodge/cli.hpp"
#include "nchodge/errors.hpp"
#include "nchodge/mixed.hpp"
#include "nchodge/models.hpp"

using namespace nchodge;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

Character tor(std::vector<long> t) { return Character{std::move(t), {}}; }
Character fin(std::vector<long> f) { return Character{{}, std::move(f)}; }

ModelSpec make(GroupSpec g, std::vector<Character> w, ModelKind kind, std::optional<int> cap = {},
               const std::string& potential = "") {
  ModelSpec s;
  s.group = std::move(g);
  s.weights = std::move(w);
  s.kind = kind;
  s.degree_cap = cap;
  if (!potential.empty()) s.potential = parse_poly(potential, s.nvars());
  return s;
}

ModelSpec affine(int n, ModelKind kind, int cap, const std::string& potential = "") {
  return make(GroupSpec{}, std::vector<Character>(n), kind, cap, potential);
}

std::map<int, std::size_t> parity_dims(const GradedComplex& c, int cap) {
  HomologyOptions o;
  o.aux_cap = cap;
  o.filter = [&](const SliceKey& s) { return !s.aux || *s.aux <= cap; };
  std::map<int, std::size_t> out{{0, 0}, {1, 0}};
  for (const auto& [s, h] : homology(c, o))
    for (const auto& [label, d] : h.dims) out[((label % 2) + 2) % 2] += d;
  return out;
}

std::vector<SliceKey> capped_slices(const MixedComplex& m, int cap) {
  std::vector<SliceKey> out;
  for (const auto& s : mixed_slices(m))
    if (!s.aux || *s.aux <= cap) out.push_back(s);
  return out;
}

std::string str(std::size_t v) { return std::to_string(v); }

Outcome criterion1() {
  Outcome o;
  const MixedComplex m = bga_model(5);
  for (int a = 1; a <= 5; ++a) {
    const SliceKey s{Character{}, 0, a, std::nullopt};
    const DegenerationResult r = degeneration_check(m, s, 5, false);
    o.require(r.verdict == Verdict::Fail && r.failing_n == 2,
              "weight " + std::to_string(a) + ": verdict " + to_string(r.verdict) + " at n = " +
                  std::to_string(r.failing_n));
    const SpectralPages p = ss_pages(m, s, 2, 5);
    o.require(p.pages.size() >= 2 && p.total(1) < p.total(0), "weight " + std::to_string(a) + ": E2 not smaller than E1");
  }
  if (o.ok) o.detail = "FAIL(n=2) and E2 < E1 for a = 1..5";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const std::vector<std::vector<Character>> weights = {
      {tor({1})}, {tor({1}), tor({2})}, {tor({1}), tor({1}), tor({3})}};
  for (const auto& w : weights) {
    ModelSpec s = make(GroupSpec{1, {}}, w, ModelKind::KoszulLoop);
    s.loop_window = 5;
    const MixedComplex m = build_model(s);
    const HomologyReport rep = homology(m.base);
    const std::string tag = "n = " + std::to_string(w.size());
    std::map<int, std::size_t> per_loop;
    for (const auto& [slice, h] : rep) {
      o.require(slice.loop.has_value() && slice.loop->size() == 1, tag + ": slice without loop degree");
      if (!slice.loop) continue;
      for (const auto& [deg, d] : h.dims) {
        if (deg == 0)
          per_loop[slice.loop->at(0)] += d;
        else
          o.require(d == 0, tag + ": homology in degree " + std::to_string(deg));
      }
      o.require(degeneration_check(m, slice, analysis_cap(s)).verdict == Verdict::PassStructural,
                tag + ": verdict is not PASS-structural");
    }
    for (int j = -5; j <= 5; ++j)
      o.require(per_loop[j] == 1, tag + ": loop degree " + std::to_string(j) + " has dim " + str(per_loop[j]));
    o.require(per_loop.size() == 11, tag + ": loop degrees outside the window");
  }
  if (o.ok) o.detail = "H_0 = 1 per loop degree in [-5, 5], H_>0 = 0, PASS-structural for n = 1, 2, 3";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const std::vector<std::pair<GroupSpec, std::vector<Character>>> cases = {
      {GroupSpec{0, {2}}, {fin({1})}},
      {GroupSpec{0, {2}}, {fin({1}), fin({1})}},
      {GroupSpec{0, {3}}, {fin({1})}},
      {GroupSpec{0, {3}}, {fin({1}), fin({1})}},
      {GroupSpec{0, {3}}, {fin({1}), fin({2})}},
      {GroupSpec{0, {2, 2}}, {fin({1, 1})}},
      {GroupSpec{0, {2, 2}}, {fin({1, 0}), fin({0, 1})}},
      {GroupSpec{0, {2, 2}}, {fin({1, 1}), fin({1, 1})}},
  };
  std::size_t rows = 0;
  for (const auto& [g, w] : cases) {
    const OracleComparison c = oracle_compare(make(g, w, ModelKind::InertiaForms, 6));
    rows += c.table.size();
    for (const auto& [key, row] : c.table)
      o.require(row.loop == row.forms, "disagreement at (hdeg, aux) = (" + std::to_string(key.first) + ", " +
                                           std::to_string(key.second) + "): " + str(row.loop) + " vs " +
                                           str(row.forms));
    o.require(c.agree, "oracle reports disagreement");
  }
  if (o.ok) o.detail = std::to_string(cases.size()) + " actions, " + str(rows) + " pieces agree (aux <= 6)";
  return o;
}

Outcome criterion4() {
  Outcome o;
  const int cap = 6;
  auto mf = [&](int n, const std::string& w, int c) { return parity_dims(koszul_mf_model(affine(n, ModelKind::KoszulMF, c, w)), c); };
  const auto x2 = mf(1, "x1^2", cap);
  o.require(x2.at(1) == 1 && x2.at(0) == 0, "(A^1, x^2): odd dim " + str(x2.at(1)));
  const auto x3 = mf(1, "x1^3", cap);
  o.require(x3.at(1) == 2 && x3.at(0) == 0, "(A^1, x^3): odd dim " + str(x3.at(1)));
  for (const auto& [n, w] : std::vector<std::pair<int, std::string>>{{2, "x1^2 + x2^2"}, {1, "x1^3"}, {2, "x1^2 + x2^3"}}) {
    const auto a = mf(n, w, cap);
    const auto wider = mf(n, w, cap + parse_poly(w, n).degree());
    const auto forms = parity_dims(inertia_forms_model(affine(n, ModelKind::InertiaForms, cap, w)).base, cap);
    o.require(a == wider, w + ": not stable between caps");
    o.require(a == forms, w + ": koszul-mf " + str(a.at(0)) + "/" + str(a.at(1)) + " vs inertia-forms " +
                              str(forms.at(0)) + "/" + str(forms.at(1)));
  }
  if (o.ok) o.detail = "odd HH 1 (x^2), 2 (x^3); x^2+y^2 even 1, models agree and are cap-stable";
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (const auto& [n, w] : std::vector<std::pair<int, std::string>>{{1, "x1^3"}, {2, "x1^2 + x2^3"}}) {
    const ModelSpec s = affine(n, ModelKind::Forms, 6, w);
    const MixedComplex m = forms_model(s);
    for (const auto& sl : capped_slices(m, 6)) {
      const DegenerationResult r = degeneration_check(m, sl, 6, false);
      o.require(r.verdict == Verdict::Pass, w + ": verdict " + to_string(r.verdict));
    }
  }
  const MixedComplex zero = forms_model(affine(1, ModelKind::Forms, 6));
  bool failed = false;
  for (const auto& sl : capped_slices(zero, 6)) failed = failed || degeneration_check(zero, sl, 6, false).verdict == Verdict::Fail;
  o.require(failed, "W = 0 does not fail");
  if (o.ok) o.detail = "PASS for x^3 and x^2+y^3 (full check), FAIL for W = 0";
  return o;
}

Outcome criterion6() {
  Outcome o;
  const int cap = 8;
  const MixedComplex m = forms_model(affine(1, ModelKind::Forms, cap));
  int checked = 0;
  for (const auto& sl : capped_slices(m, cap)) {
    if (!sl.aux || *sl.aux < 1) continue;
    const DegenerationResult r = degeneration_check(m, sl, cap, false);
    const std::string tag = "aux " + std::to_string(*sl.aux);
    o.require(r.verdict == Verdict::Fail && r.failing_n == 2, tag + ": verdict " + to_string(r.verdict));
    for (int p : {0, 1}) {
      o.require(r.witness.contains(p), tag + ": missing witness");
      if (!r.witness.contains(p)) continue;
      const ModuleDecomposition& d = r.witness.at(p);
      o.require(d.dim == 1 && d.mu.size() == 2 && d.mu[0] == 1 && d.mu[1] == 0 && !d.is_free(),
                tag + ": witness " + d.to_string());
    }
    ++checked;
  }
  o.require(checked == cap, "expected " + std::to_string(cap) + " pieces, saw " + std::to_string(checked));
  if (o.ok) o.detail = "FAIL(n=2) with k + k = k[u]/u in each parity on aux 1.." + std::to_string(cap);
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::vector<std::pair<std::string, MixedComplex>> mixed;
  std::vector<std::pair<std::string, GradedComplex>> graded;
  for (int n = 1; n <= 3; ++n) mixed.emplace_back("forms A^" + std::to_string(n), forms_model(affine(n, ModelKind::Forms, 4)));
  mixed.emplace_back("forms A^1/G_m (1)", forms_model(make(GroupSpec{1, {}}, {tor({1})}, ModelKind::Forms)));
  mixed.emplace_back("forms A^2/G_m (1,-1)", forms_model(make(GroupSpec{1, {}}, {tor({1}), tor({-1})}, ModelKind::Forms, 4)));
  mixed.emplace_back("forms x^3", forms_model(affine(1, ModelKind::Forms, 6, "x1^3")));
  mixed.emplace_back("forms x^2+y^3", forms_model(affine(2, ModelKind::Forms, 5, "x1^2 + x2^3")));
  mixed.emplace_back("inertia A^1/Z_2", inertia_forms_model(make(GroupSpec{0, {2}}, {fin({1})}, ModelKind::InertiaForms, 5)));
  mixed.emplace_back("inertia A^2/Z_3", inertia_forms_model(make(GroupSpec{0, {3}}, {fin({1}), fin({2})}, ModelKind::InertiaForms, 4)));
  mixed.emplace_back("inertia A^2/Z_2xZ_2", inertia_forms_model(make(GroupSpec{0, {2, 2}}, {fin({1, 0}), fin({1, 1})}, ModelKind::InertiaForms, 4)));
  mixed.emplace_back("inertia pt/Z_5", inertia_forms_model(make(GroupSpec{0, {5}}, {}, ModelKind::InertiaForms)));
  mixed.emplace_back("inertia (A^2, x^2+y^2)/Z_2", inertia_forms_model(make(GroupSpec{0, {2}}, {fin({1}), fin({1})}, ModelKind::InertiaForms, 4, "x1^2 + x2^2")));
  mixed.emplace_back("bga", bga_model(5));
  mixed.emplace_back("cartan k=2", cartan_complex(make(GroupSpec{1, {}}, {tor({1}), tor({-1})}, ModelKind::Forms, 4), 2));
  mixed.emplace_back("cartan k=3", cartan_complex(make(GroupSpec{1, {}}, {tor({1}), tor({2})}, ModelKind::Forms), 3));

  auto loop = [](GroupSpec g, std::vector<Character> w, std::optional<int> cap, int j) {
    ModelSpec s = make(std::move(g), std::move(w), ModelKind::KoszulLoop, cap);
    s.loop_window = j;
    return koszul_loop_model(s);
  };
  graded.emplace_back("loop A^2/G_m", loop(GroupSpec{1, {}}, {tor({1}), tor({1})}, {}, 3));
  graded.emplace_back("loop A^2/G_m (1,-1)", loop(GroupSpec{1, {}}, {tor({1}), tor({-1})}, 3, 2));
  graded.emplace_back("loop A^2/Z_3", loop(GroupSpec{0, {3}}, {fin({1}), fin({1})}, 4, 0));
  graded.emplace_back("loop A^2/Z_2", loop(GroupSpec{0, {2}}, {fin({1}), fin({0})}, 4, 0));

  std::vector<std::pair<std::string, GradedComplex>> mf;
  mf.emplace_back("mf x^2", koszul_mf_model(affine(1, ModelKind::KoszulMF, 6, "x1^2")));
  mf.emplace_back("mf x^3", koszul_mf_model(affine(1, ModelKind::KoszulMF, 6, "x1^3")));
  mf.emplace_back("mf x^2+y^3", koszul_mf_model(affine(2, ModelKind::KoszulMF, 5, "x1^2 + x2^3")));
  mf.emplace_back("mf x^2y+y^4", koszul_mf_model(affine(2, ModelKind::KoszulMF, 4, "x1^2*x2 + x2^4")));
  mf.emplace_back("mf x^3+y^3+z^3", koszul_mf_model(affine(3, ModelKind::KoszulMF, 3, "x1^3 + x2^3 + x3^3")));
  mf.emplace_back("mf x^2/Z_2", koszul_mf_model(make(GroupSpec{0, {2}}, {fin({1})}, ModelKind::KoszulMF, 6, "x1^2")));
  mf.emplace_back("mf xy/G_m", [] {
    ModelSpec s = make(GroupSpec{1, {}}, {tor({1}), tor({-1})}, ModelKind::KoszulMF, 4, "x1*x2");
    s.loop_window = 2;
    return koszul_mf_model(s);
  }());

  for (const auto& [name, m] : mixed) {
    const auto v = validate_mixed(m);
    o.require(v.empty(), name + ": " + (v.empty() ? "" : v.front().identity + " " + v.front().detail));
  }
  for (const auto& [name, c] : graded) o.require(validate_complex(c).empty(), name + ": complex identity fails");
  for (const auto& [name, c] : mf) o.require(validate_complex(c).empty(), name + ": (d + Delta_W)^2 != 0");
  const std::size_t fixtures = mixed.size() + graded.size() + mf.size();
  o.require(fixtures >= 20, "fixture matrix too small");

  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    Poly w(n);
    const int terms = 1 + static_cast<int>(rng() % 6);
    for (int t = 0; t < terms; ++t) {
      Monomial mono(n, 0);
      int budget = static_cast<int>(rng() % 5);
      for (int i = 0; i < n && budget > 0; ++i) {
        const int e = static_cast<int>(rng() % (budget + 1));
        mono[i] = e;
        budget -= e;
      }
      Scalar c(static_cast<long>(rng() % 11) - 5, 1 + static_cast<long>(rng() % 3));
      c.canonicalize();
      w.add_term(mono, c);
    }
    std::vector<Poly> xs, ys;
    for (int i = 0; i < n; ++i) {
      xs.push_back(Poly::variable(2 * n, i));
      ys.push_back(Poly::variable(2 * n, n + i));
    }
    Poly lhs(2 * n);
    for (int j = 1; j <= n; ++j) lhs += divided_difference(w, j) * (ys[j - 1] - xs[j - 1]);
    o.require(lhs == w.substitute(ys) - w.substitute(xs), "divided differences fail for W = " + to_string(w));
  }
  if (o.ok) o.detail = str(fixtures) + " fixtures valid (" + str(mf.size()) + " MF), 100 divided-difference identities";
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::mt19937 rng(42);
  std::size_t chains = 0;
  const BarContext k1{GroupSpec{1, {}}, {tor({1}), tor({-2})}, 6, 64, 1};
  for (int i = 0; i < 50; ++i) {
    const BarChain c = random_chain(k1, rng, 3, false, true);
    o.require(hkr_equivariant(k1, c) == hkr_classical(k1, c), "k = 1 differs from classical on " + to_string(c));
  }
  for (int n = 1; n <= 2; ++n)
    for (int k = 1; k <= 3; ++k)
      for (long a = -2; a <= 2; ++a)
        for (long b = -2; b <= 2; ++b) {
          if (n == 1 && b != 0) continue;
          std::vector<Character> w{tor({a})};
          if (n == 2) w.push_back(tor({b}));
          const BarContext ctx{GroupSpec{1, {}}, w, 6, 64, k};
          for (int i = 0; i < 8; ++i) {
            const BarChain c = random_chain(ctx, rng, 2, false, true);
            ++chains;
            o.require(cartan_contract(ctx, hkr_equivariant(ctx, c)) == hkr_equivariant(ctx, bar_differential(ctx, c)),
                      "chain map fails on " + to_string(c));
          }
        }
  const BarContext bctx{GroupSpec{}, {Character{}}, 4, 6, 1};
  const GradedComplex bar = bar_complex(bctx);
  const MixedComplex forms = forms_model(affine(1, ModelKind::Forms, 6));
  std::map<std::pair<int, int>, std::size_t> hf;
  for (const auto& [s, h] : homology(forms.base))
    for (const auto& [l, d] : h.dims) hf[{l, s.aux.value_or(0)}] += d;
  for (int aux = 0; aux <= 6; ++aux) {
    const SliceKey s{Character{}, 0, aux, std::nullopt};
    const SliceLayout layout(bar, s, Grading::Homological, std::nullopt);
    for (int i = 0; i <= 2; ++i) {
      const std::size_t b = subquotient(layout, i).dim;
      o.require(b == hf[{i, aux}], "bar HH_" + std::to_string(i) + " at degree " + std::to_string(aux) + " is " +
                                       str(b) + ", forms give " + str(hf[{i, aux}]));
    }
  }
  if (o.ok) o.detail = "50 classical checks, " + str(chains) + " chain-map checks, bar(L=4, D=6) = forms in hdeg <= 2";
  return o;
}

Outcome criterion9() {
  Outcome o;
  for (int m : {2, 3, 5}) {
    const HodgeTable t = hodge_table(inertia_forms_model(make(GroupSpec{0, {m}}, {}, ModelKind::InertiaForms)));
    o.require(t.at(0, 0) == static_cast<std::size_t>(m) && t.total() == static_cast<std::size_t>(m),
              "pt/Z_" + std::to_string(m) + ": h00 = " + str(t.at(0, 0)) + ", total " + str(t.total()));
  }
  ModelSpec s = make(GroupSpec{1, {}}, {tor({1})}, ModelKind::KoszulLoop);
  s.loop_window = 3;
  const HodgeTable t = hodge_table(koszul_loop_model(s));
  o.require(t.at(0, 0) == 7 && t.total() == 7, "A^1/G_m: h00 = " + str(t.at(0, 0)) + ", total " + str(t.total()));
  if (o.ok) o.detail = "h00 = 2, 3, 5 for pt/Z_m; h00 = 7 for A^1/G_m, loop window [-3, 3]";
  return o;
}

Outcome criterion10() {
  Outcome o;
  struct Fixture {
    std::string name;
    MixedComplex m;
    int cap;
  };
  std::vector<Fixture> fx;
  fx.push_back({"bga", bga_model(5), 5});
  fx.push_back({"forms A^1", forms_model(affine(1, ModelKind::Forms, 6)), 6});
  fx.push_back({"forms A^2", forms_model(affine(2, ModelKind::Forms, 4)), 4});
  fx.push_back({"forms x^3", forms_model(affine(1, ModelKind::Forms, 6, "x1^3")), 6});
  fx.push_back({"forms x^2+y^3", forms_model(affine(2, ModelKind::Forms, 5, "x1^2 + x2^3")), 5});
  fx.push_back({"inertia A^1/Z_2", inertia_forms_model(make(GroupSpec{0, {2}}, {fin({1})}, ModelKind::InertiaForms, 6)), 6});
  fx.push_back({"inertia pt/Z_3", inertia_forms_model(make(GroupSpec{0, {3}}, {}, ModelKind::InertiaForms)), 0});
  fx.push_back({"forms A^1/G_m", forms_model(make(GroupSpec{1, {}}, {tor({1})}, ModelKind::Forms)), 0});
  fx.push_back({"cartan k=2", cartan_complex(make(GroupSpec{1, {}}, {tor({1}), tor({-1})}, ModelKind::Forms, 3), 2), 3});
  std::size_t pass = 0, fail = 0;
  for (const auto& f : fx) {
    for (const auto& s : capped_slices(f.m, f.cap)) {
      const DegenerationResult r = degeneration_check(f.m, s, f.cap, false);
      const NegativeCyclicReport rep = negative_cyclic_report(f.m, s, amplitude(f.m, s, f.cap) + 2, f.cap);
      const std::string tag = f.name + " " + to_string(s);
      if (r.verdict == Verdict::Fail) {
        ++fail;
        o.require(!rep.module.is_free(), tag + ": FAIL but free");
      } else {
        ++pass;
        o.require(rep.module.is_free() && rep.free_of_hochschild_rank, tag + ": PASS but " + rep.commentary);
      }
    }
  }
  if (o.ok) o.detail = str(pass) + " PASS slices free of HH rank, " + str(fail) + " FAIL slices non-free";
  return o;
}

Outcome criterion11() {
  Outcome o;
  const unsigned many = std::max(4u, std::thread::hardware_concurrency());
  const std::vector<std::pair<std::string, cli::Op>> jobs = {
      {R"({"model":"bga","max_weight":5})", cli::Op::Degeneration},
      {R"({"model":"bga","max_weight":5})", cli::Op::SsPages},
      {R"({"group":{"torus_rank":1},"weights":[[1],[2]],"model":"koszul-loop","loop_window":[-5,5]})", cli::Op::HH},
      {R"({"group":{"torus_rank":1},"weights":[[1],[2]],"model":"koszul-loop","loop_window":[-5,5]})", cli::Op::Degeneration},
      {R"({"group":{"finite_factors":[2,2]},"weights":[[1,0],[0,1]],"model":"inertia-forms","degree_cap":6})", cli::Op::OracleCompare},
      {R"({"weights":[[],[]],"model":"koszul-mf","potential":"x1^2 + x2^2","degree_cap":6})", cli::Op::MfHH},
      {R"({"weights":[[],[]],"model":"forms","potential":"x1^2 + x2^3","degree_cap":6})", cli::Op::Degeneration},
      {R"({"weights":[[]],"model":"forms","degree_cap":6})", cli::Op::Degeneration},
      {R"({"weights":[[]],"model":"forms","degree_cap":6})", cli::Op::HN},
      {R"({"weights":[[]],"model":"forms","degree_cap":6})", cli::Op::HP},
      {R"({"group":{"torus_rank":1},"weights":[[1],[-2]],"model":"forms","degree_cap":4})", cli::Op::HkrCheck},
      {R"({"group":{"finite_factors":[5]},"weights":[],"model":"inertia-forms"})", cli::Op::Hodge},
      {R"({"group":{"torus_rank":1},"weights":[[1]],"model":"koszul-loop","loop_window":[-3,3]})", cli::Op::Hodge},
  };
  for (const auto& [model, op] : jobs) {
    cli::JobSpec j;
    j.model = cli::parse_model_text(model);
    j.op = op;
    j.threads = 1;
    const std::string a = cli::run(j).body.dump();
    const std::string b = cli::run(j).body.dump();
    j.threads = many;
    const std::string c = cli::run(j).body.dump();
    o.require(a == b && a == c, cli::to_string(op) + " on " + model + " is not deterministic");
  }
  if (o.ok)
    o.detail = str(jobs.size()) + " envelopes identical across runs and 1 vs " + std::to_string(many) + " threads";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "BG_a non-degeneration", 1, criterion1},
      {2, "A^n/G_m exceptional collection", 5, criterion2},
      {3, "cross-model oracle", 30, criterion3},
      {4, "matrix factorization Jacobian ring", 10, criterion4},
      {5, "MF degeneration verdicts", 10, criterion5},
      {6, "non-proper A^1 counterexample", 1, criterion6},
      {7, "mixed-complex axioms", 60, criterion7},
      {8, "HKR suite", 120, criterion8},
      {9, "Hodge tables", 5, criterion9},
      {10, "negative cyclic consistency", 30, criterion10},
      {11, "determinism", 120, criterion11},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = out.ok && in_time;
    if (!pass) ++failed;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3f s < %.0f s", secs, c.limit_s);
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): " << out.detail << " ["
              << timing << (in_time ? "" : " exceeded") << "]\n";
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << "\n";
  return failed == 0 ? 0 : 1;
}
