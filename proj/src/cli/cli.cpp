#include "nchodge/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "nchodge/bar_hkr.hpp"
#include "nchodge/errors.hpp"

namespace nchodge::cli {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& origin, const std::string& what) {
  throw InputError(origin + ": schema error: " + what);
}

int get_int(const json& j, const std::string& key, const std::string& origin) {
  if (!j.is_number_integer()) schema_error(origin, "'" + key + "' must be an integer");
  return j.get<int>();
}

std::pair<int, int> get_pair(const json& j, const std::string& key, const std::string& origin) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    schema_error(origin, "'" + key + "' must be a pair of integers [a, b]");
  return {j[0].get<int>(), j[1].get<int>()};
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json character_json(const Character& c) {
  json a = json::array();
  for (long t : c.torus) a.push_back(t);
  for (long f : c.finite) a.push_back(f);
  return a;
}

json slice_json(const SliceKey& s) {
  json j;
  j["sector"] = s.sector;
  j["weight"] = character_json(s.weight);
  j["aux"] = s.aux ? json(*s.aux) : json(nullptr);
  j["loop"] = s.loop ? json(*s.loop) : json(nullptr);
  return j;
}

// Slice columns for flat table rows.
json slice_row(const SliceKey& s) {
  json r;
  r["sector"] = s.sector;
  r["weight"] = to_string(s.weight);
  r["aux"] = s.aux ? json(*s.aux) : json(nullptr);
  std::string loop;
  if (s.loop)
    for (std::size_t i = 0; i < s.loop->size(); ++i) loop += (i ? "," : "") + std::to_string((*s.loop)[i]);
  r["loop"] = loop;
  return r;
}

bool is_koszul(ModelKind k) { return k == ModelKind::KoszulLoop || k == ModelKind::KoszulMF; }

std::optional<int> aux_cap_of(const ModelSpec& s) {
  if (s.kind == ModelKind::BGa) return s.max_weight;
  return analysis_cap(s);
}

struct Context {
  const JobSpec& job;
  ModelSpec spec;
  std::optional<int> cap;
  json flags = json::object();
  std::vector<std::string> warnings;

  explicit Context(const JobSpec& j) : job(j), spec(j.model) {
    spec.threads = std::max(1u, j.threads);
    cap = aux_cap_of(spec);
  }

  bool selected(const SliceKey& s) const {
    if (!s.aux) return true;
    if (cap && *s.aux > *cap) return false;
    if (spec.weight_window && (*s.aux < spec.weight_window->first || *s.aux > spec.weight_window->second))
      return false;
    return true;
  }

  MixedOptions mixed_options() const {
    MixedOptions o;
    o.aux_cap = cap;
    o.filter = [this](const SliceKey& s) { return selected(s); };
    o.threads = spec.threads;
    return o;
  }

  HomologyOptions homology_options() const {
    HomologyOptions o;
    o.aux_cap = cap;
    o.filter = [this](const SliceKey& s) { return selected(s); };
    o.threads = spec.threads;
    return o;
  }

  std::vector<SliceKey> mixed_slices_of(const MixedComplex& m) const {
    std::vector<SliceKey> out;
    for (auto& s : mixed_slices(m))
      if (selected(s)) out.push_back(std::move(s));
    return out;
  }

  MixedComplex build() {
    MixedComplex m = build_model(spec);
    note(m.base);
    return m;
  }

  void note(const GradedComplex& c) {
    if (c.truncated) flags["truncated"] = true;
    for (const auto& w : c.warnings)
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }
};

json homology_rows(const HomologyReport& report, bool& truncated) {
  json rows = json::array();
  for (const auto& [slice, h] : report) {
    truncated = truncated || h.truncated;
    for (const auto& [label, d] : h.dims) {
      json r = slice_row(slice);
      r[h.grading == Grading::Parity ? "parity" : "hdeg"] = label;
      r["dim"] = d;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

json totals_by_label(const HomologyReport& report) {
  std::map<int, std::size_t> t;
  for (const auto& [slice, h] : report)
    for (const auto& [label, d] : h.dims) t[label] += d;
  json j = json::object();
  for (const auto& [label, d] : t) j[std::to_string(label)] = d;
  return j;
}

json run_hh(Context& ctx) {
  const MixedComplex m = ctx.build();
  const HomologyReport report = homology(m.base, ctx.homology_options());
  bool truncated = false;
  json result;
  result["grading"] = m.base.periodic ? "parity" : "hdeg";
  result["table"] = homology_rows(report, truncated);
  result["totals"] = totals_by_label(report);
  if (truncated) ctx.flags["truncated"] = true;
  return result;
}

json run_hp(Context& ctx) {
  const MixedComplex m = ctx.build();
  json rows = json::array();
  std::map<int, std::size_t> totals;
  for (const auto& s : ctx.mixed_slices_of(m)) {
    for (const auto& [p, d] : periodic_dimensions(m, s, ctx.cap, ctx.spec.trunc_n)) {
      json r = slice_row(s);
      r["parity"] = p;
      r["dim"] = d;
      rows.push_back(std::move(r));
      totals[p] += d;
    }
  }
  json result;
  result["table"] = rows;
  json t = json::object();
  for (const auto& [p, d] : totals) t[std::to_string(p)] = d;
  result["totals"] = t;
  return result;
}

json run_hn(Context& ctx) {
  const MixedComplex m = ctx.build();
  json rows = json::array();
  json commentary = json::array();
  for (const auto& s : ctx.mixed_slices_of(m)) {
    const int n = ctx.spec.trunc_n.value_or(amplitude(m, s, ctx.cap) + 2);
    const NegativeCyclicReport rep = negative_cyclic_report(m, s, n, ctx.cap);
    for (const auto& [p, d] : rep.module.by_parity) {
      json r = slice_row(s);
      r["n"] = n;
      r["parity"] = p;
      r["module"] = d.to_string();
      r["dim"] = d.dim;
      r["free"] = d.is_free();
      r["free_rank"] = d.free_rank();
      r["hochschild"] = rep.hochschild.contains(p) ? rep.hochschild.at(p) : 0;
      rows.push_back(std::move(r));
    }
    json c = slice_json(s);
    c["commentary"] = rep.commentary;
    c["free_of_hochschild_rank"] = rep.free_of_hochschild_rank;
    commentary.push_back(std::move(c));
  }
  json result;
  result["table"] = rows;
  result["slices"] = commentary;
  return result;
}

std::string witness_string(const std::map<int, ModuleDecomposition>& w) {
  std::string s;
  for (const auto& [p, d] : w) s += (s.empty() ? "" : "; ") + std::string(p ? "odd: " : "even: ") + d.to_string();
  return s;
}

json run_degeneration(Context& ctx) {
  const MixedComplex m = ctx.build();
  json rows = json::array();
  std::map<std::string, int> counts;
  if (is_koszul(ctx.spec.kind)) {
    // No Connes operator: only the structural criterion can decide.
    for (const auto& [slice, h] : homology(m.base, ctx.homology_options())) {
      std::map<int, std::size_t> par;
      for (const auto& [label, d] : h.dims) par[((label % 2) + 2) % 2] += d;
      const bool single = par[0] == 0 || par[1] == 0;
      json r = slice_row(slice);
      r["verdict"] = single ? to_string(Verdict::PassStructural) : "UNDETERMINED";
      r["failing_n"] = nullptr;
      r["hh_even"] = par[0];
      r["hh_odd"] = par[1];
      r["witness"] = "";
      counts[r["verdict"].get<std::string>()]++;
      rows.push_back(std::move(r));
    }
  } else {
    for (const auto& [slice, res] : degeneration_report(m, ctx.mixed_options())) {
      json r = slice_row(slice);
      r["verdict"] = to_string(res.verdict);
      r["failing_n"] = res.verdict == Verdict::Fail ? json(res.failing_n) : json(nullptr);
      r["amplitude"] = res.amplitude;
      r["hh_even"] = res.hochschild.contains(0) ? res.hochschild.at(0) : 0;
      r["hh_odd"] = res.hochschild.contains(1) ? res.hochschild.at(1) : 0;
      r["witness"] = witness_string(res.witness);
      counts[to_string(res.verdict)]++;
      rows.push_back(std::move(r));
    }
  }
  json result;
  result["table"] = rows;
  result["verdict_counts"] = counts;
  std::string overall = "PASS";
  if (counts.contains("FAIL"))
    overall = "FAIL";
  else if (counts.contains("UNDETERMINED"))
    overall = "UNDETERMINED";
  else if (counts.contains("PASS-structural") && !counts.contains("PASS"))
    overall = "PASS-structural";
  result["verdict"] = overall;
  return result;
}

json run_ss_pages(Context& ctx) {
  const MixedComplex m = ctx.build();
  json rows = json::array();
  for (const auto& s : ctx.mixed_slices_of(m)) {
    const int r_max = ctx.spec.trunc_n.value_or(amplitude(m, s, ctx.cap) + 2);
    const SpectralPages sp = ss_pages(m, s, r_max, ctx.cap);
    for (std::size_t page = 0; page < sp.pages.size(); ++page) {
      for (const auto& [deg, d] : sp.pages[page]) {
        json r = slice_row(s);
        r["page"] = page + 1;
        r[m.base.periodic ? "parity" : "degree"] = deg;
        r["dim"] = d;
        rows.push_back(std::move(r));
      }
    }
  }
  json result;
  result["table"] = rows;
  return result;
}

json run_hodge(Context& ctx) {
  const MixedComplex m = ctx.build();
  const HodgeTable t = is_koszul(ctx.spec.kind) ? hodge_table(m.base, ctx.mixed_options())
                                                : hodge_table(m, ctx.mixed_options());
  json rows = json::array();
  for (const auto& [pn, h] : t.entries) {
    if (h == 0) continue;
    rows.push_back({{"p", pn.first}, {"n", pn.second}, {"h", h}});
  }
  json result;
  result["table"] = rows;
  result["total"] = t.total();
  return result;
}

std::map<std::tuple<SliceKey, int>, std::size_t> mf_dims(const ModelSpec& spec, int cap, Context& ctx) {
  ModelSpec s = spec;
  s.degree_cap = cap;
  const GradedComplex c = koszul_mf_model(s);
  ctx.note(c);
  HomologyOptions o;
  o.aux_cap = cap;
  o.threads = spec.threads;
  o.filter = [&](const SliceKey& k) { return ctx.selected(k); };
  std::map<std::tuple<SliceKey, int>, std::size_t> out;
  for (const auto& [slice, h] : homology(c, o))
    for (const auto& [label, d] : h.dims) out[{slice, label}] = d;
  return out;
}

json run_mf_hh(Context& ctx) {
  if (!ctx.spec.potential) throw InputError("mf-hh needs a potential");
  if (!ctx.spec.degree_cap) throw InputError("mf-hh needs a degree_cap");
  const int cap = *ctx.spec.degree_cap;
  const int step = std::max(1, ctx.spec.potential->degree());
  const auto base = mf_dims(ctx.spec, cap, ctx);
  const auto wider = mf_dims(ctx.spec, cap + step, ctx);
  json rows = json::array();
  std::map<int, std::size_t> totals;
  bool stable = true;
  std::set<std::tuple<SliceKey, int>> keys;
  for (const auto& [k, d] : base) keys.insert(k);
  for (const auto& [k, d] : wider) keys.insert(k);
  for (const auto& k : keys) {
    const auto& [slice, label] = k;
    if (slice.aux && *slice.aux > cap) continue;
    const std::size_t a = base.contains(k) ? base.at(k) : 0;
    const std::size_t b = wider.contains(k) ? wider.at(k) : 0;
    if (a != b) stable = false;
    json r = slice_row(slice);
    r["parity"] = label;
    r["dim"] = a;
    r["dim_at_wider_cap"] = b;
    rows.push_back(std::move(r));
    totals[label] += a;
  }
  json result;
  result["table"] = rows;
  json t = json::object();
  for (const auto& [p, d] : totals) t[std::to_string(p)] = d;
  result["totals"] = t;
  result["degree_cap"] = cap;
  result["comparison_cap"] = cap + step;
  result["stable"] = stable;
  ctx.flags["stable"] = stable;
  if (!stable) ctx.warnings.push_back("homology changes between degree caps " + std::to_string(cap) + " and " +
                                      std::to_string(cap + step) + "; raise degree_cap");
  return result;
}

json run_oracle(Context& ctx) {
  const OracleComparison cmp = oracle_compare(ctx.spec);
  json rows = json::array();
  for (const auto& [key, row] : cmp.table) {
    if (ctx.spec.weight_window &&
        (key.second < ctx.spec.weight_window->first || key.second > ctx.spec.weight_window->second))
      continue;
    rows.push_back({{"hdeg", key.first}, {"aux", key.second}, {"loop", row.loop}, {"forms", row.forms}});
  }
  json result;
  result["table"] = rows;
  result["agree"] = cmp.agree;
  result["summary"] = cmp.agree ? "models agree" : "models disagree";
  return result;
}

json run_hkr(Context& ctx) {
  const ModelSpec& s = ctx.spec;
  json result;
  const int k_max = std::clamp(s.trunc_n.value_or(3), 1, 4);
  std::mt19937 rng(20240611u);

  BarContext k1{s.group, s.weights, 6, 64, 1};
  std::size_t mismatches = 0;
  for (int i = 0; i < 50; ++i) {
    const BarChain c = random_chain(k1, rng, 3, false, true);
    if (!(hkr_equivariant(k1, c) == hkr_classical(k1, c))) ++mismatches;
  }
  result["classical_agreement"] = {{"chains", 50}, {"mismatches", mismatches}, {"ok", mismatches == 0}};
  bool ok = mismatches == 0;

  json chain_map = json::array();
  for (int k = 1; k <= k_max; ++k) {
    BarContext ctxk{s.group, s.weights, 6, 64, k};
    std::size_t fails = 0;
    for (int i = 0; i < 20; ++i) {
      const BarChain c = random_chain(ctxk, rng, 2, false, true);
      if (!(cartan_contract(ctxk, hkr_equivariant(ctxk, c)) == hkr_equivariant(ctxk, bar_differential(ctxk, c))))
        ++fails;
    }
    ok = ok && fails == 0;
    chain_map.push_back({{"k", k}, {"chains", 20}, {"failures", fails}});
  }
  result["chain_map"] = chain_map;

  {
    std::size_t fails = 0;
    for (int i = 0; i < 20; ++i) {
      const BarChain c = random_chain(k1, rng, 3, true);
      BarChain anti = bar_differential(k1, connes_B_bar(k1, c));
      anti += connes_B_bar(k1, bar_differential(k1, c));
      if (!anti.is_zero() || !bar_differential(k1, bar_differential(k1, c)).is_zero() ||
          !connes_B_bar(k1, connes_B_bar(k1, c)).is_zero())
        ++fails;
      if (s.potential) {
        BarChain dw = bar_differential(k1, delta_w_bar(k1, *s.potential, c));
        dw += delta_w_bar(k1, *s.potential, bar_differential(k1, c));
        if (!dw.is_zero() || !delta_w_bar(k1, *s.potential, delta_w_bar(k1, *s.potential, c)).is_zero()) ++fails;
      }
    }
    ok = ok && fails == 0;
    result["bar_identities"] = {{"chains", 20}, {"failures", fails}, {"with_potential", s.potential.has_value()}};
  }

  if (s.group.torus_rank == 0 && s.nvars() >= 1 && s.nvars() <= 2) {
    const int L = 4, D = s.degree_cap.value_or(6);
    const BarContext bctx{s.group, s.weights, L, D, 1};
    const GradedComplex bar = bar_complex(bctx);
    ModelSpec fs = s;
    fs.kind = ModelKind::InertiaForms;
    fs.potential.reset();
    fs.degree_cap = D;
    const MixedComplex forms = inertia_forms_model(fs);
    std::map<std::tuple<int, int, int>, std::size_t> hf;
    for (const auto& [sl, h] : homology(forms.base))
      for (const auto& [l, d] : h.dims) hf[{sl.sector, l, sl.aux.value_or(0)}] += d;
    json rows = json::array();
    bool agree = true;
    for (int g = 0; g < s.group.finite_order(); ++g)
      for (int aux = 0; aux <= D; ++aux) {
        const SliceKey sl{zero_character(s.group), g, aux, std::nullopt};
        const SliceLayout layout(bar, sl, Grading::Homological, std::nullopt);
        for (int i = 0; i <= L - 2; ++i) {
          const std::size_t b = subquotient(layout, i).dim;
          const std::size_t f = hf.contains({g, i, aux}) ? hf.at({g, i, aux}) : 0;
          if (b == 0 && f == 0) continue;
          agree = agree && b == f;
          rows.push_back({{"sector", g}, {"aux", aux}, {"hdeg", i}, {"bar", b}, {"forms", f}});
        }
      }
    ok = ok && agree;
    result["bar_vs_forms"] = {{"max_length", L}, {"max_degree", D}, {"table", rows}, {"agree", agree}};
  }
  result["ok"] = ok;
  return result;
}

json compute(const JobSpec& job, Context& ctx) {
  switch (job.op) {
    case Op::HH: return run_hh(ctx);
    case Op::HP: return run_hp(ctx);
    case Op::HN: return run_hn(ctx);
    case Op::Degeneration: return run_degeneration(ctx);
    case Op::SsPages: return run_ss_pages(ctx);
    case Op::Hodge: return run_hodge(ctx);
    case Op::MfHH: return run_mf_hh(ctx);
    case Op::OracleCompare: return run_oracle(ctx);
    case Op::HkrCheck: return run_hkr(ctx);
  }
  throw InvariantViolation("unknown operation");
}

json job_json(const JobSpec& job) { return {{"op", to_string(job.op)}}; }

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "text") return Format::Text;
  throw InputError("unknown output format '" + s + "' (json | csv | text)");
}

std::string to_string(Op op) {
  switch (op) {
    case Op::HH: return "hh";
    case Op::HP: return "hp";
    case Op::HN: return "hn";
    case Op::Degeneration: return "degeneration";
    case Op::SsPages: return "ss-pages";
    case Op::Hodge: return "hodge";
    case Op::MfHH: return "mf-hh";
    case Op::OracleCompare: return "oracle-compare";
    case Op::HkrCheck: return "hkr-check";
  }
  return "?";
}

Op parse_op(const std::string& s) {
  for (Op op : {Op::HH, Op::HP, Op::HN, Op::Degeneration, Op::SsPages, Op::Hodge, Op::MfHH, Op::OracleCompare,
                Op::HkrCheck})
    if (to_string(op) == s) return op;
  throw InputError("unknown operation '" + s +
                   "' (hh | hp | hn | degeneration | ss-pages | hodge | mf-hh | oracle-compare | hkr-check)");
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto pos = text.find("..");
  if (pos == std::string::npos) throw InputError("range '" + text + "' is not of the form a..b");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, pos), b = text.substr(pos + 2);
    const int lo = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const int hi = std::stoi(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    if (lo > hi) throw InputError("range '" + text + "' is empty");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw InputError("range '" + text + "' is not of the form a..b");
  }
}

ModelSpec parse_model_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    std::string what = e.what();
    if (const auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
    throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON: " + what);
  }
  if (!j.is_object()) schema_error(origin, "top level must be an object");

  static const std::set<std::string> known = {"schema_version", "description", "group",      "weights",
                                              "nvars",          "model",       "potential",  "degree_cap",
                                              "loop_window",    "weight_window", "max_weight", "trunc_n"};
  for (const auto& [key, v] : j.items())
    if (!known.contains(key)) schema_error(origin, "unknown key '" + key + "'");

  if (j.contains("schema_version") && get_int(j["schema_version"], "schema_version", origin) != schema_version)
    schema_error(origin, "unsupported schema_version (expected " + std::to_string(schema_version) + ")");
  if (j.contains("description") && !j["description"].is_string()) schema_error(origin, "'description' must be a string");

  ModelSpec s;
  if (!j.contains("model") || !j["model"].is_string()) schema_error(origin, "'model' (string) is required");
  s.kind = parse_model_kind(j["model"].get<std::string>());

  if (j.contains("group")) {
    const json& g = j["group"];
    if (!g.is_object()) schema_error(origin, "'group' must be an object");
    for (const auto& [key, v] : g.items())
      if (key != "torus_rank" && key != "finite_factors") schema_error(origin, "unknown key 'group." + key + "'");
    if (g.contains("torus_rank")) s.group.torus_rank = get_int(g["torus_rank"], "group.torus_rank", origin);
    if (g.contains("finite_factors")) {
      if (!g["finite_factors"].is_array()) schema_error(origin, "'group.finite_factors' must be an array");
      for (const auto& m : g["finite_factors"]) s.group.finite_factors.push_back(get_int(m, "group.finite_factors", origin));
    }
  }
  s.group.validate();

  const std::size_t wlen = static_cast<std::size_t>(s.group.torus_rank) + s.group.finite_factors.size();
  if (j.contains("weights")) {
    if (!j["weights"].is_array()) schema_error(origin, "'weights' must be an array of integer arrays");
    for (std::size_t i = 0; i < j["weights"].size(); ++i) {
      const json& w = j["weights"][i];
      if (!w.is_array() || w.size() != wlen)
        schema_error(origin, "weight of x" + std::to_string(i + 1) + " must have " + std::to_string(wlen) +
                                 " entries (torus_rank + number of finite factors)");
      Character c;
      for (std::size_t k = 0; k < wlen; ++k) {
        if (!w[k].is_number_integer()) schema_error(origin, "weights must be integers");
        (k < static_cast<std::size_t>(s.group.torus_rank) ? c.torus : c.finite).push_back(w[k].get<long>());
      }
      s.weights.push_back(normalized(c, s.group));
    }
  } else if (s.kind != ModelKind::BGa) {
    schema_error(origin, "'weights' is required");
  }
  if (j.contains("nvars") && get_int(j["nvars"], "nvars", origin) != s.nvars())
    schema_error(origin, std::to_string(s.nvars()) + " weights given for " +
                             std::to_string(j["nvars"].get<int>()) + " coordinates");

  if (j.contains("potential")) {
    if (!j["potential"].is_string()) schema_error(origin, "'potential' must be a string");
    s.potential = parse_poly(j["potential"].get<std::string>(), s.nvars());
  }
  if (j.contains("degree_cap")) {
    s.degree_cap = get_int(j["degree_cap"], "degree_cap", origin);
    if (*s.degree_cap < 0) schema_error(origin, "'degree_cap' must be >= 0");
  }
  if (j.contains("loop_window")) {
    const json& lw = j["loop_window"];
    if (lw.is_number_integer()) {
      s.loop_window = lw.get<int>();
    } else {
      const auto [a, b] = get_pair(lw, "loop_window", origin);
      if (a != -b) schema_error(origin, "'loop_window' must be symmetric, [-J, J]");
      s.loop_window = b;
    }
    if (s.loop_window < 0) schema_error(origin, "'loop_window' must have J >= 0");
  }
  if (j.contains("weight_window")) {
    s.weight_window = get_pair(j["weight_window"], "weight_window", origin);
    if (s.weight_window->first > s.weight_window->second) schema_error(origin, "'weight_window' is empty");
  }
  if (j.contains("max_weight")) s.max_weight = get_int(j["max_weight"], "max_weight", origin);
  if (j.contains("trunc_n")) {
    s.trunc_n = get_int(j["trunc_n"], "trunc_n", origin);
    if (*s.trunc_n < 1) schema_error(origin, "'trunc_n' must be >= 1");
  }
  try {
    validate(s);
  } catch (const InputError& e) {
    throw InputError(origin + ": " + e.what());
  }
  return s;
}

ModelSpec parse_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str(), path.string());
}

json model_to_json(const ModelSpec& s) {
  json j;
  j["schema_version"] = schema_version;
  j["group"] = {{"torus_rank", s.group.torus_rank}, {"finite_factors", s.group.finite_factors}};
  json w = json::array();
  for (const auto& c : s.weights) w.push_back(character_json(c));
  j["weights"] = w;
  j["model"] = to_string(s.kind);
  if (s.potential) j["potential"] = to_string(*s.potential);
  if (s.degree_cap) j["degree_cap"] = *s.degree_cap;
  j["loop_window"] = {-s.loop_window, s.loop_window};
  if (s.weight_window) j["weight_window"] = {s.weight_window->first, s.weight_window->second};
  if (s.kind == ModelKind::BGa) j["max_weight"] = s.max_weight;
  if (s.trunc_n) j["trunc_n"] = *s.trunc_n;
  return j;
}

void check_compatible(const JobSpec& job) {
  const ModelKind k = job.model.kind;
  switch (job.op) {
    case Op::HP:
    case Op::HN:
    case Op::SsPages:
      if (is_koszul(k))
        throw InputError(to_string(job.op) + " needs a model with a Connes operator (forms, inertia-forms, bga)");
      break;
    case Op::MfHH:
      if (k != ModelKind::KoszulMF) throw InputError("mf-hh needs model koszul-mf");
      break;
    case Op::OracleCompare:
      if (k == ModelKind::BGa) throw InputError("oracle-compare needs a linear quotient model");
      break;
    case Op::HkrCheck:
      if (k == ModelKind::BGa) throw InputError("hkr-check needs a linear quotient model");
      break;
    default: break;
  }
}

std::string cache_key(const JobSpec& job) {
  const json key = {{"engine", engine_name},
                    {"engine_version", engine_version},
                    {"input", model_to_json(job.model)},
                    {"job", job_json(job)}};
  return sha256_hex(key.dump());
}

namespace {

std::optional<json> read_cache(const std::filesystem::path& file, const std::string& key, RunResult& r) {
  std::error_code ec;
  if (!std::filesystem::exists(file, ec)) return std::nullopt;
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    json j = json::parse(ss.str());
    if (j.at("key").get<std::string>() != key || !j.at("body").is_object() ||
        j.at("body").at("content_hash").get<std::string>() != sha256_hex(j.at("body").at("result").dump()))
      throw std::runtime_error("mismatch");
    return j.at("body");
  } catch (const std::exception&) {
    r.diagnostics.push_back("warning: cache entry " + file.string() + " is corrupt; recomputing");
    return std::nullopt;
  }
}

void write_cache(const std::filesystem::path& dir, const std::filesystem::path& file, const std::string& key,
                 const json& body, RunResult& r) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::random_device rd;
  const auto tmp = dir / (key + ".tmp." + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << json{{"key", key}, {"body", body}}.dump();
    if (!out) {
      r.diagnostics.push_back("warning: cannot write cache entry in " + dir.string());
      std::filesystem::remove(tmp, ec);
      return;
    }
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) {
    r.diagnostics.push_back("warning: cannot install cache entry " + file.string() + ": " + ec.message());
    std::filesystem::remove(tmp, ec);
  }
}

}  // namespace

RunResult run(const JobSpec& job) {
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  check_compatible(job);
  std::string key;
  std::filesystem::path file;
  if (job.cache_dir) {
    key = cache_key(job);
    file = *job.cache_dir / (key + ".json");
    if (auto cached = read_cache(file, key, r)) {
      r.body = std::move(*cached);
      r.cache_hit = true;
    }
  }
  if (!r.cache_hit) {
    Context ctx(job);
    json result = compute(job, ctx);
    json body;
    body["engine"] = engine_name;
    body["engine_version"] = engine_version;
    body["input"] = model_to_json(job.model);
    body["job"] = job_json(job);
    body["result"] = std::move(result);
    if (!ctx.flags.contains("truncated")) ctx.flags["truncated"] = false;
    body["flags"] = ctx.flags;
    body["warnings"] = ctx.warnings;
    body["content_hash"] = sha256_hex(body["result"].dump());
    r.body = std::move(body);
    if (job.cache_dir) write_cache(*job.cache_dir, file, key, r.body, r);
  }
  r.wall_clock_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

json envelope(const RunResult& r) {
  json e = r.body;
  e["wall_clock_ms"] = r.wall_clock_ms;
  return e;
}

namespace {

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

const json* find_table(const json& result) {
  if (result.contains("table") && result["table"].is_array()) return &result["table"];
  if (result.contains("bar_vs_forms")) return &result["bar_vs_forms"]["table"];
  return nullptr;
}

}  // namespace

std::string render(const json& e, Format format) {
  switch (format) {
    case Format::Json: return e.dump(2) + "\n";
    case Format::Csv: {
      std::ostringstream os;
      const json* table = find_table(e.at("result"));
      if (!table) return os.str();
      std::set<std::string> cols;
      for (const auto& row : *table)
        for (const auto& [k, v] : row.items()) cols.insert(k);
      bool first = true;
      for (const auto& c : cols) os << (first ? "" : ",") << c, first = false;
      os << "\n";
      for (const auto& row : *table) {
        first = true;
        for (const auto& c : cols) {
          os << (first ? "" : ",") << (row.contains(c) ? cell(row[c]) : "");
          first = false;
        }
        os << "\n";
      }
      return os.str();
    }
    case Format::Text: {
      std::ostringstream os;
      os << e.at("engine").get<std::string>() << " " << e.at("engine_version").get<std::string>() << "  op "
         << e.at("job").at("op").get<std::string>() << "  model " << e.at("input").at("model").get<std::string>()
         << "\n";
      const json& result = e.at("result");
      for (const auto& [k, v] : result.items()) {
        if (v.is_array() || v.is_object()) continue;
        os << k << ": " << cell(v) << "\n";
      }
      if (result.contains("totals")) os << "totals: " << result["totals"].dump() << "\n";
      if (const json* table = find_table(result)) {
        for (const auto& row : *table) {
          for (const auto& [k, v] : row.items()) os << "  " << k << "=" << cell(v);
          os << "\n";
        }
      }
      for (const auto& [k, v] : e.at("flags").items()) os << "flag " << k << ": " << v.dump() << "\n";
      for (const auto& w : e.at("warnings")) os << "warning: " << w.get<std::string>() << "\n";
      os << "wall_clock_ms: " << e.value("wall_clock_ms", 0LL) << "\n";
      return os.str();
    }
  }
  return {};
}

}  // namespace nchodge::cli
