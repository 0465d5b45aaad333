#pragma once

// Scenario runner behind the command-line verbs. Each scenario returns a
// JSON report with values, witnesses and named invariant checks.

#include <chrono>
#include <iomanip>
#include <sstream>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "mkdual/instance.hpp"

namespace mkdual {

struct ScenarioOptions {
  std::string command;
  std::vector<std::string> n_values;      // approx
  std::optional<std::string> eps;         // partition, extend
  std::optional<std::string> lipschitz;   // partition, extend
  bool timing = false;
};

struct ScenarioReport {
  Json document;
  bool ok = true;  // every invariant check passed
};

inline const std::vector<std::string>& scenario_commands() {
  static const std::vector<std::string> names{"solve",  "chain",  "approx",      "partition",   "extend",
                                              "cover",  "arveson", "wasserstein", "oracle-check"};
  return names;
}

namespace detail {

class Checks {
 public:
  void add(const std::string& name, bool passed, const std::string& detail = "") {
    Json c{{"name", name}, {"passed", passed}};
    if (!detail.empty()) c["detail"] = detail;
    list_.push_back(std::move(c));
    ok_ = ok_ && passed;
  }
  bool ok() const { return ok_; }
  Json json() const { return list_; }

 private:
  Json list_ = Json::array();
  bool ok_ = true;
};

template <class S>
Json potentials_json(const PotentialPair<S>& p) {
  return Json{{"f", vector_to_json(p.f)}, {"g", vector_to_json(p.g)}};
}

template <class S>
std::string gap_text(const S& a, const S& b) {
  if constexpr (is_exact_v<S>) return "difference " + format_rational(S(a - b));
  else {
    std::ostringstream os;
    os << "difference " << std::setprecision(3) << (a - b);
    return os.str();
  }
}

template <class S>
S required_scalar(const std::optional<std::string>& text, const char* flag) {
  if (!text) throw ValidationError(std::string("missing --") + flag);
  try {
    return parse_scalar<S>(*text);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("--") + flag, e.what());
  }
}

template <class S>
const Matrix<S>& metric_of_x(const Instance<S>& inst, const char* verb) {
  if (!inst.space_x.metric) throw ValidationError(std::string(verb) + " needs space_x.metric");
  return *inst.space_x.metric;
}

template <class S>
void run_solve(const Instance<S>& inst, Json& values, Json& witnesses, Checks& checks) {
  const auto c = inst.cost();
  auto lo = solve_alpha(c, inst.mu(), inst.nu());
  auto hi = solve_alpha_star(c, inst.mu(), inst.nu());
  auto b = solve_beta(c, inst.mu(), inst.nu());
  auto bs = solve_beta_star(c, inst.mu(), inst.nu());
  values["alpha"] = scalar_to_json(lo.value);
  values["alpha_star"] = scalar_to_json(hi.value);
  values["beta"] = scalar_to_json(b.value);
  values["beta_star"] = scalar_to_json(bs.value);
  values["chain"] = vector_to_json(std::vector<S>{b.value, lo.value, hi.value, bs.value});
  witnesses["alpha_coupling"] = matrix_to_json(lo.coupling->matrix);
  witnesses["alpha_star_coupling"] = matrix_to_json(hi.coupling->matrix);
  witnesses["beta_potentials"] = potentials_json(*b.potentials);
  witnesses["beta_star_potentials"] = potentials_json(*bs.potentials);
  Chain<S> chain{b.value, lo.value, hi.value, bs.value};
  checks.add("alpha_eq_beta", approx_eq<S>(lo.value, b.value), gap_text(lo.value, b.value));
  checks.add("alpha_star_eq_beta_star", approx_eq<S>(hi.value, bs.value), gap_text(bs.value, hi.value));
  checks.add("chain", chain.holds());
  for (const auto& [name, rep] : {std::pair{"alpha_coupling", &lo}, std::pair{"alpha_star_coupling", &hi}}) {
    auto defect = coupling_defect(*rep->coupling);
    checks.add(std::string(name) + "_feasible", defect.empty(), defect);
  }
  checks.add("beta_potentials_feasible", is_feasible(*b.potentials, c.values));
  checks.add("beta_star_potentials_feasible", is_feasible(*bs.potentials, c.values));
  if (inst.map) {
    try {
      auto p = monge_coupling(inst.mu(), *inst.map, inst.nu());
      S v = p.integrate(c.values);
      values["monge"] = scalar_to_json(v);
      witnesses["monge_coupling"] = matrix_to_json(p.matrix);
      checks.add("alpha_le_monge", approx_le<S>(lo.value, v));
      checks.add("monge_le_alpha_star", approx_le<S>(v, hi.value));
    } catch (const NotMeasurePreserving& e) {
      values["monge"] = nullptr;
      witnesses["monge_defect"] = e.defect();
    }
  }
}

template <class S>
void run_chain(const Instance<S>& inst, Json& values, Checks& checks) {
  auto chain = check_chain(inst.cost(), inst.mu(), inst.nu());
  values["beta"] = scalar_to_json(chain.beta);
  values["alpha"] = scalar_to_json(chain.alpha);
  values["alpha_star"] = scalar_to_json(chain.alpha_star);
  values["beta_star"] = scalar_to_json(chain.beta_star);
  checks.add("chain", chain.holds());
  checks.add("dual_gaps_closed", chain.dual_gaps_closed());
}

template <class S>
void run_approx(const Instance<S>& inst, const ScenarioOptions& opt, Json& values, Json& witnesses, Checks& checks) {
  const auto& d = metric_of_x(inst, "approx");
  const auto c = inst.cost();
  const auto modulus = lipschitz_modulus(c, d);
  std::vector<S> params;
  for (std::size_t i = 0; i < opt.n_values.size(); ++i) {
    try {
      params.push_back(parse_scalar<S>(opt.n_values[i]));
    } catch (const std::invalid_argument& e) {
      throw ParseError("--n", e.what());
    }
  }
  if (params.empty()) {
    if (!modulus) throw ValidationError("cost is not Lipschitz in x for this metric; pass --n explicitly");
    params = doubling_parameters(*modulus);
  }
  values["modulus"] = modulus ? scalar_to_json(*modulus) : Json(nullptr);
  const auto seq = infconv_sequence(c, d, params);
  Json stages = Json::array();
  bool increasing_params = true;
  for (std::size_t k = 0; k < seq.stages.size(); ++k) {
    const auto& st = seq.stages[k];
    const auto& cn = st.cost.values;
    Json s;
    s["n"] = scalar_to_json(st.parameter);
    s["alpha"] = scalar_to_json(solve_alpha(st.cost, inst.mu(), inst.nu()).value);
    s["beta_star"] = scalar_to_json(solve_beta_star(st.cost, inst.mu(), inst.nu()).value);
    witnesses["stage_" + std::to_string(k)] = matrix_to_json(cn);
    stages.push_back(std::move(s));
    const std::string tag = "[n=" + stages.back()["n"].dump() + "]";
    bool bound = true;
    for (std::size_t x = 0; x < cn.rows(); ++x)
      for (std::size_t z = 0; z < cn.rows(); ++z)
        for (std::size_t y = 0; y < cn.cols(); ++y)
          if (!approx_le<S>(abs_value<S>(cn(x, y) - cn(z, y)), S(st.parameter * d(x, z)))) bound = false;
    checks.add("modulus_bound" + tag, bound);
    checks.add("below_cost" + tag, entrywise_le(cn, c.values));
    if (k > 0) {
      if (seq.stages[k - 1].parameter <= st.parameter)
        checks.add("monotone" + tag, entrywise_le(seq.stages[k - 1].cost.values, cn));
      else
        increasing_params = false;
    }
    if (modulus && *modulus <= st.parameter) {
      bool fixed = true;
      for (std::size_t i = 0; i < cn.size(); ++i) fixed = fixed && approx_eq<S>(cn.flat(i), c.values.flat(i));
      checks.add("fixed_point" + tag, fixed);
    }
  }
  values["stages"] = std::move(stages);
  values["beta_star"] = scalar_to_json(solve_beta_star(c, inst.mu(), inst.nu()).value);
  if (increasing_params && !seq.stages.empty()) {
    auto lim = beta_star_limit_check(seq, inst.mu(), inst.nu());
    checks.add("beta_star_nondecreasing", lim.nondecreasing);
    values["final_gap"] = scalar_to_json(lim.final_gap);
    if (modulus && *modulus <= seq.stages.back().parameter)
      checks.add("beta_star_reaches_limit", lim.converged(), gap_text(lim.base_value, lim.stage_values.back()));
  }
}

/// Partition from the instance, or a fresh one when --eps is given.
template <class S>
Partition resolve_partition(const Instance<S>& inst, const ScenarioOptions& opt, const CostMatrix<S>& c, Json& values) {
  if (!opt.eps) {
    if (!inst.partition) throw ValidationError("no partition in the instance; pass --eps (and --lipschitz)");
    return *inst.partition;
  }
  const auto& d = metric_of_x(inst, "partition search");
  const S eps = required_scalar<S>(opt.eps, "eps");
  S u;
  if (opt.lipschitz) {
    u = required_scalar<S>(opt.lipschitz, "lipschitz");
  } else {
    auto m = lipschitz_modulus(c, d);
    if (!m) throw ValidationError("cost is not Lipschitz in x; pass --lipschitz");
    u = *m;
  }
  values["eps"] = scalar_to_json(eps);
  values["lipschitz"] = scalar_to_json(u);
  return find_star_partition(c, eps, d, u);
}

inline Json partition_json(const Partition& p) {
  Json cells = Json::array(), reps = Json::array();
  for (const auto& c : p.cells) cells.push_back(mask_to_json(c));
  for (const auto& r : p.representatives) reps.push_back(r ? Json(*r) : Json(nullptr));
  Json out{{"cells", cells}, {"representatives", reps}};
  if (p.null_cell) out["null_cell"] = *p.null_cell;
  return out;
}

template <class S>
void run_partition(const Instance<S>& inst, const ScenarioOptions& opt, Json& values, Json& witnesses,
                   Checks& checks) {
  const auto c = inst.cost();
  const auto part = resolve_partition(inst, opt, c, values);
  const auto osc = oscillation(c, part);
  const S eps_actual = max_oscillation(c, part);
  const auto c0 = partition_discretize(c, part);
  const S a = solve_alpha(c, inst.mu(), inst.nu()).value;
  const S a0 = solve_alpha(c0, inst.mu(), inst.nu()).value;
  const S b = solve_beta(c, inst.mu(), inst.nu()).value;
  values["cells"] = part.size();
  values["oscillation"] = vector_to_json(osc);
  values["max_oscillation"] = scalar_to_json(eps_actual);
  values["alpha"] = scalar_to_json(a);
  values["alpha_discretized"] = scalar_to_json(a0);
  values["beta"] = scalar_to_json(b);
  witnesses["partition"] = partition_json(part);
  witnesses["discretized_cost"] = matrix_to_json(c0.values);
  if (opt.eps) checks.add("oscillation_le_eps", approx_le<S>(eps_actual, required_scalar<S>(opt.eps, "eps")));
  checks.add("alpha_within_oscillation", approx_le<S>(abs_value<S>(a - a0), eps_actual), gap_text(a, a0));
  checks.add("alpha_le_beta_plus_3eps", approx_le<S>(a, S(b + 3 * eps_actual)));
}

template <class S>
void run_extend(const Instance<S>& inst, const ScenarioOptions& opt, Json& values, Json& witnesses, Checks& checks) {
  const auto c = inst.cost();
  const auto part = resolve_partition(inst, opt, c, values);
  const auto masses = cell_masses(inst.mu(), part);
  // coarse cost: the representative's row (first point for a representative-less cell)
  Matrix<S> coarse(part.size(), inst.ny());
  for (std::size_t k = 0; k < part.size(); ++k) {
    auto idx = part.cells[k].indices();
    std::size_t row = part.representatives[k] ? *part.representatives[k] : (idx.empty() ? 0 : idx.front());
    for (std::size_t y = 0; y < inst.ny(); ++y) coarse(k, y) = c.values(row, y);
  }
  auto t = solve_alpha(CostMatrix<S>(coarse), masses, inst.nu());
  CoarseCoupling<S> tc{part, t.coupling->matrix, inst.nu()};
  auto p = extend_coupling(tc, inst.mu());
  const S osc = max_oscillation(c, part);
  Matrix<S> c0(inst.nx(), inst.ny());
  const auto cell = part.cell_of(inst.nx());
  for (std::size_t x = 0; x < inst.nx(); ++x)
    for (std::size_t y = 0; y < inst.ny(); ++y) c0(x, y) = coarse(cell[x], y);
  const S on_coarse = p.integrate(c0);
  const S on_cost = p.integrate(c.values);
  const S a = solve_alpha(c, inst.mu(), inst.nu()).value;
  values["alpha_coarse"] = scalar_to_json(t.value);
  values["extended_on_coarse_cost"] = scalar_to_json(on_coarse);
  values["extended_on_cost"] = scalar_to_json(on_cost);
  values["alpha"] = scalar_to_json(a);
  values["max_oscillation"] = scalar_to_json(osc);
  witnesses["partition"] = partition_json(part);
  witnesses["coarse_coupling"] = matrix_to_json(tc.matrix);
  witnesses["coupling"] = matrix_to_json(p.matrix);
  auto defect = coupling_defect(p);
  checks.add("marginals_exact", defect.empty(), defect);
  const auto back = coarsen(p, part);
  bool agree = true;
  for (std::size_t i = 0; i < back.size(); ++i) agree = agree && approx_eq<S>(back.flat(i), tc.matrix.flat(i));
  checks.add("coarse_agreement", agree);
  checks.add("coarse_value_preserved", approx_eq<S>(on_coarse, t.value), gap_text(on_coarse, t.value));
  checks.add("alpha_le_extended", approx_le<S>(a, on_cost));
  checks.add("extended_within_oscillation", approx_le<S>(on_cost, S(t.value + osc)));
}

template <class S>
const RectangleFamily& rectangles_of(const Instance<S>& inst, const char* verb) {
  if (!inst.rectangles) throw ValidationError(std::string(verb) + " needs rectangles");
  return *inst.rectangles;
}

template <class S>
void run_cover(const Instance<S>& inst, Json& values, Json& witnesses, Checks& checks) {
  const auto& fam = rectangles_of(inst, "cover");
  const auto cover = min_cover(fam, inst.mu(), inst.nu());
  const auto ind = indicator_cost<S>(fam);
  const auto top = solve_alpha_star(ind, inst.mu(), inst.nu());
  const S bs = solve_beta_star(ind, inst.mu(), inst.nu()).value;
  values["min_cover"] = scalar_to_json(cover.value);
  values["alpha_star"] = scalar_to_json(top.value);
  values["beta_star"] = scalar_to_json(bs);
  witnesses["a"] = mask_to_json(cover.a);
  witnesses["b"] = mask_to_json(cover.b);
  witnesses["alpha_star_coupling"] = matrix_to_json(top.coupling->matrix);
  checks.add("cover_contains_H", covers(cover.a, cover.b, membership(fam, SetMode::union_of)));
  checks.add("cover_eq_alpha_star", approx_eq<S>(cover.value, top.value), gap_text(cover.value, top.value));
  checks.add("beta_star_eq_alpha_star", approx_eq<S>(bs, top.value));
}

template <class S>
void run_arveson(const Instance<S>& inst, Json& values, Json& witnesses, Checks& checks) {
  const auto& fam = rectangles_of(inst, "arveson");
  auto r = arveson_witness(fam, inst.mu(), inst.nu());
  if (auto* cover = std::get_if<Cover<S>>(&r)) {
    values["result"] = "null";
    values["alpha_star"] = scalar_to_json(S(0));
    witnesses["a"] = mask_to_json(cover->a);
    witnesses["b"] = mask_to_json(cover->b);
    const S ma = mass(inst.mu(), cover->a), mb = mass(inst.nu(), cover->b);
    values["mu_a"] = scalar_to_json(ma);
    values["nu_b"] = scalar_to_json(mb);
    checks.add("cover_contains_H", covers(cover->a, cover->b, membership(fam, SetMode::union_of)));
    checks.add("mu_a_zero", approx_eq<S>(ma, S(0)));
    checks.add("nu_b_zero", approx_eq<S>(mb, S(0)));
  } else {
    const auto& nn = std::get<NotNull<S>>(r);
    values["result"] = "not-null";
    values["alpha_star"] = scalar_to_json(nn.alpha_star);
    witnesses["coupling"] = matrix_to_json(nn.coupling.matrix);
    checks.add("coupling_charges_H", definitely_positive<S>(nn.coupling.mass_of(membership(fam, SetMode::union_of))));
  }
}

template <class S>
void run_wasserstein(const Instance<S>& inst, Json& values, Json& witnesses, Checks& checks) {
  const auto& d = metric_of_x(inst, "wasserstein");
  if (inst.ny() != inst.nx()) throw ValidationError("wasserstein needs space_y on the same points as space_x");
  auto w = wasserstein1(d, inst.mu(), inst.nu());
  values["alpha"] = scalar_to_json(w.alpha);
  values["beta"] = scalar_to_json(w.beta);
  values["lipschitz_excess"] = scalar_to_json(w.lipschitz_excess);
  witnesses["potential"] = vector_to_json(w.potential);
  witnesses["coupling"] = matrix_to_json(w.coupling.matrix);
  checks.add("alpha_eq_beta", w.duality_holds(), gap_text(w.alpha, w.beta));
  checks.add("potential_1_lipschitz", w.potential_is_1_lipschitz());
}

template <class S>
void run_oracle_check(const Instance<S>& inst, Json& values, Checks& checks) {
  const auto c = inst.cost();
  std::string match = "exact";
  for (auto obj : {Objective::alpha, Objective::alpha_star}) {
    const S v = solve(obj, c, inst.mu(), inst.nu()).value;
    const auto oracle = oracle_enumerate(c, inst.mu(), inst.nu(), obj);
    const std::string name(to_string(obj));
    values[name] = scalar_to_json(v);
    values["oracle_" + name] = scalar_to_json(oracle.value);
    values["bases_examined"] = oracle.bases_examined;
    const bool same = v == oracle.value;
    const bool close = approx_eq<S>(v, oracle.value);
    if (!close) match = "mismatch";
    else if (!same && match == "exact") match = "within-tolerance";
    checks.add(name + "_matches_oracle", close, gap_text(v, oracle.value));
  }
  values["match"] = match;
}

}  // namespace detail

template <class S>
ScenarioReport run_scenario(const Instance<S>& inst, const ScenarioOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Json values = Json::object(), witnesses = Json::object();
  detail::Checks checks;
  const auto& cmd = opt.command;
  if (cmd == "solve") detail::run_solve(inst, values, witnesses, checks);
  else if (cmd == "chain") detail::run_chain(inst, values, checks);
  else if (cmd == "approx") detail::run_approx(inst, opt, values, witnesses, checks);
  else if (cmd == "partition") detail::run_partition(inst, opt, values, witnesses, checks);
  else if (cmd == "extend") detail::run_extend(inst, opt, values, witnesses, checks);
  else if (cmd == "cover") detail::run_cover(inst, values, witnesses, checks);
  else if (cmd == "arveson") detail::run_arveson(inst, values, witnesses, checks);
  else if (cmd == "wasserstein") detail::run_wasserstein(inst, values, witnesses, checks);
  else if (cmd == "oracle-check") detail::run_oracle_check(inst, values, checks);
  else throw ValidationError("unknown command '" + cmd + "'");

  ScenarioReport r;
  r.ok = checks.ok();
  auto& doc = r.document;
  doc["command"] = cmd;
  doc["arithmetic"] = to_string(Instance<S>::arithmetic);
  if constexpr (!is_exact_v<S>) doc["tolerance"] = tolerance();
  doc["values"] = std::move(values);
  doc["witnesses"] = std::move(witnesses);
  doc["checks"] = checks.json();
  doc["ok"] = r.ok;
  if (opt.timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    doc["timing_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  return r;
}

inline ScenarioReport run_scenario(const AnyInstance& inst, const ScenarioOptions& opt) {
  return std::visit([&](const auto& i) { return run_scenario(i, opt); }, inst);
}

/// Random rational instance of shape rows x cols: weights k/sum k,
/// costs p/q, shortest-path metrics on both sides, two rectangles.
inline Instance<Rational> generate_instance(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw ValidationError("--size needs positive dimensions");
  std::mt19937_64 rng(seed);
  auto draw = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  auto weights = [&](std::size_t n) {
    std::vector<std::int64_t> k(n);
    std::int64_t sum = 0;
    for (auto& v : k) sum += (v = draw(1, 9));
    Weights<Rational> w;
    for (auto v : k) w.push_back(Rational(v, sum));
    return w;
  };
  auto metric = [&](std::size_t n) {
    Matrix<Rational> raw(n, n);
    for (std::size_t i = 0; i < raw.size(); ++i) raw.flat(i) = Rational(draw(1, 9));
    return shortest_path_closure(raw);
  };
  auto subset = [&](std::size_t n) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (rng() % 2) idx.push_back(i);
    return idx;
  };
  Instance<Rational> inst;
  inst.space_x = ProbabilitySpace<Rational>::with_weights(weights(rows), metric(rows));
  inst.space_y = ProbabilitySpace<Rational>::with_weights(weights(cols), metric(cols));
  inst.cost_spec.matrix = Matrix<Rational>(rows, cols);
  for (std::size_t i = 0; i < inst.cost_spec.matrix.size(); ++i)
    inst.cost_spec.matrix.flat(i) = Rational(draw(-10, 10), draw(1, 4));
  RectangleFamily fam(rows, cols);
  for (int k = 0; k < 2; ++k) fam.add(subset(rows), subset(cols));
  inst.rectangles = std::move(fam);
  detail::validate(inst);
  return inst;
}

}  // namespace mkdual
