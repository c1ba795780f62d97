#include "minl2/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "minl2/analysis.hpp"

namespace minl2 {

namespace fs = std::filesystem;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace {

// Non-finite values become null, which keeps the JSON valid.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json numbers(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

Json optional_number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) text_ += ',';
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }
  Csv& row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) text_ += ',';
      text_ += format_double(v);
      first = false;
    }
    text_ += '\n';
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

GTransform transform_for(const WeightFunction& c, const std::vector<double>& t_grid) {
  const double t_last = t_grid.empty() ? c.T() + 1.0 : t_grid.back();
  return build_g(c, std::max(default_t_max(c), std::ceil(t_last) + 1.0));
}

std::vector<double> curve_grid(const ExperimentConfig& cfg) {
  std::vector<double> grid = cfg.t_grid();
  const double T = cfg.weight->T();
  if (grid.front() > T) grid.insert(grid.begin(), T);
  return grid;
}

Json describe_problem(const ExperimentConfig& cfg) {
  return Json{{"domain", cfg.domain->describe()},
              {"ideal", cfg.ideal->describe()},
              {"datum", cfg.f.describe()},
              {"weight", cfg.weight->describe()},
              {"basis_degree", cfg.basis_degree}};
}

Csv curve_csv(const GCurve& curve, const std::vector<int>& degrees) {
  Csv csv({"t", "r", "G", "basis_degree", "converged"});
  for (std::size_t i = 0; i < curve.size(); ++i)
    csv.row({curve.t[i], curve.r[i], curve.G[i], static_cast<double>(degrees[i]), curve.converged[i] ? 1.0 : 0.0});
  return csv;
}

CheckResult compute_g(const ExperimentConfig& cfg) {
  CheckResult out;
  const ExtensionProblem problem = cfg.problem();
  const std::vector<double> grid = cfg.t_grid();
  const GTransform g = transform_for(*cfg.weight, grid);
  const int n = cfg.domain->dimension();
  const int raw_resolution = cfg.resolution.value_or(256);

  Csv csv({"t", "r", "G", "basis_degree", "converged"});
  Csv raw_csv({"t", "G", "G_raw", "relative_error"});
  std::vector<double> G;
  bool all_converged = true;
  bool all_feasible = true;
  double max_raw_error = 0.0;
  for (double t : grid) {
    const MinimalIntegralResult res = minimal_integral(problem, t);
    G.push_back(res.value);
    all_converged = all_converged && res.converged;
    all_feasible = all_feasible && res.feasible;
    csv.row({t, g(t), res.value, static_cast<double>(res.basis_degree), res.converged ? 1.0 : 0.0});
    if (cfg.cross_check && res.feasible) {
      const Polynomial F = res.minimizer(n);
      const DomainModel& dom = *cfg.domain;
      const WeightFunction& c = *cfg.weight;
      const double raw = raw_sublevel_integral(
          dom, t,
          [&](std::span<const cplx> z) { return std::norm(F(z)) * dom.phi().exp_neg(z) * c(-dom.psi(z)); },
          raw_resolution);
      const double err = std::abs(raw - res.value) / std::abs(res.value);
      max_raw_error = std::max(max_raw_error, err);
      raw_csv.row({t, res.value, raw, err});
    }
  }
  out.csv.push_back({"compute-g.csv", csv.str()});
  out.report = describe_problem(cfg);
  out.report["t"] = numbers(grid);
  out.report["G"] = numbers(G);
  out.report["all_converged"] = all_converged;
  out.report["all_feasible"] = all_feasible;
  out.pass = all_converged && all_feasible;
  if (cfg.cross_check) {
    out.csv.push_back({"compute-g-raw.csv", raw_csv.str()});
    out.report["raw_resolution"] = raw_resolution;
    out.report["raw_max_relative_error"] = number(max_raw_error);
    out.report["raw_tolerance"] = cfg.tol.raw;
    out.pass = out.pass && max_raw_error <= cfg.tol.raw;
  }
  if (!all_converged) out.error = "basis degree not converged at some t";
  else if (!out.pass) out.error = "raw cross-check exceeds tolerance";
  return out;
}

struct SampledCurve {
  GCurve curve;
  std::vector<int> degrees;
};

SampledCurve sample(const ExperimentConfig& cfg, const std::vector<double>& grid) {
  const ExtensionProblem problem = cfg.problem();
  const GTransform g = transform_for(*cfg.weight, grid);
  std::vector<double> G;
  std::vector<int> degrees;
  std::vector<char> converged;
  for (double t : grid) {
    const MinimalIntegralResult res = minimal_integral(problem, t);
    G.push_back(res.value);
    degrees.push_back(res.basis_degree);
    converged.push_back(res.converged);
  }
  GCurve curve = make_curve(g, grid, G);
  curve.converged = converged;
  return {std::move(curve), std::move(degrees)};
}

CheckResult check_concavity_cmd(const ExperimentConfig& cfg) {
  CheckResult out;
  const SampledCurve sc = sample(cfg, cfg.t_grid());
  const ConcavityReport rep = check_concavity(sc.curve, cfg.tol.concavity);
  out.csv.push_back({"check-concavity.csv", curve_csv(sc.curve, sc.degrees).str()});
  out.report = describe_problem(cfg);
  out.report["verdict"] = to_string(rep.verdict);
  out.report["max_second_difference"] = number(rep.max_second_difference);
  out.report["second_differences"] = numbers(rep.second_differences);
  out.report["r_mid"] = numbers(rep.r_mid);
  out.report["witness_r"] = optional_number(rep.witness_r);
  out.report["k_c"] = optional_number(rep.k_c);
  out.report["tolerance"] = number(rep.tolerance);
  out.report["slope_gap"] = number(rep.slope_gap);
  out.pass = rep.verdict != ConcavityVerdict::violated;
  if (!out.pass) out.error = "G(g^{-1}(r)) is not concave";
  if (cfg.expect.concavity) {
    const std::string& want = *cfg.expect.concavity;
    const bool match = want == "concave" ? out.pass : want == to_string(rep.verdict);
    out.report["expected"] = want;
    if (!match) {
      out.pass = false;
      out.error = "expected verdict " + want + ", got " + to_string(rep.verdict);
    }
  }
  return out;
}

CheckResult check_linearity_cmd(const ExperimentConfig& cfg) {
  CheckResult out;
  const SampledCurve sc = sample(cfg, curve_grid(cfg));
  const LinearityVerdict v = check_linearity_equivalence(sc.curve, cfg.tol.rel);
  out.csv.push_back({"check-linearity.csv", curve_csv(sc.curve, sc.degrees).str()});
  out.report = describe_problem(cfg);
  out.report["linear"] = v.linear;
  out.report["some_t0"] = v.some_t0;
  out.report["tail_limit"] = v.tail_limit;
  out.report["agree"] = v.agree;
  out.report["k_c"] = number(v.k_c);
  out.report["min_interior_ratio"] = number(v.min_interior_ratio);
  out.report["t0_witness"] = optional_number(v.t0_witness);
  out.report["tail_ratio"] = number(v.tail_ratio);
  out.report["extrapolation_stable"] = v.extrapolation_stable;
  out.pass = v.agree;
  if (!v.agree) out.error = "the three linearity criteria disagree";
  if (cfg.expect.linear) {
    out.report["expected_linear"] = *cfg.expect.linear;
    if (v.linear != *cfg.expect.linear) {
      out.pass = false;
      out.error = std::string("expected linear = ") + (*cfg.expect.linear ? "true" : "false");
    }
  }

  if (cfg.weight_tilde) {
    try {
      const EffectiveLinearityReport eff = check_effective_linearity(cfg.problem(), *cfg.weight_tilde, cfg.t_grid(),
                                                                     cfg.tol.rel, 1e-3, cfg.tol.coefficient);
      Csv csv({"t", "lhs", "rhs", "resolved"});
      for (std::size_t i = 0; i < eff.t.size(); ++i) csv.row({eff.t[i], eff.lhs[i], eff.rhs[i], eff.resolved[i]});
      out.csv.push_back({"effective-linearity.csv", csv.str()});
      out.report["effective"] = Json{{"weight_tilde", cfg.weight_tilde->describe()},
                                     {"k_c", number(eff.k_c)},
                                     {"max_relative_residual", number(eff.max_relative_residual)},
                                     {"max_resolve_residual", number(eff.max_resolve_residual)},
                                     {"max_coefficient_gap", number(eff.max_coefficient_gap)},
                                     {"pass", eff.pass}};
      if (!eff.pass) {
        out.pass = false;
        out.error = "effective linearity fails";
      }
    } catch (const HypothesisError& e) {
      out.report["effective"] = Json{{"pass", false}, {"hypothesis_error", e.what()}};
      out.pass = false;
      out.error = std::string("effective linearity: ") + e.what();
    }
  }
  return out;
}

std::vector<std::vector<cplx>> bergman_samples(const ExperimentConfig& cfg) {
  const DomainModel& dom = *cfg.domain;
  const int n = dom.dimension();
  std::mt19937_64 rng(cfg.bergman.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<cplx>> samples;
  // Points at ball-norm (or per-coordinate) modulus at most 0.8.
  for (int k = 0; k < cfg.bergman.samples; ++k) {
    std::vector<cplx> z(n);
    if (dom.kind() == DomainKind::polydisc) {
      for (int j = 0; j < n; ++j) z[j] = std::polar(0.8 * dom.radii()[j] * unit(rng), kTwoPi * unit(rng));
    } else {
      std::vector<double> share(n);
      double sum = 0.0;
      for (auto& s : share) sum += (s = unit(rng) + 1e-3);
      const double radius = 0.8 * unit(rng);
      for (int j = 0; j < n; ++j) z[j] = std::polar(radius * std::sqrt(share[j] / sum), kTwoPi * unit(rng));
    }
    samples.push_back(std::move(z));
  }
  return samples;
}

CheckResult bergman_ratio_cmd(const ExperimentConfig& cfg) {
  CheckResult out;
  const BergmanRestrictionReport rep = bergman_restriction_check(*cfg.domain, cfg.bergman.t, bergman_samples(cfg),
                                                                 cfg.tol.rel, cfg.bergman.degree, *cfg.weight);
  Csv csv({"t", "max_ratio_error", "duality_error"});
  for (std::size_t i = 0; i < rep.t.size(); ++i) csv.row({rep.t[i], rep.max_ratio_error[i], rep.duality_error[i]});
  out.csv.push_back({"bergman-ratio.csv", csv.str()});
  out.report = describe_problem(cfg);
  out.report["t"] = numbers(rep.t);
  out.report["max_ratio_error"] = number(rep.max_ratio_error_all);
  out.report["max_duality_error"] = number(rep.max_duality_error);
  out.report["statement1"] = rep.statement1;
  out.report["statement2"] = rep.statement2;
  out.report["statement3"] = rep.statement3;
  out.report["ill_conditioned"] = rep.ill_conditioned;
  out.report["samples"] = rep.samples;
  out.report["degree"] = cfg.bergman.degree;
  out.pass = rep.pass;
  if (!rep.pass) out.error = "Bergman restriction law fails";
  return out;
}

CheckResult verify_ode_cmd(const ExperimentConfig& cfg) {
  CheckResult out;
  const WeightFunction& c = *cfg.weight;
  const std::vector<double> grid = cfg.t_grid();
  const OdeSolution sol = solve_gz(c);
  const GzResidualReport rep = verify_gz_residuals(sol, grid);
  Csv csv({"t", "res1", "res2", "min_pos"});
  for (const auto& row : rep.rows) csv.row({row.t, row.res1, row.res2, row.min_pos});
  out.csv.push_back({"verify-ode.csv", csv.str()});

  std::vector<double> inner;
  for (double t : grid)
    if (t > c.T()) inner.push_back(t);
  bool class_c = false;
  if (!inner.empty()) class_c = check_class_C(c, inner).in_class;

  out.report = Json{{"weight", c.describe()},
                    {"max_res1", number(rep.max_res1)},
                    {"max_res2", number(rep.max_res2)},
                    {"min_positivity", number(rep.min_positivity)},
                    {"min_s", number(rep.min_s)},
                    {"skipped", numbers(rep.skipped)},
                    {"rows", rep.rows.size()},
                    {"class_C", class_c},
                    {"tolerance", cfg.tol.ode}};
  out.pass = !rep.rows.empty() && rep.max_res1 <= cfg.tol.ode && rep.max_res2 <= cfg.tol.ode &&
             rep.min_positivity > 0.0 && rep.min_s >= 0.0;
  if (!out.pass) out.error = "ODE residuals exceed tolerance";
  return out;
}

CheckResult verify_identities_cmd(const ExperimentConfig& cfg) {
  CheckResult out;
  const DomainModel& dom = *cfg.domain;
  const WeightFunction& c = *cfg.weight;
  const double T = c.T();
  const double t0 = std::max(T, cfg.grid.t_min);
  const TestFunction a = TestFunction::saturating_exp(1.0, 0.5, 1.0);
  const PointIntegrand density = [&](std::span<const cplx> z) { return dom.phi().exp_neg(z); };
  out.report = describe_problem(cfg);
  out.report["test_function"] = a.name;
  bool pass = true;
  std::vector<std::string> failures;

  // Densities here are smooth on each level set, so a lighter grid suffices; refinement still guards it.
  QuadratureGrid id_grid;
  id_grid.radial_order = 16;
  id_grid.simplex_order = 12;
  id_grid.free_radial_order = 24;
  id_grid.angular = dom.reinhardt() ? 8 : 32;
  id_grid.tail_rel = 1e-13;
  LayerCakeOptions lc_options;
  lc_options.outer = id_grid;
  lc_options.inner = id_grid;
  const LayerCakeResult lc = layer_cake(dom, density, a, t0, lc_options);
  const bool lc_ok = lc.residual <= cfg.tol.layer_cake;
  out.report["layer_cake"] = Json{{"lhs", number(lc.lhs)}, {"rhs", number(lc.rhs)},
                                  {"residual", number(lc.residual)}, {"pass", lc_ok}};
  if (!lc_ok) failures.push_back("layer cake");

  const IntByPartsResult ibp = int_by_parts_identity(c, a, t0);
  const bool ibp_ok = std::abs(ibp.residual) <= cfg.tol.identity;
  out.report["integration_by_parts"] = Json{{"weighted", number(ibp.weighted)}, {"parts", number(ibp.parts)},
                                            {"boundary", number(ibp.boundary)}, {"residual", number(ibp.residual)},
                                            {"limit_hypothesis", ibp.limit_hypothesis}, {"pass", ibp_ok}};
  if (!ibp_ok) failures.push_back("integration by parts");

  const QuotientReport q = quotient_monotonicity(dom, density, a, c, t0, cfg.t_grid(), 1e-8, id_grid);
  const bool q_ok = !q.hypothesis_holds || q.conclusion_holds;
  out.report["quotient"] = Json{{"hypothesis_holds", q.hypothesis_holds}, {"hypothesis_margin", number(q.hypothesis_margin)},
                                {"lhs", number(q.lhs)}, {"rhs", number(q.rhs)}, {"margin", number(q.margin)},
                                {"conclusion_holds", q.conclusion_holds}, {"pass", q_ok}};
  if (!q_ok) failures.push_back("quotient monotonicity");

  const ExtensionProblem problem = cfg.problem();
  const GramSystem gram = assemble_gram(problem, t0);
  const MinimalIntegralResult res = solve_minimal(problem, gram);
  const PythagorasReport py = verify_pythagoras(gram, res, random_ideal_perturbations(gram, 20, cfg.bergman.seed));
  const bool py_ok = py.max_residual <= cfg.tol.pythagoras;
  out.report["pythagoras"] = Json{{"max_residual", number(py.max_residual)}, {"perturbations", py.perturbations},
                                  {"t", t0}, {"pass", py_ok}};
  if (!py_ok) failures.push_back("Pythagoras");

  const SampledCurve sc = sample(cfg, cfg.t_grid());
  const MonotoneReport mono = check_monotone_limits(sc.curve, cfg.tol.decay);
  // Decay to the tolerance is only demanded on curves expected to be linear.
  const bool need_decay = cfg.expect.linear.value_or(false) && c.family() == WeightFamily::constant;
  const bool mono_ok = mono.nonincreasing && (!need_decay || mono.decays);
  out.report["monotone"] = Json{{"nonincreasing", mono.nonincreasing}, {"decays", mono.decays},
                                {"decay_ratio", number(mono.decay_ratio)}, {"decay_required", need_decay},
                                {"witness_t", optional_number(mono.witness_t)}, {"pass", mono_ok}};
  if (!mono_ok) failures.push_back("monotone limits");
  out.csv.push_back({"verify-identities.csv", curve_csv(sc.curve, sc.degrees).str()});

  pass = failures.empty();
  out.pass = pass;
  for (const auto& f : failures) out.error += (out.error.empty() ? "" : ", ") + f;
  if (!pass) out.error += " failed";
  return out;
}

CheckResult extension_check_cmd(const ExperimentConfig& cfg) {
  CheckResult out;
  out.report = describe_problem(cfg);
  if (cfg.ideal->kind() == IdealSpec::Kind::slice) {
    ExtensionProblem problem = cfg.problem();
    problem.c = WeightFunction::constant(1.0, cfg.weight->T());
    try {
      const OptimalExtensionReport rep =
          optimal_extension_check(problem, *cfg.weight, cfg.t_grid(), cfg.tol.raw, cfg.tol.coefficient);
      Csv csv({"t", "decay", "weighted", "weighted_bound"});
      for (std::size_t i = 0; i < rep.t.size(); ++i)
        csv.row({rep.t[i], rep.decay_values[i], rep.weighted_values[i], rep.weighted_bounds[i]});
      out.csv.push_back({"extension-check.csv", csv.str()});
      out.report["mode"] = "optimal";
      out.report["global_norm"] = number(rep.global_norm);
      out.report["boundary_value"] = number(rep.boundary_value);
      out.report["global_rhs"] = number(rep.global_rhs);
      out.report["max_decay_error"] = number(rep.max_decay_error);
      out.report["max_coefficient_gap"] = number(rep.max_coefficient_gap);
      out.report["max_weighted_excess"] = number(rep.max_weighted_excess);
      out.report["max_weighted_gap"] = number(rep.max_weighted_gap);
      out.pass = rep.pass;
      if (!rep.pass) out.error = "optimal extension equality fails";
    } catch (const HypothesisError& e) {
      out.report["hypothesis_error"] = e.what();
      out.pass = false;
      out.error = e.what();
    }
    return out;
  }

  out.report["mode"] = "cutoff";
  Json rows = Json::array();
  Csv csv({"B", "lhs", "rhs", "constant", "mass"});
  out.pass = true;
  for (double B : cfg.extension.B) {
    const ExtensionInequalityReport rep = verify_extension_inequality(cfg.problem(), cfg.extension.t0, B);
    csv.row({B, rep.lhs, rep.rhs, rep.constant, rep.mass});
    rows.push_back(Json{{"B", B}, {"lhs", number(rep.lhs)}, {"rhs", number(rep.rhs)},
                        {"constant", number(rep.constant)}, {"mass", number(rep.mass)}, {"pass", rep.pass}});
    if (!rep.pass) {
      out.pass = false;
      out.error = "extension inequality fails at B = " + format_double(B);
    }
  }
  out.csv.push_back({"extension-check.csv", csv.str()});
  out.report["t0"] = cfg.extension.t0;
  out.report["cases"] = rows;
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"compute-g",  "check-concavity",   "check-linearity", "bergman-ratio",
                                                 "verify-ode", "verify-identities", "extension-check"};
  return names;
}

bool is_check(const std::string& name) {
  const auto& names = subcommands();
  return std::find(names.begin(), names.end(), name) != names.end();
}

void apply_overrides(ExperimentConfig& config, const RunOptions& options) {
  if (options.resolution) {
    if (*options.resolution < 4) throw ConfigError("--resolution", 0, "resolution", "must be >= 4");
    config.resolution = *options.resolution;
  }
  if (options.tol) {
    if (!(*options.tol > 0.0)) throw ConfigError("--tol", 0, "tolerances.rel", "tolerances must be > 0");
    config.tol.rel = *options.tol;
  }
  if (!options.out_dir.empty()) config.output_dir = options.out_dir;
}

CheckResult run_check(const std::string& subcommand, const ExperimentConfig& config) {
  if (!is_check(subcommand)) throw ParameterError("unknown subcommand '" + subcommand + "'");
  const auto start = std::chrono::steady_clock::now();
  CheckResult out;
  try {
    if (subcommand == "compute-g") out = compute_g(config);
    else if (subcommand == "check-concavity") out = check_concavity_cmd(config);
    else if (subcommand == "check-linearity") out = check_linearity_cmd(config);
    else if (subcommand == "bergman-ratio") out = bergman_ratio_cmd(config);
    else if (subcommand == "verify-ode") out = verify_ode_cmd(config);
    else if (subcommand == "verify-identities") out = verify_identities_cmd(config);
    else out = extension_check_cmd(config);
  } catch (const std::exception& e) {
    out = CheckResult{};
    out.pass = false;
    out.error = e.what();
  }
  out.name = subcommand;
  out.report["check"] = subcommand;
  out.report["pass"] = out.pass;
  if (!out.error.empty()) out.report["error"] = out.error;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Json RunReport::to_json() const {
  Json checks_json = Json::object();
  for (const auto& c : checks) {
    Json entry{{"pass", c.pass}, {"wall_seconds", c.wall_seconds}, {"report", c.report}};
    if (!c.error.empty()) entry["error"] = c.error;
    checks_json[c.name] = entry;
  }
  return Json{{"config", config_name}, {"config_hash", config_hash}, {"version", version},
              {"pass", pass},          {"checks", checks_json}};
}

RunReport run(const std::vector<std::string>& checks, const ExperimentConfig& config, const RunOptions& options) {
  RunReport report;
  report.config_name = config.name;
  report.config_hash = config_hash(config);
  for (const auto& name : checks) {
    CheckResult r = run_check(name, config);
    report.pass = report.pass && r.pass;
    report.checks.push_back(std::move(r));
  }
  if (options.write_files) {
    const fs::path dir = config.output_dir.empty() ? fs::path("out") : fs::path(config.output_dir);
    for (const auto& c : report.checks) {
      write_atomic((dir / (c.name + ".json")).string(), c.report.dump(2) + "\n");
      for (const auto& a : c.csv) write_atomic((dir / a.name).string(), a.content);
    }
    write_atomic((dir / "run_report.json").string(), report.to_json().dump(2) + "\n");
  }
  return report;
}

int SuiteReport::exit_code() const {
  for (const auto& e : entries)
    if (e.status != "pass") return kExitCheckFailure;
  return kExitPass;
}

Json SuiteReport::to_json() const {
  Json configs = Json::object();
  int passed = 0;
  for (const auto& e : entries) {
    Json entry{{"file", e.file}, {"status", e.status}};
    if (!e.message.empty()) entry["message"] = e.message;
    if (e.report) {
      entry["config_hash"] = e.report->config_hash;
      Json checks = Json::object();
      for (const auto& c : e.report->checks) checks[c.name] = c.pass;
      entry["checks"] = checks;
    }
    if (e.status == "pass") ++passed;
    configs[e.name] = entry;
  }
  return Json{{"version", kVersion},
              {"configs", configs},
              {"total", entries.size()},
              {"passed", passed},
              {"failed", static_cast<int>(entries.size()) - passed},
              {"pass", exit_code() == kExitPass}};
}

SuiteReport run_suite(const std::string& config_dir, const RunOptions& options, std::ostream& log) {
  if (!fs::is_directory(config_dir)) throw ConfigError(config_dir, 0, "", "not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  SuiteReport suite;
  suite.empty = files.empty();
  if (suite.empty) log << "warning: no .cfg files in " << config_dir << "\n";
  const fs::path out_root = options.out_dir.empty() ? fs::path("out") : fs::path(options.out_dir);

  for (const auto& file : files) {
    SuiteEntry entry;
    entry.file = file.filename().string();
    entry.name = file.stem().string();
    try {
      ExperimentConfig cfg = load_config(file.string());
      RunOptions local = options;
      local.out_dir.clear();
      apply_overrides(cfg, local);
      entry.name = cfg.name;
      cfg.output_dir = (out_root / cfg.name).string();
      RunReport report = run(cfg.checks, cfg, options);
      entry.status = report.pass ? "pass" : "fail";
      for (const auto& c : report.checks)
        if (!c.pass) entry.message += (entry.message.empty() ? "" : "; ") + c.name + ": " + c.error;
      entry.report = std::move(report);
    } catch (const ConfigError& e) {
      entry.status = "config-error";
      entry.message = e.what();
    } catch (const std::exception& e) {
      entry.status = "fail";
      entry.message = e.what();
    }
    log << entry.status << "  " << entry.name;
    if (!entry.message.empty()) log << "  (" << entry.message << ")";
    log << "\n";
    suite.entries.push_back(std::move(entry));
  }
  std::stable_sort(suite.entries.begin(), suite.entries.end(),
                   [](const SuiteEntry& a, const SuiteEntry& b) { return a.file < b.file; });
  if (options.write_files) write_atomic((out_root / "suite_summary.json").string(), suite.to_json().dump(2) + "\n");
  return suite;
}

}  // namespace minl2
