#include "minl2/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace minl2 {

namespace {

std::string format_error(const std::string& origin, int line, const std::string& field, const std::string& message) {
  std::ostringstream os;
  os << origin;
  if (line > 0) os << ":" << line;
  os << ": ";
  if (!field.empty()) os << "field '" << field << "': ";
  os << message;
  return os.str();
}

const std::set<std::string> kKnownChecks = {"compute-g",   "check-concavity",   "check-linearity", "bergman-ratio",
                                            "verify-ode",  "verify-identities", "extension-check"};

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const toml::node* node, const std::string& field, const std::string& message) const {
    const int line = node ? static_cast<int>(node->source().begin.line) : 0;
    throw ConfigError(origin_, line, field, message);
  }

  void allow(const toml::table& table, const std::string& prefix, std::initializer_list<const char*> keys) const {
    for (const auto& [key, node] : table) {
      const std::string k(key.str());
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
        fail(&node, join(prefix, k), "unknown key");
    }
  }

  static std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
  }

  const toml::table* table(const toml::table& parent, const std::string& prefix, const char* key) const {
    const toml::node* node = parent.get(key);
    if (!node) return nullptr;
    if (!node->is_table()) fail(node, join(prefix, key), "expected a table");
    return node->as_table();
  }

  std::optional<double> number(const toml::table& t, const std::string& prefix, const char* key) const {
    const toml::node* node = t.get(key);
    if (!node) return std::nullopt;
    if (auto v = node->value<double>(); v && (node->is_floating_point() || node->is_integer())) return *v;
    fail(node, join(prefix, key), "expected a number");
  }

  double number_or(const toml::table& t, const std::string& prefix, const char* key, double fallback) const {
    return number(t, prefix, key).value_or(fallback);
  }

  std::optional<std::int64_t> integer(const toml::table& t, const std::string& prefix, const char* key) const {
    const toml::node* node = t.get(key);
    if (!node) return std::nullopt;
    if (!node->is_integer()) fail(node, join(prefix, key), "expected an integer");
    return node->as_integer()->get();
  }

  std::optional<std::string> string(const toml::table& t, const std::string& prefix, const char* key) const {
    const toml::node* node = t.get(key);
    if (!node) return std::nullopt;
    if (!node->is_string()) fail(node, join(prefix, key), "expected a string");
    return node->as_string()->get();
  }

  std::optional<bool> boolean(const toml::table& t, const std::string& prefix, const char* key) const {
    const toml::node* node = t.get(key);
    if (!node) return std::nullopt;
    if (!node->is_boolean()) fail(node, join(prefix, key), "expected true or false");
    return node->as_boolean()->get();
  }

  std::optional<std::vector<double>> numbers(const toml::table& t, const std::string& prefix, const char* key) const {
    const toml::node* node = t.get(key);
    if (!node) return std::nullopt;
    if (auto v = node->value<double>(); v && !node->is_boolean()) return std::vector<double>{*v};
    if (!node->is_array()) fail(node, join(prefix, key), "expected a number or an array of numbers");
    std::vector<double> out;
    for (const auto& item : *node->as_array()) {
      auto v = item.value<double>();
      if (!v || item.is_boolean()) fail(&item, join(prefix, key), "array entries must be numbers");
      out.push_back(*v);
    }
    return out;
  }

  // [[re, im, e_1, ..., e_n], ...]
  Polynomial polynomial(const toml::table& t, const std::string& prefix, const char* key, int n) const {
    const toml::node* node = t.get(key);
    const std::string field = join(prefix, key);
    if (!node->is_array()) fail(node, field, "expected an array of terms [re, im, exponents...]");
    Polynomial p(n);
    for (const auto& term : *node->as_array()) {
      if (!term.is_array()) fail(&term, field, "each term must be [re, im, exponents...]");
      const auto& arr = *term.as_array();
      if (static_cast<int>(arr.size()) != n + 2) fail(&term, field, "term needs 2 + n entries");
      const auto re = arr[0].value<double>();
      const auto im = arr[1].value<double>();
      if (!re || !im) fail(&term, field, "coefficient parts must be numbers");
      MultiIndex alpha;
      for (int j = 0; j < n; ++j) {
        const auto& e = arr[static_cast<std::size_t>(j + 2)];
        if (!e.is_integer() || e.as_integer()->get() < 0) fail(&term, field, "exponents must be nonnegative integers");
        alpha.push_back(static_cast<int>(e.as_integer()->get()));
      }
      p.add(alpha, cplx(*re, *im));
    }
    return p;
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
};

WeightFunction read_weight(const Reader& rd, const toml::table& t, const std::string& prefix,
                           const std::string& base_dir) {
  rd.allow(t, prefix, {"family", "T", "value", "alpha", "a", "path"});
  const std::string family = rd.string(t, prefix, "family").value_or("constant");
  const double T = rd.number_or(t, prefix, "T", 0.0);
  try {
    if (family == "constant") return WeightFunction::constant(rd.number_or(t, prefix, "value", 1.0), T);
    if (family == "exp_rate") {
      const auto alpha = rd.number(t, prefix, "alpha");
      if (!alpha) rd.fail(t.get("family"), prefix + ".alpha", "exp_rate needs alpha");
      return WeightFunction::exp_rate(*alpha, T);
    }
    if (family == "rational") return WeightFunction::rational(rd.number_or(t, prefix, "a", 1.0), T);
    if (family == "tabulated") {
      const auto path = rd.string(t, prefix, "path");
      if (!path) rd.fail(t.get("family"), prefix + ".path", "tabulated weight needs a CSV path");
      std::filesystem::path p(*path);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      return WeightFunction::from_csv(p.string());
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    rd.fail(t.get("family"), prefix, e.what());
  }
  rd.fail(t.get("family"), prefix + ".family", "unknown weight family '" + family + "'");
}

}  // namespace

ConfigError::ConfigError(const std::string& origin, int line, const std::string& field, const std::string& message)
    : Error(format_error(origin, line, field, message)), line_(line), field_(field) {}

std::vector<double> make_t_grid(const TGridSpec& spec) {
  if (spec.count < 1) throw ParameterError("t-grid is empty");
  if (spec.spacing == Spacing::linear || spec.count == 1) return linear_grid(spec.t_min, spec.t_max, spec.count);
  std::vector<double> grid(spec.count);
  const double la = std::log(spec.t_min);
  const double lb = std::log(spec.t_max);
  for (int i = 0; i < spec.count; ++i) grid[i] = std::exp(la + (lb - la) * i / (spec.count - 1));
  grid.front() = spec.t_min;
  grid.back() = spec.t_max;
  return grid;
}

ExtensionProblem ExperimentConfig::problem() const {
  return ExtensionProblem{*domain, *ideal, f, *weight, basis_degree, false, quadrature()};
}

QuadratureGrid ExperimentConfig::quadrature() const {
  return resolution ? QuadratureGrid::with_resolution(*resolution) : QuadratureGrid{};
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin, const std::string& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    throw ConfigError(origin, static_cast<int>(e.source().begin.line), "", std::string(e.description()));
  }
  const Reader rd(origin);
  rd.allow(root, "",
           {"name", "checks", "basis_degree", "ideal_order", "resolution", "cross_check", "output_dir", "domain", "phi",
            "ideal", "datum", "weight", "weight_tilde", "t_grid", "tolerances", "extension", "bergman", "expect"});

  ExperimentConfig cfg;
  cfg.origin = origin;
  cfg.name = rd.string(root, "", "name").value_or(std::filesystem::path(origin).stem().string());
  cfg.output_dir = rd.string(root, "", "output_dir").value_or("");
  cfg.cross_check = rd.boolean(root, "", "cross_check").value_or(false);

  if (const toml::node* checks = root.get("checks")) {
    if (!checks->is_array()) rd.fail(checks, "checks", "expected an array of subcommand names");
    for (const auto& item : *checks->as_array()) {
      if (!item.is_string()) rd.fail(&item, "checks", "entries must be strings");
      const std::string name = item.as_string()->get();
      if (!kKnownChecks.count(name)) rd.fail(&item, "checks", "unknown check '" + name + "'");
      cfg.checks.push_back(name);
    }
  } else {
    cfg.checks = {"compute-g", "check-concavity", "check-linearity"};
  }

  if (auto d = rd.integer(root, "", "basis_degree")) {
    if (*d < 0 || *d > 40) rd.fail(root.get("basis_degree"), "basis_degree", "must lie in [0, 40]");
    cfg.basis_degree = static_cast<int>(*d);
  }
  if (auto r = rd.integer(root, "", "resolution")) {
    if (*r < 4 || *r > 4096) rd.fail(root.get("resolution"), "resolution", "must lie in [4, 4096]");
    cfg.resolution = static_cast<int>(*r);
  }

  // Domain and phi.
  PhiSpec phi;
  int n = 1;
  const toml::table* dom_t = rd.table(root, "", "domain");
  if (!dom_t) throw ConfigError(origin, 0, "domain", "missing required table");
  rd.allow(*dom_t, "domain", {"kind", "n", "radii", "slice_codim"});
  const std::string kind = rd.string(*dom_t, "domain", "kind").value_or("");
  std::vector<double> radii;
  if (kind == "disk") {
    n = 1;
  } else if (kind == "ball") {
    n = static_cast<int>(rd.integer(*dom_t, "domain", "n").value_or(2));
    if (n < 1 || n > 6) rd.fail(dom_t->get("n"), "domain.n", "must lie in [1, 6]");
  } else if (kind == "polydisc") {
    radii = rd.numbers(*dom_t, "domain", "radii").value_or(std::vector<double>{});
    if (radii.empty()) {
      n = static_cast<int>(rd.integer(*dom_t, "domain", "n").value_or(2));
      if (n < 1 || n > 6) rd.fail(dom_t->get("n"), "domain.n", "must lie in [1, 6]");
      radii.assign(n, 1.0);
    }
    n = static_cast<int>(radii.size());
  } else {
    rd.fail(dom_t->get("kind"), "domain.kind", "expected \"disk\", \"ball\" or \"polydisc\"");
  }

  if (const toml::table* phi_t = rd.table(root, "", "phi")) {
    rd.allow(*phi_t, "phi", {"tag", "a", "h"});
    const std::string tag = rd.string(*phi_t, "phi", "tag").value_or("zero");
    try {
      if (tag == "zero") {
        phi = PhiSpec::zero();
      } else if (tag == "radial_power") {
        phi = PhiSpec::radial_power(rd.number_or(*phi_t, "phi", "a", 1.0));
      } else if (tag == "log_modulus") {
        if (!phi_t->get("h")) rd.fail(phi_t->get("tag"), "phi.h", "log_modulus needs h");
        phi = PhiSpec::log_modulus(rd.polynomial(*phi_t, "phi", "h", n));
      } else {
        rd.fail(phi_t->get("tag"), "phi.tag", "unknown tag '" + tag + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      rd.fail(phi_t->get("tag"), "phi", e.what());
    }
  }

  try {
    if (kind == "disk") {
      cfg.domain = DomainModel::disk(phi);
    } else if (kind == "ball") {
      cfg.domain = DomainModel::ball(n, phi);
    } else {
      const int codim = static_cast<int>(rd.integer(*dom_t, "domain", "slice_codim").value_or(n));
      cfg.domain = DomainModel::polydisc_slice(radii, codim, phi);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    rd.fail(dom_t->get("kind"), "domain", e.what());
  }

  // Ideal.
  if (const toml::table* id_t = rd.table(root, "", "ideal")) {
    rd.allow(*id_t, "ideal", {"kind", "order", "codim"});
    const std::string ik = rd.string(*id_t, "ideal", "kind").value_or("maximal_power");
    if (ik == "maximal_power") {
      const auto k = rd.integer(*id_t, "ideal", "order").value_or(1);
      if (k < 1) rd.fail(id_t->get("order"), "ideal.order", "must be >= 1");
      cfg.ideal = IdealSpec::maximal_power(static_cast<int>(k));
    } else if (ik == "slice") {
      const auto k = rd.integer(*id_t, "ideal", "codim").value_or(cfg.domain->pole_dimension());
      if (k < 1 || k > n) rd.fail(id_t->get("codim"), "ideal.codim", "must lie in [1, n]");
      cfg.ideal = IdealSpec::slice(static_cast<int>(k));
    } else {
      rd.fail(id_t->get("kind"), "ideal.kind", "expected \"maximal_power\" or \"slice\"");
    }
  } else if (auto k = rd.integer(root, "", "ideal_order")) {
    if (*k < 1) rd.fail(root.get("ideal_order"), "ideal_order", "must be >= 1");
    cfg.ideal = IdealSpec::maximal_power(static_cast<int>(*k));
  } else if (cfg.domain->is_slice()) {
    cfg.ideal = IdealSpec::slice(cfg.domain->pole_dimension());
  } else {
    cfg.ideal = IdealSpec::maximal_power(1);
  }
  if (cfg.ideal->kind() == IdealSpec::Kind::maximal_power && cfg.basis_degree < cfg.ideal->order() - 1)
    rd.fail(root.get("basis_degree"), "basis_degree", "must be at least ideal order - 1");

  // Datum.
  cfg.f = Polynomial::constant(n, 1.0);
  if (const toml::table* f_t = rd.table(root, "", "datum")) {
    rd.allow(*f_t, "datum", {"terms"});
    if (f_t->get("terms")) cfg.f = rd.polynomial(*f_t, "datum", "terms", n);
  }

  // Weights.
  cfg.weight = WeightFunction::constant();
  if (const toml::table* w_t = rd.table(root, "", "weight")) cfg.weight = read_weight(rd, *w_t, "weight", base_dir);
  if (const toml::table* w_t = rd.table(root, "", "weight_tilde"))
    cfg.weight_tilde = read_weight(rd, *w_t, "weight_tilde", base_dir);

  // t-grid.
  if (const toml::table* g_t = rd.table(root, "", "t_grid")) {
    rd.allow(*g_t, "t_grid", {"t_min", "t_max", "count", "spacing"});
    cfg.grid.t_min = rd.number_or(*g_t, "t_grid", "t_min", cfg.grid.t_min);
    cfg.grid.t_max = rd.number_or(*g_t, "t_grid", "t_max", cfg.grid.t_max);
    if (auto c = rd.integer(*g_t, "t_grid", "count")) {
      if (*c < 1) rd.fail(g_t->get("count"), "t_grid.count", "t-grid is empty");
      if (*c > 100000) rd.fail(g_t->get("count"), "t_grid.count", "too many grid points");
      cfg.grid.count = static_cast<int>(*c);
    }
    const std::string sp = rd.string(*g_t, "t_grid", "spacing").value_or("linear");
    if (sp == "linear")
      cfg.grid.spacing = Spacing::linear;
    else if (sp == "log")
      cfg.grid.spacing = Spacing::log;
    else
      rd.fail(g_t->get("spacing"), "t_grid.spacing", "expected \"linear\" or \"log\"");
    if (!(cfg.grid.t_min >= 0.0)) rd.fail(g_t->get("t_min"), "t_grid.t_min", "must be >= 0");
    if (cfg.grid.count > 1 && !(cfg.grid.t_max > cfg.grid.t_min))
      rd.fail(g_t->get("t_max"), "t_grid.t_max", "must exceed t_min");
    if (cfg.grid.spacing == Spacing::log && !(cfg.grid.t_min > 0.0))
      rd.fail(g_t->get("t_min"), "t_grid.t_min", "log spacing needs t_min > 0");
  }
  if (cfg.grid.t_min < cfg.weight->T())
    throw ConfigError(origin, 0, "t_grid.t_min", "must be >= the weight's T");

  // Tolerances.
  if (const toml::table* t_t = rd.table(root, "", "tolerances")) {
    rd.allow(*t_t, "tolerances",
             {"rel", "concavity", "ode", "coefficient", "identity", "layer_cake", "raw", "decay", "pythagoras"});
    auto read = [&](const char* key, double& slot) {
      if (auto v = rd.number(*t_t, "tolerances", key)) {
        if (!(*v > 0.0)) rd.fail(t_t->get(key), std::string("tolerances.") + key, "tolerances must be > 0");
        slot = *v;
      }
    };
    read("rel", cfg.tol.rel);
    read("concavity", cfg.tol.concavity);
    read("ode", cfg.tol.ode);
    read("coefficient", cfg.tol.coefficient);
    read("identity", cfg.tol.identity);
    read("layer_cake", cfg.tol.layer_cake);
    read("raw", cfg.tol.raw);
    read("decay", cfg.tol.decay);
    read("pythagoras", cfg.tol.pythagoras);
  }

  if (const toml::table* e_t = rd.table(root, "", "extension")) {
    rd.allow(*e_t, "extension", {"t0", "B"});
    cfg.extension.t0 = rd.number_or(*e_t, "extension", "t0", cfg.extension.t0);
    if (auto B = rd.numbers(*e_t, "extension", "B")) cfg.extension.B = *B;
    for (double b : cfg.extension.B)
      if (!(b > 0.0)) rd.fail(e_t->get("B"), "extension.B", "widths must be > 0");
    if (!(cfg.extension.t0 >= 0.0)) rd.fail(e_t->get("t0"), "extension.t0", "must be >= 0");
  }

  if (const toml::table* b_t = rd.table(root, "", "bergman")) {
    rd.allow(*b_t, "bergman", {"t", "samples", "seed", "degree"});
    if (auto t = rd.numbers(*b_t, "bergman", "t")) cfg.bergman.t = *t;
    for (double t : cfg.bergman.t)
      if (!(t >= 0.0)) rd.fail(b_t->get("t"), "bergman.t", "must be >= 0");
    if (auto s = rd.integer(*b_t, "bergman", "samples")) {
      if (*s < 1) rd.fail(b_t->get("samples"), "bergman.samples", "must be >= 1");
      cfg.bergman.samples = static_cast<int>(*s);
    }
    if (auto s = rd.integer(*b_t, "bergman", "seed")) cfg.bergman.seed = static_cast<std::uint64_t>(*s);
    if (auto d = rd.integer(*b_t, "bergman", "degree")) {
      if (*d < 0) rd.fail(b_t->get("degree"), "bergman.degree", "must be >= 0");
      cfg.bergman.degree = static_cast<int>(*d);
    }
  }

  if (const toml::table* x_t = rd.table(root, "", "expect")) {
    rd.allow(*x_t, "expect", {"concavity", "linear"});
    cfg.expect.concavity = rd.string(*x_t, "expect", "concavity");
    if (cfg.expect.concavity) {
      static const std::set<std::string> verdicts = {"linear", "strictly_concave", "concave"};
      if (!verdicts.count(*cfg.expect.concavity))
        rd.fail(x_t->get("concavity"), "expect.concavity", "expected linear, strictly_concave or concave");
    }
    cfg.expect.linear = rd.boolean(*x_t, "expect", "linear");
  }

  std::ostringstream canon;
  canon << root;
  cfg.canonical = canon.str();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "", "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path();
  return parse_config(buf.str(), path, base.empty() ? "." : base.string());
}

std::string canonicalize_config(const std::string& text) {
  try {
    std::ostringstream os;
    os << toml::parse(text);
    return os.str();
  } catch (const toml::parse_error& e) {
    throw ConfigError("<text>", static_cast<int>(e.source().begin.line), "", std::string(e.description()));
  }
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace minl2
