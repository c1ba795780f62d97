#pragma once

// Experiment configuration: TOML text -> typed ExperimentConfig.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minl2/minimizer.hpp"

namespace minl2 {

/// Parse or validation failure, with the offending line and dotted field name
/// when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& origin, int line, const std::string& field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

enum class Spacing { linear, log };

struct TGridSpec {
  double t_min = 0.0;
  double t_max = 10.0;
  int count = 21;
  Spacing spacing = Spacing::linear;
};

std::vector<double> make_t_grid(const TGridSpec& spec);

struct Tolerances {
  double rel = 1e-6;          // value comparisons
  double concavity = 1e-8;    // second differences, relative to max |G|
  double ode = 1e-8;          // ODE residuals
  double coefficient = 1e-8;  // minimizer coefficients
  double identity = 1e-9;     // integration by parts
  double layer_cake = 1e-6;
  double raw = 1e-3;          // raw tensor cross-path
  double decay = 1e-4;        // G(t_max) / G(t_min)
  double pythagoras = 1e-10;
};

struct ExtensionSpec {
  double t0 = 1.0;
  std::vector<double> B{1.0, 0.5, 0.25};
};

struct BergmanSpec {
  std::vector<double> t{0.5, 1.0, 2.0};
  int samples = 5;
  std::uint64_t seed = 7;
  int degree = 2;
};

struct Expectations {
  std::optional<std::string> concavity;  // "linear", "strictly_concave", ...
  std::optional<bool> linear;
};

struct ExperimentConfig {
  std::string name;
  std::string origin;  // file path or "<text>"
  std::optional<DomainModel> domain;
  std::optional<IdealSpec> ideal;
  Polynomial f{1};
  std::optional<WeightFunction> weight;
  std::optional<WeightFunction> weight_tilde;
  TGridSpec grid;
  int basis_degree = 2;
  std::optional<int> resolution;
  bool cross_check = false;
  Tolerances tol;
  ExtensionSpec extension;
  BergmanSpec bergman;
  Expectations expect;
  std::vector<std::string> checks;
  std::string output_dir;
  std::string canonical;  // canonical TOML serialization

  ExtensionProblem problem() const;
  QuadratureGrid quadrature() const;
  std::vector<double> t_grid() const { return make_t_grid(grid); }
};

/// Parses TOML text; relative paths (tabulated weights) resolve against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<text>",
                              const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Canonical form: keys sorted, tables after plain values, shortest round-trip floats.
std::string canonicalize_config(const std::string& text);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace minl2
