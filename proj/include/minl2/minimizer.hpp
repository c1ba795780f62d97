#pragma once

// G(t; c) as a constrained minimum-norm problem over a truncated monomial
// basis, weighted Bergman kernels of the sublevel sets, and the structural
// checks built on the minimizer.
//
// Gram convention: M[a][b] = int conj(z^a) z^b e^{-phi} c(-psi) over {psi < -t},
// so that the weighted norm of p = sum_a x_a z^a is x^H M x.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "minl2/domains.hpp"
#include "minl2/odekit.hpp"
#include "minl2/polynomial.hpp"
#include "minl2/weightlab.hpp"

namespace minl2 {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Constraint F - f in the ideal.
class IdealSpec {
 public:
  enum class Kind { maximal_power, slice };

  /// (z_1, ..., z_n)^k: Taylor coefficients of degree < k pinned to f's.
  static IdealSpec maximal_power(int k);
  /// Ideal of X = {z_{n-k+1} = ... = z_n = 0}: F|_X = f, i.e. every coefficient
  /// without a z'' factor pinned to f's.
  static IdealSpec slice(int codim);

  Kind kind() const { return kind_; }
  int order() const { return order_; }
  bool pins(const MultiIndex& alpha) const;
  /// F - f in the ideal, tested on the coefficients of F - f.
  bool contains(const Polynomial& difference) const;
  std::string describe() const;

 private:
  IdealSpec(Kind kind, int order) : kind_(kind), order_(order) {}
  Kind kind_;
  int order_;
};

struct ExtensionProblem {
  DomainModel dom;
  IdealSpec ideal;
  Polynomial f;
  WeightFunction c;
  int basis_degree;
  bool allow_zero_datum = false;
  QuadratureGrid grid{};
};

/// Checks arities, degree vs. ideal order and the nonzero-jet invariant.
void validate(const ExtensionProblem& problem);

struct GramSystem {
  double t = 0.0;
  std::vector<MultiIndex> basis;
  CMatrix matrix;
  std::vector<char> pinned;  // per basis element
  bool diagonal = false;
  double hermitian_error = 0.0;  // max |M - M^H| / max |M|
  double refinement_error = 0.0;  // max entry change between two resolutions
  double min_pivot = 0.0;         // smallest LDLT pivot of the Jacobi-scaled matrix
};

/// Gram matrix on {psi < -t}. Reinhardt weights take the diagonal path.
/// Throws SingularityError if the matrix is not positive definite and
/// RefinementError if two resolutions disagree.
GramSystem assemble_gram(const ExtensionProblem& problem, double t);

struct MinimalIntegralResult {
  double t = 0.0;
  double value = 0.0;
  /// False when the datum cannot be matched inside the basis; value is then +inf.
  bool feasible = true;
  std::vector<MultiIndex> basis;
  CVector coefficients;  // discrete minimizer F_t
  int basis_degree = 0;
  /// |G_d - G_{d-1}| <= tolerance * G_d (always true at the lowest admissible degree).
  bool converged = true;
  double degree_change = 0.0;
  double condition_estimate = 1.0;
  double min_pivot = 0.0;
  bool diagonal = false;

  Polynomial minimizer(int n) const;
};

inline constexpr double kDegreeTolerance = 1e-8;

/// Solves the pinned-coefficient problem on an assembled Gram system.
MinimalIntegralResult solve_minimal(const ExtensionProblem& problem, const GramSystem& gram);
MinimalIntegralResult minimal_integral(const ExtensionProblem& problem, double t);

/// Weighted quadratic form x^H M y.
cplx gram_form(const GramSystem& gram, const CVector& x, const CVector& y);

struct BergmanEvaluation {
  double t = 0.0;
  std::vector<cplx> z, w;
  cplx value;
  double condition_estimate = 1.0;
  bool ill_conditioned = false;
};

inline constexpr double kIllConditioned = 1e12;

/// Reproducing kernel of the degree-d polynomial space on D_t; one Gram
/// factorization serves every evaluation.
class BergmanKernel {
 public:
  BergmanKernel(const DomainModel& dom, const WeightFunction& c, double t, int degree,
                const QuadratureGrid& grid = {});
  double t() const { return t_; }
  double condition_estimate() const { return condition_; }
  /// Throws DomainError unless z, w lie in D_t.
  BergmanEvaluation operator()(std::span<const cplx> z, std::span<const cplx> w) const;

 private:
  DomainModel dom_;
  double t_;
  int degree_;
  std::vector<MultiIndex> basis_;
  Eigen::VectorXd scale_;
  Eigen::LDLT<CMatrix> ldlt_;
  double condition_ = 1.0;
};

/// K_{D_t}(z, w) for the weight e^{-phi} c(-psi) from the degree-d monomial basis.
BergmanEvaluation bergman_kernel(const DomainModel& dom, const WeightFunction& c, double t, int degree,
                                 std::span<const cplx> z, std::span<const cplx> w, const QuadratureGrid& grid = {});

/// Random coefficient vectors of degree <= d with every pinned entry zero.
std::vector<CVector> random_ideal_perturbations(const GramSystem& gram, int count, std::uint64_t seed);

struct PythagorasReport {
  double max_residual = 0.0;  // relative
  int perturbations = 0;
};

/// ||F_t||^2 + ||h||^2 = ||F_t + h||^2 for every ideal member h.
PythagorasReport verify_pythagoras(const GramSystem& gram, const MinimalIntegralResult& result,
                                   const std::vector<CVector>& perturbations);

struct ExtensionInequalityReport {
  double t0 = 0.0;
  double B = 0.0;
  double lhs = 0.0;       // min over F~ of int_M |F~ - (1 - b(psi)) F|^2 e^{-phi-psi+v(psi)} c(-v(psi))
  double constant = 0.0;  // C = (1/B) int_{-t0-B<psi<-t0} |F|^2 e^{-phi-psi}
  double mass = 0.0;      // int_T^{t0+B} c e^{-s} ds
  double rhs = 0.0;       // constant * mass
  bool pass = false;
  CVector extension;  // coefficients of F~
};

/// Cutoff extension feasibility: F is the minimizer on {psi < -t0}; F~ ranges over the
/// basis with F's pinned coefficients.
ExtensionInequalityReport verify_extension_inequality(const ExtensionProblem& problem, double t0, double B);

}  // namespace minl2
