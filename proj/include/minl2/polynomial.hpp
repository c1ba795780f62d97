#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace minl2 {

using cplx = std::complex<double>;
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& alpha);

/// All multi-indices in n variables with |alpha| <= d, graded then reverse-lex
/// (1, z1, z2, z1^2, z1 z2, z2^2, ...).
std::vector<MultiIndex> monomials_up_to(int n, int d);

/// Evaluates every monomial of `basis` at z. `max_degree` bounds the powers needed.
void evaluate_monomials(std::span<const MultiIndex> basis, std::span<const cplx> z, int max_degree,
                        std::vector<cplx>& out);

/// Sparse polynomial in n complex variables.
class Polynomial {
 public:
  explicit Polynomial(int n = 1) : n_(n) {}
  static Polynomial constant(int n, cplx value);
  static Polynomial monomial(MultiIndex alpha, cplx coefficient = 1.0);

  int variables() const { return n_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }

  void add(const MultiIndex& alpha, cplx coefficient);
  cplx coefficient(const MultiIndex& alpha) const;
  const std::map<MultiIndex, cplx>& terms() const { return terms_; }

  cplx operator()(std::span<const cplx> z) const;
  std::string describe() const;

 private:
  int n_;
  std::map<MultiIndex, cplx> terms_;
};

}  // namespace minl2
