#include "minl2/polynomial.hpp"

#include <numeric>
#include <sstream>

#include "minl2/errors.hpp"

namespace minl2 {

int total_degree(const MultiIndex& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

namespace {

void enumerate(int n, int remaining, int pos, MultiIndex& current, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    current[pos] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    current[pos] = k;
    enumerate(n, remaining - k, pos + 1, current, out);
  }
}

}  // namespace

std::vector<MultiIndex> monomials_up_to(int n, int d) {
  if (n < 1) throw ParameterError("monomials: need at least one variable");
  std::vector<MultiIndex> out;
  MultiIndex current(n, 0);
  for (int deg = 0; deg <= d; ++deg) enumerate(n, deg, 0, current, out);
  return out;
}

void evaluate_monomials(std::span<const MultiIndex> basis, std::span<const cplx> z, int max_degree,
                        std::vector<cplx>& out) {
  const std::size_t n = z.size();
  // powers[j * (max_degree + 1) + k] = z_j^k
  thread_local std::vector<cplx> powers;
  powers.assign(n * (max_degree + 1), cplx(1.0, 0.0));
  for (std::size_t j = 0; j < n; ++j)
    for (int k = 1; k <= max_degree; ++k) powers[j * (max_degree + 1) + k] = powers[j * (max_degree + 1) + k - 1] * z[j];
  out.resize(basis.size());
  for (std::size_t b = 0; b < basis.size(); ++b) {
    cplx v(1.0, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (basis[b][j] != 0) v *= powers[j * (max_degree + 1) + basis[b][j]];
    out[b] = v;
  }
}

Polynomial Polynomial::constant(int n, cplx value) {
  Polynomial p(n);
  p.add(MultiIndex(n, 0), value);
  return p;
}

Polynomial Polynomial::monomial(MultiIndex alpha, cplx coefficient) {
  Polynomial p(static_cast<int>(alpha.size()));
  p.add(alpha, coefficient);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [alpha, c] : terms_) d = std::max(d, total_degree(alpha));
  return d;
}

void Polynomial::add(const MultiIndex& alpha, cplx coefficient) {
  if (static_cast<int>(alpha.size()) != n_) throw ParameterError("polynomial: multi-index has wrong arity");
  for (int a : alpha)
    if (a < 0) throw ParameterError("polynomial: negative exponent");
  if (coefficient == cplx(0.0)) return;
  auto& slot = terms_[alpha];
  slot += coefficient;
  if (slot == cplx(0.0)) terms_.erase(alpha);
}

cplx Polynomial::coefficient(const MultiIndex& alpha) const {
  const auto it = terms_.find(alpha);
  return it == terms_.end() ? cplx(0.0) : it->second;
}

cplx Polynomial::operator()(std::span<const cplx> z) const {
  cplx sum(0.0);
  for (const auto& [alpha, c] : terms_) {
    cplx term = c;
    for (std::size_t j = 0; j < alpha.size(); ++j)
      for (int k = 0; k < alpha[j]; ++k) term *= z[j];
    sum += term;
  }
  return sum;
}

std::string Polynomial::describe() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [alpha, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real();
    if (c.imag() != 0.0) os << (c.imag() > 0 ? "+" : "") << c.imag() << "i";
    os << ")";
    for (std::size_t j = 0; j < alpha.size(); ++j)
      if (alpha[j] > 0) os << "*z" << (j + 1) << (alpha[j] > 1 ? "^" + std::to_string(alpha[j]) : "");
  }
  return os.str();
}

}  // namespace minl2
