#pragma once

#include <vector>

#include "bvr/errors.hpp"
#include "bvr/tolerances.hpp"

namespace bvr {

// Dense real polynomial, ascending coefficients: c[0] + c[1]x + c[2]x^2 + ...
struct RealPolynomial {
  std::vector<double> c;

  RealPolynomial() = default;
  explicit RealPolynomial(std::vector<double> coeffs) : c(std::move(coeffs)) {}

  // Degree after dropping exactly-zero leading coefficients; -1 for the zero
  // polynomial. Small-but-nonzero leads are kept: the engagement polynomials
  // mix dimensionless and length^n coefficients, so "small against max|c|"
  // says nothing at large geometric scales.
  int degree() const;
  double eval(double x) const;      // Horner
  double eval_abs(double x) const;  // sum |c_i| |x|^i, residual scale
  RealPolynomial derivative() const;
};

struct RootSet {
  std::vector<double> roots;       // ascending, deduplicated
  std::vector<int> multiplicity;   // parallel to roots
  std::vector<double> residuals;   // |p(root)| on the normalized polynomial
  int count() const { return static_cast<int>(roots.size()); }
};

// All real roots of p inside [lo, hi] (pass +-infinity for no bound).
// Companion-matrix eigenvalues, Newton-polished; repeated roots are merged
// with their multiplicity and sharpened through the derivative so that even
// double roots come back to ~1e-12 of the true location. Accepted roots
// satisfy |p(x)| <= root_residual_rel * (1 + sum|c_i x^i|); the set is
// invariant under uniform coefficient scaling.
// Throws DegenerateInput if p is constant.
RootSet real_roots(const RealPolynomial& p, double lo, double hi);

// Refine a root guess by damped Newton (with a derivative-root snap for
// repeated roots). Throws NoConvergence if the residual threshold is not met
// within the iteration budget.
double polish_root(const RealPolynomial& p, double guess);

}  // namespace bvr
