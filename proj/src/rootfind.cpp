#include "bvr/rootfind.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace bvr {

int RealPolynomial::degree() const {
  // Trim exact zeros only. A leading coefficient that merely looks small
  // against max|c| can still be the real thing: the engagement polynomials
  // mix dimensionless and length^n terms, so their coefficient spread grows
  // with the geometric scale. Conditioning is handled by balancing below.
  int d = -1;
  for (int i = 0; i < static_cast<int>(c.size()); ++i)
    if (c[i] != 0.0) d = i;
  return d;
}

double RealPolynomial::eval(double x) const {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

double RealPolynomial::eval_abs(double x) const {
  const double ax = std::abs(x);
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * ax + std::abs(*it);
  return r;
}

RealPolynomial RealPolynomial::derivative() const {
  RealPolynomial d;
  for (int i = 1; i < static_cast<int>(c.size()); ++i)
    d.c.push_back(i * c[i]);
  return d;
}

namespace {

bool residual_ok(const RealPolynomial& p, double x) {
  return std::abs(p.eval(x)) <= kTol.root_residual_rel * (1.0 + p.eval_abs(x));
}

// Damped Newton; returns the improved point, never throws.
double newton(const RealPolynomial& p, const RealPolynomial& dp, double x) {
  for (int it = 0; it < kTol.newton_max_iter; ++it) {
    const double f = p.eval(x);
    if (f == 0.0) return x;
    const double fp = dp.eval(x);
    if (fp == 0.0) return x;
    double step = f / fp;
    double xn = x - step;
    for (int k = 0; k < 20 && std::abs(p.eval(xn)) > std::abs(f); ++k) {
      step *= 0.5;
      xn = x - step;
    }
    if (std::abs(xn - x) < 1e-16 * std::max(1.0, std::abs(x))) return xn;
    x = xn;
  }
  return x;
}

// Newton on p, then try snapping to the nearby stationary point of p: a
// repeated root sits exactly on one, and plain Newton only gets within
// ~sqrt(eps) of it. The snap is kept only when it stays close and still
// satisfies the residual gate, so simple roots are unaffected.
double refine(const RealPolynomial& p, const RealPolynomial& dp,
              const RealPolynomial& ddp, double x0) {
  double x = newton(p, dp, x0);
  const double y = newton(dp, ddp, x);
  if (std::abs(y - x) <= 10.0 * std::max(kTol.root_dedup, kTol.root_snap_span * (1.0 + std::abs(x))) &&
      residual_ok(p, y))
    return y;
  return x;
}

std::vector<std::complex<double>> companion_eigenvalues(const std::vector<double>& monic) {
  // monic: a_0..a_{n-1}, polynomial x^n + a_{n-1}x^{n-1} + ... + a_0.
  const int n = static_cast<int>(monic.size());
  // Exact power-of-two variable scaling keeps the companion well conditioned
  // (Eigen does not balance) without perturbing the coefficients.
  double smax = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = std::abs(monic[k]);
    if (a > 0.0) smax = std::max(smax, std::pow(a, 1.0 / (n - k)));
  }
  double s = 1.0;
  if (smax > 0.0) s = std::exp2(std::clamp(std::round(std::log2(smax)), -30.0, 30.0));
  std::vector<double> b(n);
  for (int k = 0; k < n; ++k) b[k] = monic[k] * std::pow(s, k - n);

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -b[i];
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NoConvergence("real_roots: eigenvalue iteration failed");
  std::vector<std::complex<double>> out(n);
  for (int i = 0; i < n; ++i) out[i] = s * es.eigenvalues()[i];
  return out;
}

}  // namespace

RootSet real_roots(const RealPolynomial& p, double lo, double hi) {
  const int deg = p.degree();
  if (deg <= 0)
    throw DegenerateInput("real_roots: polynomial is constant");

  // Normalize so the residual gate and every threshold are scale invariant.
  double mx = 0.0;
  for (double v : p.c) mx = std::max(mx, std::abs(v));
  RealPolynomial pn;
  pn.c.assign(p.c.begin(), p.c.begin() + deg + 1);
  for (double& v : pn.c) v /= mx;

  std::vector<double> cand;
  if (deg == 1) {
    cand.push_back(-pn.c[0] / pn.c[1]);
  } else if (deg == 2) {
    const double a = pn.c[2], b = pn.c[1], c0 = pn.c[0];
    const double disc = b * b - 4.0 * a * c0;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q != 0.0) {
        cand.push_back(q / a);
        cand.push_back(c0 / q);
      } else {
        cand.push_back(0.0);
        cand.push_back(-b / a);
      }
    } else if (disc > -kTol.root_imag_rel * (b * b + 4.0 * std::abs(a * c0))) {
      cand.push_back(-b / (2.0 * a));  // grazing double root
      cand.push_back(-b / (2.0 * a));
    }
  } else {
    std::vector<double> monic(pn.c.begin(), pn.c.end() - 1);
    for (double& v : monic) v /= pn.c.back();
    const auto eig = companion_eigenvalues(monic);
    double spectral = 1.0;
    for (const auto& z : eig) spectral = std::max(spectral, std::abs(z));
    for (const auto& z : eig)
      if (std::abs(z.imag()) <= kTol.root_imag_rel * spectral) cand.push_back(z.real());
  }

  const RealPolynomial dp = pn.derivative();
  const RealPolynomial ddp = dp.derivative();
  std::vector<double> kept;
  for (double x0 : cand) {
    const double x = refine(pn, dp, ddp, x0);
    if (!std::isfinite(x) || !residual_ok(pn, x)) continue;
    if (x < lo - kTol.tiny * (1.0 + std::abs(lo)) ||
        x > hi + kTol.tiny * (1.0 + std::abs(hi))) continue;
    kept.push_back(x);
  }
  std::sort(kept.begin(), kept.end());

  RootSet rs;
  for (double x : kept) {
    if (!rs.roots.empty() &&
        x - rs.roots.back() <= std::max(kTol.root_dedup, kTol.root_dedup * std::abs(x))) {
      ++rs.multiplicity.back();
      // keep the representative with the smaller residual
      if (std::abs(pn.eval(x)) < rs.residuals.back()) {
        rs.roots.back() = x;
        rs.residuals.back() = std::abs(pn.eval(x));
      }
    } else {
      rs.roots.push_back(x);
      rs.multiplicity.push_back(1);
      rs.residuals.push_back(std::abs(pn.eval(x)));
    }
  }
  return rs;
}

double polish_root(const RealPolynomial& p, double guess) {
  const int deg = p.degree();
  if (deg <= 0)
    throw DegenerateInput("polish_root: polynomial is constant");
  double mx = 0.0;
  for (double v : p.c) mx = std::max(mx, std::abs(v));
  RealPolynomial pn;
  pn.c.assign(p.c.begin(), p.c.begin() + deg + 1);
  for (double& v : pn.c) v /= mx;
  const RealPolynomial dp = pn.derivative();
  const RealPolynomial ddp = dp.derivative();
  const double x = refine(pn, dp, ddp, guess);
  if (!std::isfinite(x) || !residual_ok(pn, x))
    throw NoConvergence("polish_root: residual threshold not met");
  return x;
}

}  // namespace bvr
