#include "patchdyn/stability.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "patchdyn/model.hpp"

namespace patchdyn {

const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::sink: return "sink";
    case StabilityClass::saddle: return "saddle";
    case StabilityClass::source: return "source";
    case StabilityClass::marginal: return "marginal";
  }
  return "?";
}

const char* to_string(SinglePatchRegime r) {
  switch (r) {
    case SinglePatchRegime::predator_extinct_gas: return "predator-extinct-GAS";
    case SinglePatchRegime::interior_gas: return "interior-GAS";
    case SinglePatchRegime::limit_cycle: return "limit-cycle";
  }
  return "?";
}

StabilityLabel classify(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n < 2 || n > 4 || m.cols() != n)
    throw std::invalid_argument("classify expects a square matrix of size 2..4");
  if (!m.allFinite())
    throw std::invalid_argument("classify requires finite matrix entries");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  StabilityLabel out;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + n);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });

  double radius = 0.0;
  for (const auto& ev : out.eigenvalues) radius = std::max(radius, std::abs(ev));
  const double tol = 1e-9 * (1.0 + radius);

  int negative = 0, positive = 0;
  out.margin = std::numeric_limits<double>::infinity();
  for (const auto& ev : out.eigenvalues) {
    out.margin = std::min(out.margin, std::fabs(ev.real()));
    if (ev.real() < -tol) ++negative;
    else if (ev.real() > tol) ++positive;
  }
  if (negative == n) out.label = StabilityClass::sink;
  else if (positive == n) out.label = StabilityClass::source;
  else if (negative + positive == n) out.label = StabilityClass::saddle;
  else out.label = StabilityClass::marginal;
  return out;
}

BothPreyStability ek1k2_closed_form(const ModelParams& p) {
  // (a_i - d_i)(mu_i - K_i)/(1 + K_i) expands to d_i - a_i K_i/(1 + K_i),
  // which stays defined when a_i <= d_i.
  const double g1 = p.d1 - holling(p.a1, p.K1);
  const double g2 = p.d2 - holling(p.a2, p.K2);
  BothPreyStability out;
  out.inequality1 = g1 + p.s * p.rho1 + g2 + p.s * p.rho2;
  out.inequality2 = g1 * (p.s * p.rho2 + g2) + p.s * p.rho1 * g2;
  out.stable = out.inequality1 > 0.0 && out.inequality2 > 0.0;
  return out;
}

SymmetricStability symmetric_interior_stability(const ModelParams& p) {
  SymmetricStability out;
  const double tol = 1e-12;
  const bool sym = std::fabs(p.a1 - p.a2) <= tol && std::fabs(p.d1 - p.d2) <= tol &&
                   std::fabs(p.K1 - p.K2) <= tol && std::fabs(p.r1 - 1.0) <= tol &&
                   std::fabs(p.r2 - 1.0) <= tol;
  if (!sym || p.a1 <= p.d1) return out;
  out.symmetric = true;

  const double a = p.a1, d = p.d1, K = p.K1;
  const double mu = d / (a - d);
  const double nu = (K - mu) * (1.0 + mu) / (a * K);
  const double den = K * (1.0 + mu);
  const double rho_sum = p.rho1 + p.rho2;

  // Block-diagonalization of the Jacobian at E gives two quadratic pairs.
  // The in-phase pair matches the single-patch interior linearization; the
  // anti-phase pair picks up the dispersal terms through rho1 + rho2.
  out.pair12_sum = mu * (K - 1.0 - 2.0 * mu) / den;
  out.pair12_product = d * (K - mu) / den;
  out.pair34_sum = (mu * (K - 1.0 - 2.0 * mu) - K * p.s * rho_sum * (1.0 + mu)) / den;
  out.pair34_product =
      (rho_sum * ((1.0 - p.s) * (K - mu) * d * nu - (K - 1.0 - 2.0 * mu) * p.s * mu) +
       d * (K - mu)) / den;

  out.stable = (K - 1.0) / 2.0 < mu && mu < K;

  const State4 E{mu, nu, mu, nu};
  out.eigen = classify(Eigen::MatrixXd(jacobian_full(p, E)));

  const bool closed_form_stable = out.pair12_sum < 0.0 && out.pair12_product > 0.0 &&
                                  out.pair34_sum < 0.0 && out.pair34_product > 0.0;
  const bool eigen_stable = out.eigen.label == StabilityClass::sink;
  out.signs_agree = closed_form_stable == eigen_stable;
  return out;
}

SinglePatchRegime single_patch_regime(double r, double K, double a, double d) {
  (void)r;
  if (a <= d) return SinglePatchRegime::predator_extinct_gas;
  const double mu = d / (a - d);
  if (mu >= K) return SinglePatchRegime::predator_extinct_gas;
  if (mu > (K - 1.0) / 2.0) return SinglePatchRegime::interior_gas;
  return SinglePatchRegime::limit_cycle;
}

namespace {

// max over [0, K] of the concave quadratic x (r + d - r x / K):
// vertex when it lies inside the interval, endpoint value K d otherwise.
double quadratic_peak(double r, double K, double d) {
  if (d <= r) return K * (r + d) * (r + d) / (4.0 * r);
  return K * d;
}

}  // namespace

PersistenceReport persistence_report(const ModelParams& p) {
  PersistenceReport out;
  out.threshold1 = holling(p.a1, p.K1) - p.d1;
  out.threshold2 = holling(p.a2, p.K2) - p.d2;
  out.persist1_guaranteed = p.rho1 * p.s < out.threshold1;
  out.persist2_guaranteed = p.rho2 * p.s < out.threshold2;
  // mu_i > K_i is equivalent to a_i K_i/(1+K_i) < d_i and covers a_i <= d_i.
  out.global_ek_stable = out.threshold1 < 0.0 && out.threshold2 < 0.0;
  out.bound_T = p.rho2 * quadratic_peak(p.r1, p.K1, p.d1) +
                p.rho1 * quadratic_peak(p.r2, p.K2, p.d2);
  out.bound_dmin = std::min(p.d1, p.d2);
  out.envelope = out.bound_T / out.bound_dmin;
  return out;
}

}  // namespace patchdyn
