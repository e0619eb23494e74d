#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "patchdyn/types.hpp"

namespace patchdyn {

enum class StabilityClass { sink, saddle, source, marginal };
const char* to_string(StabilityClass c);

// Eigenvalue classification of an equilibrium. Real parts within
// 1e-9 * (1 + spectral radius) of zero are treated as marginal, since
// deterministic labeling at Hopf/fold crossings is meaningless.
struct StabilityLabel {
  StabilityClass label = StabilityClass::marginal;
  std::vector<std::complex<double>> eigenvalues;  // sorted by real part
  double margin = 0.0;                            // min |Re lambda|
};

// Dense nonsymmetric eigensolve + sign bookkeeping, for n in {2,3,4}.
// Throws std::invalid_argument on non-finite entries or unsupported size.
StabilityLabel classify(const Eigen::MatrixXd& m);

// Closed-form local stability test for the predator-free equilibrium
// (K1, 0, K2, 0): stable when both inequality left-hand sides are positive.
struct BothPreyStability {
  bool stable = false;
  double inequality1 = 0.0;
  double inequality2 = 0.0;
};
BothPreyStability ek1k2_closed_form(const ModelParams& p);

// Stability of the symmetric interior equilibrium E = (mu, nu, mu, nu).
// The spectrum splits into two quadratic pairs with closed-form sums and
// products; they are evaluated alongside the eigensolver and the sign
// verdicts compared. Requires a1=a2, d1=d2, K1=K2, r1=r2=1 and a > d.
struct SymmetricStability {
  bool symmetric = false;  // false: remaining fields are unset
  bool stable = false;     // threshold test (K-1)/2 < mu < K
  double pair12_sum = 0.0, pair12_product = 0.0;
  double pair34_sum = 0.0, pair34_product = 0.0;
  StabilityLabel eigen;
  bool signs_agree = false;
};
SymmetricStability symmetric_interior_stability(const ModelParams& p);

// Global regime of the single-patch model by threshold position of mu.
enum class SinglePatchRegime { predator_extinct_gas, interior_gas, limit_cycle };
const char* to_string(SinglePatchRegime r);
SinglePatchRegime single_patch_regime(double r, double K, double a, double d);

// Persistence and boundedness predicates. The persistence conditions are
// sufficient only; a false flag means inconclusive, not extinction.
struct PersistenceReport {
  double threshold1 = 0.0;  // (a_i - d_i)(K_i - mu_i)/(1 + K_i)
  double threshold2 = 0.0;
  bool persist1_guaranteed = false;  // rho_i * s < threshold_i
  bool persist2_guaranteed = false;
  bool global_ek_stable = false;  // mu_i > K_i for both patches
  double bound_T = 0.0;
  double bound_dmin = 0.0;
  double envelope = 0.0;  // T / d_min, asymptotic bound on L
};
PersistenceReport persistence_report(const ModelParams& p);

// Weighted population total L = rho2 (x1 + y1) + rho1 (x2 + y2) whose
// asymptotic bound is persistence_report().envelope.
inline double weighted_total(const ModelParams& p, const State4& u) {
  return p.rho2 * (u.x1 + u.y1) + p.rho1 * (u.x2 + u.y2);
}

}  // namespace patchdyn
