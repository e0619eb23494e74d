#pragma once

#include <array>
#include <optional>
#include <string>

namespace patchdyn {

// Parameters of the rescaled two-patch prey-predator model. All quantities
// are dimensionless. r1 is stored as a free parameter (the rescaling fixes
// it to 1, and the operations that rely on that validate it explicitly).
struct ModelParams {
  double r1 = 1.0;    // intrinsic prey growth rate, patch 1
  double r2 = 1.0;    // intrinsic prey growth rate, patch 2
  double K1 = 0.0;    // prey carrying capacity, patch 1
  double K2 = 0.0;
  double a1 = 0.0;    // predation rate, patch 1
  double a2 = 0.0;
  double d1 = 0.0;    // predator death rate, patch 1
  double d2 = 0.0;
  double rho1 = 0.0;  // relative dispersal rate of predators at patch 1
  double rho2 = 0.0;
  double s = 0.0;     // proportion of predators using passive dispersal, in [0,1]
};

// Empty string when the parameters satisfy the model invariants
// (growth, capacity, predation and death rates strictly positive,
// dispersal rates nonnegative, s in [0,1], everything finite),
// otherwise a message naming the offending field.
std::string validate(const ModelParams& p);

// Quantities derived from ModelParams. Undefined values are represented as
// absent optionals, never as NaN or infinities:
//   mu_i    prey level nullifying predator growth, d_i/(a_i-d_i); needs a_i > d_i
//   nu_i    predator level of the single-patch interior equilibrium
//   alpha_i, beta_i   coefficients of the source-patch cubic f_i; need
//                     s < 1, rho_j > 0 and a_i != d_i
//   hopf_i  single-patch Hopf threshold (K_i-1)/2, always defined
struct DerivedParams {
  std::optional<double> mu1, mu2;
  std::optional<double> nu1, nu2;
  std::optional<double> alpha1, beta1;
  std::optional<double> alpha2, beta2;
  double hopf1 = 0.0, hopf2 = 0.0;
};

DerivedParams derive(const ModelParams& p);

// Population state of the full model, (x1, y1, x2, y2), all components >= 0.
struct State4 {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;

  std::array<double, 4> to_array() const { return {x1, y1, x2, y2}; }
  static State4 from_array(const std::array<double, 4>& a) {
    return {a[0], a[1], a[2], a[3]};
  }
  double max_norm() const;
  bool nonnegative() const { return x1 >= 0 && y1 >= 0 && x2 >= 0 && y2 >= 0; }
};

// State of the x_j = 0 subsystem: source-patch prey and predator plus the
// predator stranded in the preyless sink patch.
struct State3 {
  double xi = 0.0, yi = 0.0, yj = 0.0;

  std::array<double, 3> to_array() const { return {xi, yi, yj}; }
  static State3 from_array(const std::array<double, 3>& a) {
    return {a[0], a[1], a[2]};
  }
  double max_norm() const;
  bool nonnegative() const { return xi >= 0 && yi >= 0 && yj >= 0; }
};

// Embeds a subsystem state onto the matching coordinate face of the full
// model (x2 = 0 when the source patch is 1, x1 = 0 when it is 2).
State4 embed_sub3(int source_patch, const State3& u);

}  // namespace patchdyn
