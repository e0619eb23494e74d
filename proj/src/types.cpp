#include "patchdyn/types.hpp"

#include <cmath>

namespace patchdyn {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string validate(const ModelParams& p) {
  struct Field {
    const char* name;
    double value;
    bool strictly_positive;
  };
  const Field fields[] = {
      {"r1", p.r1, true},     {"r2", p.r2, true},     {"K1", p.K1, true},
      {"K2", p.K2, true},     {"a1", p.a1, true},     {"a2", p.a2, true},
      {"d1", p.d1, true},     {"d2", p.d2, true},     {"rho1", p.rho1, false},
      {"rho2", p.rho2, false}};
  for (const auto& f : fields) {
    if (!finite(f.value)) return std::string(f.name) + " must be finite";
    if (f.strictly_positive && f.value <= 0.0)
      return std::string(f.name) + " must be strictly positive";
    if (!f.strictly_positive && f.value < 0.0)
      return std::string(f.name) + " must be nonnegative";
  }
  if (!finite(p.s)) return "s must be finite";
  if (p.s < 0.0 || p.s > 1.0) return "s must lie in [0,1]";
  return {};
}

namespace {

// Source-patch cubic coefficients, derived from the x_j = 0 subsystem by
// eliminating the predator components. The monic cubic is
//   f_i(x) = x^3 - (mu_i + K_i) x^2 - alpha_i x + beta_i.
void cubic_coefficients(double ri, double Ki, double ai, double di, double rhoi,
                        double dj, double rhoj, double s, double& alpha,
                        double& beta) {
  const double A = ai - di;
  const double denom = ri * A * (1.0 - s) * rhoj;
  beta = (di * (dj + rhoj * s) + s * rhoi * dj) * Ki / denom;
  alpha = (A * (dj + s * rhoj) - ri * di * (1.0 - s) * rhoj - s * rhoi * dj) *
          Ki / denom;
}

}  // namespace

DerivedParams derive(const ModelParams& p) {
  DerivedParams d;
  d.hopf1 = (p.K1 - 1.0) / 2.0;
  d.hopf2 = (p.K2 - 1.0) / 2.0;
  if (p.a1 > p.d1) {
    const double mu = p.d1 / (p.a1 - p.d1);
    d.mu1 = mu;
    d.nu1 = p.r1 * (p.K1 - mu) * (1.0 + mu) / (p.a1 * p.K1);
  }
  if (p.a2 > p.d2) {
    const double mu = p.d2 / (p.a2 - p.d2);
    d.mu2 = mu;
    d.nu2 = p.r2 * (p.K2 - mu) * (1.0 + mu) / (p.a2 * p.K2);
  }
  if (p.s < 1.0 && p.rho2 > 0.0 && p.a1 != p.d1) {
    double alpha, beta;
    cubic_coefficients(p.r1, p.K1, p.a1, p.d1, p.rho1, p.d2, p.rho2, p.s,
                       alpha, beta);
    d.alpha1 = alpha;
    d.beta1 = beta;
  }
  if (p.s < 1.0 && p.rho1 > 0.0 && p.a2 != p.d2) {
    double alpha, beta;
    cubic_coefficients(p.r2, p.K2, p.a2, p.d2, p.rho2, p.d1, p.rho1, p.s,
                       alpha, beta);
    d.alpha2 = alpha;
    d.beta2 = beta;
  }
  return d;
}

double State4::max_norm() const {
  return std::max(std::max(std::fabs(x1), std::fabs(y1)),
                  std::max(std::fabs(x2), std::fabs(y2)));
}

double State3::max_norm() const {
  return std::max(std::fabs(xi), std::max(std::fabs(yi), std::fabs(yj)));
}

State4 embed_sub3(int source_patch, const State3& u) {
  if (source_patch == 1) return {u.xi, u.yi, 0.0, u.yj};
  return {0.0, u.yj, u.xi, u.yi};
}

}  // namespace patchdyn
