#pragma once

#include <Eigen/Dense>
#include <array>

#include "patchdyn/types.hpp"

namespace patchdyn {

// Holling type-II functional response a x / (1 + x).
inline double holling(double a, double x) { return a * x / (1.0 + x); }

// Prey nullcline q(x) = r (K - x)(1 + x) / (a K); the predator level that
// freezes the prey equation at prey level x.
inline double prey_nullcline(double r, double K, double a, double x) {
  return r * (K - x) * (1.0 + x) / (a * K);
}

// Right-hand side of the full four-species model.
State4 rhs_full(const ModelParams& p, const State4& u);

// Right-hand side of the three-species subsystem on the x_j = 0 face.
// source_patch selects which patch keeps its prey (1 or 2).
State3 rhs_sub3(const ModelParams& p, int source_patch, const State3& u);

// Single-patch Rosenzweig-MacArthur rates (dx/dt, dy/dt).
std::array<double, 2> rhs_single(double r, double K, double a, double d,
                                 double x, double y);

// Analytic Jacobians. Each entry is derived directly from the vector field
// (the appendix print of the 4x4 matrix has typos in two entries; finite
// differences arbitrate, see the tests).
Eigen::Matrix4d jacobian_full(const ModelParams& p, const State4& u);
Eigen::Matrix3d jacobian_sub3(const ModelParams& p, int source_patch,
                              const State3& u);
Eigen::Matrix2d jacobian_single(double r, double K, double a, double d,
                                double x, double y);

}  // namespace patchdyn
