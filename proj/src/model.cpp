#include "patchdyn/model.hpp"

#include <stdexcept>

namespace patchdyn {

State4 rhs_full(const ModelParams& p, const State4& u) {
  const double P1 = holling(p.a1, u.x1);
  const double P2 = holling(p.a2, u.x2);
  State4 r;
  r.x1 = p.r1 * u.x1 * (1.0 - u.x1 / p.K1) - P1 * u.y1;
  r.y1 = P1 * u.y1 - p.d1 * u.y1 +
         p.rho1 * (1.0 - p.s) * u.y1 * u.y2 * (P1 - P2) +
         p.rho1 * p.s * (u.y2 - u.y1);
  r.x2 = p.r2 * u.x2 * (1.0 - u.x2 / p.K2) - P2 * u.y2;
  r.y2 = P2 * u.y2 - p.d2 * u.y2 +
         p.rho2 * (1.0 - p.s) * u.y1 * u.y2 * (P2 - P1) +
         p.rho2 * p.s * (u.y1 - u.y2);
  return r;
}

namespace {

struct PatchView {
  double ri, Ki, ai, di, rhoi;  // source patch
  double dj, rhoj;              // preyless sink patch
};

PatchView source_view(const ModelParams& p, int source_patch) {
  if (source_patch == 1) return {p.r1, p.K1, p.a1, p.d1, p.rho1, p.d2, p.rho2};
  if (source_patch == 2) return {p.r2, p.K2, p.a2, p.d2, p.rho2, p.d1, p.rho1};
  throw std::invalid_argument("source_patch must be 1 or 2");
}

}  // namespace

State3 rhs_sub3(const ModelParams& p, int source_patch, const State3& u) {
  const PatchView v = source_view(p, source_patch);
  const double P = holling(v.ai, u.xi);
  State3 r;
  r.xi = v.ri * u.xi * (1.0 - u.xi / v.Ki) - P * u.yi;
  r.yi = P * u.yi - v.di * u.yi + v.rhoi * (1.0 - p.s) * P * u.yi * u.yj +
         v.rhoi * p.s * (u.yj - u.yi);
  r.yj = -v.dj * u.yj - v.rhoj * (1.0 - p.s) * P * u.yi * u.yj -
         v.rhoj * p.s * (u.yj - u.yi);
  return r;
}

std::array<double, 2> rhs_single(double r, double K, double a, double d,
                                 double x, double y) {
  const double P = holling(a, x);
  return {r * x * (1.0 - x / K) - P * y, P * y - d * y};
}

Eigen::Matrix4d jacobian_full(const ModelParams& p, const State4& u) {
  const double P1 = holling(p.a1, u.x1);
  const double P2 = holling(p.a2, u.x2);
  const double P1p = p.a1 / ((1.0 + u.x1) * (1.0 + u.x1));
  const double P2p = p.a2 / ((1.0 + u.x2) * (1.0 + u.x2));
  const double c1 = p.rho1 * (1.0 - p.s);
  const double c2 = p.rho2 * (1.0 - p.s);

  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J(0, 0) = p.r1 * (1.0 - 2.0 * u.x1 / p.K1) - P1p * u.y1;
  J(0, 1) = -P1;

  J(1, 0) = P1p * u.y1 * (1.0 + c1 * u.y2);
  J(1, 1) = P1 - p.d1 - p.rho1 * p.s + c1 * u.y2 * (P1 - P2);
  J(1, 2) = -c1 * u.y1 * u.y2 * P2p;
  J(1, 3) = p.rho1 * p.s + c1 * u.y1 * (P1 - P2);

  J(2, 2) = p.r2 * (1.0 - 2.0 * u.x2 / p.K2) - P2p * u.y2;
  J(2, 3) = -P2;

  J(3, 0) = -c2 * u.y1 * u.y2 * P1p;
  J(3, 1) = p.rho2 * p.s + c2 * u.y2 * (P2 - P1);
  J(3, 2) = P2p * u.y2 * (1.0 + c2 * u.y1);
  J(3, 3) = P2 - p.d2 - p.rho2 * p.s + c2 * u.y1 * (P2 - P1);
  return J;
}

Eigen::Matrix3d jacobian_sub3(const ModelParams& p, int source_patch,
                              const State3& u) {
  const PatchView v = source_view(p, source_patch);
  const double P = holling(v.ai, u.xi);
  const double Pp = v.ai / ((1.0 + u.xi) * (1.0 + u.xi));
  const double ci = v.rhoi * (1.0 - p.s);
  const double cj = v.rhoj * (1.0 - p.s);

  Eigen::Matrix3d J;
  J(0, 0) = v.ri * (1.0 - 2.0 * u.xi / v.Ki) - Pp * u.yi;
  J(0, 1) = -P;
  J(0, 2) = 0.0;

  J(1, 0) = Pp * u.yi * (1.0 + ci * u.yj);
  J(1, 1) = P - v.di + ci * P * u.yj - v.rhoi * p.s;
  J(1, 2) = ci * P * u.yi + v.rhoi * p.s;

  J(2, 0) = -cj * Pp * u.yi * u.yj;
  J(2, 1) = -cj * P * u.yj + v.rhoj * p.s;
  J(2, 2) = -v.dj - cj * P * u.yi - v.rhoj * p.s;
  return J;
}

Eigen::Matrix2d jacobian_single(double r, double K, double a, double d,
                                double x, double y) {
  const double P = holling(a, x);
  const double Pp = a / ((1.0 + x) * (1.0 + x));
  Eigen::Matrix2d J;
  J(0, 0) = r * (1.0 - 2.0 * x / K) - Pp * y;
  J(0, 1) = -P;
  J(1, 0) = Pp * y;
  J(1, 1) = P - d;
  return J;
}

}  // namespace patchdyn
