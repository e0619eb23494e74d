#include "patchdyn/equilibria.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "patchdyn/model.hpp"

namespace patchdyn {

const char* to_string(EqClass c) {
  switch (c) {
    case EqClass::origin: return "origin";
    case EqClass::prey1_only: return "prey1-only";
    case EqClass::prey2_only: return "prey2-only";
    case EqClass::both_prey: return "both-prey";
    case EqClass::mixed_boundary_x2: return "mixed-boundary-x2=0";
    case EqClass::mixed_boundary_x1: return "mixed-boundary-x1=0";
    case EqClass::interior: return "interior";
    case EqClass::symmetric_interior: return "symmetric-interior";
    case EqClass::predator1_extinct: return "predator1-extinct";
    case EqClass::predator2_extinct: return "predator2-extinct";
  }
  return "?";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed-form";
    case Provenance::cubic_root: return "cubic-root";
    case Provenance::numeric_solve: return "numeric-solve";
  }
  return "?";
}

const char* to_string(SubsystemStatus s) {
  switch (s) {
    case SubsystemStatus::ok: return "ok";
    case SubsystemStatus::predator_cannot_invade: return "predator-cannot-invade";
    case SubsystemStatus::window_empty: return "window-empty";
    case SubsystemStatus::no_real_pair: return "no-real-pair";
    case SubsystemStatus::passive_only: return "passive-only";
    case SubsystemStatus::sink_decoupled: return "sink-decoupled";
    case SubsystemStatus::source_decoupled: return "source-decoupled";
  }
  return "?";
}

namespace {

double residual_of(const ModelParams& p, const State4& u) {
  return rhs_full(p, u).max_norm();
}

EquilibriumRecord make_record(const ModelParams& p, const State4& u, EqClass cls,
                              Provenance prov) {
  return {u, cls, residual_of(p, u), prov};
}

struct SourceView {
  double ri, Ki, ai, di, rhoi;
  double dj, rhoj;
};

SourceView source_view(const ModelParams& p, int source_patch) {
  if (source_patch == 1) return {p.r1, p.K1, p.a1, p.d1, p.rho1, p.d2, p.rho2};
  if (source_patch == 2) return {p.r2, p.K2, p.a2, p.d2, p.rho2, p.d1, p.rho1};
  throw std::invalid_argument("source_patch must be 1 or 2");
}

}  // namespace

std::vector<EquilibriumRecord> trivial_boundaries(const ModelParams& p) {
  std::vector<EquilibriumRecord> out;
  out.push_back(make_record(p, {0, 0, 0, 0}, EqClass::origin, Provenance::closed_form));
  out.push_back(make_record(p, {p.K1, 0, 0, 0}, EqClass::prey1_only, Provenance::closed_form));
  out.push_back(make_record(p, {0, 0, p.K2, 0}, EqClass::prey2_only, Provenance::closed_form));
  out.push_back(make_record(p, {p.K1, 0, p.K2, 0}, EqClass::both_prey, Provenance::closed_form));
  return out;
}

namespace {

double eval_cubic(double q, double alpha, double beta, double x) {
  return ((x - q) * x - alpha) * x + beta;
}

double eval_cubic_deriv(double q, double alpha, double x) {
  return (3.0 * x - 2.0 * q) * x - alpha;
}

// Companion-matrix eigenvalues of the monic cubic, Newton-polished.
// The closed-form cubic formula cancels catastrophically near double roots,
// which is exactly where the fold sweeps need accuracy.
std::vector<double> cubic_real_roots(double q, double alpha, double beta) {
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(0, 2) = -beta;
  companion(1, 2) = alpha;
  companion(2, 2) = q;
  Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);

  std::vector<double> roots;
  for (int k = 0; k < 3; ++k) {
    const std::complex<double> ev = solver.eigenvalues()(k);
    if (std::fabs(ev.imag()) > 1e-8 * (1.0 + std::abs(ev))) continue;
    double x = ev.real();
    for (int it = 0; it < 8; ++it) {
      const double f = eval_cubic(q, alpha, beta, x);
      const double fp = eval_cubic_deriv(q, alpha, x);
      if (std::fabs(fp) < 1e-14 * (1.0 + std::fabs(x))) break;
      const double step = f / fp;
      x -= step;
      if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(x))) break;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  // collapse numerically identical roots (double roots list once)
  std::vector<double> dedup;
  for (double r : roots) {
    if (dedup.empty() || std::fabs(r - dedup.back()) > 1e-9 * (1.0 + std::fabs(r)))
      dedup.push_back(r);
  }
  return dedup;
}

}  // namespace

SubsystemCubicResult subsystem_cubic(const ModelParams& p, int source_patch) {
  const SourceView v = source_view(p, source_patch);
  SubsystemCubicResult out;
  if (p.s >= 1.0) {
    out.status = SubsystemStatus::passive_only;
    return out;
  }
  if (v.rhoj <= 0.0) {
    out.status = SubsystemStatus::sink_decoupled;
    return out;
  }
  if (v.ai <= v.di) {
    out.status = SubsystemStatus::predator_cannot_invade;
    return out;
  }

  const DerivedParams d = derive(p);
  CubicReport rep;
  rep.mu = v.di / (v.ai - v.di);
  rep.K = v.Ki;
  rep.quad_coeff = rep.mu + rep.K;
  rep.alpha = source_patch == 1 ? *d.alpha1 : *d.alpha2;
  rep.beta = source_patch == 1 ? *d.beta1 : *d.beta2;
  rep.delta = rep.quad_coeff * rep.quad_coeff + 3.0 * rep.alpha;
  if (rep.delta >= 0.0) {
    const double root = std::sqrt(rep.delta);
    rep.crit_minus = (rep.quad_coeff - root) / 3.0;
    rep.crit_plus = (rep.quad_coeff + root) / 3.0;
  }
  rep.real_roots = cubic_real_roots(rep.quad_coeff, rep.alpha, rep.beta);

  const double tol = 1e-12 * std::max(1.0, rep.K);
  for (double z : rep.real_roots) {
    if (std::fabs(z - rep.mu) <= tol || std::fabs(z - rep.K) <= tol)
      rep.marginal_roots.push_back(z);
    else if (z > rep.mu + tol && z < rep.K - tol)
      rep.window_roots.push_back(z);
  }

  out.report = std::move(rep);
  if (v.Ki <= out.report->mu) out.status = SubsystemStatus::window_empty;
  else if (out.report->delta < 0.0) out.status = SubsystemStatus::no_real_pair;
  return out;
}

SubsystemInteriors subsystem_interiors(const ModelParams& p, int source_patch) {
  const SourceView v = source_view(p, source_patch);
  SubsystemInteriors out;
  if (v.rhoi <= 0.0 && p.s < 1.0 && v.rhoj > 0.0) {
    out.status = SubsystemStatus::source_decoupled;
    return out;
  }
  SubsystemCubicResult cubic = subsystem_cubic(p, source_patch);
  out.status = cubic.status;
  if (cubic.status != SubsystemStatus::ok || !cubic.report) return out;

  const CubicReport& rep = *cubic.report;
  for (double x : rep.window_roots) {
    // Prey equation fixes y_i on the nullcline; the weighted predator
    // balance fixes the sink-patch level.
    const double yi = prey_nullcline(v.ri, v.Ki, v.ai, x);
    const double yj = v.ri * (v.Ki - x) * (x * (v.ai - v.di) - v.di) * v.rhoj /
                      (v.ai * v.Ki * v.dj * v.rhoi);
    if (yi > 0.0 && yj > 0.0)
      out.equilibria.push_back({x, yi, yj});
    else
      out.positivity_excluded.push_back({x, yi, yj});
  }
  return out;
}

std::vector<EquilibriumRecord> mixed_boundary_equilibria(const ModelParams& p) {
  std::vector<EquilibriumRecord> out;
  for (int source = 1; source <= 2; ++source) {
    const SubsystemInteriors sub = subsystem_interiors(p, source);
    const EqClass cls =
        source == 1 ? EqClass::mixed_boundary_x2 : EqClass::mixed_boundary_x1;
    for (const State3& u : sub.equilibria)
      out.push_back(make_record(p, embed_sub3(source, u), cls, Provenance::cubic_root));
  }
  return out;
}

SymmetricInteriorResult symmetric_interior(const ModelParams& p) {
  SymmetricInteriorResult out;
  const double tol = 1e-12;
  const bool sym = std::fabs(p.a1 - p.a2) <= tol && std::fabs(p.d1 - p.d2) <= tol &&
                   std::fabs(p.K1 - p.K2) <= tol && std::fabs(p.r1 - 1.0) <= tol &&
                   std::fabs(p.r2 - 1.0) <= tol;
  if (!sym) return out;
  if (p.a1 <= p.d1) {
    out.status = SymmetricStatus::no_interior;
    return out;
  }
  const double mu = p.d1 / (p.a1 - p.d1);
  if (mu >= p.K1) {
    out.status = SymmetricStatus::no_interior;
    return out;
  }
  const double nu = (p.K1 - mu) * (1.0 + mu) / (p.a1 * p.K1);
  out.status = SymmetricStatus::ok;
  out.record = make_record(p, {mu, nu, mu, nu}, EqClass::symmetric_interior,
                           Provenance::closed_form);
  return out;
}

namespace {

// Reduced interior system: the two predator rates with prey levels lifted
// onto their nullclines.
struct ReducedSystem {
  const ModelParams& p;

  State4 lift(double x1, double x2) const {
    return {x1, prey_nullcline(p.r1, p.K1, p.a1, x1), x2,
            prey_nullcline(p.r2, p.K2, p.a2, x2)};
  }

  void eval(double x1, double x2, double& g1, double& g2) const {
    const State4 r = rhs_full(p, lift(x1, x2));
    g1 = r.y1;
    g2 = r.y2;
  }

  // chain rule through y_i = q_i(x_i)
  void jac(double x1, double x2, double& m11, double& m12, double& m21,
           double& m22) const {
    const Eigen::Matrix4d J = jacobian_full(p, lift(x1, x2));
    const double q1p = p.r1 * (p.K1 - 1.0 - 2.0 * x1) / (p.a1 * p.K1);
    const double q2p = p.r2 * (p.K2 - 1.0 - 2.0 * x2) / (p.a2 * p.K2);
    m11 = J(1, 0) + J(1, 1) * q1p;
    m12 = J(1, 2) + J(1, 3) * q2p;
    m21 = J(3, 0) + J(3, 1) * q1p;
    m22 = J(3, 2) + J(3, 3) * q2p;
  }
};

double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

bool newton2(const ReducedSystem& sys, double& x1, double& x2, double hi1,
             double hi2) {
  const double lo = 1e-10;
  double g1, g2;
  sys.eval(x1, x2, g1, g2);
  double gn = std::max(std::fabs(g1), std::fabs(g2));
  for (int it = 0; it < 80; ++it) {
    if (gn <= 1e-14 * (1.0 + std::fabs(x1) + std::fabs(x2))) return true;
    double m11, m12, m21, m22;
    sys.jac(x1, x2, m11, m12, m21, m22);
    const double det = m11 * m22 - m12 * m21;
    if (!(std::fabs(det) > 1e-300) || !std::isfinite(det)) return false;
    const double s1 = (m22 * g1 - m12 * g2) / det;
    const double s2 = (m11 * g2 - m21 * g1) / det;

    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, lambda *= 0.5) {
      const double n1 = clamp(x1 - lambda * s1, lo, hi1);
      const double n2 = clamp(x2 - lambda * s2, lo, hi2);
      double h1, h2;
      sys.eval(n1, n2, h1, h2);
      const double hn = std::max(std::fabs(h1), std::fabs(h2));
      if (hn < gn * (1.0 - 1e-4 * lambda) || hn < 1e-15) {
        x1 = n1;
        x2 = n2;
        g1 = h1;
        g2 = h2;
        gn = hn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return gn <= 1e-11 * (1.0 + std::fabs(x1) + std::fabs(x2));
}

// Points where the two branches x_i = F_i^+/-(x_j) of the interior nullcline
// curve merge (its discriminant zeros). Newton started from a coarse grid can
// miss closely spaced equilibria near these folds, so they are always seeded.
void add_fold_seeds(const ModelParams& p,
                    std::vector<std::pair<double, double>>& seeds) {
  if (p.a1 <= p.d1 || p.a2 <= p.d2 || p.rho1 <= 0.0 || p.rho2 <= 0.0) return;
  const double mu1 = p.d1 / (p.a1 - p.d1);
  const double mu2 = p.d2 / (p.a2 - p.d2);
  for (int i = 1; i <= 2; ++i) {
    const double mui = i == 1 ? mu1 : mu2;
    const double muj = i == 1 ? mu2 : mu1;
    const double Ki = i == 1 ? p.K1 : p.K2;
    const double Kj = i == 1 ? p.K2 : p.K1;
    const double C = i == 1 ? (p.a1 * p.K1 * p.rho1 * p.r2 * (p.a2 - p.d2)) /
                                  (p.a2 * p.K2 * p.rho2 * p.r1 * (p.a1 - p.d1))
                            : (p.a2 * p.K2 * p.rho2 * p.r1 * (p.a1 - p.d1)) /
                                  (p.a1 * p.K1 * p.rho1 * p.r2 * (p.a2 - p.d2));
    const double R = (Ki - mui) * (Ki - mui) / (4.0 * C);
    // (x_j - mu_j)(x_j - K_j) = R
    const double b = muj + Kj;
    const double disc = b * b - 4.0 * (muj * Kj - R);
    if (disc < 0.0) continue;
    const double root = std::sqrt(disc);
    for (double xj : {(b - root) / 2.0, (b + root) / 2.0}) {
      if (!(xj > 0.0)) continue;
      const double xi = (mui + Ki) / 2.0;
      const double x1 = i == 1 ? xi : xj;
      const double x2 = i == 1 ? xj : xi;
      seeds.emplace_back(clamp(x1, 1e-6, p.K1 * (1.0 - 1e-9)),
                         clamp(x2, 1e-6, p.K2 * (1.0 - 1e-9)));
    }
  }
}

}  // namespace

std::vector<EquilibriumRecord> interior_equilibria(
    const ModelParams& p, int grid_density,
    std::span<const std::pair<double, double>> warm_starts) {
  const ReducedSystem sys{p};
  const int n = std::max(grid_density, 2);

  std::vector<std::pair<double, double>> seeds;
  seeds.reserve(static_cast<size_t>(n) * n + warm_starts.size() + 6);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      seeds.emplace_back(p.K1 * (i + 0.5) / n, p.K2 * (j + 0.5) / n);
  add_fold_seeds(p, seeds);
  if (p.a1 > p.d1 && p.a2 > p.d2) {
    // decoupled interior, exact when rho1 = rho2 = 0
    seeds.emplace_back(p.d1 / (p.a1 - p.d1), p.d2 / (p.a2 - p.d2));
  }
  for (const auto& w : warm_starts) seeds.push_back(w);

  const double hi1 = p.K1 * (1.0 - 1e-12);
  const double hi2 = p.K2 * (1.0 - 1e-12);
  const double margin1 = 1e-7 * std::max(1.0, p.K1);
  const double margin2 = 1e-7 * std::max(1.0, p.K2);

  std::vector<std::pair<double, double>> found;
  for (const auto& seed : seeds) {
    double x1 = seed.first, x2 = seed.second;
    if (!newton2(sys, x1, x2, hi1, hi2)) continue;
    if (x1 <= margin1 || x1 >= p.K1 - margin1) continue;
    if (x2 <= margin2 || x2 >= p.K2 - margin2) continue;
    found.emplace_back(x1, x2);
  }
  std::sort(found.begin(), found.end());

  std::vector<EquilibriumRecord> out;
  for (const auto& [x1, x2] : found) {
    bool duplicate = false;
    for (const auto& kept : out) {
      const double dx1 = x1 - kept.state.x1;
      const double dx2 = x2 - kept.state.x2;
      const double dist = std::hypot(dx1, dx2);
      const double scale = std::max(1.0, std::hypot(kept.state.x1, kept.state.x2));
      if (dist / scale < 1e-6) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    const State4 u = sys.lift(x1, x2);
    if (u.y1 <= 0.0 || u.y2 <= 0.0) continue;
    const double res = residual_of(p, u);
    if (res > 1e-9 * (1.0 + u.max_norm())) continue;
    out.push_back({u, EqClass::interior, res, Provenance::numeric_solve});
  }
  return out;
}

namespace {

std::optional<bool> table_condition2(const ModelParams& p, int i) {
  // 0 < d_i/(a_j - d_i) < K_j < mu_j  and  rho_j < (d_j - K_j (a_j - d_j)) /
  // (nu_i [K_j (a_j - d_i) - d_i]), quoted verbatim from the summary table.
  const double ai = i == 1 ? p.a1 : p.a2, di = i == 1 ? p.d1 : p.d2;
  const double aj = i == 1 ? p.a2 : p.a1, dj = i == 1 ? p.d2 : p.d1;
  const double Kj = i == 1 ? p.K2 : p.K1, Ki = i == 1 ? p.K1 : p.K2;
  const double ri = i == 1 ? p.r1 : p.r2;
  const double rhoj = i == 1 ? p.rho2 : p.rho1;
  if (aj <= di || aj <= dj || ai <= di) return std::nullopt;
  const double muj = dj / (aj - dj);
  const double mui = di / (ai - di);
  const double nui = ri * (Ki - mui) * (1.0 + mui) / (ai * Ki);
  const double lhs = di / (aj - di);
  const bool chain = lhs > 0.0 && lhs < Kj && Kj < muj;
  const double denom = nui * (Kj * (aj - di) - di);
  if (denom == 0.0) return std::nullopt;
  const bool bound = rhoj < (dj - Kj * (aj - dj)) / denom;
  return chain && bound;
}

bool table_condition1(const ModelParams& p) {
  // the (K1,0,K2,0) test with rho_i in place of s rho_i, as printed
  const double g1 = p.d1 - holling(p.a1, p.K1);
  const double g2 = p.d2 - holling(p.a2, p.K2);
  return (g1 + p.rho1 + g2 + p.rho2) > 0.0 &&
         (g1 * (p.rho2 + g2) + p.rho1 * g2) > 0.0;
}

}  // namespace

SpecialCaseResult special_case_equilibria(const ModelParams& p) {
  SpecialCaseResult out;
  if (p.s > 0.0 && p.s < 1.0) {
    out.wrong_s = true;
    return out;
  }
  const bool cond1 = table_condition1(p);

  if (p.s == 0.0) {
    for (int i = 1; i <= 2; ++i) {
      const double ai = i == 1 ? p.a1 : p.a2, di = i == 1 ? p.d1 : p.d2;
      const double Ki = i == 1 ? p.K1 : p.K2, ri = i == 1 ? p.r1 : p.r2;
      if (ai <= di) continue;
      const double mu = di / (ai - di);
      if (!(mu > 0.0 && mu < Ki)) continue;
      const double nu = ri * (Ki - mu) * (1.0 + mu) / (ai * Ki);
      const State4 u = i == 1 ? State4{mu, nu, p.K2, 0.0} : State4{p.K1, 0.0, mu, nu};
      SpecialCaseEquilibrium item;
      item.record = make_record(
          p, u, i == 1 ? EqClass::predator2_extinct : EqClass::predator1_extinct,
          Provenance::closed_form);
      item.condition1 = cond1;
      item.condition2 = table_condition2(p, i);
      if (item.condition2)
        item.las = (Ki - 1.0) / 2.0 < mu && mu < Ki && *item.condition2;
      out.items.push_back(std::move(item));
    }
    return out;
  }

  // s = 1: purely passive dispersal; the preyless-patch levels follow the
  // effective death rate d_i + rho_i d_j/(d_j + rho_j).
  for (int i = 1; i <= 2; ++i) {
    const SourceView v = source_view(p, i);
    const double dhat = v.di + v.rhoi * v.dj / (v.dj + v.rhoj);
    if (v.ai <= dhat) continue;
    const double muhat = dhat / (v.ai - dhat);
    if (!(muhat > 0.0 && muhat < v.Ki)) continue;
    const double nuhat = prey_nullcline(v.ri, v.Ki, v.ai, muhat);
    const double nu_sink = v.rhoj * nuhat / (v.dj + v.rhoj);
    const State3 sub{muhat, nuhat, nu_sink};
    SpecialCaseEquilibrium item;
    item.record = make_record(
        p, embed_sub3(i, sub),
        i == 1 ? EqClass::mixed_boundary_x2 : EqClass::mixed_boundary_x1,
        Provenance::closed_form);
    item.condition1 = cond1;
    item.condition2 = table_condition2(p, i);

    const double rj = i == 1 ? p.r2 : p.r1;
    const double aj = i == 1 ? p.a2 : p.a1;
    const double Kj = i == 1 ? p.K2 : p.K1;
    const bool hopf_window = (v.Ki - 1.0) / 2.0 < muhat && muhat < v.Ki;
    item.las = hopf_window && rj < aj * nu_sink;
    // GAS bound compares against nu-hat_i^j, printed with swapped indices;
    // evaluable only when the mirrored mu-hat exists.
    const SourceView w = source_view(p, i == 1 ? 2 : 1);
    const double dhat_j = w.di + w.rhoi * w.dj / (w.dj + w.rhoj);
    if (w.ai > dhat_j) {
      const double muhat_j = dhat_j / (w.ai - dhat_j);
      const double nuhat_j = prey_nullcline(w.ri, w.Ki, w.ai, muhat_j);
      const double nu_ij = v.rhoi * nuhat_j / (v.di + v.rhoi);
      item.gas = hopf_window && rj * (Kj + 1.0) * (Kj + 1.0) / (4.0 * aj * Kj) < nu_ij;
    }
    out.items.push_back(std::move(item));
  }
  return out;
}

}  // namespace patchdyn
