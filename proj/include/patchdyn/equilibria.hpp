#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "patchdyn/types.hpp"

namespace patchdyn {

// Structural class of an equilibrium: which components are pinned to zero.
enum class EqClass {
  origin,              // (0,0,0,0)
  prey1_only,          // (K1,0,0,0)
  prey2_only,          // (0,0,K2,0)
  both_prey,           // (K1,0,K2,0)
  mixed_boundary_x2,   // (x1*,y1*,0,y2*), interior of the x2=0 subsystem
  mixed_boundary_x1,   // (0,y1*,x2*,y2*), interior of the x1=0 subsystem
  interior,            // all four components positive
  symmetric_interior,  // (mu,nu,mu,nu) of the symmetric model
  predator1_extinct,   // (K1,0,mu2,nu2), s=0 closed form
  predator2_extinct,   // (mu1,nu1,K2,0), s=0 closed form
};
const char* to_string(EqClass c);

enum class Provenance { closed_form, cubic_root, numeric_solve };
const char* to_string(Provenance p);

struct EquilibriumRecord {
  State4 state;
  EqClass cls = EqClass::origin;
  double residual = 0.0;  // max-norm of rhs_full at state
  Provenance provenance = Provenance::closed_form;
};

// The four equilibria that exist for every parameter set.
std::vector<EquilibriumRecord> trivial_boundaries(const ModelParams& p);

// Report on the source-patch cubic f_i(x) = x^3 - (mu+K) x^2 - alpha x + beta
// whose window roots are the prey components of the subsystem interiors.
struct CubicReport {
  double mu = 0.0, K = 0.0;
  double quad_coeff = 0.0;  // mu + K
  double alpha = 0.0, beta = 0.0;
  double delta = 0.0;  // (mu+K)^2 + 3 alpha, discriminant of f'
  std::optional<double> crit_minus, crit_plus;  // critical points of f when real
  std::vector<double> real_roots;               // ascending
  std::vector<double> window_roots;             // strictly inside (mu, K)
  std::vector<double> marginal_roots;  // within tolerance of mu or K (fold candidates)
};

// Why a subsystem has no interior pair, when it structurally cannot.
enum class SubsystemStatus {
  ok,
  predator_cannot_invade,  // a_i <= d_i
  window_empty,            // K_i <= mu_i
  no_real_pair,            // delta < 0: cubic has no positive roots
  passive_only,            // s = 1, the cubic divides by 1-s and refuses
  sink_decoupled,          // rho_j = 0
  source_decoupled,        // rho_i = 0, sink predator formula undefined
};
const char* to_string(SubsystemStatus s);

struct SubsystemCubicResult {
  SubsystemStatus status = SubsystemStatus::ok;
  std::optional<CubicReport> report;  // present whenever the coefficients exist
};

// Roots via companion-matrix eigenvalues polished by Newton iteration.
// Window membership uses strict inequalities at tolerance 1e-12.
SubsystemCubicResult subsystem_cubic(const ModelParams& p, int source_patch);

struct SubsystemInteriors {
  SubsystemStatus status = SubsystemStatus::ok;
  std::vector<State3> equilibria;           // up to two, ascending prey level
  std::vector<State3> positivity_excluded;  // window roots with a predator <= 0
};
SubsystemInteriors subsystem_interiors(const ModelParams& p, int source_patch);

// Subsystem interiors embedded as boundary equilibria of the full model,
// (x1*,y1*,0,y2*) and (0,y1*,x2*,y2*); up to four records.
std::vector<EquilibriumRecord> mixed_boundary_equilibria(const ModelParams& p);

enum class SymmetricStatus { ok, not_symmetric, no_interior };
struct SymmetricInteriorResult {
  SymmetricStatus status = SymmetricStatus::not_symmetric;
  std::optional<EquilibriumRecord> record;
};
// E = (mu, nu, mu, nu) for the symmetric model (a1=a2, d1=d2, K1=K2, r1=r2=1
// within 1e-12); the dispersal terms cancel identically there.
SymmetricInteriorResult symmetric_interior(const ModelParams& p);

// Interior equilibria of the full model by multistart damped Newton on the
// reduced system g(x1,x2) = 0, where the predator levels ride the prey
// nullclines y_i = q_i(x_i). Seeds: a grid_density^2 grid over
// (0,K1)x(0,K2), the branch-merge (fold) points of the interior nullcline
// curve, the decoupled interior (mu1,mu2) when defined, and any
// caller-provided warm starts. Output sorted by (x1,x2), deduplicated at
// relative distance 1e-6, every record verified to residual <= 1e-9.
std::vector<EquilibriumRecord> interior_equilibria(
    const ModelParams& p, int grid_density = 30,
    std::span<const std::pair<double, double>> warm_starts = {});

// Closed-form boundary equilibria for the pure-strategy cases s=0 and s=1,
// tagged with the summary-table stability conditions evaluated verbatim
// (condition 1 restates the (K1,0,K2,0) test with rho_i in place of s rho_i;
// both conditions are quoted from prior work and not re-derived here).
struct SpecialCaseEquilibrium {
  EquilibriumRecord record;
  bool condition1 = false;
  std::optional<bool> condition2;  // absent when not evaluable
  std::optional<bool> las;         // row-specific closed-form LAS test
  std::optional<bool> gas;         // row-specific closed-form GAS test (s=1)
};
struct SpecialCaseResult {
  bool wrong_s = false;  // set when s is strictly inside (0,1)
  std::vector<SpecialCaseEquilibrium> items;
};
SpecialCaseResult special_case_equilibria(const ModelParams& p);

}  // namespace patchdyn
