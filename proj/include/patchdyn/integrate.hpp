#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "patchdyn/types.hpp"

namespace patchdyn {

struct IntegrationConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double t_end = 5000.0;
  double max_step = std::numeric_limits<double>::infinity();
  double tail_fraction = 0.2;     // fraction of [0, t_end] used for statistics
  double extinction_eps = 1e-6;   // persistence gauge on tail infima
  double cycle_amplitude_eps = 1e-4;
  int keep_samples = 0;           // decimated series length to retain, 0 = none
};

enum class AttractorType { equilibrium, limit_cycle, undetermined };
const char* to_string(AttractorType a);

struct IntegrationFailure {
  enum class Kind { step_underflow, nonfinite } kind;
  double t = 0.0;  // time of failure
};

struct TrajectorySummary {
  AttractorType attractor = AttractorType::undetermined;
  State4 attractor_state;  // tail mean; the equilibrium location when settled
  State4 final_state;
  State4 tail_min, tail_max;
  double cycle_period = 0.0;       // limit-cycle only, from tail maxima spacing
  double rhs_norm_at_state = 0.0;  // max-norm of the rates at attractor_state
  std::array<bool, 4> persistent{};
  double l_tail_max = 0.0;  // max over the tail of rho2(x1+y1)+rho1(x2+y2)
  double t_reached = 0.0;   // doubled once past t_end if undetermined
  std::optional<IntegrationFailure> failure;
  std::vector<std::array<double, 5>> samples;  // (t, x1, y1, x2, y2)
};

struct TrajectorySummary3 {
  AttractorType attractor = AttractorType::undetermined;
  State3 attractor_state;
  State3 final_state;
  State3 tail_min, tail_max;
  double cycle_period = 0.0;
  double rhs_norm_at_state = 0.0;
  std::array<bool, 3> persistent{};
  double l_tail_max = 0.0;
  double t_reached = 0.0;
  std::optional<IntegrationFailure> failure;
  std::vector<std::array<double, 4>> samples;  // (t, xi, yi, yj)
};

// Adaptive embedded Runge-Kutta 4(5) integration of the full model.
// Steps that would produce a negative component are rejected and retried at
// half the step size, so coordinate faces that start at exactly zero stay
// exactly zero. If the tail is neither settled nor cycling, the horizon is
// doubled once before reporting undetermined.
TrajectorySummary integrate(const ModelParams& p, const State4& initial,
                            const IntegrationConfig& config = {});

TrajectorySummary3 integrate_sub3(const ModelParams& p, int source_patch,
                                  const State3& initial,
                                  const IntegrationConfig& config = {});

// Independent integrations from several initial conditions; attractors are
// clustered by max-norm distance 1e-2 on their tail boxes to count how many
// distinct attractors were reached.
struct BasinProbeResult {
  std::vector<std::pair<State4, TrajectorySummary>> runs;
  std::vector<int> cluster;  // attractor cluster id per run, -1 on failure
  int distinct_attractors = 0;
};
BasinProbeResult basin_probe(const ModelParams& p,
                             std::span<const State4> initials,
                             const IntegrationConfig& config = {});

}  // namespace patchdyn
