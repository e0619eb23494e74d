#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "patchdyn/equilibria.hpp"
#include "patchdyn/integrate.hpp"
#include "patchdyn/model.hpp"
#include "patchdyn/stability.hpp"

using namespace patchdyn;

namespace {

double component_gap(const State4& a, const State4& b) {
  const auto va = a.to_array(), vb = b.to_array();
  double gap = 0.0;
  for (int i = 0; i < 4; ++i) gap = std::max(gap, std::fabs(va[i] - vb[i]));
  return gap;
}

}  // namespace

TEST_CASE("origin stays put") {
  const ModelParams p = oracles::reference_family(1.0, 0.85, 0.3);
  IntegrationConfig cfg;
  cfg.t_end = 50.0;
  const TrajectorySummary s = integrate(p, {0, 0, 0, 0}, cfg);
  CHECK(s.attractor == AttractorType::equilibrium);
  CHECK(s.attractor_state.max_norm() == 0.0);
}

TEST_CASE("boundary attractor of the two-saddle window") {
  // time-series figure: s = 0.8 from (0.05, 1, 3.55, 2.7) settles on the
  // boundary sink near (0, 1, 3.6, 2.9)
  const ModelParams p = oracles::reference_family(1.0, 0.85, 0.8);
  const TrajectorySummary s = integrate(p, {0.05, 1.0, 3.55, 2.7});
  REQUIRE_FALSE(s.failure.has_value());
  CHECK(s.attractor == AttractorType::equilibrium);
  CHECK(component_gap(s.attractor_state, {0.0, 1.0, 3.6, 2.9}) < 0.05);
  CHECK(s.rhs_norm_at_state <= 1e-6);

  SUBCASE("halving rel_tol moves the reported state by less than 1e-6") {
    IntegrationConfig tighter;
    tighter.rel_tol = 0.5e-8;
    const TrajectorySummary s2 = integrate(p, {0.05, 1.0, 3.55, 2.7}, tighter);
    CHECK(component_gap(s.attractor_state, s2.attractor_state) < 1e-6);
  }
}

TEST_CASE("interior attractor pair of the three-equilibria window") {
  const ModelParams p = oracles::reference_family(1.0, 0.85, 0.8392);
  const TrajectorySummary sink_run = integrate(p, {0.25, 1.05, 4.18, 2.68});
  CHECK(sink_run.attractor == AttractorType::equilibrium);
  CHECK(component_gap(sink_run.attractor_state, {0.09, 1.08, 4.27, 2.64}) < 0.05);

  const TrajectorySummary cycle_run = integrate(p, {0.58, 1.4, 2.5, 3.1});
  CHECK(cycle_run.attractor == AttractorType::limit_cycle);
  CHECK(cycle_run.cycle_period > 0.0);
  // fluctuating coexistence: every tail maximum strictly positive
  for (double v : cycle_run.tail_max.to_array()) CHECK(v > 0.1);
}

TEST_CASE("decoupled patch 2 falls onto its single-patch limit cycle") {
  ModelParams p = oracles::reference_family(1.0, 0.85, 0.3);
  p.rho1 = 0.0;
  p.rho2 = 0.0;
  const TrajectorySummary s = integrate(p, {0.0, 0.0, 1.0, 1.0});
  CHECK(s.attractor == AttractorType::limit_cycle);
  // the cycle lives in (x2, y2); patch 1 stays extinct
  CHECK(s.tail_max.x1 == 0.0);
  CHECK(s.tail_max.y1 == 0.0);
  CHECK(s.tail_max.x2 - s.tail_min.x2 > 1.0);
}

TEST_CASE("faces that start at zero stay exactly zero") {
  const ModelParams p = oracles::reference_family(1.0, 0.85, 0.8);
  IntegrationConfig cfg;
  cfg.t_end = 500.0;
  const TrajectorySummary s = integrate(p, {0.0, 1.0, 3.55, 2.7}, cfg);
  CHECK(s.tail_min.x1 == 0.0);
  CHECK(s.tail_max.x1 == 0.0);
  CHECK(s.final_state.x1 == 0.0);
}

TEST_CASE("positivity and the carrying-capacity envelope") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> uni(0.05, 5.0);
  IntegrationConfig cfg;
  cfg.t_end = 800.0;
  for (int k = 0; k < 8; ++k) {
    const ModelParams p = oracles::random_params(rng);
    const State4 init{uni(rng), uni(rng), uni(rng), uni(rng)};
    const TrajectorySummary s = integrate(p, init, cfg);
    if (s.failure) continue;
    CHECK(s.tail_min.x1 >= 0.0);
    CHECK(s.tail_min.y1 >= 0.0);
    CHECK(s.tail_min.x2 >= 0.0);
    CHECK(s.tail_min.y2 >= 0.0);
    CHECK(s.tail_max.x1 <= p.K1 * (1.0 + 1e-3));
    CHECK(s.tail_max.x2 <= p.K2 * (1.0 + 1e-3));
    const PersistenceReport rep = persistence_report(p);
    CHECK(s.l_tail_max <= rep.envelope * (1.0 + 1e-2));
  }
}

TEST_CASE("sink equilibria recapture small perturbations") {
  const ModelParams p = oracles::reference_family(1.0, 0.85, 0.6);
  const auto eqs = interior_equilibria(p);
  REQUIRE(eqs.size() == 1);
  const StabilityLabel lab =
      classify(Eigen::MatrixXd(jacobian_full(p, eqs[0].state)));
  REQUIRE(lab.label == StabilityClass::sink);
  REQUIRE(lab.margin > 1e-6);
  State4 init = eqs[0].state;
  init.x1 += 1e-3;
  init.y2 += 1e-3;
  const TrajectorySummary s = integrate(p, init);
  CHECK(s.attractor == AttractorType::equilibrium);
  CHECK(component_gap(s.attractor_state, eqs[0].state) < 1e-5);
}

TEST_CASE("subsystem integration") {
  SUBCASE("uninvadable source patch collapses to (K, 0, 0)") {
    const ModelParams p = oracles::reference_family(2.1, 2.0, 0.4);
    IntegrationConfig cfg;
    cfg.t_end = 2000.0;
    const TrajectorySummary3 s = integrate_sub3(p, 1, {2.0, 1.5, 0.8}, cfg);
    CHECK(s.attractor == AttractorType::equilibrium);
    CHECK(std::fabs(s.attractor_state.xi - p.K1) < 1e-5);
    CHECK(s.attractor_state.yi < 1e-6);
    CHECK(s.attractor_state.yj < 1e-6);
  }

  SUBCASE("persistence below the dispersal threshold") {
    // rho1 * s = 0.05 < (a1-d1)(K1-mu1)/(1+K1) ~ 0.0591
    const ModelParams p = oracles::reference_family(1.0, 0.85, 0.05);
    const PersistenceReport rep = persistence_report(p);
    REQUIRE(p.rho1 * p.s < rep.threshold1);
    const TrajectorySummary3 s = integrate_sub3(p, 1, {2.0, 1.0, 0.5});
    REQUIRE_FALSE(s.failure.has_value());
    CHECK(s.tail_min.xi > 1e-3);
    CHECK(s.tail_min.yi > 1e-3);
    CHECK(s.tail_min.yj > 1e-3);
    for (bool flag : s.persistent) CHECK(flag);
  }

  SUBCASE("the predator-free corner is a fixed point of the flow") {
    const ModelParams p = oracles::reference_family(1.0, 0.85, 0.3);
    IntegrationConfig cfg;
    cfg.t_end = 100.0;
    const TrajectorySummary3 s = integrate_sub3(p, 1, {p.K1, 0.0, 0.0}, cfg);
    CHECK(s.attractor == AttractorType::equilibrium);
    CHECK(s.final_state.xi == p.K1);
    CHECK(s.final_state.yi == 0.0);
    CHECK(s.final_state.yj == 0.0);
  }
}

TEST_CASE("an unsettled tail doubles the horizon once") {
  // the boundary sink's slowest mode decays at ~0.008, so a 30-unit horizon
  // is far from settled; the integrator retries at 60 and reports honestly
  const ModelParams p = oracles::reference_family(1.0, 0.85, 0.8);
  IntegrationConfig cfg;
  cfg.t_end = 30.0;
  const TrajectorySummary s = integrate(p, {0.05, 1.0, 3.55, 2.7}, cfg);
  CHECK(s.t_reached == doctest::Approx(60.0));
  CHECK(s.attractor == AttractorType::undetermined);
}

TEST_CASE("step-size underflow is reported with its time") {
  const ModelParams p = oracles::reference_family(1.0, 0.85, 0.3);
  IntegrationConfig cfg;
  cfg.max_step = 1e-20;  // forces h below the underflow floor immediately
  cfg.t_end = 10.0;
  const TrajectorySummary s = integrate(p, {1.0, 1.0, 1.0, 1.0}, cfg);
  REQUIRE(s.failure.has_value());
  CHECK(s.failure->kind == IntegrationFailure::Kind::step_underflow);
  CHECK(s.failure->t == 0.0);
}

TEST_CASE("basin probe clusters distinct attractors") {
  SUBCASE("two-saddle window: boundary sink vs interior cycle") {
    const ModelParams p = oracles::reference_family(1.0, 0.85, 0.8);
    const State4 initials[] = {{0.05, 1.0, 3.55, 2.7}, {0.2, 1.15, 2.7, 2.8}};
    const BasinProbeResult res = basin_probe(p, initials);
    CHECK(res.distinct_attractors == 2);
  }

  SUBCASE("three-equilibria window: two interior attractors") {
    const ModelParams p = oracles::reference_family(1.0, 0.85, 0.8392);
    const State4 initials[] = {{0.25, 1.05, 4.18, 2.68}, {0.58, 1.4, 2.5, 3.1}};
    const BasinProbeResult res = basin_probe(p, initials);
    CHECK(res.distinct_attractors == 2);
  }

  SUBCASE("a single initial is a single attractor") {
    const ModelParams p = oracles::reference_family(1.0, 0.85, 0.6);
    const State4 initials[] = {{1.0, 1.0, 1.0, 1.0}};
    const BasinProbeResult res = basin_probe(p, initials);
    CHECK(res.distinct_attractors == 1);
    CHECK(res.cluster[0] == 0);
  }
}

TEST_CASE("decimated samples cover the run") {
  const ModelParams p = oracles::reference_family(1.0, 0.85, 0.6);
  IntegrationConfig cfg;
  cfg.t_end = 200.0;
  cfg.keep_samples = 256;
  const TrajectorySummary s = integrate(p, {1.0, 1.0, 1.0, 1.0}, cfg);
  REQUIRE_FALSE(s.samples.empty());
  CHECK(s.samples.size() <= 2 * 256);
  CHECK(s.samples.front()[0] == 0.0);
  CHECK(s.samples.back()[0] <= s.t_reached);
  for (size_t i = 1; i < s.samples.size(); ++i)
    CHECK(s.samples[i][0] > s.samples[i - 1][0]);
}
