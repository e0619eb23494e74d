#include "patchdyn/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "patchdyn/model.hpp"

namespace patchdyn {

const char* to_string(AttractorType a) {
  switch (a) {
    case AttractorType::equilibrium: return "equilibrium";
    case AttractorType::limit_cycle: return "limit-cycle";
    case AttractorType::undetermined: return "undetermined";
  }
  return "?";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

template <int N>
using Vec = std::array<double, N>;

template <int N>
bool all_finite(const Vec<N>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

template <int N>
struct RawRun {
  std::vector<double> tail_t;
  std::vector<Vec<N>> tail_y;
  std::vector<std::array<double, N + 1>> samples;
  Vec<N> final_state{};
  double t_reached = 0.0;
  std::optional<IntegrationFailure> failure;
};

// Adaptive DOPRI5 with FSAL. Steps landing on a negative component are
// rejected and retried at half size, independent of the error controller,
// which preserves the exact invariance of the coordinate faces.
template <int N, typename Rhs>
RawRun<N> run_dopri(const Rhs& rhs, Vec<N> y, const IntegrationConfig& cfg,
                    double t_end) {
  RawRun<N> out;
  const double tail_start = t_end * (1.0 - cfg.tail_fraction);

  int sample_stride = 1;
  long step_index = 0;
  auto record = [&](double t, const Vec<N>& state) {
    if (t >= tail_start) {
      out.tail_t.push_back(t);
      out.tail_y.push_back(state);
    }
    if (cfg.keep_samples > 0 && step_index % sample_stride == 0) {
      std::array<double, N + 1> row;
      row[0] = t;
      for (int i = 0; i < N; ++i) row[i + 1] = state[i];
      out.samples.push_back(row);
      if (static_cast<int>(out.samples.size()) >= 2 * cfg.keep_samples) {
        size_t w = 0;
        for (size_t r = 0; r < out.samples.size(); r += 2)
          out.samples[w++] = out.samples[r];
        out.samples.resize(w);
        sample_stride *= 2;
      }
    }
    ++step_index;
  };

  double t = 0.0;
  Vec<N> k1 = rhs(y);
  double fmag = 0.0, ymag = 0.0;
  for (int i = 0; i < N; ++i) {
    fmag = std::max(fmag, std::fabs(k1[i]));
    ymag = std::max(ymag, std::fabs(y[i]));
  }
  double h =
      std::min({cfg.max_step, t_end / 100.0, 0.1 * (1.0 + ymag) / (1.0 + fmag)});
  record(t, y);

  Vec<N> k2, k3, k4, k5, k6, k7, ynew, ytmp;
  while (t < t_end) {
    if (h > t_end - t) h = t_end - t;
    const double hmin = 1e-13 * std::max(1.0, std::fabs(t));
    if (h < hmin) {
      out.failure = IntegrationFailure{IntegrationFailure::Kind::step_underflow, t};
      break;
    }

    for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * A21 * k1[i];
    k2 = rhs(ytmp);
    for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    k3 = rhs(ytmp);
    for (int i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    k4 = rhs(ytmp);
    for (int i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    k5 = rhs(ytmp);
    for (int i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] +
                            A64 * k4[i] + A65 * k5[i]);
    k6 = rhs(ytmp);
    for (int i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] +
                            B6 * k6[i]);
    k7 = rhs(ynew);

    if (!all_finite<N>(ynew) || !all_finite<N>(k7)) {
      out.failure = IntegrationFailure{IntegrationFailure::Kind::nonfinite, t};
      break;
    }

    bool negative = false;
    for (int i = 0; i < N; ++i)
      if (ynew[i] < 0.0) negative = true;
    if (negative) {
      h *= 0.5;
      continue;
    }

    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                            E6 * k6[i] + E7 * k7[i]);
      const double scale =
          cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      err += (e / scale) * (e / scale);
    }
    err = std::sqrt(err / N);

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      record(t, y);
      const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h = std::min(cfg.max_step, h * std::clamp(grow, 0.2, 5.0));
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
  }
  out.final_state = y;
  out.t_reached = t;
  return out;
}

template <int N>
struct TailStats {
  Vec<N> mn{}, mx{}, mean{}, variance{};
  bool valid = false;
};

template <int N>
TailStats<N> tail_stats(const RawRun<N>& run) {
  TailStats<N> st;
  if (run.tail_y.empty()) return st;
  st.valid = true;
  st.mn = st.mx = run.tail_y.front();
  for (const auto& v : run.tail_y)
    for (int i = 0; i < N; ++i) {
      st.mn[i] = std::min(st.mn[i], v[i]);
      st.mx[i] = std::max(st.mx[i], v[i]);
    }
  for (const auto& v : run.tail_y)
    for (int i = 0; i < N; ++i) st.mean[i] += v[i];
  for (int i = 0; i < N; ++i) st.mean[i] /= static_cast<double>(run.tail_y.size());
  for (const auto& v : run.tail_y)
    for (int i = 0; i < N; ++i) {
      const double d = v[i] - st.mean[i];
      st.variance[i] += d * d;
    }
  for (int i = 0; i < N; ++i)
    st.variance[i] /= static_cast<double>(run.tail_y.size());
  return st;
}

template <int N>
int count_maxima(const RawRun<N>& run, int comp, double floor_value,
                 double min_gap, double& period) {
  int count = 0;
  double first_t = 0.0, last_t = 0.0, prev_t = -1e300;
  const auto& ys = run.tail_y;
  for (size_t k = 1; k + 1 < ys.size(); ++k) {
    const double v = ys[k][comp];
    if (v < floor_value) continue;
    if (v > ys[k - 1][comp] && v >= ys[k + 1][comp]) {
      const double tk = run.tail_t[k];
      if (tk - prev_t < min_gap) continue;
      prev_t = tk;
      if (count == 0) first_t = tk;
      last_t = tk;
      ++count;
    }
  }
  period = count > 1 ? (last_t - first_t) / (count - 1) : 0.0;
  return count;
}

// Shared summary construction for the 4D and 3D front ends. WeightedL maps a
// state to the weighted population total L whose asymptotic bound
// persistence_report() computes.
template <int N, typename Rhs, typename NormFn, typename WeightedL,
          typename Summary>
void summarize(const Rhs& rhs, const NormFn& rhs_norm, const WeightedL& weighted,
               const Vec<N>& y0, const IntegrationConfig& cfg, Summary& s) {
  RawRun<N> run = run_dopri<N>(rhs, y0, cfg, cfg.t_end);

  auto classify_tail = [&](const RawRun<N>& r, double& period_out) {
    period_out = 0.0;
    const TailStats<N> st = tail_stats<N>(r);
    if (!st.valid) return AttractorType::undetermined;
    const double var_cap = (cfg.abs_tol * 100.0) * (cfg.abs_tol * 100.0);
    bool settled = true;
    for (int i = 0; i < N; ++i)
      if (st.variance[i] >= var_cap) settled = false;
    if (settled && rhs_norm(st.mean) <= 1e-6) return AttractorType::equilibrium;

    double amp = 0.0;
    int comp = 0;
    for (int i = 0; i < N; ++i)
      if (st.mx[i] - st.mn[i] > amp) {
        amp = st.mx[i] - st.mn[i];
        comp = i;
      }
    if (amp > cfg.cycle_amplitude_eps) {
      const double span = r.tail_t.empty() ? 0.0 : r.tail_t.back() - r.tail_t.front();
      const int n_max = count_maxima<N>(r, comp, st.mx[comp] - 0.5 * amp,
                                        1e-3 * span, period_out);
      if (n_max >= 3) return AttractorType::limit_cycle;
    }
    return AttractorType::undetermined;
  };

  double period = 0.0;
  AttractorType kind =
      run.failure ? AttractorType::undetermined : classify_tail(run, period);
  if (kind == AttractorType::undetermined && !run.failure) {
    IntegrationConfig longer = cfg;
    longer.t_end = 2.0 * cfg.t_end;
    RawRun<N> second = run_dopri<N>(rhs, y0, longer, longer.t_end);
    run = std::move(second);
    kind = run.failure ? AttractorType::undetermined : classify_tail(run, period);
  }

  const TailStats<N> st = tail_stats<N>(run);
  s.attractor = kind;
  s.cycle_period = kind == AttractorType::limit_cycle ? period : 0.0;
  s.failure = run.failure;
  s.t_reached = run.t_reached;
  const Vec<N> mean = st.valid ? st.mean : run.final_state;
  s.final_state = decltype(s.final_state)::from_array(run.final_state);
  s.attractor_state = decltype(s.attractor_state)::from_array(mean);
  if (st.valid) {
    s.tail_min = decltype(s.tail_min)::from_array(st.mn);
    s.tail_max = decltype(s.tail_max)::from_array(st.mx);
    s.rhs_norm_at_state = rhs_norm(st.mean);
    for (int i = 0; i < N; ++i) s.persistent[i] = st.mn[i] > cfg.extinction_eps;
    double lmax = 0.0;
    for (const auto& v : run.tail_y) lmax = std::max(lmax, weighted(v));
    s.l_tail_max = lmax;
  }
  s.samples.assign(run.samples.begin(), run.samples.end());
}

}  // namespace

TrajectorySummary integrate(const ModelParams& p, const State4& initial,
                            const IntegrationConfig& config) {
  auto rhs = [&p](const Vec<4>& v) { return rhs_full(p, State4::from_array(v)).to_array(); };
  auto norm = [&p](const Vec<4>& v) { return rhs_full(p, State4::from_array(v)).max_norm(); };
  auto weighted = [&p](const Vec<4>& v) {
    return p.rho2 * (v[0] + v[1]) + p.rho1 * (v[2] + v[3]);
  };
  TrajectorySummary s;
  summarize<4>(rhs, norm, weighted, initial.to_array(), config, s);
  return s;
}

TrajectorySummary3 integrate_sub3(const ModelParams& p, int source_patch,
                                  const State3& initial,
                                  const IntegrationConfig& config) {
  auto rhs = [&p, source_patch](const Vec<3>& v) {
    return rhs_sub3(p, source_patch, State3::from_array(v)).to_array();
  };
  auto norm = [&p, source_patch](const Vec<3>& v) {
    return rhs_sub3(p, source_patch, State3::from_array(v)).max_norm();
  };
  auto weighted = [&p, source_patch](const Vec<3>& v) {
    const State4 u = embed_sub3(source_patch, State3::from_array(v));
    return p.rho2 * (u.x1 + u.y1) + p.rho1 * (u.x2 + u.y2);
  };
  TrajectorySummary3 s;
  summarize<3>(rhs, norm, weighted, initial.to_array(), config, s);
  return s;
}

BasinProbeResult basin_probe(const ModelParams& p,
                             std::span<const State4> initials,
                             const IntegrationConfig& config) {
  BasinProbeResult out;
  out.runs.reserve(initials.size());
  for (const State4& u0 : initials)
    out.runs.emplace_back(u0, integrate(p, u0, config));

  // cluster attractors by the max-norm distance of their tail boxes
  const double tol = 1e-2;
  out.cluster.assign(out.runs.size(), -1);
  std::vector<std::array<double, 8>> features;
  for (size_t k = 0; k < out.runs.size(); ++k) {
    const TrajectorySummary& s = out.runs[k].second;
    if (s.failure) continue;
    const auto mn = s.tail_min.to_array();
    const auto mx = s.tail_max.to_array();
    std::array<double, 8> f{mn[0], mn[1], mn[2], mn[3], mx[0], mx[1], mx[2], mx[3]};
    int id = -1;
    for (size_t c = 0; c < features.size(); ++c) {
      double dist = 0.0;
      for (int i = 0; i < 8; ++i)
        dist = std::max(dist, std::fabs(f[i] - features[c][i]));
      if (dist < tol) {
        id = static_cast<int>(c);
        break;
      }
    }
    if (id < 0) {
      id = static_cast<int>(features.size());
      features.push_back(f);
    }
    out.cluster[k] = id;
  }
  int distinct = 0;
  for (int c : out.cluster) distinct = std::max(distinct, c + 1);
  out.distinct_attractors = distinct;
  return out;
}

}  // namespace patchdyn
