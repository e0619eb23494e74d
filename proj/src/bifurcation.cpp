#include "patchdyn/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "patchdyn/model.hpp"

namespace patchdyn {

const char* to_string(EquilibriumFamily f) {
  switch (f) {
    case EquilibriumFamily::subsystem_interior: return "subsystem-interior";
    case EquilibriumFamily::mixed_boundary: return "mixed-boundary";
    case EquilibriumFamily::full_interior: return "full-interior";
  }
  return "?";
}

namespace {

std::vector<BranchPoint> solve_column(const ModelParams& p,
                                      EquilibriumFamily family, int source_patch,
                                      int grid_density,
                                      std::span<const std::pair<double, double>> warm) {
  std::vector<BranchPoint> column;
  switch (family) {
    case EquilibriumFamily::subsystem_interior: {
      const SubsystemInteriors sub = subsystem_interiors(p, source_patch);
      for (const State3& u : sub.equilibria) {
        BranchPoint bp;
        const State4 e = embed_sub3(source_patch, u);
        bp.record = {e,
                     source_patch == 1 ? EqClass::mixed_boundary_x2
                                       : EqClass::mixed_boundary_x1,
                     rhs_full(p, e).max_norm(), Provenance::cubic_root};
        bp.label = classify(Eigen::MatrixXd(jacobian_sub3(p, source_patch, u)));
        column.push_back(std::move(bp));
      }
      break;
    }
    case EquilibriumFamily::mixed_boundary: {
      for (EquilibriumRecord& rec : mixed_boundary_equilibria(p)) {
        BranchPoint bp;
        bp.label = classify(Eigen::MatrixXd(jacobian_full(p, rec.state)));
        bp.record = std::move(rec);
        column.push_back(std::move(bp));
      }
      break;
    }
    case EquilibriumFamily::full_interior: {
      for (EquilibriumRecord& rec : interior_equilibria(p, grid_density, warm)) {
        BranchPoint bp;
        bp.label = classify(Eigen::MatrixXd(jacobian_full(p, rec.state)));
        bp.record = std::move(rec);
        column.push_back(std::move(bp));
      }
      break;
    }
  }
  std::sort(column.begin(), column.end(), [](const BranchPoint& a, const BranchPoint& b) {
    const auto ka = a.record.state.to_array();
    const auto kb = b.record.state.to_array();
    return ka < kb;
  });
  return column;
}

double state_distance(const State4& a, const State4& b) {
  const auto va = a.to_array();
  const auto vb = b.to_array();
  double d = 0.0;
  for (int i = 0; i < 4; ++i) d = std::max(d, std::fabs(va[i] - vb[i]));
  return d;
}

}  // namespace

Sweep1DResult sweep1d(const ModelParams& base, EquilibriumFamily family,
                      std::span<const double> s_grid, int source_patch,
                      int grid_density, double branch_link_tol) {
  Sweep1DResult out;
  out.family = family;
  out.source_patch = source_patch;
  out.grid.assign(s_grid.begin(), s_grid.end());
  out.points.resize(out.grid.size());

  std::vector<std::pair<double, double>> warm;
  for (size_t k = 0; k < out.grid.size(); ++k) {
    ModelParams p = base;
    p.s = out.grid[k];
    out.points[k] = solve_column(p, family, source_patch, grid_density, warm);
    warm.clear();
    if (family == EquilibriumFamily::full_interior) {
      for (const BranchPoint& bp : out.points[k])
        warm.emplace_back(bp.record.state.x1, bp.record.state.x2);
    }
  }

  // nearest-neighbor branch linking between consecutive columns
  out.links.resize(out.grid.empty() ? 0 : out.grid.size() - 1);
  for (size_t k = 0; k + 1 < out.grid.size(); ++k) {
    const auto& from = out.points[k];
    const auto& to = out.points[k + 1];
    std::vector<bool> taken(to.size(), false);
    for (size_t i = 0; i < from.size(); ++i) {
      double best = branch_link_tol;
      int pick = -1;
      for (size_t j = 0; j < to.size(); ++j) {
        if (taken[j]) continue;
        const double d = state_distance(from[i].record.state, to[j].record.state);
        if (d < best) {
          best = d;
          pick = static_cast<int>(j);
        }
      }
      if (pick >= 0) {
        taken[pick] = true;
        out.links[k].emplace_back(static_cast<int>(i), pick);
      }
    }
  }

  // propagate branch ids along links
  out.branch_ids.resize(out.points.size());
  int next_id = 0;
  for (size_t k = 0; k < out.points.size(); ++k)
    out.branch_ids[k].assign(out.points[k].size(), -1);
  for (size_t k = 0; k < out.points.size(); ++k) {
    for (size_t i = 0; i < out.points[k].size(); ++i)
      if (out.branch_ids[k][i] < 0) out.branch_ids[k][i] = next_id++;
    if (k + 1 < out.points.size())
      for (const auto& [i, j] : out.links[k]) out.branch_ids[k + 1][j] = out.branch_ids[k][i];
  }
  return out;
}

SweepGrid sweep2d(const ModelParams& base, const AxisSpec& axis1,
                  const AxisSpec& axis2, int grid_density, int jobs) {
  auto check_axis = [](const AxisSpec& ax) {
    if (ax.name != "s" && ax.name != "rho1" && ax.name != "rho2")
      throw std::invalid_argument("sweep axis must be one of s, rho1, rho2");
    if (ax.n < 1) throw std::invalid_argument("axis resolution must be >= 1");
    if (ax.name == "s" && (ax.lo < 0.0 || ax.hi >= 1.0))
      throw std::invalid_argument("s axis range must lie in [0,1)");
  };
  check_axis(axis1);
  check_axis(axis2);

  SweepGrid grid;
  grid.axis1 = axis1;
  grid.axis2 = axis2;
  grid.counts.assign(static_cast<size_t>(axis1.n) * axis2.n, -1);

  auto set_param = [](ModelParams& p, const std::string& name, double v) {
    if (name == "s") p.s = v;
    else if (name == "rho1") p.rho1 = v;
    else p.rho2 = v;
  };

  auto work = [&](int thread_id, int stride) {
    for (int idx = thread_id; idx < axis1.n * axis2.n; idx += stride) {
      const int i = idx / axis2.n;
      const int j = idx % axis2.n;
      ModelParams p = base;
      set_param(p, axis1.name, axis1.value_at(i));
      set_param(p, axis2.name, axis2.value_at(j));
      int count = -1;
      try {
        count = static_cast<int>(interior_equilibria(p, grid_density).size());
      } catch (...) {
        count = -1;  // failed cell, distinct from zero equilibria
      }
      grid.counts[static_cast<size_t>(i) * axis2.n + j] = count;
    }
  };

  const int workers = std::max(1, jobs);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& th : pool) th.join();
  }
  return grid;
}

std::vector<RegimeRow> regime_table(
    const Sweep1DResult& sweep,
    std::span<const std::pair<double, double>> ranges) {
  std::vector<RegimeRow> rows;
  for (const auto& [lo, hi] : ranges) {
    RegimeRow row;
    row.lo = lo;
    row.hi = hi;

    // pattern = (count, sorted label multiset) per in-range grid point;
    // a single-point range falls back to the nearest grid point
    using Pattern = std::pair<int, std::vector<StabilityClass>>;
    std::map<Pattern, int> votes;
    std::vector<size_t> in_range;
    for (size_t k = 0; k < sweep.grid.size(); ++k)
      if (sweep.grid[k] >= lo && sweep.grid[k] <= hi) in_range.push_back(k);
    if (in_range.empty() && !sweep.grid.empty()) {
      size_t best = 0;
      const double mid = (lo + hi) / 2.0;
      for (size_t k = 1; k < sweep.grid.size(); ++k)
        if (std::fabs(sweep.grid[k] - mid) < std::fabs(sweep.grid[best] - mid))
          best = k;
      in_range.push_back(best);
    }
    for (size_t k : in_range) {
      Pattern pat;
      pat.first = static_cast<int>(sweep.points[k].size());
      for (const BranchPoint& bp : sweep.points[k])
        pat.second.push_back(bp.label.label);
      std::sort(pat.second.begin(), pat.second.end());
      ++votes[pat];
    }
    int best_votes = -1;
    for (const auto& [pat, n] : votes) {
      if (n > best_votes) {
        best_votes = n;
        row.modal_count = pat.first;
        row.modal_labels = pat.second;
      }
    }
    row.transitional = votes.size() > 1;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace patchdyn
