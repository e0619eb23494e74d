#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "patchdyn/equilibria.hpp"
#include "patchdyn/stability.hpp"

namespace patchdyn {

enum class EquilibriumFamily { subsystem_interior, mixed_boundary, full_interior };
const char* to_string(EquilibriumFamily f);

struct BranchPoint {
  EquilibriumRecord record;  // subsystem states are embedded on their face
  StabilityLabel label;      // 3x3 spectrum for the subsystem family, 4x4 otherwise
};

struct Sweep1DResult {
  EquilibriumFamily family = EquilibriumFamily::full_interior;
  int source_patch = 1;  // meaningful for the subsystem family
  std::vector<double> grid;
  std::vector<std::vector<BranchPoint>> points;  // per grid value, sorted by state
  std::vector<std::vector<int>> branch_ids;      // parallel to points
  // nearest-neighbor links between consecutive grid columns, (from, to) indices
  std::vector<std::vector<std::pair<int, int>>> links;
};

// Re-solves the selected equilibrium family at each s and classifies each
// equilibrium. Full-interior sweeps add the previous column's solutions as
// warm starts; counts always come from a fresh multistart solve. Branch
// links are cosmetic (plotting continuity) and never affect counts.
Sweep1DResult sweep1d(const ModelParams& base, EquilibriumFamily family,
                      std::span<const double> s_grid, int source_patch = 1,
                      int grid_density = 30, double branch_link_tol = 0.05);

struct AxisSpec {
  std::string name;  // one of "s", "rho1", "rho2"
  double lo = 0.0, hi = 0.0;
  int n = 0;
  double value_at(int k) const {
    return n <= 1 ? lo : lo + (hi - lo) * k / (n - 1);
  }
};

struct SweepGrid {
  AxisSpec axis1, axis2;
  std::vector<int> counts;  // row-major over (axis1, axis2); -1 marks failure
  int at(int i, int j) const { return counts[static_cast<size_t>(i) * axis2.n + j]; }
};

// Interior-equilibrium count per cell of a two-parameter grid. Cells are
// independent work items; jobs > 1 splits them across threads.
SweepGrid sweep2d(const ModelParams& base, const AxisSpec& axis1,
                  const AxisSpec& axis2, int grid_density = 30, int jobs = 1);

// Aggregates a 1D sweep over the given s-ranges into rows comparable to the
// summary tables: modal equilibrium count and modal label multiset, with
// ranges whose pattern is not constant flagged transitional.
struct RegimeRow {
  double lo = 0.0, hi = 0.0;
  int modal_count = 0;
  std::vector<StabilityClass> modal_labels;  // sorted
  bool transitional = false;
};
std::vector<RegimeRow> regime_table(
    const Sweep1DResult& sweep,
    std::span<const std::pair<double, double>> ranges);

}  // namespace patchdyn
