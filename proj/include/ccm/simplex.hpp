#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ccm::lp {

enum class RowSense { Eq, Le, Ge };

struct KernelRow {
  std::vector<std::pair<int, double>> coeffs;
  RowSense sense = RowSense::Eq;
  double rhs = 0.0;
};

/// Canonical kernel input: min c^T x subject to the rows, with x_j >= 0
/// unless flagged free. Finite upper bounds are not part of the canonical
/// form; callers lower them into rows.
struct KernelLp {
  int n_cols = 0;
  std::vector<double> cost;
  std::vector<std::uint8_t> is_free;
  std::vector<KernelRow> rows;
};

enum class KernelStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct KernelResult {
  KernelStatus status = KernelStatus::IterLimit;
  std::vector<double> x;  // per original column
  std::vector<double> y;  // per row; equals d(objective)/d(rhs): Le rows <= 0,
                          // Ge rows >= 0, Eq rows free
  double objective = 0.0;
  int iterations = 0;
  std::string note;
};

struct KernelOptions {
  double tol_reduced = 1e-9;   // entering threshold on reduced costs
  double tol_pivot = 1e-9;     // smallest usable pivot element
  double tol_feas = 1e-7;      // phase-1 residual declared infeasible above this
  int max_iterations = 0;      // 0 = derived from problem size
  bool parallel = false;       // OpenMP row elimination (bit-identical to serial)
  // Tableaus below this cell count run the serial kernel even when parallel
  // is requested; thread start-up dominates on small, mostly sparse pivots.
  int parallel_min_cells = 1 << 18;
};

/// Dense two-phase tableau simplex. Dantzig pricing with a permanent switch
/// to Bland's rule once the objective stalls, so every run terminates and a
/// given input always produces the same pivot sequence. The returned basis is
/// re-solved against the original data (dense LU) so x and y carry no
/// accumulated tableau drift.
KernelResult simplex_solve(const KernelLp& lp, const KernelOptions& opts = {});

namespace detail {
/// Subtract multiples of the (already normalized) pivot row from all other
/// rows. Both variants perform identical per-row arithmetic; the parallel one
/// only distributes rows across threads, so results are bit-identical.
void eliminate_serial(double* tab, int n_rows, int stride, int pivot_row, int pivot_col);
void eliminate_parallel(double* tab, int n_rows, int stride, int pivot_row, int pivot_col);
}  // namespace detail

}  // namespace ccm::lp
