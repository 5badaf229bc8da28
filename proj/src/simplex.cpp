#include "ccm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ccm::lp {

namespace detail {

void eliminate_serial(double* tab, int n_rows, int stride, int pivot_row, int pivot_col) {
  const double* prow = tab + static_cast<size_t>(pivot_row) * stride;
  for (int r = 0; r < n_rows; ++r) {
    if (r == pivot_row) continue;
    double* row = tab + static_cast<size_t>(r) * stride;
    const double f = row[pivot_col];
    if (f == 0.0) continue;
    for (int j = 0; j < stride; ++j) row[j] -= f * prow[j];
    row[pivot_col] = 0.0;
  }
}

void eliminate_parallel(double* tab, int n_rows, int stride, int pivot_row, int pivot_col) {
  const double* prow = tab + static_cast<size_t>(pivot_row) * stride;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n_rows; ++r) {
    if (r == pivot_row) continue;
    double* row = tab + static_cast<size_t>(r) * stride;
    const double f = row[pivot_col];
    if (f == 0.0) continue;
    for (int j = 0; j < stride; ++j) row[j] -= f * prow[j];
    row[pivot_col] = 0.0;
  }
}

}  // namespace detail

namespace {

// Dense LU with partial pivoting; solves A x = b in place. Returns false on a
// numerically singular matrix.
bool lu_solve(std::vector<double> a, int n, std::vector<double>& b) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a[static_cast<size_t>(k) * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a[static_cast<size_t>(i) * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < 1e-13) return false;
    if (p != k) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<size_t>(p) * n + j], a[static_cast<size_t>(k) * n + j]);
      std::swap(b[p], b[k]);
    }
    const double piv = a[static_cast<size_t>(k) * n + k];
    for (int i = k + 1; i < n; ++i) {
      const double f = a[static_cast<size_t>(i) * n + k] / piv;
      if (f == 0.0) continue;
      a[static_cast<size_t>(i) * n + k] = 0.0;
      for (int j = k + 1; j < n; ++j)
        a[static_cast<size_t>(i) * n + j] -= f * a[static_cast<size_t>(k) * n + j];
      b[i] -= f * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double acc = b[i];
    for (int j = i + 1; j < n; ++j) acc -= a[static_cast<size_t>(i) * n + j] * b[j];
    b[i] = acc / a[static_cast<size_t>(i) * n + i];
  }
  return true;
}

struct Expanded {
  // Column layout: [positive parts | negative parts of free vars | slacks | artificials].
  int n_pos = 0;        // one per original column
  int n_neg = 0;        // one per free original column
  int n_slack = 0;      // one per inequality row
  int art_start = 0;    // first artificial column
  int n_total = 0;
  std::vector<int> neg_col;       // per original column, -1 if not free
  std::vector<int> slack_col;     // per row, -1 for Eq
  std::vector<double> slack_sign; // +1 Le, -1 Ge
  std::vector<char> flipped;      // row multiplied by -1 to make rhs >= 0
};

}  // namespace

KernelResult simplex_solve(const KernelLp& lp, const KernelOptions& opts) {
  const int m = static_cast<int>(lp.rows.size());
  const int n = lp.n_cols;

  Expanded ex;
  ex.n_pos = n;
  ex.neg_col.assign(n, -1);
  for (int j = 0; j < n; ++j)
    if (lp.is_free[j]) ex.neg_col[j] = ex.n_pos + ex.n_neg++;
  ex.slack_col.assign(m, -1);
  ex.slack_sign.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    if (lp.rows[i].sense == RowSense::Eq) continue;
    ex.slack_col[i] = ex.n_pos + ex.n_neg + ex.n_slack++;
    ex.slack_sign[i] = lp.rows[i].sense == RowSense::Le ? 1.0 : -1.0;
  }
  ex.art_start = ex.n_pos + ex.n_neg + ex.n_slack;
  ex.n_total = ex.art_start + m;
  ex.flipped.assign(m, 0);

  const int W = ex.n_total;       // columns before the rhs column
  const int stride = W + 1;
  const int zr1 = m;              // phase-1 reduced-cost row
  const int zr2 = m + 1;          // phase-2 reduced-cost row
  std::vector<double> T(static_cast<size_t>(m + 2) * stride, 0.0);
  auto row = [&](int r) { return T.data() + static_cast<size_t>(r) * stride; };

  for (int i = 0; i < m; ++i) {
    double* tr = row(i);
    const double sgn = lp.rows[i].rhs < 0.0 ? -1.0 : 1.0;
    ex.flipped[i] = sgn < 0.0;
    for (const auto& [j, a] : lp.rows[i].coeffs) {
      tr[j] += sgn * a;
      if (ex.neg_col[j] >= 0) tr[ex.neg_col[j]] -= sgn * a;
    }
    if (ex.slack_col[i] >= 0) tr[ex.slack_col[i]] = sgn * ex.slack_sign[i];
    tr[ex.art_start + i] = 1.0;
    tr[W] = sgn * lp.rows[i].rhs;
  }

  // Reduced-cost rows with the all-artificial starting basis: phase 1 costs
  // are 1 on artificials, phase 2 costs are the real costs.
  {
    double* z1 = row(zr1);
    for (int i = 0; i < m; ++i) z1[ex.art_start + i] = 1.0;
    for (int i = 0; i < m; ++i) {
      const double* tr = row(i);
      for (int j = 0; j <= W; ++j) z1[j] -= tr[j];
    }
    double* z2 = row(zr2);
    for (int j = 0; j < n; ++j) {
      z2[j] += lp.cost[j];
      if (ex.neg_col[j] >= 0) z2[ex.neg_col[j]] -= lp.cost[j];
    }
  }

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = ex.art_start + i;

  auto eliminate = [&](int pr, int pc) {
    double* prow = row(pr);
    const double piv = prow[pc];
    for (int j = 0; j <= W; ++j) prow[j] /= piv;
    prow[pc] = 1.0;
    const bool par = opts.parallel &&
                     static_cast<long>(m + 2) * stride >= opts.parallel_min_cells;
    if (par)
      detail::eliminate_parallel(T.data(), m + 2, stride, pr, pc);
    else
      detail::eliminate_serial(T.data(), m + 2, stride, pr, pc);
  };

  KernelResult res;
  res.x.assign(n, 0.0);
  res.y.assign(m, 0.0);

  const int max_iters =
      opts.max_iterations > 0 ? opts.max_iterations : 400 * (m + W) + 20000;
  int iters = 0;
  bool bland = false;
  int stall = 0;
  const int stall_limit = 2 * (m + 2);

  auto run_phase = [&](int zr, bool phase2) -> KernelStatus {
    double last_obj = -row(zr)[W];
    while (true) {
      const double* z = row(zr);
      int jc = -1;
      if (bland) {
        for (int j = 0; j < ex.art_start; ++j) {
          if (z[j] < -opts.tol_reduced) {
            jc = j;
            break;
          }
        }
      } else {
        double best = -opts.tol_reduced;
        for (int j = 0; j < ex.art_start; ++j) {
          if (z[j] < best) {
            best = z[j];
            jc = j;
          }
        }
      }
      if (jc < 0) return KernelStatus::Optimal;

      int ir = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = row(i)[jc];
        if (a <= opts.tol_pivot) continue;
        const double ratio = row(i)[W] / a;
        const double tie = 1e-9 * (1.0 + std::abs(best_ratio));
        if (ir < 0 || ratio < best_ratio - tie) {
          best_ratio = ratio;
          ir = i;
        } else if (ratio < best_ratio + tie && basis[i] < basis[ir]) {
          // Degenerate tie: prefer the smallest basis index (Bland-compatible).
          best_ratio = std::min(best_ratio, ratio);
          ir = i;
        }
      }
      if (ir < 0) return phase2 ? KernelStatus::Unbounded : KernelStatus::IterLimit;

      eliminate(ir, jc);
      basis[ir] = jc;
      if (++iters > max_iters) return KernelStatus::IterLimit;

      const double obj = -row(zr)[W];
      if (obj < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
        stall = 0;
      } else if (!bland && ++stall > stall_limit) {
        bland = true;  // anti-cycling: finite termination from here on
      }
      last_obj = obj;
    }
  };

  KernelStatus st = run_phase(zr1, false);
  res.iterations = iters;
  if (st != KernelStatus::Optimal) {
    res.status = st == KernelStatus::Unbounded ? KernelStatus::IterLimit : st;
    res.note = "phase 1 did not converge";
    return res;
  }
  const double infeas = -row(zr1)[W];
  if (infeas > opts.tol_feas) {
    res.status = KernelStatus::Infeasible;
    res.note = "phase-1 residual " + std::to_string(infeas);
    return res;
  }

  // Drive artificials out of the basis where a real pivot exists; rows left
  // with a basic artificial are redundant and harmless (all real entries 0).
  for (int i = 0; i < m; ++i) {
    if (basis[i] < ex.art_start) continue;
    int jc = -1;
    for (int j = 0; j < ex.art_start; ++j) {
      if (std::abs(row(i)[j]) > 1e-7) {
        jc = j;
        break;
      }
    }
    if (jc >= 0) {
      eliminate(i, jc);
      basis[i] = jc;
      ++iters;
    }
  }

  stall = 0;
  st = run_phase(zr2, true);
  res.iterations = iters;
  if (st != KernelStatus::Optimal) {
    res.status = st;
    res.note = st == KernelStatus::Unbounded ? "objective unbounded below"
                                             : "iteration limit reached";
    return res;
  }

  // Re-solve the final basis against the original (rhs-normalized) data so
  // the reported solution does not carry tableau round-off.
  {
    std::vector<double> bmat(static_cast<size_t>(m) * m, 0.0);
    std::vector<double> dense_col(m);
    for (int p = 0; p < m; ++p) {
      const int col = basis[p];
      std::fill(dense_col.begin(), dense_col.end(), 0.0);
      if (col >= ex.art_start) {
        dense_col[col - ex.art_start] = 1.0;
      } else {
        for (int i = 0; i < m; ++i) {
          const double sgn = ex.flipped[i] ? -1.0 : 1.0;
          double v = 0.0;
          if (ex.slack_col[i] == col) v = ex.slack_sign[i];
          for (const auto& [j, a] : lp.rows[i].coeffs) {
            if (j == col)
              v += a;
            else if (ex.neg_col[j] == col)
              v -= a;
          }
          dense_col[i] = sgn * v;
        }
      }
      for (int i = 0; i < m; ++i) bmat[static_cast<size_t>(i) * m + p] = dense_col[i];
    }

    std::vector<double> xb(m);
    for (int i = 0; i < m; ++i) xb[i] = (ex.flipped[i] ? -1.0 : 1.0) * lp.rows[i].rhs;
    std::vector<double> cb(m, 0.0);
    for (int p = 0; p < m; ++p) {
      const int col = basis[p];
      if (col < n)
        cb[p] = lp.cost[col];
      else if (col < ex.n_pos + ex.n_neg) {
        for (int j = 0; j < n; ++j)
          if (ex.neg_col[j] == col) cb[p] = -lp.cost[j];
      }
    }

    std::vector<double> bt(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int p = 0; p < m; ++p)
        bt[static_cast<size_t>(p) * m + i] = bmat[static_cast<size_t>(i) * m + p];

    std::vector<double> xsol = xb, ysol = cb;
    const bool ok_x = lu_solve(bmat, m, xsol);
    const bool ok_y = lu_solve(bt, m, ysol);
    if (ok_x && ok_y) {
      std::vector<double> xfull(ex.art_start, 0.0);
      for (int p = 0; p < m; ++p)
        if (basis[p] < ex.art_start) xfull[basis[p]] = xsol[p];
      for (int j = 0; j < n; ++j) {
        res.x[j] = xfull[j];
        if (ex.neg_col[j] >= 0) res.x[j] -= xfull[ex.neg_col[j]];
      }
      for (int i = 0; i < m; ++i) res.y[i] = (ex.flipped[i] ? -1.0 : 1.0) * ysol[i];
    } else {
      // Singular refinement system; fall back to tableau values.
      std::vector<double> xfull(ex.art_start, 0.0);
      for (int p = 0; p < m; ++p)
        if (basis[p] < ex.art_start) xfull[basis[p]] = row(p)[W];
      for (int j = 0; j < n; ++j) {
        res.x[j] = xfull[j];
        if (ex.neg_col[j] >= 0) res.x[j] -= xfull[ex.neg_col[j]];
      }
      for (int i = 0; i < m; ++i)
        res.y[i] = (ex.flipped[i] ? -1.0 : 1.0) * -row(zr2)[ex.art_start + i];
      res.note = "basis refinement skipped (singular)";
    }
  }

  res.objective = 0.0;
  for (int j = 0; j < n; ++j) res.objective += lp.cost[j] * res.x[j];
  res.status = KernelStatus::Optimal;
  return res;
}

}  // namespace ccm::lp
