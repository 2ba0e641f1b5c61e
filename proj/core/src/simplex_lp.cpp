#include "hypsel/simplex_lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hypsel::lp {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kNoiseCostTol = 1e-7;
constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-8;

/// Full dense tableau with the artificial identity block kept through both
/// phases so that B^{-1} (and hence the duals) can be read off at the end.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols, const std::vector<double>& a,
          const std::vector<double>& b, const std::vector<double>& c)
      : m_(rows), n_(cols), width_(cols + rows + 1) {
    t_.assign((m_ + 1) * width_, 0.0);
    basis_.resize(m_);
    cost_.assign(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = c[j];

    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = b[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * a[i * n_ + j];
      at(i, n_ + i) = 1.0;  // artificial
      rhs(i) = sign * b[i];
      basis_[i] = n_ + i;
    }
  }

  Status run_two_phase(std::size_t max_pivots) {
    // Phase 1: minimize the sum of artificials.
    std::vector<double> phase1_cost(n_ + m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) phase1_cost[n_ + i] = 1.0;
    set_objective(phase1_cost);
    Status s = iterate(max_pivots, /*allow_artificials=*/true);
    if (s != Status::optimal) return s;
    if (objective_value() > kFeasTol) return Status::infeasible;
    drive_out_artificials();

    // Phase 2: the real objective, artificials barred from entering.
    set_objective(cost_);
    return iterate(max_pivots, /*allow_artificials=*/false);
  }

  double objective_value() const { return -t_[m_ * width_ + width_ - 1]; }

  std::vector<double> primal() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = rhs_const(i);
    }
    return x;
  }

  /// Duals y with y = c_B B^{-1}: at the artificial columns the maintained
  /// reduced cost is c_art - y_i = -y_i (artificial cost is 0 in phase 2).
  std::vector<double> duals() const {
    std::vector<double> y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      y[i] = -t_[m_ * width_ + n_ + i] * row_sign_[i];
    }
    return y;
  }

  void record_row_signs(const std::vector<double>& b) {
    row_sign_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) row_sign_[i] = b[i] < 0.0 ? -1.0 : 1.0;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
  double at_const(std::size_t i, std::size_t j) const {
    return t_[i * width_ + j];
  }
  double& rhs(std::size_t i) { return t_[i * width_ + width_ - 1]; }
  double rhs_const(std::size_t i) const { return t_[i * width_ + width_ - 1]; }

  void set_objective(const std::vector<double>& c) {
    for (std::size_t j = 0; j < width_; ++j) t_[m_ * width_ + j] = 0.0;
    for (std::size_t j = 0; j < n_ + m_; ++j) t_[m_ * width_ + j] = c[j];
    // Price out the current basis.
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) {
        t_[m_ * width_ + j] -= cb * at_const(i, j);
      }
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const double piv = at(row, col);
    const double inv = 1.0 / piv;
    for (std::size_t j = 0; j < width_; ++j) at(row, j) *= inv;
    at(row, col) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(row, j);
      at(i, col) = 0.0;
    }
    basis_[row] = col;
  }

  Status iterate(std::size_t max_pivots, bool allow_artificials) {
    const std::size_t cols_scanned = allow_artificials ? n_ + m_ : n_;
    std::size_t stall = 0;
    double last_obj = objective_value();
    bool bland = false;
    for (std::size_t it = 0; it < max_pivots; ++it) {
      // Entering column.
      std::size_t enter = width_;
      double best = -kReducedCostTol;
      for (std::size_t j = 0; j < cols_scanned; ++j) {
        const double r = t_[m_ * width_ + j];
        if (bland) {
          if (r < -kReducedCostTol) {
            enter = j;
            break;
          }
        } else if (r < best) {
          best = r;
          enter = j;
        }
      }
      if (enter == width_) return Status::optimal;

      // Ratio test; lowest ratio, lowest row index on ties. If the strict
      // pivot tolerance rejects every row, fall back to any positive entry:
      // only a wholly nonpositive column certifies an unbounded ray.
      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int pass = 0; pass < 2 && leave == m_; ++pass) {
        const double cutoff = pass == 0 ? kPivotTol : 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const double aij = at_const(i, enter);
          if (aij > cutoff) {
            const double ratio = rhs_const(i) / aij;
            if (ratio < best_ratio - 1e-12) {
              best_ratio = ratio;
              leave = i;
            }
          }
        }
      }
      if (leave == m_) {
        // A nonpositive column reached through a noise-scale reduced cost is
        // an optimality signal, not an unbounded ray.
        if (t_[m_ * width_ + enter] > -kNoiseCostTol) return Status::optimal;
        return Status::unbounded;
      }
      pivot(leave, enter);

      const double obj = objective_value();
      if (obj < last_obj - 1e-12) {
        stall = 0;
        last_obj = obj;
      } else if (++stall > 2 * (m_ + n_)) {
        // Anti-cycling fallback; if even Bland's rule spins on degenerate
        // ties, report a stall so the caller can retry perturbed.
        if (bland && stall > 4 * (m_ + n_) + 2000) return Status::stalled;
        bland = true;
      }
    }
    return Status::stalled;
  }

  /// After phase 1, pivot remaining artificials out of the basis where a
  /// nonzero structural column exists in their row.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::fabs(at_const(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  std::size_t m_, n_, width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
  std::vector<double> row_sign_;
};

}  // namespace

Result solve_standard_form(std::size_t rows, std::size_t cols,
                           const std::vector<double>& a,
                           const std::vector<double>& b,
                           const std::vector<double>& c,
                           std::size_t max_pivots) {
  if (a.size() != rows * cols || b.size() != rows || c.size() != cols) {
    throw std::invalid_argument("solve_standard_form: shape mismatch");
  }
  auto attempt = [&](const std::vector<double>& rhs) {
    Tableau t(rows, cols, a, rhs, c);
    t.record_row_signs(rhs);
    Result res;
    res.status = t.run_two_phase(max_pivots);
    if (res.status == Status::optimal) {
      res.x = t.primal();
      res.objective = t.objective_value();
      res.duals = t.duals();
    }
    return res;
  };
  Result res = attempt(b);
  if (res.status == Status::stalled) {
    // Degenerate cycling under finite precision: retry with a deterministic
    // lexicographic right-hand-side perturbation (shifts the optimum by at
    // most ~rows * 1e-10).
    std::vector<double> pb = b;
    for (std::size_t i = 0; i < rows; ++i) {
      pb[i] += 1e-10 * static_cast<double>(i + 1) / static_cast<double>(rows);
    }
    res = attempt(pb);
  }
  return res;
}

MatrixGameResult solve_matrix_game(std::size_t rows, std::size_t cols,
                                   const std::vector<double>& payoff) {
  // max v s.t. sum_i h_i M(i,s) >= v for all s, h in simplex.
  // Standard form variables: h (rows), v+ , v-, slack w_s (cols).
  const std::size_t nv = rows + 2 + cols;
  const std::size_t nr = cols + 1;
  std::vector<double> a(nr * nv, 0.0), b(nr, 0.0), c(nv, 0.0);
  for (std::size_t s = 0; s < cols; ++s) {
    for (std::size_t i = 0; i < rows; ++i) {
      a[s * nv + i] = payoff[i * cols + s];
    }
    a[s * nv + rows] = -1.0;      // v+
    a[s * nv + rows + 1] = 1.0;   // v-
    a[s * nv + rows + 2 + s] = -1.0;
  }
  for (std::size_t i = 0; i < rows; ++i) a[cols * nv + i] = 1.0;
  b[cols] = 1.0;
  c[rows] = -1.0;
  c[rows + 1] = 1.0;

  Result r = solve_standard_form(nr, nv, a, b, c);
  MatrixGameResult g;
  g.status = r.status;
  if (r.status != Status::optimal) return g;
  g.value = -r.objective;
  g.row_strategy.assign(r.x.begin(), r.x.begin() + rows);
  // The duals of the game rows are the minimizer's mixed strategy.
  g.col_strategy.resize(cols);
  double total = 0.0;
  for (std::size_t s = 0; s < cols; ++s) {
    g.col_strategy[s] = r.duals[s] > 0.0 ? r.duals[s] : 0.0;
    total += g.col_strategy[s];
  }
  if (total > 0.0) {
    for (double& w : g.col_strategy) w /= total;
  }
  return g;
}

MarginResult max_margin_point(std::size_t n,
                              const std::vector<std::vector<double>>& normals,
                              const std::vector<double>& offsets) {
  const std::size_t L = normals.size();
  if (L == 0) {
    MarginResult r;
    r.status = Status::optimal;
    r.margin = std::numeric_limits<double>::infinity();
    r.point.assign(n, 1.0 / static_cast<double>(n));
    return r;
  }
  // max m s.t. a_l.h + m + w_l = b_l, h in simplex.
  const std::size_t nv = n + 2 + L;
  const std::size_t nr = L + 1;
  std::vector<double> a(nr * nv, 0.0), b(nr, 0.0), c(nv, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t i = 0; i < n; ++i) a[l * nv + i] = normals[l][i];
    a[l * nv + n] = 1.0;       // m+
    a[l * nv + n + 1] = -1.0;  // m-
    a[l * nv + n + 2 + l] = 1.0;
    b[l] = offsets[l];
  }
  for (std::size_t i = 0; i < n; ++i) a[L * nv + i] = 1.0;
  b[L] = 1.0;
  c[n] = -1.0;
  c[n + 1] = 1.0;

  Result r = solve_standard_form(nr, nv, a, b, c);
  MarginResult mr;
  mr.status = r.status;
  if (r.status != Status::optimal) return mr;
  mr.margin = -r.objective;
  mr.point.assign(r.x.begin(), r.x.begin() + n);
  return mr;
}

}  // namespace hypsel::lp
