#pragma once

#include <cstddef>
#include <vector>

namespace hypsel::lp {

enum class Status { optimal, infeasible, unbounded, stalled };

/// Solution of min c.x subject to A x = b, x >= 0.
struct Result {
  Status status = Status::stalled;
  std::vector<double> x;      // primal solution (size = #columns)
  double objective = 0.0;
  std::vector<double> duals;  // one multiplier per equality row
};

/// Dense two-phase tableau simplex. `a` is row-major with `rows * cols`
/// entries. Deterministic pivoting: Dantzig rule with lowest-index ties,
/// switching to Bland's rule when the objective stalls.
Result solve_standard_form(std::size_t rows, std::size_t cols,
                           const std::vector<double>& a,
                           const std::vector<double>& b,
                           const std::vector<double>& c,
                           std::size_t max_pivots = 50000);

/// Value and optimal mixed strategies of the zero-sum matrix game
///   max_{h in simplex_rows} min_{s in cols} sum_i h_i M(i,s).
/// `payoff` is row-major rows x cols.
struct MatrixGameResult {
  Status status = Status::stalled;
  double value = 0.0;
  std::vector<double> row_strategy;  // maximizer, length rows
  std::vector<double> col_strategy;  // minimizer, length cols
};
MatrixGameResult solve_matrix_game(std::size_t rows, std::size_t cols,
                                   const std::vector<double>& payoff);

/// Largest uniform slack of the polytope {h in simplex_n : a_l.h <= b_l}:
///   max m  s.t.  a_l.h + m <= b_l for all l,  h in simplex_n.
/// margin > 0 certifies strict interior; margin < 0 certifies emptiness of
/// the polytope shrunk by |margin| (and margin < 0 with the LP optimal means
/// the original polytope itself is empty exactly when margin < 0).
struct MarginResult {
  Status status = Status::stalled;
  double margin = 0.0;
  std::vector<double> point;  // attaining h, length n
};
MarginResult max_margin_point(std::size_t n,
                              const std::vector<std::vector<double>>& normals,
                              const std::vector<double>& offsets);

}  // namespace hypsel::lp
