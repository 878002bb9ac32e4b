#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridstudy::lp {

// Solver constants. Bounds at or beyond +-kInfinity are treated as absent.
inline constexpr double kInfinity = 1e18;
inline constexpr double kFeasibilityTol = 1e-8;
inline constexpr double kObjectiveRelTol = 1e-9;
inline constexpr double kPivotTol = 1e-9;
inline constexpr double kReducedCostTol = 1e-9;

inline bool is_neg_inf(double v) { return v <= -kInfinity; }
inline bool is_pos_inf(double v) { return v >= kInfinity; }

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  /// Appends a row; `values` must have cols() entries (or define cols() if empty).
  void append_row(const std::vector<double>& values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// minimize  c.x  subject to  lower <= x <= upper,  A x = b,  G x <= h.
struct LinearProgram {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  DenseMatrix eq;
  std::vector<double> eq_rhs;
  DenseMatrix ineq;
  std::vector<double> ineq_rhs;
  std::vector<std::string> names;

  LinearProgram() = default;
  /// `n` variables with bounds [0, +inf) and zero cost.
  explicit LinearProgram(std::size_t n);

  std::size_t num_vars() const noexcept { return cost.size(); }
  std::size_t num_eq() const noexcept { return eq_rhs.size(); }
  std::size_t num_ineq() const noexcept { return ineq_rhs.size(); }

  std::size_t add_variable(std::string name, double c, double lo, double hi);
  void add_equality(const std::vector<double>& row, double rhs);
  void add_inequality(const std::vector<double>& row, double rhs);

  /// Throws DimensionError on inconsistent sizes or lower > upper.
  void validate() const;

  double objective(const std::vector<double>& x) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  /// d(objective)/d(eq_rhs[i]) at the optimal basis.
  std::vector<double> eq_duals;
  /// d(objective)/d(ineq_rhs[i]) at the optimal basis (<= 0).
  std::vector<double> ineq_duals;

  bool optimal() const noexcept { return status == LpStatus::Optimal; }
};

/// Deterministic bounded-variable primal simplex (two-phase, Bland's rule).
LpSolution solve_lp(const LinearProgram& lp);

enum class ViolationKind { LowerBound, UpperBound, Equality, Inequality };

struct Violation {
  ViolationKind kind;
  std::size_t index;  ///< variable or row index
  double magnitude;   ///< amount by which the bound/row is exceeded (> 0)
};

/// Every bound or row violated by more than `tol`. Empty iff `x` is feasible.
std::vector<Violation> check_feasible(const LinearProgram& lp, const std::vector<double>& x,
                                      double tol = kFeasibilityTol);

/// Plain-text dump: header line "lp <n> <m_eq> <m_ineq>", then one line per
/// variable "var <name> <cost> <lower> <upper>", one per row
/// "eq|le <coefficients...> <rhs>". Infinite bounds print as "inf"/"-inf".
void dump(const LinearProgram& lp, std::ostream& out);

}  // namespace gridstudy::lp
