#include "gridstudy/lp/linear_program.hpp"

#include <cmath>
#include <ostream>

#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy::lp {

void DenseMatrix::append_row(const std::vector<double>& values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw DimensionError("row length does not match matrix width");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

LinearProgram::LinearProgram(std::size_t n)
    : cost(n, 0.0), lower(n, 0.0), upper(n, kInfinity), eq(0, n), ineq(0, n), names(n) {
  for (std::size_t j = 0; j < n; ++j) names[j] = "x" + std::to_string(j);
}

std::size_t LinearProgram::add_variable(std::string name, double c, double lo, double hi) {
  if (eq.rows() > 0 || ineq.rows() > 0) {
    throw DimensionError("variables must be added before constraint rows");
  }
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  names.push_back(std::move(name));
  eq = DenseMatrix(0, cost.size());
  ineq = DenseMatrix(0, cost.size());
  return cost.size() - 1;
}

void LinearProgram::add_equality(const std::vector<double>& row, double rhs) {
  if (row.size() != num_vars()) throw DimensionError("equality row has wrong length");
  if (eq.cols() != num_vars()) eq = DenseMatrix(0, num_vars());
  eq.append_row(row);
  eq_rhs.push_back(rhs);
}

void LinearProgram::add_inequality(const std::vector<double>& row, double rhs) {
  if (row.size() != num_vars()) throw DimensionError("inequality row has wrong length");
  if (ineq.cols() != num_vars()) ineq = DenseMatrix(0, num_vars());
  ineq.append_row(row);
  ineq_rhs.push_back(rhs);
}

void LinearProgram::validate() const {
  const std::size_t n = num_vars();
  if (lower.size() != n || upper.size() != n) throw DimensionError("bound vectors have wrong length");
  if (!names.empty() && names.size() != n) throw DimensionError("name list has wrong length");
  if (eq.rows() != eq_rhs.size() || (eq.rows() > 0 && eq.cols() != n)) {
    throw DimensionError("equality system has inconsistent dimensions");
  }
  if (ineq.rows() != ineq_rhs.size() || (ineq.rows() > 0 && ineq.cols() != n)) {
    throw DimensionError("inequality system has inconsistent dimensions");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j]) {
      throw DimensionError("variable " + std::to_string(j) + " has lower bound above upper bound");
    }
    if (!std::isfinite(cost[j])) throw DimensionError("non-finite cost coefficient");
  }
}

double LinearProgram::objective(const std::vector<double>& x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < cost.size(); ++j) v += cost[j] * x[j];
  return v;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

std::vector<Violation> check_feasible(const LinearProgram& lp, const std::vector<double>& x,
                                      double tol) {
  if (x.size() != lp.num_vars()) throw DimensionError("point has wrong dimension");
  std::vector<Violation> out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!is_neg_inf(lp.lower[j]) && x[j] < lp.lower[j] - tol) {
      out.push_back({ViolationKind::LowerBound, j, lp.lower[j] - x[j]});
    }
    if (!is_pos_inf(lp.upper[j]) && x[j] > lp.upper[j] + tol) {
      out.push_back({ViolationKind::UpperBound, j, x[j] - lp.upper[j]});
    }
  }
  for (std::size_t i = 0; i < lp.num_eq(); ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += lp.eq(i, j) * x[j];
    const double r = std::abs(lhs - lp.eq_rhs[i]);
    if (r > tol) out.push_back({ViolationKind::Equality, i, r});
  }
  for (std::size_t i = 0; i < lp.num_ineq(); ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += lp.ineq(i, j) * x[j];
    const double r = lhs - lp.ineq_rhs[i];
    if (r > tol) out.push_back({ViolationKind::Inequality, i, r});
  }
  return out;
}

namespace {

std::string bound_text(double v) {
  if (is_pos_inf(v)) return "inf";
  if (is_neg_inf(v)) return "-inf";
  return format_exact(v);
}

}  // namespace

void dump(const LinearProgram& lp, std::ostream& out) {
  out << "lp " << lp.num_vars() << ' ' << lp.num_eq() << ' ' << lp.num_ineq() << '\n';
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    out << "var " << (lp.names.empty() ? "x" + std::to_string(j) : lp.names[j]) << ' '
        << format_exact(lp.cost[j]) << ' ' << bound_text(lp.lower[j]) << ' '
        << bound_text(lp.upper[j]) << '\n';
  }
  for (std::size_t i = 0; i < lp.num_eq(); ++i) {
    out << "eq";
    for (std::size_t j = 0; j < lp.num_vars(); ++j) out << ' ' << format_exact(lp.eq(i, j));
    out << ' ' << format_exact(lp.eq_rhs[i]) << '\n';
  }
  for (std::size_t i = 0; i < lp.num_ineq(); ++i) {
    out << "le";
    for (std::size_t j = 0; j < lp.num_vars(); ++j) out << ' ' << format_exact(lp.ineq(i, j));
    out << ' ' << format_exact(lp.ineq_rhs[i]) << '\n';
  }
}

}  // namespace gridstudy::lp
