// Dense two-phase bounded-variable primal simplex.
//
// Every original variable is mapped onto internal columns y >= 0 with an
// optional finite upper bound (x = offset + sign * y, free variables split
// into two columns). Inequality rows receive a slack; rows whose right-hand
// side cannot start at a slack get an artificial. Nonbasic columns sit at
// either bound. Entering and leaving choices use Bland's lowest-index rule,
// so identical inputs always follow the identical pivot path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "gridstudy/lp/linear_program.hpp"

namespace gridstudy::lp {

namespace {

enum class State : std::uint8_t { Basic, AtLower, AtUpper };

constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarMap {
  double offset = 0.0;
  std::size_t col = 0;
  double sign = 1.0;
  bool split = false;  ///< free variable: x = y[col] - y[col + 1]
};

enum class Outcome { Optimal, Unbounded, IterationLimit };

class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) { build(); }

  LpSolution run() {
    LpSolution sol;
    const int limit = 200 + 50 * static_cast<int>(m_ + ncols_);

    if (first_art_ < ncols_) {
      std::vector<double> phase1(ncols_, 0.0);
      for (std::size_t j = first_art_; j < ncols_; ++j) phase1[j] = 1.0;
      const Outcome o = iterate(phase1, true, limit, sol.iterations);
      if (o != Outcome::Optimal) {
        sol.status = LpStatus::NumericalFailure;
        return sol;
      }
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= first_art_) infeas += xb_[i];
      }
      double scale = 1.0;
      for (double v : rhs_) scale = std::max(scale, std::abs(v));
      if (infeas > kFeasibilityTol * scale) {
        sol.status = LpStatus::Infeasible;
        return sol;
      }
      drive_out_artificials();
      for (std::size_t j = first_art_; j < ncols_; ++j) ub_[j] = 0.0;
    }

    const Outcome o = iterate(cost_, false, limit, sol.iterations);
    if (o == Outcome::Unbounded) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    if (o == Outcome::IterationLimit) {
      sol.status = LpStatus::NumericalFailure;
      return sol;
    }

    recompute_basic_values();
    sol.x = primal();
    sol.objective = lp_.objective(sol.x);
    duals(sol);
    sol.status = check_feasible(lp_, sol.x).empty() ? LpStatus::Optimal : LpStatus::NumericalFailure;
    return sol;
  }

 private:
  const LinearProgram& lp_;
  std::size_t m_ = 0;
  std::size_t ncols_ = 0;
  std::size_t first_slack_ = 0;
  std::size_t first_art_ = 0;
  std::vector<VarMap> map_;
  std::vector<double> tab_;  ///< m_ x ncols_, B^-1 [A | S | R]
  std::vector<double> a0_;   ///< initial sign-adjusted constraint matrix
  std::vector<double> rhs_;
  std::vector<double> row_sign_;
  std::vector<double> xb_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> init_basic_;
  std::vector<State> state_;
  std::vector<double> ub_;
  std::vector<double> cost_;

  double& t(std::size_t i, std::size_t j) { return tab_[i * ncols_ + j]; }
  double t(std::size_t i, std::size_t j) const { return tab_[i * ncols_ + j]; }

  double coef(std::size_t row, std::size_t j) const {
    return row < lp_.num_eq() ? lp_.eq(row, j) : lp_.ineq(row - lp_.num_eq(), j);
  }

  void build() {
    const std::size_t n = lp_.num_vars();
    const std::size_t meq = lp_.num_eq();
    const std::size_t mineq = lp_.num_ineq();
    m_ = meq + mineq;

    std::size_t nstruct = 0;
    map_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      VarMap& vm = map_[j];
      vm.col = nstruct;
      if (!is_neg_inf(lp_.lower[j])) {
        vm.offset = lp_.lower[j];
        nstruct += 1;
      } else if (!is_pos_inf(lp_.upper[j])) {
        vm.offset = lp_.upper[j];
        vm.sign = -1.0;
        nstruct += 1;
      } else {
        vm.split = true;
        nstruct += 2;
      }
    }
    first_slack_ = nstruct;

    rhs_.assign(m_, 0.0);
    row_sign_.assign(m_, 1.0);
    std::vector<bool> needs_art(m_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      double b = i < meq ? lp_.eq_rhs[i] : lp_.ineq_rhs[i - meq];
      for (std::size_t j = 0; j < n; ++j) b -= coef(i, j) * map_[j].offset;
      if (b < 0.0) {
        row_sign_[i] = -1.0;
        b = -b;
      }
      rhs_[i] = b;
      needs_art[i] = i < meq || row_sign_[i] < 0.0;
    }
    first_art_ = first_slack_ + mineq;
    ncols_ = first_art_ + static_cast<std::size_t>(std::count(needs_art.begin(), needs_art.end(), true));

    tab_.assign(m_ * ncols_, 0.0);
    ub_.assign(ncols_, kInf);
    cost_.assign(ncols_, 0.0);
    basis_.assign(m_, 0);
    init_basic_.assign(m_, 0);

    for (std::size_t j = 0; j < n; ++j) {
      const VarMap& vm = map_[j];
      if (vm.split) {
        cost_[vm.col] = lp_.cost[j];
        cost_[vm.col + 1] = -lp_.cost[j];
      } else {
        cost_[vm.col] = vm.sign * lp_.cost[j];
        if (vm.sign > 0.0 && !is_pos_inf(lp_.upper[j])) ub_[vm.col] = lp_.upper[j] - lp_.lower[j];
      }
    }

    std::size_t art = first_art_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double s = row_sign_[i];
      for (std::size_t j = 0; j < n; ++j) {
        const double a = s * coef(i, j);
        const VarMap& vm = map_[j];
        if (vm.split) {
          t(i, vm.col) = a;
          t(i, vm.col + 1) = -a;
        } else {
          t(i, vm.col) = vm.sign * a;
        }
      }
      if (i >= meq) t(i, first_slack_ + (i - meq)) = s;
      if (needs_art[i]) {
        t(i, art) = 1.0;
        basis_[i] = art++;
      } else {
        basis_[i] = first_slack_ + (i - meq);
      }
      init_basic_[i] = basis_[i];
    }
    a0_ = tab_;
    xb_ = rhs_;
    state_.assign(ncols_, State::AtLower);
    for (std::size_t i = 0; i < m_; ++i) state_[basis_[i]] = State::Basic;
  }

  void pivot(std::size_t r, std::size_t e) {
    double* prow = &tab_[r * ncols_];
    const double inv = 1.0 / prow[e];
    for (std::size_t j = 0; j < ncols_; ++j) prow[j] *= inv;
    prow[e] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tab_[i * ncols_];
      const double f = row[e];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < ncols_; ++j) row[j] -= f * prow[j];
      row[e] = 0.0;
    }
  }

  double nonbasic_value(std::size_t j) const {
    return state_[j] == State::AtUpper ? ub_[j] : 0.0;
  }

  Outcome iterate(const std::vector<double>& c, bool allow_art, int limit, int& iterations) {
    std::vector<double> d(ncols_);
    while (true) {
      if (iterations >= limit) return Outcome::IterationLimit;

      d = c;
      for (std::size_t i = 0; i < m_; ++i) {
        const double cb = c[basis_[i]];
        if (cb == 0.0) continue;
        const double* row = &tab_[i * ncols_];
        for (std::size_t j = 0; j < ncols_; ++j) d[j] -= cb * row[j];
      }

      std::size_t entering = ncols_;
      double dir = 0.0;
      const std::size_t limit_col = allow_art ? ncols_ : first_art_;
      for (std::size_t j = 0; j < limit_col; ++j) {
        if (state_[j] == State::Basic || ub_[j] == 0.0) continue;
        if (state_[j] == State::AtLower && d[j] < -kReducedCostTol) {
          entering = j;
          dir = 1.0;
          break;
        }
        if (state_[j] == State::AtUpper && d[j] > kReducedCostTol) {
          entering = j;
          dir = -1.0;
          break;
        }
      }
      if (entering == ncols_) return Outcome::Optimal;
      ++iterations;

      // Ratio test; the entering column may also simply flip to its other bound.
      double best = ub_[entering];
      std::size_t leave_row = m_;
      bool leave_to_upper = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = t(i, entering) * dir;
        double step;
        bool to_upper;
        if (alpha > kPivotTol) {
          step = std::max(0.0, xb_[i]) / alpha;
          to_upper = false;
        } else if (alpha < -kPivotTol && ub_[basis_[i]] < kInf) {
          step = std::max(0.0, ub_[basis_[i]] - xb_[i]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        if (step < best ||
            (step == best && leave_row < m_ && basis_[i] < basis_[leave_row])) {
          best = step;
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (best == kInf) return Outcome::Unbounded;

      for (std::size_t i = 0; i < m_; ++i) xb_[i] -= t(i, entering) * dir * best;

      if (leave_row == m_) {
        state_[entering] = dir > 0.0 ? State::AtUpper : State::AtLower;
        continue;
      }
      const double entering_value = dir > 0.0 ? best : ub_[entering] - best;
      const std::size_t leaving = basis_[leave_row];
      state_[leaving] = leave_to_upper ? State::AtUpper : State::AtLower;
      pivot(leave_row, entering);
      basis_[leave_row] = entering;
      state_[entering] = State::Basic;
      xb_[leave_row] = entering_value;
    }
  }

  // Artificials left basic at zero after phase one are pivoted out where any
  // structural or slack column has a usable entry; the rest mark redundant rows.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < first_art_) continue;
      for (std::size_t j = 0; j < first_art_; ++j) {
        if (state_[j] == State::Basic || std::abs(t(r, j)) <= 1e-7) continue;
        const double value = nonbasic_value(j);
        state_[basis_[r]] = State::AtLower;
        pivot(r, j);
        basis_[r] = j;
        state_[j] = State::Basic;
        xb_[r] = value;
        break;
      }
    }
  }

  void recompute_basic_values() {
    std::vector<double> b = rhs_;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (state_[j] != State::AtUpper) continue;
      for (std::size_t i = 0; i < m_; ++i) b[i] -= a0_[i * ncols_ + j] * ub_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < m_; ++k) v += t(i, init_basic_[k]) * b[k];
      xb_[i] = v;
    }
  }

  std::vector<double> primal() const {
    std::vector<double> y(ncols_, 0.0);
    for (std::size_t j = 0; j < ncols_; ++j) y[j] = nonbasic_value(j);
    for (std::size_t i = 0; i < m_; ++i) y[basis_[i]] = xb_[i];

    std::vector<double> x(lp_.num_vars());
    for (std::size_t j = 0; j < x.size(); ++j) {
      const VarMap& vm = map_[j];
      double v = vm.split ? y[vm.col] - y[vm.col + 1] : vm.offset + vm.sign * y[vm.col];
      if (!is_neg_inf(lp_.lower[j])) v = std::max(v, lp_.lower[j]);
      if (!is_pos_inf(lp_.upper[j])) v = std::min(v, lp_.upper[j]);
      x[j] = v;
    }
    return x;
  }

  void duals(LpSolution& sol) const {
    std::vector<double> y(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      double v = 0.0;
      for (std::size_t i = 0; i < m_; ++i) v += cost_[basis_[i]] * t(i, init_basic_[k]);
      y[k] = row_sign_[k] * v;
    }
    const std::size_t meq = lp_.num_eq();
    sol.eq_duals.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(meq));
    sol.ineq_duals.assign(y.begin() + static_cast<std::ptrdiff_t>(meq), y.end());
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  lp.validate();
  return Simplex(lp).run();
}

}  // namespace gridstudy::lp
