#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "gridstudy/lp/linear_program.hpp"

using namespace gridstudy::lp;

namespace {

struct Row {
  std::vector<double> a;
  double rhs;
};

// Solves a square system by Gaussian elimination with partial pivoting.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> m, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    if (std::abs(m[piv][c]) < 1e-10) return std::nullopt;
    std::swap(m[piv], m[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= m[i][k] * x[k];
    x[i] = s / m[i][i];
  }
  return x;
}

bool feasible(const LinearProgram& lp, const std::vector<double>& x, double tol) {
  return check_feasible(lp, x, tol).empty();
}

// Minimum over all basic feasible points: every choice of n linearly
// independent active constraints that includes all equality rows.
std::optional<double> vertex_enumeration_min(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  std::vector<Row> eqs;
  std::vector<Row> candidates;
  for (std::size_t i = 0; i < lp.num_eq(); ++i) {
    eqs.push_back({std::vector<double>(lp.eq.row(i), lp.eq.row(i) + n), lp.eq_rhs[i]});
  }
  for (std::size_t i = 0; i < lp.num_ineq(); ++i) {
    candidates.push_back({std::vector<double>(lp.ineq.row(i), lp.ineq.row(i) + n), lp.ineq_rhs[i]});
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    candidates.push_back({e, lp.lower[j]});
    candidates.push_back({e, lp.upper[j]});
  }
  const std::size_t need = n - eqs.size();
  std::optional<double> best;
  // Iterate over combinations of `need` candidates.
  std::vector<bool> mask(candidates.size(), false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(need), true);
  do {
    std::vector<std::vector<double>> m;
    std::vector<double> b;
    for (const auto& r : eqs) {
      m.push_back(r.a);
      b.push_back(r.rhs);
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (mask[i]) {
        m.push_back(candidates[i].a);
        b.push_back(candidates[i].rhs);
      }
    }
    if (auto x = solve_square(m, b); x && feasible(lp, *x, 1e-7)) {
      const double obj = lp.objective(*x);
      if (!best || obj < *best) best = obj;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

// Random bounded LP with a known interior point, so it is feasible.
LinearProgram random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m_ineq, std::size_t m_eq) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LinearProgram lp;
  std::vector<double> x0(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = std::round(u(rng) * 5.0);
    const double width = 1.0 + std::round(4.0 * (u(rng) + 1.0));
    lp.add_variable("x" + std::to_string(j), std::round(10.0 * u(rng)), lo, lo + width);
    x0[j] = lo + width * (0.25 + 0.5 * (u(rng) + 1.0) / 2.0);
  }
  for (std::size_t i = 0; i < m_ineq; ++i) {
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = std::round(4.0 * u(rng));
    double ax = 0.0;
    for (std::size_t j = 0; j < n; ++j) ax += row[j] * x0[j];
    lp.add_inequality(row, ax + 0.5 + (u(rng) + 1.0));
  }
  for (std::size_t i = 0; i < m_eq; ++i) {
    std::vector<double> row(n);
    double ax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::round(3.0 * u(rng));
      ax += row[j] * x0[j];
    }
    if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) {
      row[0] = 1.0;
      ax = x0[0];
    }
    lp.add_equality(row, ax);
  }
  return lp;
}

}  // namespace

TEST_CASE("bound-attaining minimum") {
  LinearProgram lp;
  lp.add_variable("x", 1.0, 0.0, 5.0);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.x[0] == 0.0);
  CHECK(sol.objective == 0.0);
}

TEST_CASE("textbook vertex optimum on the simplex edge") {
  LinearProgram lp;
  lp.add_variable("x", -1.0, 0.0, kInfinity);
  lp.add_variable("y", -1.0, 0.0, kInfinity);
  lp.add_inequality({1.0, 1.0}, 1.0);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_feasible(lp, sol.x).empty());
}

TEST_CASE("maximize with mixed constraints") {
  // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3  ->  x=3, y=1, obj 11
  LinearProgram lp;
  lp.add_variable("x", -3.0, 0.0, 3.0);
  lp.add_variable("y", -2.0, 0.0, kInfinity);
  lp.add_inequality({1.0, 1.0}, 4.0);
  lp.add_inequality({1.0, 3.0}, 6.0);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(-11.0));
  CHECK(sol.x[0] == doctest::Approx(3.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded problems are classified") {
  SUBCASE("infeasible rows") {
    LinearProgram lp;
    lp.add_variable("x", 1.0, 0.0, 10.0);
    lp.add_inequality({1.0}, 2.0);
    lp.add_equality({1.0}, 5.0);
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
  }
  SUBCASE("unbounded ray") {
    LinearProgram lp;
    lp.add_variable("x", -1.0, 0.0, kInfinity);
    lp.add_variable("y", 0.0, 0.0, kInfinity);
    lp.add_inequality({1.0, -1.0}, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::Unbounded);
  }
  SUBCASE("free variable with equality") {
    LinearProgram lp;
    lp.add_variable("x", 1.0, -kInfinity, kInfinity);
    lp.add_equality({2.0}, -3.0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.x[0] == doctest::Approx(-1.5));
  }
}

TEST_CASE("validate rejects inconsistent programs") {
  LinearProgram lp;
  lp.add_variable("x", 1.0, 2.0, 1.0);
  CHECK_THROWS_AS(lp.validate(), DimensionError);
  LinearProgram bad;
  bad.add_variable("x", 1.0, 0.0, 1.0);
  CHECK_THROWS(bad.add_inequality({1.0, 2.0}, 1.0));
}

TEST_CASE("random bounded LPs match exhaustive vertex enumeration") {
  std::mt19937_64 rng(42);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 7;  // 2..8
    const std::size_t m_ineq = rng() % 5;
    const std::size_t m_eq = rng() % 3 == 0 ? 1 : 0;
    const auto lp = random_lp(rng, n, m_ineq, m_eq);
    const auto sol = solve_lp(lp);
    const auto oracle = vertex_enumeration_min(lp);
    REQUIRE(oracle.has_value());
    REQUIRE(sol.optimal());
    CHECK(check_feasible(lp, sol.x).empty());
    CHECK(std::abs(sol.objective - *oracle) <= 1e-8 * std::max(1.0, std::abs(*oracle)));
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("no sampled feasible point beats the optimum") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto lp = random_lp(rng, 4, 3, 0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    // Interior anchor: the midpoint of the optimum and any feasible vertex is feasible;
    // project random box points onto the feasible set by bisection toward x*.
    int samples = 0;
    for (int k = 0; k < 1000; ++k) {
      std::vector<double> p(lp.num_vars());
      for (std::size_t j = 0; j < p.size(); ++j) p[j] = lp.lower[j] + u(rng) * (lp.upper[j] - lp.lower[j]);
      double lo = 0.0;
      double hi = 1.0;
      auto mix = [&](double t) {
        std::vector<double> q(p.size());
        for (std::size_t j = 0; j < p.size(); ++j) q[j] = sol.x[j] + t * (p[j] - sol.x[j]);
        return q;
      };
      if (!feasible(lp, mix(1.0), 1e-9)) {
        for (int it = 0; it < 40; ++it) {
          const double mid = 0.5 * (lo + hi);
          (feasible(lp, mix(mid), 1e-9) ? lo : hi) = mid;
        }
      } else {
        lo = 1.0;
      }
      const auto q = mix(lo);
      CHECK(lp.objective(q) >= sol.objective - 1e-8);
      ++samples;
    }
    CHECK(samples == 1000);
  }
}

TEST_CASE("repeated solves are bitwise identical") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lp = random_lp(rng, 6, 4, 1);
    const auto a = solve_lp(lp);
    const auto b = solve_lp(lp);
    REQUIRE(a.status == b.status);
    CHECK(a.x == b.x);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("relaxing a bound never increases the optimum") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    auto lp = random_lp(rng, 5, 3, 0);
    const auto tight = solve_lp(lp);
    REQUIRE(tight.optimal());
    auto relaxed = lp;
    const std::size_t j = rng() % lp.num_vars();
    relaxed.lower[j] -= 1.0 + 3.0 * u(rng);
    relaxed.upper[j] += 1.0 + 3.0 * u(rng);
    if (relaxed.num_ineq() > 0) relaxed.ineq_rhs[rng() % relaxed.num_ineq()] += u(rng);
    const auto loose = solve_lp(relaxed);
    REQUIRE(loose.optimal());
    CHECK(loose.objective <= tight.objective + 1e-9);
  }
}

TEST_CASE("equality duals equal the objective sensitivity") {
  // min 2a + 5b  s.t. a + b = d, 0 <= a <= 3, b >= 0: marginal unit is b once a is full.
  auto build = [](double d) {
    LinearProgram lp;
    lp.add_variable("a", 2.0, 0.0, 3.0);
    lp.add_variable("b", 5.0, 0.0, kInfinity);
    lp.add_equality({1.0, 1.0}, d);
    return lp;
  };
  const auto lo = solve_lp(build(2.0));
  REQUIRE(lo.optimal());
  CHECK(lo.eq_duals[0] == doctest::Approx(2.0));
  const auto hi = solve_lp(build(7.0));
  REQUIRE(hi.optimal());
  CHECK(hi.eq_duals[0] == doctest::Approx(5.0));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto lp = random_lp(rng, 5, 2, 1);
    const auto base = solve_lp(lp);
    REQUIRE(base.optimal());
    const double h = 1e-5;
    lp.eq_rhs[0] += h;
    const auto up = solve_lp(lp);
    lp.eq_rhs[0] -= 2.0 * h;
    const auto down = solve_lp(lp);
    if (!up.optimal() || !down.optimal()) continue;
    const double fwd = (up.objective - base.objective) / h;
    const double bwd = (base.objective - down.objective) / h;
    // At a kink the dual lies between the one-sided derivatives.
    CHECK(base.eq_duals[0] >= std::min(fwd, bwd) - 1e-4);
    CHECK(base.eq_duals[0] <= std::max(fwd, bwd) + 1e-4);
  }
}

TEST_CASE("feasibility report") {
  LinearProgram lp;
  lp.add_variable("x", 1.0, 0.0, 2.0);
  lp.add_variable("y", 1.0, 0.0, 2.0);
  lp.add_inequality({1.0, 1.0}, 3.0);
  lp.add_equality({1.0, -1.0}, 0.0);

  SUBCASE("optimal point has no violations") {
    const auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(check_feasible(lp, sol.x).empty());
  }
  SUBCASE("one bound violated by 1.0") {
    const auto v = check_feasible(lp, {-1.0, -1.0});
    LinearProgram boxed = lp;
    boxed.eq = DenseMatrix();
    boxed.eq_rhs.clear();
    boxed.ineq = DenseMatrix();
    boxed.ineq_rhs.clear();
    const auto w = check_feasible(boxed, {3.0, 1.0});
    REQUIRE(w.size() == 1);
    CHECK(w[0].kind == ViolationKind::UpperBound);
    CHECK(w[0].index == 0);
    CHECK(w[0].magnitude == doctest::Approx(1.0));
    CHECK(v.size() >= 2);
  }
  SUBCASE("random points agree with direct row evaluation") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 4.0);
    for (int k = 0; k < 500; ++k) {
      const std::vector<double> x = {u(rng), u(rng)};
      const auto report = check_feasible(lp, x);
      std::size_t expected = 0;
      expected += x[0] < -kFeasibilityTol;
      expected += x[0] > 2.0 + kFeasibilityTol;
      expected += x[1] < -kFeasibilityTol;
      expected += x[1] > 2.0 + kFeasibilityTol;
      expected += x[0] + x[1] > 3.0 + kFeasibilityTol;
      expected += std::abs(x[0] - x[1]) > kFeasibilityTol;
      CHECK(report.size() == expected);
      for (const auto& v : report) {
        if (v.kind == ViolationKind::Inequality) CHECK(v.magnitude == doctest::Approx(x[0] + x[1] - 3.0));
        if (v.kind == ViolationKind::Equality) CHECK(v.magnitude == doctest::Approx(std::abs(x[0] - x[1])));
      }
    }
  }
}

TEST_CASE("dump prints one line per variable and row") {
  LinearProgram lp;
  lp.add_variable("x", 1.0, -kInfinity, 2.0);
  lp.add_inequality({1.0}, 3.0);
  std::ostringstream out;
  dump(lp, out);
  const std::string s = out.str();
  CHECK(s.rfind("lp 1 0 1\n", 0) == 0);
  CHECK(s.find("-inf") != std::string::npos);
  CHECK(s.find("le ") != std::string::npos);
}
