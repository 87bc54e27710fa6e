#include "als/milp_check.hpp"

#include <cmath>
#include <cstdio>

namespace als {

namespace {

std::string describe(const char* tag, std::size_t i, std::size_t j, double lhs, double rhs) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s (i=%zu, j=%zu): lhs %.6f vs rhs %.6f", tag, i, j, lhs, rhs);
  return buf;
}

}  // namespace

MilpAssignment assignment_from_solution(const ScheduleModel& model, const ScheduleSolution& sol) {
  const std::size_t n = model.n;
  MilpAssignment a;
  a.n = n;
  a.t.assign(n + 2, 0.0);
  a.y.assign(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n && i < sol.landing_times.size(); ++i) a.t[i + 1] = sol.landing_times[i];
  a.t[n + 1] = sol.makespan;
  if (sol.order.empty()) return a;
  a.y[0][sol.order.front() + 1] = 1.0;
  for (std::size_t k = 1; k < sol.order.size(); ++k) a.y[sol.order[k - 1] + 1][sol.order[k] + 1] = 1.0;
  a.y[sol.order.back() + 1][0] = 1.0;
  return a;
}

ConstraintReport check_constraints(const ScheduleModel& model, const MilpAssignment& a, double tol) {
  ConstraintReport r;
  const std::size_t n = model.n;
  if (a.n != n || a.t.size() != n + 2 || a.y.size() != n + 1) {
    r.violations.push_back("assignment shape does not match the model");
    return r;
  }
  const auto& l = model.sep.lower;
  const auto& u = model.sep.upper;
  auto expect = [&](bool holds, const char* tag, std::size_t i, std::size_t j, double lhs, double rhs) {
    ++r.checked;
    if (!holds) r.violations.push_back(describe(tag, i, j, lhs, rhs));
  };

  for (std::size_t i = 1; i <= n; ++i) {
    const double rhs = model.t0i[i - 1] * a.y[0][i];
    expect(a.t[i] >= rhs - tol, "st1", 0, i, a.t[i], rhs);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (i == j) continue;
      const double big_m = u[i - 1] - l[j - 1] + model.sep.at(i - 1, j - 1);
      const double lhs = a.t[i] - a.t[j] + big_m * a.y[i][j];
      const double rhs = u[i - 1] - l[j - 1];
      expect(lhs <= rhs + tol, "st2", i, j, lhs, rhs);
    }
  }
  for (std::size_t j = 1; j <= n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      if (i != j) s += a.y[i][j];
    }
    expect(std::abs(s - 1.0) <= tol, "st3", 0, j, s, 1.0);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      if (i != j) s += a.y[i][j];
    }
    expect(std::abs(s - 1.0) <= tol, "st4", i, 0, s, 1.0);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    const double lhs = a.t[i] + model.ti0[i - 1];
    expect(lhs <= a.t[n + 1] + tol, "st5", i, n + 1, lhs, a.t[n + 1]);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    expect(l[i - 1] <= a.t[i] + tol, "st6 lower", i, i, l[i - 1], a.t[i]);
    expect(a.t[i] <= u[i - 1] + tol, "st6 upper", i, i, a.t[i], u[i - 1]);
  }
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      const double v = a.y[i][j];
      expect(v == 0.0 || v == 1.0, "st7", i, j, v, 1.0);
    }
  }
  for (std::size_t i = 0; i <= n + 1; ++i) expect(a.t[i] >= -tol, "st8", i, i, a.t[i], 0.0);
  return r;
}

ConstraintReport check_solution(const ScheduleModel& model, const ScheduleSolution& sol, double tol) {
  ConstraintReport r;
  std::vector<int> seen(model.n, 0);
  bool perm = sol.order.size() == model.n && sol.landing_times.size() == model.n;
  for (auto v : sol.order) {
    if (v >= model.n || seen[v]++) perm = false;
  }
  if (!perm) {
    r.violations.push_back("order is not a permutation of the aircraft");
    return r;
  }
  for (std::size_t k = 1; k < sol.order.size(); ++k) {
    if (sol.landing_times[sol.order[k - 1]] > sol.landing_times[sol.order[k]] + tol) {
      r.violations.push_back("landing times decrease along the order at position " + std::to_string(k));
    }
  }
  auto inner = check_constraints(model, assignment_from_solution(model, sol), tol);
  r.checked = inner.checked + 1;
  r.violations.insert(r.violations.end(), inner.violations.begin(), inner.violations.end());
  return r;
}

}  // namespace als
