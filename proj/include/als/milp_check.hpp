#pragma once

#include <string>
#include <vector>

#include "als/domain.hpp"
#include "als/scheduler.hpp"

namespace als {

/// Assignment of the tour model's variables. Node 0 is the depot, aircraft
/// are nodes 1..n and t[n + 1] is the tour completion time.
struct MilpAssignment {
  std::size_t n = 0;
  std::vector<double> t;               // size n + 2
  std::vector<std::vector<double>> y;  // (n + 1) x (n + 1), y[i][j] for i, j in 0..n
};

/// Reads the adjacency and times implied by a solution's landing order.
MilpAssignment assignment_from_solution(const ScheduleModel& model, const ScheduleSolution& sol);

struct ConstraintReport {
  std::vector<std::string> violations;
  std::size_t checked = 0;
  bool ok() const { return violations.empty(); }
};

/// Evaluates st1..st8 term by term with the Big-M constants u_i - l_j + t_ij.
ConstraintReport check_constraints(const ScheduleModel& model, const MilpAssignment& a, double tol = 1e-6);

/// assignment_from_solution followed by check_constraints, plus a check that
/// the order is a permutation.
ConstraintReport check_solution(const ScheduleModel& model, const ScheduleSolution& sol, double tol = 1e-6);

}  // namespace als
