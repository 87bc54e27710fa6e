#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "als/domain.hpp"
#include "als/separation.hpp"

namespace als {

enum class TieBreak : std::uint8_t { EntryOrder };

struct SolverConfig {
  std::size_t n_max = 9;
  double time_limit_s = 10.0;
  /// Relative optimality gap accepted when pruning; 0 proves optimality.
  double gap = 0.0;
  TieBreak tie_break = TieBreak::EntryOrder;
  /// Depot legs: separation from the tour start to each aircraft and from
  /// each aircraft back to the tour end.
  double depot_out = 0.0;
  double depot_in = 0.0;
};

void validate(const SolverConfig& cfg);

/// Single-runway tour model over aircraft 1..n plus depot node 0. Aircraft
/// are stored 0-based; index order is the entry order.
struct ScheduleModel {
  std::size_t n = 0;
  SeparationMatrix sep;
  std::vector<double> t0i;  // depot -> aircraft
  std::vector<double> ti0;  // aircraft -> depot
  /// Shortest chained separation between every ordered pair; any schedule
  /// with i before j has t_j >= t_i + closure(i, j).
  std::vector<double> closure;

  std::size_t adjacency_vars = 0;   // y_ij between aircraft
  std::size_t depot_arc_vars = 0;   // y_0i and y_i0
  std::size_t window_constraints = 0;
  std::size_t separation_constraints = 0;

  bool infeasible_by_preprocessing = false;
  std::vector<std::string> conflicts;

  double closure_at(std::size_t i, std::size_t j) const { return closure[i * n + j]; }
};

/// Throws EmptyInstance for n = 0 and TooManyAircraft when n > n_max.
ScheduleModel build_model(const SeparationMatrix& sep, const SolverConfig& cfg);

/// Earliest feasible landing times along `order`. The returned solution is
/// flagged infeasible (not repaired) when a window is missed.
ScheduleSolution schedule_order(const ScheduleModel& model, std::span<const std::size_t> order);

/// Branch-and-bound over landing orders. On a tie in makespan the
/// lexicographically smallest order wins. Past the time limit the best
/// incumbent is returned with status TimeLimit.
ScheduleSolution solve_exact(const ScheduleModel& model, const SolverConfig& cfg);

/// Enumerates every order; throws InstanceTooLarge for n > 9.
ScheduleSolution brute_force(const ScheduleModel& model);

/// Orders flights by (entry_time, id).
std::vector<std::size_t> entry_order(std::span<const Flight> flights);
ScheduleSolution fcfs(std::span<const Flight> flights, const ScheduleModel& model);

/// First min(n, n_max) flights by (entry_time, id).
std::vector<Flight> select_horizon(std::span<const Flight> flights, const SolverConfig& cfg);

/// Human-readable reasons an order cannot meet every window.
std::vector<std::string> diagnose_infeasibility(const ScheduleModel& model);

struct ComparisonReport {
  ScheduleSolution fcfs;
  ScheduleSolution optimized;
  Seconds origin = 0.0;
  /// (FCFS - optimized) / FCFS in percent; 0 when either side is infeasible.
  double makespan_reduction_pct = 0.0;
  double span_reduction_pct = 0.0;
  double sum_reduction_pct = 0.0;
  /// |landing position - entry position| per flight, and the maximum.
  std::vector<std::size_t> shifts;
  std::size_t max_shift = 0;
  std::vector<std::string> diagnosis;
};

double landing_span(const ScheduleSolution& s);
double landing_sum(const ScheduleSolution& s);

/// Both schedules on one model built from `flights` (entry-ordered).
ComparisonReport compare(std::span<const Flight> flights, const ScheduleModel& model, const SolverConfig& cfg);

/// Builds the separation matrix (origin = first entry time) and model, then
/// compares.
ComparisonReport compare(std::span<const Flight> flights, std::span<const EtaDistribution> etas,
                         const SeparationParams& params, const SolverConfig& cfg);

}  // namespace als
