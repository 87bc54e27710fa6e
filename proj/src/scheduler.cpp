#include "als/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "als/error.hpp"

namespace als {

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

void validate(const SolverConfig& cfg) {
  if (cfg.n_max < 2) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 2");
  if (!(cfg.time_limit_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "time limit must be positive");
  if (!(cfg.gap >= 0.0 && cfg.gap < 1.0)) throw Error(ErrorCode::InvalidArgument, "gap must lie in [0,1)");
  if (!(cfg.depot_out >= 0.0) || !(cfg.depot_in >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "depot legs must be non-negative");
  }
}

ScheduleModel build_model(const SeparationMatrix& sep, const SolverConfig& cfg) {
  validate(cfg);
  const std::size_t n = sep.n;
  if (n == 0) throw Error(ErrorCode::EmptyInstance, "no aircraft to schedule");
  if (n > cfg.n_max) {
    throw Error(ErrorCode::TooManyAircraft,
                std::to_string(n) + " aircraft exceed n_max = " + std::to_string(cfg.n_max));
  }
  if (sep.sep.size() != n * n || sep.lower.size() != n || sep.upper.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "separation matrix shape does not match n");
  }
  ScheduleModel m;
  m.n = n;
  m.sep = sep;
  m.t0i.assign(n, cfg.depot_out);
  m.ti0.assign(n, cfg.depot_in);
  m.adjacency_vars = n * (n - 1);
  m.depot_arc_vars = 2 * n;
  m.window_constraints = n;
  m.separation_constraints = n * (n - 1);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !(sep.at(i, j) >= 0.0)) throw Error(ErrorCode::InvalidArgument, "separations must be >= 0");
    }
  }

  m.closure.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m.closure[i * n + j] = i == j ? 0.0 : sep.at(i, j);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double via = m.closure[i * n + k] + m.closure[k * n + j];
        if (via < m.closure[i * n + j]) m.closure[i * n + j] = via;
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double earliest = std::max(0.0, sep.lower[i]);
    if (earliest > sep.upper[i] + kEps) {
      m.infeasible_by_preprocessing = true;
      m.conflicts.push_back("flight " + std::to_string(i + 1) + ": window [" + fmt(sep.lower[i]) + ", " +
                            fmt(sep.upper[i]) + "] has no non-negative time");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool ij = std::max(0.0, sep.lower[i]) + m.closure_at(i, j) <= sep.upper[j] + kEps;
      const bool ji = std::max(0.0, sep.lower[j]) + m.closure_at(j, i) <= sep.upper[i] + kEps;
      if (!ij && !ji) {
        m.infeasible_by_preprocessing = true;
        m.conflicts.push_back("flights " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                              ": neither order fits the windows (need " + fmt(m.closure_at(i, j)) + " s or " +
                              fmt(m.closure_at(j, i)) + " s)");
      }
    }
  }
  return m;
}

ScheduleSolution schedule_order(const ScheduleModel& model, std::span<const std::size_t> order) {
  ScheduleSolution s;
  s.order.assign(order.begin(), order.end());
  s.landing_times.assign(model.n, 0.0);
  s.feasible = order.size() == model.n;
  double prev_t = 0.0;
  double makespan = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t v = order[k];
    double t = k == 0 ? std::max({model.sep.lower[v], model.t0i[v], 0.0})
                      : std::max(model.sep.lower[v], prev_t + model.sep.at(order[k - 1], v));
    if (t > model.sep.upper[v] + kEps) s.feasible = false;
    s.landing_times[v] = t;
    makespan = std::max(makespan, t + model.ti0[v]);
    prev_t = t;
  }
  s.makespan = makespan;
  s.objective = makespan;
  s.status = s.feasible ? SolveStatus::Optimal : SolveStatus::Infeasible;
  return s;
}

namespace {

class BranchAndBound {
public:
  BranchAndBound(const ScheduleModel& model, const SolverConfig& cfg)
      : m_(model), cfg_(cfg), start_(std::chrono::steady_clock::now()) {
    const std::size_t n = m_.n;
    min_in_depot_ = n == 0 ? 0.0 : *std::min_element(m_.ti0.begin(), m_.ti0.end());
    used_.assign(n, false);
    path_.reserve(n);
  }

  ScheduleSolution run() {
    ScheduleSolution out;
    out.landing_times.assign(m_.n, 0.0);
    if (!m_.infeasible_by_preprocessing) dfs(0.0, 0.0);
    out.stats.nodes = nodes_;
    if (best_value_ < kInf) {
      out = schedule_order(m_, best_order_);
      out.stats.nodes = nodes_;
      out.status = timed_out_ ? SolveStatus::TimeLimit : SolveStatus::Optimal;
    } else {
      out.feasible = false;
      out.status = timed_out_ ? SolveStatus::TimeLimit : SolveStatus::Infeasible;
    }
    out.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    return out;
  }

private:
  bool out_of_time() {
    if ((nodes_ & 4095u) == 0 && nodes_ > 0) {
      const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (elapsed > cfg_.time_limit_s) timed_out_ = true;
    }
    return timed_out_;
  }

  double prune_threshold() const {
    return best_value_ == kInf ? kInf : best_value_ * (1.0 - cfg_.gap) - kEps;
  }

  // Lower bound on the completion of any extension of the current path;
  // kInf when some remaining flight can no longer meet its window.
  double bound(double t_last, double partial) const {
    const std::size_t n = m_.n;
    const std::size_t depth = path_.size();
    if (depth == n) return partial;
    double lb = partial;
    double min_step = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (used_[j]) continue;
      double earliest;
      if (depth == 0) {
        earliest = std::max(0.0, m_.sep.lower[j]);
      } else {
        double step = m_.sep.at(path_.back(), j);
        for (std::size_t k = 0; k < n; ++k) {
          if (!used_[k] && k != j) step = std::min(step, m_.sep.at(k, j));
        }
        min_step = std::min(min_step, step);
        earliest = std::max(m_.sep.lower[j], t_last + step);
      }
      if (earliest > m_.sep.upper[j] + kEps) return kInf;
      lb = std::max(lb, earliest + m_.ti0[j]);
    }
    if (depth > 0) {
      lb = std::max(lb, t_last + static_cast<double>(n - depth) * min_step + min_in_depot_);
    }
    return lb;
  }

  void dfs(double t_last, double partial) {
    ++nodes_;
    if (out_of_time()) return;
    const std::size_t n = m_.n;
    if (path_.size() == n) {
      if (partial < best_value_ - kEps) {
        best_value_ = partial;
        best_order_ = path_;
      }
      return;
    }
    if (bound(t_last, partial) >= prune_threshold()) return;
    for (std::size_t v = 0; v < n; ++v) {
      if (used_[v]) continue;
      const double t = path_.empty() ? std::max({m_.sep.lower[v], m_.t0i[v], 0.0})
                                     : std::max(m_.sep.lower[v], t_last + m_.sep.at(path_.back(), v));
      if (t > m_.sep.upper[v] + kEps) continue;
      used_[v] = true;
      path_.push_back(v);
      dfs(t, std::max(partial, t + m_.ti0[v]));
      path_.pop_back();
      used_[v] = false;
      if (timed_out_) return;
    }
  }

  const ScheduleModel& m_;
  const SolverConfig& cfg_;
  std::chrono::steady_clock::time_point start_;
  double min_in_depot_ = 0.0;
  std::vector<bool> used_;
  std::vector<std::size_t> path_;
  std::vector<std::size_t> best_order_;
  double best_value_ = kInf;
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
};

}  // namespace

ScheduleSolution solve_exact(const ScheduleModel& model, const SolverConfig& cfg) {
  validate(cfg);
  return BranchAndBound(model, cfg).run();
}

ScheduleSolution brute_force(const ScheduleModel& model) {
  if (model.n > 9) throw Error(ErrorCode::InstanceTooLarge, "brute force is limited to 9 aircraft");
  if (model.n == 0) throw Error(ErrorCode::EmptyInstance, "no aircraft to schedule");
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> order(model.n);
  std::iota(order.begin(), order.end(), 0);
  ScheduleSolution best;
  best.landing_times.assign(model.n, 0.0);
  double best_value = kInf;
  std::uint64_t count = 0;
  do {
    ++count;
    auto s = schedule_order(model, order);
    if (s.feasible && s.makespan < best_value - kEps) {
      best_value = s.makespan;
      best = std::move(s);
    }
  } while (std::next_permutation(order.begin(), order.end()));
  if (best_value == kInf) {
    best.order.clear();
    best.feasible = false;
    best.status = SolveStatus::Infeasible;
  }
  best.stats.nodes = count;
  best.stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return best;
}

std::vector<std::size_t> entry_order(std::span<const Flight> flights) {
  std::vector<std::size_t> order(flights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (flights[a].entry_time != flights[b].entry_time) return flights[a].entry_time < flights[b].entry_time;
    return flights[a].id < flights[b].id;
  });
  return order;
}

ScheduleSolution fcfs(std::span<const Flight> flights, const ScheduleModel& model) {
  if (flights.size() != model.n) throw Error(ErrorCode::LengthMismatch, "flight count differs from model size");
  const auto start = std::chrono::steady_clock::now();
  auto s = schedule_order(model, entry_order(flights));
  s.stats.nodes = 1;
  s.stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return s;
}

std::vector<Flight> select_horizon(std::span<const Flight> flights, const SolverConfig& cfg) {
  const auto order = entry_order(flights);
  std::vector<Flight> out;
  for (std::size_t k = 0; k < order.size() && k < cfg.n_max; ++k) out.push_back(flights[order[k]]);
  return out;
}

std::vector<std::string> diagnose_infeasibility(const ScheduleModel& model) {
  if (!model.conflicts.empty()) return model.conflicts;
  // Earliest-deadline order as a representative attempt.
  std::vector<std::size_t> order(model.n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return model.sep.upper[a] < model.sep.upper[b]; });
  const auto s = schedule_order(model, order);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto v = order[k];
    if (s.landing_times[v] > model.sep.upper[v] + kEps) {
      out.push_back("flight " + std::to_string(v + 1) + ": earliest reachable landing " + fmt(s.landing_times[v]) +
                    " s exceeds its latest time " + fmt(model.sep.upper[v]) + " s (deadline order)");
      break;
    }
  }
  if (out.empty()) out.push_back("no landing order meets every window");
  return out;
}

double landing_span(const ScheduleSolution& s) {
  if (s.order.empty()) return 0.0;
  return s.landing_times[s.order.back()] - s.landing_times[s.order.front()];
}

double landing_sum(const ScheduleSolution& s) {
  double total = 0.0;
  for (auto v : s.order) total += s.landing_times[v];
  return total;
}

namespace {

double reduction_pct(double base, double opt) { return base > 0.0 ? 100.0 * (base - opt) / base : 0.0; }

}  // namespace

ComparisonReport compare(std::span<const Flight> flights, const ScheduleModel& model, const SolverConfig& cfg) {
  ComparisonReport r;
  r.fcfs = fcfs(flights, model);
  r.optimized = solve_exact(model, cfg);
  if (r.fcfs.feasible && r.optimized.feasible) {
    r.makespan_reduction_pct = reduction_pct(r.fcfs.makespan, r.optimized.makespan);
    r.span_reduction_pct = reduction_pct(landing_span(r.fcfs), landing_span(r.optimized));
    r.sum_reduction_pct = reduction_pct(landing_sum(r.fcfs), landing_sum(r.optimized));
  }
  if (r.optimized.feasible) {
    const auto entry = entry_order(flights);
    std::vector<std::size_t> entry_pos(model.n);
    std::vector<std::size_t> land_pos(model.n);
    for (std::size_t k = 0; k < model.n; ++k) {
      entry_pos[entry[k]] = k;
      land_pos[r.optimized.order[k]] = k;
    }
    for (std::size_t i = 0; i < model.n; ++i) {
      const auto d = entry_pos[i] > land_pos[i] ? entry_pos[i] - land_pos[i] : land_pos[i] - entry_pos[i];
      r.shifts.push_back(d);
      r.max_shift = std::max(r.max_shift, d);
    }
  } else {
    r.diagnosis = diagnose_infeasibility(model);
  }
  return r;
}

ComparisonReport compare(std::span<const Flight> flights, std::span<const EtaDistribution> etas,
                         const SeparationParams& params, const SolverConfig& cfg) {
  if (flights.empty()) throw Error(ErrorCode::EmptyInstance, "no aircraft to schedule");
  Seconds origin = flights[0].entry_time;
  for (const auto& f : flights) origin = std::min(origin, f.entry_time);
  const auto sep = build_separation_matrix(flights, etas, params, origin);
  const auto model = build_model(sep, cfg);
  auto r = compare(flights, model, cfg);
  r.origin = origin;
  return r;
}

}  // namespace als
