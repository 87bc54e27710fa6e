// Acceptance report: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "als/commands.hpp"
#include "als/csv.hpp"
#include "als/gbm/gbm.hpp"
#include "als/gbm/metrics.hpp"
#include "als/milp_check.hpp"
#include "als/scheduler.hpp"
#include "als/separation.hpp"
#include "als/staged.hpp"
#include "als/synth.hpp"
#include "metric_vectors.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace als;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ' ' << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + ALS_CLI_PATH + "\" " + args + " >>\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return status != -1 && WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::path(ALS_TEST_TMP) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string data_args(const fs::path& d, const std::string& features = "features.csv") {
  return " --tracks " + q(d / "tracks.csv") + " --events " + q(d / "events.csv") + " --weather " +
         q(d / "weather.csv") + " --features " + q(d / features);
}

// Exact solver against brute force, and the constraint checker on every
// schedule produced.
void scheduling_criteria() {
  Rng rng(20240601);
  std::size_t mismatches = 0, feasible = 0, checked = 0, violations = 0;
  const auto t0 = Clock::now();
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + rng.below(7);
    const auto inst = testing::random_instance(rng, n, 30.0);
    const auto sep = build_separation_matrix(inst.flights, inst.etas, inst.params, inst.flights.front().entry_time);
    const auto model = build_model(sep, SolverConfig{});
    const auto exact = solve_exact(model, SolverConfig{});
    const auto brute = brute_force(model);
    if (exact.feasible != brute.feasible ||
        (exact.feasible && std::abs(exact.makespan - brute.makespan) > 1e-6)) {
      ++mismatches;
    }
    for (const auto* s : {&exact, &brute}) {
      if (!s->feasible) continue;
      const auto r = check_solution(model, *s);
      ++checked;
      violations += r.violations.size();
    }
    const auto f = fcfs(inst.flights, model);
    if (f.feasible) {
      ++checked;
      violations += check_solution(model, f).violations.size();
    }
    feasible += exact.feasible ? 1 : 0;
  }
  const double elapsed = seconds_since(t0);
  report("AC1", mismatches == 0 && elapsed < 60.0,
         "exact solver matches brute force on 200 random instances (n 2-8, sigma 0-30 s): " +
             std::to_string(mismatches) + " mismatches, " + std::to_string(feasible) + " feasible, " + fmt(elapsed, 2) +
             " s");
  report("AC2", violations == 0 && checked > 0,
         "constraint checker on " + std::to_string(checked) + " schedules: " + std::to_string(violations) +
             " violations");
}

void separation_criteria() {
  constexpr double kTable[4][4] = {{82, 118, 118, 150}, {60, 64, 64, 94}, {60, 64, 64, 94}, {60, 64, 64, 94}};
  int matches = 0;
  for (auto lead : kWeightClasses) {
    for (auto trail : kWeightClasses) {
      matches += reference_lookup(lead, trail) == kTable[static_cast<int>(lead)][static_cast<int>(trail)] ? 1 : 0;
    }
  }
  report("AC3", matches == 16, "reference separation table: " + std::to_string(matches) + "/16 entries");

  double worst = 0.0;
  bool half_exact = true;
  for (double p : {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    for (double s : {0.0, 0.1, 0.5, 1.0, 5.0, 10.0, 20.0, 50.0}) {
      for (double t : {60.0, 64.0, 82.0, 94.0, 118.0, 150.0}) {
        const double want = t + s * testing::bisect_normal_quantile(1 - p);
        worst = std::max(worst, std::abs(required_separation(t, s, p) - want));
        if (p == 0.5 && required_separation(t, s, p) != t) half_exact = false;
      }
    }
  }
  report("AC4", worst <= 1e-6 && half_exact,
         "required separation vs bisection oracle: max error " + fmt(worst * 1e9, 3) +
             " ns, P_c 0.5 returns the reference value exactly: " + (half_exact ? "yes" : "no"));
}

// Medium-only fleet, trained predictor, 50 congested 9-aircraft horizons.
void fcfs_comparison() {
  const auto d = fresh_dir("ac5");
  const auto log = d / "log.txt";
  const auto test = d / "test";
  fs::create_directories(test);
  bool ok = run_cli("synth --seed 11 --flights 3000 --congestion high --medium-only" + data_args(d), log) == 0 &&
            run_cli("ingest --seed 11" + data_args(d), log) == 0 &&
            run_cli("train --seed 11 --space single --features " + q(d / "features.csv") + " --model-dir " +
                        q(d / "model"),
                    log) == 0 &&
            run_cli("synth --seed 12 --flights 450 --congestion medium --medium-only" + data_args(test), log) == 0 &&
            run_cli("ingest --seed 12" + data_args(test), log) == 0 &&
            run_cli("compare --seed 12 --max-blocks 50 --features " + q(test / "features.csv") + " --model-dir " +
                        q(d / "model") + " --out " + q(d / "out"),
                    log) == 0;
  if (!ok) {
    report("AC5", false, "pipeline failed, see " + log.string());
    return;
  }
  std::ifstream in(d / "out" / kCompareFile);
  std::string line;
  std::getline(in, line);
  const auto header = csv::split(line);
  const auto column = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  std::size_t blocks = 0, both = 0, improved = 0, dominated = 0, feasibility_lost = 0;
  double total = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = csv::split(line);
    ++blocks;
    const bool ff = row.at(column("fcfs_feasible")) == "1";
    const bool of = row.at(column("optimized_feasible")) == "1";
    if (ff && !of) ++feasibility_lost;
    if (!(ff && of)) continue;
    ++both;
    const double fm = std::stod(row.at(column("fcfs_makespan_s")));
    const double om = std::stod(row.at(column("optimized_makespan_s")));
    if (om > fm + 1e-9) ++dominated;
    if (om < fm - 1e-9) ++improved;
    total += std::stod(row.at(column("makespan_reduction_pct")));
  }
  const double share = both ? static_cast<double>(improved) / static_cast<double>(both) : 0.0;
  const double mean = both ? total / static_cast<double>(both) : 0.0;
  report("AC5", blocks == 50 && both > 0 && dominated == 0 && feasibility_lost == 0 && share >= 0.6 && mean > 0.0,
         std::to_string(blocks) + " horizons, " + std::to_string(both) + " feasible under both, optimized never worse: " +
             (dominated == 0 && feasibility_lost == 0 ? "yes" : "no") + ", strictly shorter in " +
             fmt(100 * share, 1) + "%, mean makespan reduction " + fmt(mean, 2) + "%");
}

void prediction_criteria() {
  const auto train = synth::generate_scenario(31, 6000, synth::Congestion::High).flights;
  const auto test = synth::generate_scenario(32, 5000, synth::Congestion::High).flights;
  const gbm::Hyperparams hp{0.05, 7, 1.0, 0.8, 100, 200};
  const auto staged = fit_staged(train, {hp, hp, hp}, StagedConfig{}, 1);
  std::size_t inside = 0;
  for (const auto& f : test) {
    const auto eta = predict_eta(staged, f.features);
    const double y = *f.observed_duration;
    if (y >= eta.quantiles.at(0.05) && y <= eta.quantiles.at(0.95)) ++inside;
  }
  const double coverage = static_cast<double>(inside) / static_cast<double>(test.size());

  Rng rng(606);
  double fd_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double beta = rng.uniform(0.01, 0.99);
    const double y = rng.uniform(0, 3000);
    double f = rng.uniform(0, 3000);
    if (std::abs(y - f) < 1e-3) f += 1.0;
    const auto loss = gbm::Loss::quantile(beta);
    const double h = 1e-6;
    const double fd = -(gbm::loss_value(loss, y, f + h) - gbm::loss_value(loss, y, f - h)) / (2 * h);
    fd_err = std::max(fd_err, std::abs(fd - gbm::pseudo_residual(loss, y, f)));
  }
  report("AC6", coverage >= 0.85 && coverage <= 0.95 && fd_err < 1e-6,
         "[q05, q95] band covers " + fmt(100 * coverage, 1) + "% of " + std::to_string(test.size()) +
             " held-out flights, pinball gradient vs central difference max error " + fmt(fd_err * 1e9, 3) + "e-9");

  const auto flat = fit_unconditioned(train, hp, StagedConfig{}, 1);
  std::vector<double> y;
  for (const auto& f : test) y.push_back(*f.observed_duration);
  const double cond = gbm::rmsle(y, predict_mu(staged, test));
  const double single = gbm::rmsle(y, predict_mu(flat, test));
  report("AC7", cond <= single,
         "held-out RMSLE conditioned " + fmt(cond, 5) + " vs single model " + fmt(single, 5));
}

void metric_criterion() {
  double worst = 0.0;
  const auto cases = testing::metric_cases();
  for (const auto& c : cases) {
    worst = std::max(worst, std::abs(gbm::mae(c.y, c.y_hat) - c.mae));
    worst = std::max(worst, std::abs(gbm::rmse(c.y, c.y_hat) - c.rmse));
    worst = std::max(worst, std::abs(gbm::rmsle(c.y, c.y_hat) - c.rmsle));
  }
  report("AC8", worst <= 1e-12 && cases.size() == 20,
         "MAE/RMSE/RMSLE on " + std::to_string(cases.size()) + " fixed vectors: max abs error " +
             fmt(worst * 1e15, 3) + "e-15");
}

void pipeline_criteria() {
  const auto a = fresh_dir("ac9_a");
  const auto b = fresh_dir("ac9_b");
  const auto log = fs::path(ALS_TEST_TMP) / "ac9_log.txt";
  fs::remove(log);
  const auto t0 = Clock::now();
  bool ok = run_cli("synth --seed 9 --flights 1500 --congestion high" + data_args(a), log) == 0 &&
            run_cli("ingest --seed 9" + data_args(a), log) == 0 &&
            run_cli("train --seed 9 --space reduced --features " + q(a / "features.csv") + " --model-dir " +
                        q(a / "model"),
                    log) == 0;
  int sched = -1;
  if (ok) {
    sched = run_cli("schedule --seed 9 --start 300 --features " + q(a / "features.csv") + " --model-dir " +
                        q(a / "model") + " --out " + q(a / "out"),
                    log);
  }
  const double elapsed = seconds_since(t0);
  ok = ok && sched == kExitOk;

  Rng rng(99);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto inst = testing::random_instance(rng, 9, 20.0);
    const auto sep = build_separation_matrix(inst.flights, inst.etas, inst.params, inst.flights.front().entry_time);
    const auto model = build_model(sep, SolverConfig{});
    const auto t1 = Clock::now();
    const auto s = solve_exact(model, SolverConfig{});
    worst = std::max(worst, seconds_since(t1));
    if (s.status == SolveStatus::TimeLimit) worst = std::max(worst, 1e9);
  }
  report("AC9", ok && elapsed < 300.0 && worst < 10.0,
         "synth, ingest, train (reduced grid), schedule in " + fmt(elapsed, 1) + " s; slowest 9-aircraft solve " +
             fmt(worst * 1000, 1) + " ms");

  // Repeat the same steps into a second directory.
  bool same = ok;
  if (same) {
    same = run_cli("synth --seed 9 --flights 1500 --congestion high" + data_args(b), log) == 0 &&
           run_cli("ingest --seed 9" + data_args(b), log) == 0 &&
           run_cli("train --seed 9 --space reduced --features " + q(b / "features.csv") + " --model-dir " +
                       q(b / "model"),
                   log) == 0;
    run_cli("schedule --seed 9 --start 300 --features " + q(b / "features.csv") + " --model-dir " + q(b / "model") +
                " --out " + q(b / "out"),
            log);
  }
  std::vector<fs::path> files = {"features.csv", fs::path("model") / kModelFile, fs::path("model") / kGridFile,
                                 fs::path("model") / kMetricsFile};
  // The schedule file is written for feasible and infeasible horizons alike.
  const bool scheduled = sched == kExitOk || sched == kExitInfeasible;
  if (scheduled) {
    files.push_back(fs::path("out") / kScheduleFile);
    files.push_back(fs::path("out") / kScheduleTableFile);
  }
  std::size_t identical = 0;
  for (const auto& f : files) {
    if (same && fs::exists(a / f) && slurp(a / f) == slurp(b / f)) ++identical;
  }
  report("AC10", same && identical == files.size(),
         "repeated run with the same seed: " + std::to_string(identical) + "/" + std::to_string(files.size()) +
             " artifacts byte-identical (features, model, grid, metrics" +
             (scheduled ? ", schedule)" : ")"));
}

}  // namespace

int main() {
  try {
    scheduling_criteria();
    separation_criteria();
    fcfs_comparison();
    prediction_criteria();
    metric_criterion();
    pipeline_criteria();
  } catch (const std::exception& e) {
    std::cout << "[FAIL] unexpected error: " << e.what() << std::endl;
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
