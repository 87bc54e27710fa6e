#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "als/domain.hpp"
#include "als/error.hpp"
#include "als/gbm/gbm.hpp"
#include "als/ingest.hpp"

namespace als {

enum class MuSource : std::uint8_t { Median, Mean };

struct StagedConfig {
  double beta_lo = 0.05;
  double beta_hi = 0.95;
  MuSource mu_source = MuSource::Median;
  bool use_events = true;
  bool use_weather = true;
  /// Fold a stage with too few rows into its nearest populated neighbor
  /// (the lower one on ties) instead of throwing.
  bool merge_underpopulated = false;
  std::size_t min_stage_rows = 2;
};

class StageUnderpopulated : public Error {
public:
  StageUnderpopulated(ingest::Stage stage, std::size_t rows);
  ingest::Stage stage() const { return stage_; }

private:
  ingest::Stage stage_;
};

/// Schema positions used by a predictor: flight conditions and aircraft
/// counts always, event counts and weather on request.
std::vector<std::size_t> model_columns(bool use_events, bool use_weather);
gbm::Schema projected_schema(std::span<const std::size_t> columns);
/// Rows of the selected columns; labels are observed durations (flights
/// without one are rejected with InvalidArgument).
gbm::Dataset make_dataset(std::span<const Flight> flights, std::span<const std::size_t> columns);
std::vector<double> project(const FeatureVector& fv, std::span<const std::size_t> columns);

struct QuantileTriple {
  gbm::BoostedEnsemble lo;
  gbm::BoostedEnsemble mid;
  gbm::BoostedEnsemble hi;
};

struct StagedPredictor {
  StagedConfig config;
  std::vector<std::size_t> columns;
  std::vector<QuantileTriple> models;
  /// Index into `models` for stages I, II, III.
  std::array<std::size_t, 3> route{0, 0, 0};
  bool conditioned = true;
  std::vector<std::string> notes;
};

/// One triple per stage, each trained only on that stage's rows.
StagedPredictor fit_staged(std::span<const Flight> flights, const std::array<gbm::Hyperparams, 3>& hp,
                           const StagedConfig& cfg, std::uint64_t seed);
/// A single triple trained on every row, used by all stages.
StagedPredictor fit_unconditioned(std::span<const Flight> flights, const gbm::Hyperparams& hp,
                                  const StagedConfig& cfg, std::uint64_t seed);

/// Gaussian-matching spread of a central interval; 0 when the bounds meet.
double sigma_from_quantiles(double q_lo, double q_hi, double beta_lo, double beta_hi);

/// Quantiles after the crossing fix, mu, and sigma for one flight.
EtaDistribution predict_eta(const StagedPredictor& sp, const FeatureVector& fv);

/// Point prediction (mu) for every flight.
std::vector<double> predict_mu(const StagedPredictor& sp, std::span<const Flight> flights);

nlohmann::json to_json(const StagedPredictor& sp);
StagedPredictor staged_from_json(const nlohmann::json& j);

}  // namespace als
