#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridstudy/price/features.hpp"
#include "gridstudy/timeseries/scenario_config.hpp"

namespace gridstudy::price {

/// Ridge regularization weight on z-scored features.
inline constexpr double kRidgeLambda = 1e-3;
inline constexpr std::size_t kRidgeMinSamples = 24;

enum class Provenance { Historical, Simulated };

struct Sample {
  FeatureVector features;
  double price;  ///< $/MWh
  Provenance provenance;
};

struct TrainingSet {
  std::vector<Sample> samples;
  /// Names of the line-limit columns, in FeatureVector order.
  std::vector<std::string> line_names;
};

/// Fitted regressor. Immutable after training; predictions are pure.
struct TrainedPredictor {
  PredictorKind kind = PredictorKind::NearestNeighbor;
  std::vector<std::string> columns;  ///< full raw feature layout
  std::vector<std::size_t> used;     ///< indices into `columns` with nonzero spread
  std::vector<double> mean;          ///< per used column
  std::vector<double> stddev;        ///< per used column
  // ridge
  double intercept = 0.0;
  std::vector<double> coef;  ///< per used column, on z-scores
  // nearest neighbour
  std::vector<double> exemplars;  ///< row-major, used.size() z-scores per exemplar
  std::vector<double> targets;

  std::vector<std::string> dropped_columns() const;
  /// Slope with respect to the raw (unnormalized) column `name`; 0 if dropped.
  double raw_slope(const std::string& name) const;
};

class TrainingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

TrainedPredictor train(const TrainingSet& data, PredictorKind kind, std::uint64_t seed,
                       std::size_t max_exemplars = 0);

double predict(const TrainedPredictor& model, const FeatureVector& features);

/// One price per feature vector (24 for a day).
std::vector<double> predict_day(const TrainedPredictor& model,
                                std::span<const FeatureVector> features);

/// Text format, one item per line:
///   gridstudy-price-predictor 1
///   kind <nearest_neighbor|ridge>
///   columns <n>
///   <name> <used 0|1> <mean> <stddev>          (n lines)
///   intercept <v>  /  coef <v...>              (ridge)
///   exemplars <k>  then k lines "<price> <z...>" (nearest neighbour)
void write_predictor(const TrainedPredictor& model, std::ostream& out);
TrainedPredictor read_predictor(std::istream& in);

}  // namespace gridstudy::price
