#pragma once

#include <memory>
#include <string>
#include <vector>

#include "conformal/metrics.hpp"
#include "conformal/types.hpp"

namespace conformal {

/// A fitted predictor together with the metadata a prediction run needs.
/// Serialized as versioned JSON; reloading reproduces identical predictions.
struct ModelEnvelope {
  Method method = Method::kCqhr;
  MiscoverageConfig config = MiscoverageConfig::symmetric(0.1);
  std::uint64_t seed = 0;
  std::vector<std::string> covariate_names;
  std::vector<std::string> target_names;
  std::shared_ptr<const RegionPredictor> predictor;
};

std::string model_to_json(const ModelEnvelope& envelope, int indent = 2);
ModelEnvelope model_from_json(const std::string& text);

void save_model(const std::string& path, const ModelEnvelope& envelope);
ModelEnvelope load_model(const std::string& path);

}  // namespace conformal
