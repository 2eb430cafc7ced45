#pragma once

#include <span>

namespace conformal {

/// Inflated empirical quantile used by every conformal calibration step:
/// the k-th smallest value with k = ceil(delta * (n + 1)). When k > n the
/// quantile is undefined and +infinity is returned, so downstream regions
/// become unbounded rather than silently clamping to the sample maximum.
/// Ties occupy consecutive ranks; no randomized tie-breaking.
double inflated_empirical_quantile(std::span<const double> values, double delta);

}  // namespace conformal
