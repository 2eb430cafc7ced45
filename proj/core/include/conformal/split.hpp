#pragma once

#include <array>
#include <cstdint>

#include "conformal/types.hpp"

namespace conformal {

/// Deterministic seeded three-way split. Part sizes are floor(n * fraction)
/// with the remainder assigned to the training part (dropped when the train
/// fraction is zero, so designated-empty parts stay empty). The shuffle is a
/// seeded Fisher-Yates permutation; each index list is returned sorted.
SplitPlan make_split(Eigen::Index n, const std::array<double, 3>& fractions,
                     std::uint64_t seed);

}  // namespace conformal
