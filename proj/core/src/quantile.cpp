#include "conformal/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace conformal {

double inflated_empirical_quantile(std::span<const double> values, double delta) {
  if (values.empty()) throw std::invalid_argument("empty score set");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("invalid level");
  const std::size_t n = values.size();
  const double rank = std::ceil(delta * static_cast<double>(n + 1));
  if (rank > static_cast<double>(n)) return std::numeric_limits<double>::infinity();
  const std::size_t k = static_cast<std::size_t>(rank);
  std::vector<double> work(values.begin(), values.end());
  std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(k - 1), work.end());
  return work[k - 1];
}

}  // namespace conformal
