#include "conformal/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "conformal/rng.hpp"

namespace conformal {

SplitPlan make_split(Eigen::Index n, const std::array<double, 3>& fractions,
                     std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("split too small");
  double sum = 0.0;
  for (double f : fractions) {
    if (f < 0.0) throw std::invalid_argument("fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("fractions must sum to 1");

  const auto nd = static_cast<double>(n);
  Eigen::Index n_train = static_cast<Eigen::Index>(std::floor(nd * fractions[0]));
  const Eigen::Index n_cal1 = static_cast<Eigen::Index>(std::floor(nd * fractions[1]));
  const Eigen::Index n_cal2 = static_cast<Eigen::Index>(std::floor(nd * fractions[2]));
  if (fractions[0] > 0.0) n_train = n - n_cal1 - n_cal2;

  if ((fractions[0] > 0.0 && n_train == 0) || (fractions[1] > 0.0 && n_cal1 == 0) ||
      (fractions[2] > 0.0 && n_cal2 == 0))
    throw std::invalid_argument("split too small");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  SplitPlan plan;
  plan.seed = seed;
  auto it = order.begin();
  plan.train_idx.assign(it, it + n_train);
  it += n_train;
  plan.cal1_idx.assign(it, it + n_cal1);
  it += n_cal1;
  plan.cal2_idx.assign(it, it + n_cal2);
  std::sort(plan.train_idx.begin(), plan.train_idx.end());
  std::sort(plan.cal1_idx.begin(), plan.cal1_idx.end());
  std::sort(plan.cal2_idx.begin(), plan.cal2_idx.end());
  return plan;
}

}  // namespace conformal
