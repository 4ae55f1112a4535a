#include "semcloud/learning/metrics.hpp"

#include <cmath>
#include <string>

#include "semcloud/errors.hpp"

namespace semcloud::learn {

double nmae(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size() || truths.empty()) {
    throw DimensionMismatch("nmae needs equal nonzero lengths, got " + std::to_string(predictions.size()) + " and " +
                            std::to_string(truths.size()));
  }
  double abs_err = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    abs_err += std::abs(truths[i] - predictions[i]);
    total += truths[i];
  }
  const double n = static_cast<double>(truths.size());
  const double mean = total / n;
  if (mean == 0.0) throw ZeroMeanTruth("nmae: mean of truths is zero");
  return (abs_err / n) / mean;
}

}  // namespace semcloud::learn
