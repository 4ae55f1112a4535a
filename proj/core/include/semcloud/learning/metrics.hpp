#pragma once

#include <span>

namespace semcloud::learn {

/// Mean absolute error divided by the mean truth. Throws DimensionMismatch
/// (different or zero lengths) and ZeroMeanTruth.
double nmae(std::span<const double> predictions, std::span<const double> truths);

}  // namespace semcloud::learn
