#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semcloud/common/pilot_record.hpp"

namespace semcloud::learn {

/// Feature matrix (rows = samples) and target vector with column names.
struct Dataset {
  std::vector<std::string> features;
  std::string target;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(X.rows()); }
};

/// Selects pilot columns as features and target, optionally keeping only
/// one run kind. Throws SchemaError on unknown column names.
Dataset make_dataset(const std::vector<PilotRunRecord>& records, const std::vector<std::string>& features,
                     const std::string& target, std::optional<RunKind> kind = std::nullopt);

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows);

/// Seeded Fisher-Yates permutation of 0..n-1 (splitmix64 stream, so the
/// order does not depend on the standard library).
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

struct Split {
  Dataset train;
  Dataset test;
};

/// Shuffles with `seed`; the first round(train_fraction * n) rows train.
Split split(const Dataset& data, double train_fraction, std::uint64_t seed);

/// Per-column mean and standard deviation (1 where the column is constant).
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& X);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

/// Throws InvalidInput when any entry is NaN or infinite.
void require_finite(const Eigen::MatrixXd& X, const char* what);
void require_finite(const Eigen::VectorXd& x, const char* what);

}  // namespace semcloud::learn
