#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>

#include "hdnn/core_types.hpp"
#include "hdnn/distances.hpp"
#include "hdnn/features.hpp"

namespace hdnn {

struct CVReport {
    std::map<std::size_t, double> per_r;  // r -> leave-one-out error
    std::size_t chosen_r = 1;
    std::size_t n_evaluations = 0;  // held-out predictions made

    /// Smallest r attaining the minimum error.
    static CVReport from_table(std::map<std::size_t, double> per_r, std::size_t n_evaluations = 0);
};

/// Fraction of training points misclassified when each is held out in turn. Inside a fold the
/// remaining points get leave-one-out features of their own, so r <= min_j n_j - 2 is required.
double loocv_error(const LabeledDataset& train, const FeatureSpec& spec);

/// min(10, min_j n_j - 2).
std::size_t default_r_max(const LabeledDataset& train);

/// Evaluates r = 1..r_max and keeps the smallest minimizer.
CVReport select_r(const LabeledDataset& train, const FeatureSpec& base_spec, std::optional<std::size_t> r_max = std::nullopt);

enum class ScaleRule { KNN, CH, MCH };

/// Leave-one-out error of k-NN / CH / MCH. For CH and MCH the within-class means are recomputed
/// without the held-out point. `k` is used by KNN only.
double loocv_error(const LabeledDataset& train, ScaleRule rule, std::size_t k = 1);

// Precomputed-distance forms. `train_train[b]` is the square training matrix for spec.metrics[b].
// The held-out point is masked out of the active columns; nothing is recomputed.

double loocv_error(const FeatureSpec& spec, std::span<const DistanceMatrix* const> train_train,
                   std::span<const std::size_t> labels, std::size_t num_classes, std::size_t dim);

CVReport select_r(const FeatureSpec& base_spec, std::span<const DistanceMatrix* const> train_train,
                  std::span<const std::size_t> labels, std::size_t num_classes, std::size_t dim, std::size_t r_max);

/// `train_train` is L2 for KNN and MCH, SquaredL2 for CH.
double loocv_error(ScaleRule rule, const DistanceMatrix& train_train, std::span<const std::size_t> labels,
                   std::size_t num_classes, std::size_t k = 1);

}  // namespace hdnn
