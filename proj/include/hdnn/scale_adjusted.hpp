#pragma once

#include <cstddef>
#include <span>

#include "hdnn/core_types.hpp"
#include "hdnn/distances.hpp"

namespace hdnn {

/// Training set plus the within-class mean distances needed by the scale-adjusted rules.
/// CH subtracts half the mean squared-L2 spread of class j from ||z - x_ji||^2; MCH does the
/// same with plain L2 distances.
class ScaleAdjustedModel {
public:
    /// Requires n_j >= 2 for every class.
    static ScaleAdjustedModel fit(LabeledDataset train);

    const LabeledDataset& train() const noexcept { return train_; }
    const WithinClassMeans& means_sq() const noexcept { return means_sq_; }
    const WithinClassMeans& means_l2() const noexcept { return means_l2_; }

private:
    ScaleAdjustedModel(LabeledDataset train, WithinClassMeans sq, WithinClassMeans l2);

    LabeledDataset train_;
    WithinClassMeans means_sq_;
    WithinClassMeans means_l2_;
};

/// Majority vote among the k nearest training points under L2. Distance ties go to the lower
/// training row, vote ties to the lower class id.
ClassLabel knn_classify(const ScaleAdjustedModel& model, std::span<const double> z, std::size_t k);
ClassLabel ch_classify(const ScaleAdjustedModel& model, std::span<const double> z);
ClassLabel mch_classify(const ScaleAdjustedModel& model, std::span<const double> z);

/// Two-class offsets: CH picks class 0 iff d2^2 >= d1^2 + c1, MCH iff d2 >= d1 + c2.
struct BoundaryConstants {
    double c1 = 0.0;
    double c2 = 0.0;
};

BoundaryConstants boundary_constants(const ScaleAdjustedModel& model);

// Decision rules on a precomputed distance row (distances from one query to every training
// column). The model-level functions above and the experiment harness both go through these.

ClassLabel knn_vote(std::span<const double> l2_row, std::span<const std::size_t> train_labels,
                    const ActiveSet& active, std::size_t k);

/// argmin_j [ min_{i in class j} row[i] - adjustment[j] / 2 ], ties to the lower class id.
ClassLabel adjusted_nearest(std::span<const double> row, const ActiveSet& active,
                            std::span<const double> class_mean_distance);

}  // namespace hdnn
