#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hdnn/core_types.hpp"
#include "hdnn/distances.hpp"

namespace hdnn {

enum class FeatureKind {
    MinDist,    // r smallest distances to each class
    AvgDist,    // mean distance to each class
    AllPoints,  // distance to every training point
};

/// Declarative description of a distance-feature map. One block of features per metric, in order.
struct FeatureSpec {
    FeatureKind kind = FeatureKind::MinDist;
    std::vector<Metric> metrics{Metric::L2};
    std::size_t r = 1;
    /// Divide L1 and SquaredL2 blocks by d and L2 blocks by sqrt(d).
    bool normalize = false;

    /// normalize defaults to true exactly when more than one metric is mixed.
    static FeatureSpec make(FeatureKind kind, std::vector<Metric> metrics, std::size_t r = 1);

    void validate() const;
    /// Number of features for a training set with J classes and n columns.
    std::size_t width(std::size_t num_classes, std::size_t n_columns) const;

    friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

struct FeatureMatrix {
    Matrix rows;
    FeatureSpec spec;
    bool loo = false;

    std::size_t width() const noexcept { return rows.cols(); }
};

/// Features of `queries` against `train`. When `loo_self` is given, query row q is treated as
/// training row loo_self[q] and that row is excluded from its own features.
FeatureMatrix extract_features(const LabeledDataset& train, const Matrix& queries, const FeatureSpec& spec,
                               std::optional<std::span<const std::size_t>> loo_self = std::nullopt);

/// extract_features(train, train.points(), spec, identity).
FeatureMatrix training_feature_matrix(const LabeledDataset& train, const FeatureSpec& spec);

/// (1/d) * [2 E|X-Y|_1 - E|X-X'|_1 - E|Y-Y'|_1] with the empirical distributions of A and B
/// plugged in (all ordered pairs, V-statistic form). Zero when A and B hold the same rows.
double avg_coordinatewise_energy_distance(const Matrix& A, const Matrix& B);

// Precomputed-distance primitives shared by model fitting, leave-one-out selection and the
// experiment harness. `rows` holds, per metric of the spec, the distances from one source point
// to every training column.

/// Feature vector of one source point against the active training columns. `self`, if set, is
/// the training column that is the source point itself and is skipped.
void feature_vector(const FeatureSpec& spec, std::span<const std::span<const double>> rows, const ActiveSet& active,
                    std::optional<std::size_t> self, std::size_t dim, std::vector<double>& out);

/// Leave-one-out features of every active training column; row k belongs to active.columns[k].
/// `train_train` holds one square training matrix per metric of the spec.
Matrix loo_training_features(const FeatureSpec& spec, std::span<const DistanceMatrix* const> train_train,
                             const ActiveSet& active, std::size_t dim);

/// Position (into the rows of `train_features`) of the nearest training feature row under L2,
/// ties to the lower position. For AllPoints, the query's entry for training column k is dropped
/// when comparing against row k, so both vectors cover the same n-1 columns.
std::size_t nearest_feature_row(const FeatureSpec& spec, const Matrix& train_features,
                                std::span<const double> query_features);

}  // namespace hdnn
