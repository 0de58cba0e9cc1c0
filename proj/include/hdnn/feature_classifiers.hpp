#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hdnn/core_types.hpp"
#include "hdnn/features.hpp"

namespace hdnn {

enum class NamedClassifier { MDist, MDist1, rMDist, rMDist1, rMDistC, TRAD, TRIPD1, TRIPD2 };

std::string_view to_string(NamedClassifier c);
std::optional<NamedClassifier> parse_named_classifier(std::string_view name);  // case-insensitive

/// Feature construction behind each named classifier. `r` is ignored by the r = 1 and
/// non-MinDist variants.
FeatureSpec feature_spec_for(NamedClassifier c, std::size_t r = 1);

/// True for the variants whose r is chosen by leave-one-out cross-validation.
bool uses_neighbor_count(NamedClassifier c);

/// 1-NN (L2) in a distance-feature space. Training rows carry leave-one-out features;
/// queries are featurized against the full training set.
class FeatureNNModel {
public:
    const FeatureSpec& spec() const noexcept { return train_features_.spec; }
    const FeatureMatrix& train_features() const noexcept { return train_features_; }
    const std::vector<std::size_t>& train_labels() const noexcept { return source_train_.labels(); }
    const LabeledDataset& source_train() const noexcept { return source_train_; }
    Metric feature_metric() const noexcept { return Metric::L2; }

    /// Features of one query point (no exclusion).
    std::vector<double> featurize(std::span<const double> z) const;

private:
    friend FeatureNNModel fit(LabeledDataset train, const FeatureSpec& spec);
    FeatureNNModel(LabeledDataset train, FeatureMatrix features);

    LabeledDataset source_train_;
    FeatureMatrix train_features_;
};

/// Requires spec.r <= min_j n_j - 1.
FeatureNNModel fit(LabeledDataset train, const FeatureSpec& spec);
ClassLabel predict(const FeatureNNModel& model, std::span<const double> z);
std::vector<ClassLabel> predict_batch(const FeatureNNModel& model, const Matrix& Z);

/// Fit-and-predict over precomputed distances: `train_train[b]` and `query_train[b]` are the
/// matrices for spec.metrics[b]. Training columns outside `active` are ignored. Returns one label
/// per entry of `query_rows` (row indices into the query matrices).
std::vector<ClassLabel> feature_nn_predict(const FeatureSpec& spec, std::span<const DistanceMatrix* const> train_train,
                                           std::span<const DistanceMatrix* const> query_train,
                                           std::span<const std::size_t> train_labels, const ActiveSet& active,
                                           std::span<const std::size_t> query_rows, std::size_t dim);

}  // namespace hdnn
