#include "hdnn/scale_adjusted.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace hdnn {

ScaleAdjustedModel::ScaleAdjustedModel(LabeledDataset train, WithinClassMeans sq, WithinClassMeans l2)
    : train_(std::move(train)), means_sq_(std::move(sq)), means_l2_(std::move(l2)) {}

ScaleAdjustedModel ScaleAdjustedModel::fit(LabeledDataset train) {
    auto sq = within_class_means(train, Metric::SquaredL2);
    auto l2 = within_class_means(train, Metric::L2);
    return ScaleAdjustedModel(std::move(train), std::move(sq), std::move(l2));
}

namespace {

std::vector<double> distance_row(const LabeledDataset& train, std::span<const double> z, Metric m) {
    if (z.size() != train.dim()) {
        throw DimensionError("query has dimension " + std::to_string(z.size()) + ", model expects " +
                             std::to_string(train.dim()));
    }
    std::vector<double> row(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) row[i] = point_distance(z, train.points().row(i), m);
    return row;
}

}  // namespace

ClassLabel knn_vote(std::span<const double> l2_row, std::span<const std::size_t> train_labels,
                    const ActiveSet& active, std::size_t k) {
    const std::size_t n = active.columns.size();
    if (k == 0 || k > n) {
        throw ParameterError("k = " + std::to_string(k) + " must lie in 1.." + std::to_string(n));
    }
    std::vector<std::size_t> order(active.columns);
    auto closer = [&](std::size_t a, std::size_t b) {
        return l2_row[a] < l2_row[b] || (l2_row[a] == l2_row[b] && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);

    std::vector<std::size_t> votes(active.by_class.size(), 0);
    for (std::size_t i = 0; i < k; ++i) ++votes[train_labels[order[i]]];
    // max_element returns the first maximum, i.e. the lowest class id among tied votes
    return ClassLabel{static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin())};
}

ClassLabel adjusted_nearest(std::span<const double> row, const ActiveSet& active,
                            std::span<const double> class_mean_distance) {
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < active.by_class.size(); ++j) {
        const double half = 0.5 * class_mean_distance[j];
        double score = std::numeric_limits<double>::infinity();
        for (auto i : active.by_class[j]) score = std::min(score, row[i] - half);
        if (score < best_score) {
            best_score = score;
            best = j;
        }
    }
    return ClassLabel{best};
}

ClassLabel knn_classify(const ScaleAdjustedModel& model, std::span<const double> z, std::size_t k) {
    const auto& train = model.train();
    if (k == 0 || k > train.size()) {
        throw ParameterError("k = " + std::to_string(k) + " must lie in 1.." + std::to_string(train.size()));
    }
    auto row = distance_row(train, z, Metric::L2);
    return knn_vote(row, train.labels(), ActiveSet::all(train.labels(), train.num_classes()), k);
}

ClassLabel ch_classify(const ScaleAdjustedModel& model, std::span<const double> z) {
    const auto& train = model.train();
    auto row = distance_row(train, z, Metric::SquaredL2);
    return adjusted_nearest(row, ActiveSet::all(train.labels(), train.num_classes()), model.means_sq().per_class);
}

ClassLabel mch_classify(const ScaleAdjustedModel& model, std::span<const double> z) {
    const auto& train = model.train();
    auto row = distance_row(train, z, Metric::L2);
    return adjusted_nearest(row, ActiveSet::all(train.labels(), train.num_classes()), model.means_l2().per_class);
}

BoundaryConstants boundary_constants(const ScaleAdjustedModel& model) {
    if (model.train().num_classes() != 2) {
        throw ParameterError("boundary constants are defined for two classes only, got " +
                             std::to_string(model.train().num_classes()));
    }
    const auto& sq = model.means_sq().per_class;
    const auto& l2 = model.means_l2().per_class;
    return {0.5 * (sq[1] - sq[0]), 0.5 * (l2[1] - l2[0])};
}

}  // namespace hdnn
