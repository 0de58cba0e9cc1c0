#include "hdnn/model_selection.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "hdnn/feature_classifiers.hpp"
#include "hdnn/scale_adjusted.hpp"

namespace hdnn {

CVReport CVReport::from_table(std::map<std::size_t, double> per_r, std::size_t n_evaluations) {
    if (per_r.empty()) throw ParameterError("cross-validation table is empty");
    CVReport report;
    report.chosen_r = per_r.begin()->first;
    double best = per_r.begin()->second;
    // map iterates r ascending, so strict < keeps the smallest minimizer
    for (const auto& [r, err] : per_r) {
        if (err < best) {
            best = err;
            report.chosen_r = r;
        }
    }
    report.per_r = std::move(per_r);
    report.n_evaluations = n_evaluations;
    return report;
}

namespace {

std::size_t min_count(std::span<const std::size_t> labels, std::size_t num_classes) {
    std::vector<std::size_t> counts(num_classes, 0);
    for (auto l : labels) ++counts.at(l);
    return *std::min_element(counts.begin(), counts.end());
}

void check_feasible(const FeatureSpec& spec, std::size_t smallest_class) {
    if (spec.kind == FeatureKind::MinDist && spec.r + 2 > smallest_class) {
        throw ParameterError("leave-one-out with r = " + std::to_string(spec.r) +
                             " needs every class to have at least " + std::to_string(spec.r + 2) +
                             " rows (smallest has " + std::to_string(smallest_class) + ")");
    }
    if (smallest_class < 3 && spec.kind != FeatureKind::AllPoints) {
        throw ParameterError("leave-one-out needs at least 3 rows per class");
    }
}

struct OwnedMatrices {
    std::vector<DistanceMatrix> mats;
    std::vector<const DistanceMatrix*> ptrs;

    OwnedMatrices(const LabeledDataset& train, const std::vector<Metric>& metrics) {
        for (auto m : metrics) mats.push_back(cross_distance_matrix(train.points(), train.points(), m));
        for (const auto& m : mats) ptrs.push_back(&m);
    }
};

}  // namespace

double loocv_error(const FeatureSpec& spec, std::span<const DistanceMatrix* const> train_train,
                   std::span<const std::size_t> labels, std::size_t num_classes, std::size_t dim) {
    spec.validate();
    check_feasible(spec, min_count(labels, num_classes));
    const auto all = ActiveSet::all(labels, num_classes);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto fold = all.without(i);
        const std::size_t held_out[] = {i};
        const auto pred = feature_nn_predict(spec, train_train, train_train, labels, fold, held_out, dim);
        if (pred.front().id != labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

double loocv_error(const LabeledDataset& train, const FeatureSpec& spec) {
    spec.validate();
    check_feasible(spec, train.min_class_size());
    OwnedMatrices m(train, spec.metrics);
    return loocv_error(spec, m.ptrs, train.labels(), train.num_classes(), train.dim());
}

std::size_t default_r_max(const LabeledDataset& train) {
    const std::size_t smallest = train.min_class_size();
    if (smallest < 3) throw ParameterError("choosing r by leave-one-out needs at least 3 rows per class");
    return std::min<std::size_t>(10, smallest - 2);
}

CVReport select_r(const FeatureSpec& base_spec, std::span<const DistanceMatrix* const> train_train,
                  std::span<const std::size_t> labels, std::size_t num_classes, std::size_t dim, std::size_t r_max) {
    if (base_spec.kind != FeatureKind::MinDist) throw ParameterError("r selection applies to minimum-distance features");
    const std::size_t smallest = min_count(labels, num_classes);
    if (r_max < 1 || r_max + 2 > smallest) {
        throw ParameterError("r_max = " + std::to_string(r_max) + " must lie in 1.." +
                             std::to_string(smallest < 3 ? 0 : smallest - 2));
    }
    std::map<std::size_t, double> table;
    for (std::size_t r = 1; r <= r_max; ++r) {
        FeatureSpec spec = base_spec;
        spec.r = r;
        table[r] = loocv_error(spec, train_train, labels, num_classes, dim);
    }
    return CVReport::from_table(std::move(table), r_max * labels.size());
}

CVReport select_r(const LabeledDataset& train, const FeatureSpec& base_spec, std::optional<std::size_t> r_max) {
    const std::size_t limit = r_max ? *r_max : default_r_max(train);
    OwnedMatrices m(train, base_spec.metrics);
    return select_r(base_spec, m.ptrs, train.labels(), train.num_classes(), train.dim(), limit);
}

double loocv_error(ScaleRule rule, const DistanceMatrix& train_train, std::span<const std::size_t> labels,
                   std::size_t num_classes, std::size_t k) {
    const auto all = ActiveSet::all(labels, num_classes);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto fold = all.without(i);
        ClassLabel pred;
        if (rule == ScaleRule::KNN) {
            pred = knn_vote(train_train.row(i), labels, fold, k);
        } else {
            const auto means = within_class_means(train_train, fold.by_class);
            pred = adjusted_nearest(train_train.row(i), fold, means.per_class);
        }
        if (pred.id != labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

double loocv_error(const LabeledDataset& train, ScaleRule rule, std::size_t k) {
    const Metric m = rule == ScaleRule::CH ? Metric::SquaredL2 : Metric::L2;
    const auto mat = cross_distance_matrix(train.points(), train.points(), m);
    return loocv_error(rule, mat, train.labels(), train.num_classes(), k);
}

}  // namespace hdnn
