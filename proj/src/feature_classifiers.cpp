#include "hdnn/feature_classifiers.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace hdnn {

namespace {

struct Binding {
    NamedClassifier id;
    std::string_view name;
};

constexpr Binding kBindings[] = {
    {NamedClassifier::MDist, "MDist"},     {NamedClassifier::MDist1, "MDist1"},
    {NamedClassifier::rMDist, "rMDist"},   {NamedClassifier::rMDist1, "rMDist1"},
    {NamedClassifier::rMDistC, "rMDistC"}, {NamedClassifier::TRAD, "TRAD"},
    {NamedClassifier::TRIPD1, "TRIPD1"},   {NamedClassifier::TRIPD2, "TRIPD2"},
};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

std::string_view to_string(NamedClassifier c) {
    for (const auto& b : kBindings) {
        if (b.id == c) return b.name;
    }
    return "?";
}

std::optional<NamedClassifier> parse_named_classifier(std::string_view name) {
    for (const auto& b : kBindings) {
        if (iequals(b.name, name)) return b.id;
    }
    return std::nullopt;
}

FeatureSpec feature_spec_for(NamedClassifier c, std::size_t r) {
    switch (c) {
        case NamedClassifier::MDist: return FeatureSpec::make(FeatureKind::MinDist, {Metric::L2}, 1);
        case NamedClassifier::MDist1: return FeatureSpec::make(FeatureKind::MinDist, {Metric::L1}, 1);
        case NamedClassifier::rMDist: return FeatureSpec::make(FeatureKind::MinDist, {Metric::L2}, r);
        case NamedClassifier::rMDist1: return FeatureSpec::make(FeatureKind::MinDist, {Metric::L1}, r);
        case NamedClassifier::rMDistC: return FeatureSpec::make(FeatureKind::MinDist, {Metric::L1, Metric::L2}, r);
        case NamedClassifier::TRAD: return FeatureSpec::make(FeatureKind::AvgDist, {Metric::L2});
        case NamedClassifier::TRIPD1: return FeatureSpec::make(FeatureKind::AllPoints, {Metric::L1});
        case NamedClassifier::TRIPD2: return FeatureSpec::make(FeatureKind::AllPoints, {Metric::L2});
    }
    throw ParameterError("unknown feature classifier");
}

bool uses_neighbor_count(NamedClassifier c) {
    return c == NamedClassifier::rMDist || c == NamedClassifier::rMDist1 || c == NamedClassifier::rMDistC;
}

std::vector<ClassLabel> feature_nn_predict(const FeatureSpec& spec, std::span<const DistanceMatrix* const> train_train,
                                           std::span<const DistanceMatrix* const> query_train,
                                           std::span<const std::size_t> train_labels, const ActiveSet& active,
                                           std::span<const std::size_t> query_rows, std::size_t dim) {
    const Matrix train_features = loo_training_features(spec, train_train, active, dim);
    std::vector<ClassLabel> out;
    out.reserve(query_rows.size());
    std::vector<std::span<const double>> rows(query_train.size());
    std::vector<double> buf;
    for (auto q : query_rows) {
        for (std::size_t b = 0; b < query_train.size(); ++b) rows[b] = query_train[b]->row(q);
        feature_vector(spec, rows, active, std::nullopt, dim, buf);
        const auto k = nearest_feature_row(spec, train_features, buf);
        out.push_back(ClassLabel{train_labels[active.columns[k]]});
    }
    return out;
}

FeatureNNModel::FeatureNNModel(LabeledDataset train, FeatureMatrix features)
    : source_train_(std::move(train)), train_features_(std::move(features)) {}

FeatureNNModel fit(LabeledDataset train, const FeatureSpec& spec) {
    spec.validate();
    if (spec.kind == FeatureKind::MinDist && spec.r + 1 > train.min_class_size()) {
        throw ParameterError("r = " + std::to_string(spec.r) + " needs every class to have at least " +
                             std::to_string(spec.r + 1) + " rows (smallest has " +
                             std::to_string(train.min_class_size()) + ")");
    }
    std::vector<DistanceMatrix> mats;
    std::vector<const DistanceMatrix*> ptrs;
    for (auto m : spec.metrics) mats.push_back(cross_distance_matrix(train.points(), train.points(), m));
    for (const auto& m : mats) ptrs.push_back(&m);
    const auto active = ActiveSet::all(train.labels(), train.num_classes());
    FeatureMatrix features{loo_training_features(spec, ptrs, active, train.dim()), spec, true};
    return FeatureNNModel(std::move(train), std::move(features));
}

std::vector<double> FeatureNNModel::featurize(std::span<const double> z) const {
    const auto& train = source_train_;
    if (z.size() != train.dim()) {
        throw DimensionError("query has dimension " + std::to_string(z.size()) + ", model expects " +
                             std::to_string(train.dim()));
    }
    const auto& spec = train_features_.spec;
    std::vector<std::vector<double>> dist(spec.metrics.size(), std::vector<double>(train.size()));
    std::vector<std::span<const double>> rows;
    for (std::size_t b = 0; b < spec.metrics.size(); ++b) {
        for (std::size_t i = 0; i < train.size(); ++i) dist[b][i] = point_distance(z, train.points().row(i), spec.metrics[b]);
        rows.emplace_back(dist[b]);
    }
    std::vector<double> out;
    feature_vector(spec, rows, ActiveSet::all(train.labels(), train.num_classes()), std::nullopt, train.dim(), out);
    return out;
}

ClassLabel predict(const FeatureNNModel& model, std::span<const double> z) {
    const auto features = model.featurize(z);
    const auto k = nearest_feature_row(model.spec(), model.train_features().rows, features);
    return ClassLabel{model.train_labels()[k]};
}

std::vector<ClassLabel> predict_batch(const FeatureNNModel& model, const Matrix& Z) {
    if (Z.cols() != model.source_train().dim()) {
        throw DimensionError("batch has dimension " + std::to_string(Z.cols()) + ", model expects " +
                             std::to_string(model.source_train().dim()));
    }
    std::vector<ClassLabel> out;
    out.reserve(Z.rows());
    for (std::size_t i = 0; i < Z.rows(); ++i) out.push_back(predict(model, Z.row(i)));
    return out;
}

}  // namespace hdnn
