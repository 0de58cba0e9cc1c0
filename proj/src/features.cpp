#include "hdnn/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace hdnn {

FeatureSpec FeatureSpec::make(FeatureKind kind, std::vector<Metric> metrics, std::size_t r) {
    FeatureSpec spec;
    spec.kind = kind;
    spec.normalize = metrics.size() > 1;
    spec.metrics = std::move(metrics);
    spec.r = kind == FeatureKind::MinDist ? r : 1;
    return spec;
}

void FeatureSpec::validate() const {
    if (metrics.empty()) throw ParameterError("feature spec needs at least one metric");
    if (r < 1) throw ParameterError("feature spec needs r >= 1");
    if (kind != FeatureKind::MinDist && r != 1) throw ParameterError("r is only meaningful for minimum-distance features");
}

std::size_t FeatureSpec::width(std::size_t num_classes, std::size_t n_columns) const {
    switch (kind) {
        case FeatureKind::MinDist: return num_classes * r * metrics.size();
        case FeatureKind::AvgDist: return num_classes * metrics.size();
        case FeatureKind::AllPoints: return n_columns * metrics.size();
    }
    return 0;
}

namespace {

double normalizer(Metric m, std::size_t dim) {
    const auto d = static_cast<double>(dim);
    return m == Metric::L2 ? std::sqrt(d) : d;
}

}  // namespace

void feature_vector(const FeatureSpec& spec, std::span<const std::span<const double>> rows, const ActiveSet& active,
                    std::optional<std::size_t> self, std::size_t dim, std::vector<double>& out) {
    out.clear();
    std::vector<std::pair<double, std::size_t>> scratch;
    for (std::size_t b = 0; b < spec.metrics.size(); ++b) {
        const auto row = rows[b];
        const double scale = spec.normalize ? normalizer(spec.metrics[b], dim) : 1.0;
        auto emit = [&](double v) { out.push_back(spec.normalize ? v / scale : v); };

        if (spec.kind == FeatureKind::AllPoints) {
            for (auto c : active.columns) {
                if (self && c == *self) continue;
                emit(row[c]);
            }
            continue;
        }

        for (std::size_t j = 0; j < active.by_class.size(); ++j) {
            scratch.clear();
            for (auto c : active.by_class[j]) {
                if (self && c == *self) continue;
                scratch.emplace_back(row[c], c);
            }
            if (spec.kind == FeatureKind::AvgDist) {
                if (scratch.empty()) {
                    throw ParameterError("class " + std::to_string(j) + " has no rows left for average distances");
                }
                double sum = 0.0;
                for (const auto& [v, c] : scratch) sum += v;
                emit(sum / static_cast<double>(scratch.size()));
                continue;
            }
            if (scratch.size() < spec.r) {
                throw ParameterError("r = " + std::to_string(spec.r) + " exceeds the " + std::to_string(scratch.size()) +
                                     " rows available in class " + std::to_string(j));
            }
            // pairs compare by (distance, column), which makes equal distances stable on row index
            std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(spec.r), scratch.end());
            for (std::size_t k = 0; k < spec.r; ++k) emit(scratch[k].first);
        }
    }
}

Matrix loo_training_features(const FeatureSpec& spec, std::span<const DistanceMatrix* const> train_train,
                             const ActiveSet& active, std::size_t dim) {
    spec.validate();
    if (train_train.size() != spec.metrics.size()) throw DimensionError("one distance matrix per metric is required");
    const std::size_t n = active.columns.size();
    const std::size_t width = spec.width(active.by_class.size(), n == 0 ? 0 : n - 1);
    Matrix out(n, width);
    std::vector<std::span<const double>> rows(train_train.size());
    std::vector<double> buf;
    for (std::size_t k = 0; k < n; ++k) {
        const auto c = active.columns[k];
        for (std::size_t b = 0; b < train_train.size(); ++b) rows[b] = train_train[b]->row(c);
        feature_vector(spec, rows, active, c, dim, buf);
        std::copy(buf.begin(), buf.end(), out.row(k).begin());
    }
    return out;
}

std::size_t nearest_feature_row(const FeatureSpec& spec, const Matrix& train_features,
                                std::span<const double> query_features) {
    const std::size_t n = train_features.rows();
    if (n == 0) throw ParameterError("no training feature rows");
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();

    if (spec.kind != FeatureKind::AllPoints) {
        if (query_features.size() != train_features.cols()) {
            throw DimensionError("query feature width does not match the training features");
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double dist = point_distance(train_features.row(k), query_features, Metric::L2);
            if (dist < best_dist) {
                best_dist = dist;
                best = k;
            }
        }
        return best;
    }

    // Query covers all n columns per block, each training row covers n-1 (its own column removed).
    const std::size_t blocks = spec.metrics.size();
    if (query_features.size() != blocks * n || train_features.cols() != blocks * (n - 1)) {
        throw DimensionError("all-points feature widths are inconsistent with the training rows");
    }
    for (std::size_t k = 0; k < n; ++k) {
        auto t = train_features.row(k);
        double acc = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            const double* q = query_features.data() + b * n;
            const double* tr = t.data() + b * (n - 1);
            std::size_t pos = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == k) continue;
                const double diff = tr[pos++] - q[c];
                acc += diff * diff;
            }
        }
        const double dist = std::sqrt(acc);
        if (dist < best_dist) {
            best_dist = dist;
            best = k;
        }
    }
    return best;
}

FeatureMatrix extract_features(const LabeledDataset& train, const Matrix& queries, const FeatureSpec& spec,
                               std::optional<std::span<const std::size_t>> loo_self) {
    spec.validate();
    if (queries.cols() != train.dim()) {
        throw DimensionError("queries have dimension " + std::to_string(queries.cols()) + ", training set has " +
                             std::to_string(train.dim()));
    }
    if (loo_self && loo_self->size() != queries.rows()) {
        throw DimensionError("leave-one-out map must have one entry per query row");
    }
    std::vector<DistanceMatrix> mats;
    mats.reserve(spec.metrics.size());
    for (auto m : spec.metrics) mats.push_back(cross_distance_matrix(queries, train.points(), m));

    const auto active = ActiveSet::all(train.labels(), train.num_classes());
    const std::size_t width = spec.width(train.num_classes(), loo_self ? train.size() - 1 : train.size());
    FeatureMatrix fm{Matrix(queries.rows(), width), spec, loo_self.has_value()};
    std::vector<std::span<const double>> rows(mats.size());
    std::vector<double> buf;
    for (std::size_t q = 0; q < queries.rows(); ++q) {
        for (std::size_t b = 0; b < mats.size(); ++b) rows[b] = mats[b].row(q);
        std::optional<std::size_t> self;
        if (loo_self) {
            self = (*loo_self)[q];
            if (*self >= train.size()) throw DimensionError("leave-one-out index out of range");
        }
        feature_vector(spec, rows, active, self, train.dim(), buf);
        std::copy(buf.begin(), buf.end(), fm.rows.row(q).begin());
    }
    return fm;
}

FeatureMatrix training_feature_matrix(const LabeledDataset& train, const FeatureSpec& spec) {
    std::vector<std::size_t> identity(train.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
    return extract_features(train, train.points(), spec, std::span<const std::size_t>(identity));
}

double avg_coordinatewise_energy_distance(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.cols()) throw DimensionError("energy distance: samples have different dimensions");
    if (A.rows() < 2 || B.rows() < 2) throw ParameterError("energy distance needs at least two rows per sample");

    auto mean_l1 = [](const Matrix& X, const Matrix& Y) {
        double sum = 0.0;
        for (std::size_t i = 0; i < X.rows(); ++i) {
            for (std::size_t j = 0; j < Y.rows(); ++j) sum += point_distance(X.row(i), Y.row(j), Metric::L1);
        }
        return sum / (static_cast<double>(X.rows()) * static_cast<double>(Y.rows()));
    };
    const double cross = mean_l1(A, B);
    const double within_a = mean_l1(A, A);
    const double within_b = mean_l1(B, B);
    return (2.0 * cross - within_a - within_b) / static_cast<double>(A.cols());
}

}  // namespace hdnn
