#include "hdnn/distances.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace hdnn {

double point_distance(std::span<const double> a, std::span<const double> b, Metric m) {
    if (a.size() != b.size()) {
        throw DimensionError("point_distance: lengths " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()) + " differ");
    }
    const std::size_t d = a.size();
    double acc = 0.0;
    switch (m) {
        case Metric::L1:
            for (std::size_t q = 0; q < d; ++q) acc += std::abs(a[q] - b[q]);
            return acc;
        case Metric::L2:
            for (std::size_t q = 0; q < d; ++q) {
                const double diff = a[q] - b[q];
                acc += diff * diff;
            }
            return std::sqrt(acc);
        case Metric::SquaredL2:
            for (std::size_t q = 0; q < d; ++q) {
                const double diff = a[q] - b[q];
                acc += diff * diff;
            }
            return acc;
    }
    return acc;
}

DistanceMatrix::DistanceMatrix(Matrix values, Metric metric, std::vector<std::size_t> row_ids,
                               std::vector<std::size_t> col_ids)
    : values_(std::move(values)), metric_(metric), row_ids_(std::move(row_ids)), col_ids_(std::move(col_ids)) {
    if (row_ids_.size() != values_.rows() || col_ids_.size() != values_.cols()) {
        throw DimensionError("distance matrix index maps do not match its shape");
    }
}

DistanceMatrix cross_distance_matrix(const Matrix& A, const Matrix& B, Metric m, std::size_t jobs) {
    if (A.cols() != B.cols()) {
        throw DimensionError("cross_distance_matrix: dimensions " + std::to_string(A.cols()) + " and " +
                             std::to_string(B.cols()) + " differ");
    }
    Matrix values(A.rows(), B.rows());
    auto fill_rows = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto a = A.row(i);
            for (std::size_t j = 0; j < B.rows(); ++j) values(i, j) = point_distance(a, B.row(j), m);
        }
    };
    jobs = std::max<std::size_t>(1, std::min(jobs, A.rows()));
    if (jobs == 1) {
        fill_rows(0, A.rows());
    } else {
        std::vector<std::jthread> workers;
        const std::size_t chunk = (A.rows() + jobs - 1) / jobs;
        for (std::size_t begin = 0; begin < A.rows(); begin += chunk) {
            workers.emplace_back(fill_rows, begin, std::min(A.rows(), begin + chunk));
        }
    }
    std::vector<std::size_t> row_ids(A.rows()), col_ids(B.rows());
    for (std::size_t i = 0; i < row_ids.size(); ++i) row_ids[i] = i;
    for (std::size_t j = 0; j < col_ids.size(); ++j) col_ids[j] = j;
    return DistanceMatrix(std::move(values), m, std::move(row_ids), std::move(col_ids));
}

WithinClassMeans within_class_means(const DistanceMatrix& train_train, const ClassMembers& active) {
    WithinClassMeans out{train_train.metric(), std::vector<double>(active.size(), 0.0)};
    for (std::size_t j = 0; j < active.size(); ++j) {
        const auto& rows = active[j];
        if (rows.size() < 2) {
            throw InsufficientClassSizeError("class " + std::to_string(j) + " has " + std::to_string(rows.size()) +
                                             " rows; within-class mean distance needs at least 2");
        }
        double sum = 0.0;
        for (std::size_t s = 0; s < rows.size(); ++s) {
            for (std::size_t t = s + 1; t < rows.size(); ++t) sum += train_train(rows[s], rows[t]);
        }
        const double pairs = 0.5 * static_cast<double>(rows.size()) * static_cast<double>(rows.size() - 1);
        out.per_class[j] = sum / pairs;
    }
    return out;
}

WithinClassMeans within_class_means(const LabeledDataset& ds, Metric m) {
    for (std::size_t j = 0; j < ds.num_classes(); ++j) {
        if (ds.class_counts()[j] < 2) {
            throw InsufficientClassSizeError("class " + std::to_string(j) +
                                             " has fewer than 2 rows; within-class mean distance is undefined");
        }
    }
    return within_class_means(cross_distance_matrix(ds.points(), ds.points(), m), partition_by_class(ds));
}

}  // namespace hdnn
