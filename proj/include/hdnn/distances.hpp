#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hdnn/core_types.hpp"

namespace hdnn {

/// L1 = sum |a-b|, L2 = sqrt(sum (a-b)^2), SquaredL2 = sum (a-b)^2. Single pass, double accumulator.
double point_distance(std::span<const double> a, std::span<const double> b, Metric m);

/// n x m matrix of distances between two point sets. row_ids/col_ids map back to the source rows.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(Matrix values, Metric metric, std::vector<std::size_t> row_ids,
                   std::vector<std::size_t> col_ids);

    std::size_t rows() const noexcept { return values_.rows(); }
    std::size_t cols() const noexcept { return values_.cols(); }
    double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
    std::span<const double> row(std::size_t i) const { return values_.row(i); }

    const Matrix& values() const noexcept { return values_; }
    Metric metric() const noexcept { return metric_; }
    const std::vector<std::size_t>& row_ids() const noexcept { return row_ids_; }
    const std::vector<std::size_t>& col_ids() const noexcept { return col_ids_; }

private:
    Matrix values_;
    Metric metric_ = Metric::L2;
    std::vector<std::size_t> row_ids_;
    std::vector<std::size_t> col_ids_;
};

/// values(i, j) = point_distance(A.row(i), B.row(j), m). Rows are split across `jobs` threads;
/// each cell is computed independently so the result does not depend on the schedule.
DistanceMatrix cross_distance_matrix(const Matrix& A, const Matrix& B, Metric m, std::size_t jobs = 1);

/// Mean pairwise distance within each class, over unordered pairs s < t.
struct WithinClassMeans {
    Metric metric = Metric::L2;
    std::vector<double> per_class;
};

WithinClassMeans within_class_means(const LabeledDataset& ds, Metric m);

/// Same quantity read off a precomputed square training matrix, restricted to the active rows.
/// Pairs are visited in the same order as the dataset overload, so both agree bit-for-bit.
WithinClassMeans within_class_means(const DistanceMatrix& train_train, const ClassMembers& active);

}  // namespace hdnn
