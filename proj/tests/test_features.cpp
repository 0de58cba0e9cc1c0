#include <doctest.h>

#include <cmath>
#include <random>

#include "hdnn/datagen.hpp"
#include "hdnn/feature_classifiers.hpp"
#include "hdnn/features.hpp"
#include "oracles.hpp"

using namespace hdnn;

namespace {

oracle::Spec to_oracle(const FeatureSpec& s) {
    oracle::Spec o;
    o.kind = s.kind == FeatureKind::MinDist ? oracle::Kind::Min
             : s.kind == FeatureKind::AvgDist ? oracle::Kind::Avg
                                              : oracle::Kind::All;
    o.metrics.clear();
    for (auto m : s.metrics) o.metrics.push_back(m == Metric::L1 ? oracle::M::L1 : m == Metric::L2 ? oracle::M::L2 : oracle::M::Sq);
    o.r = s.r;
    o.normalize = s.normalize;
    return o;
}

const NamedClassifier kAll[] = {NamedClassifier::MDist,   NamedClassifier::MDist1, NamedClassifier::rMDist,
                                NamedClassifier::rMDist1, NamedClassifier::rMDistC, NamedClassifier::TRAD,
                                NamedClassifier::TRIPD1,  NamedClassifier::TRIPD2};

}  // namespace

TEST_CASE("spec construction and validation") {
    CHECK_FALSE(FeatureSpec::make(FeatureKind::MinDist, {Metric::L2}).normalize);
    CHECK(FeatureSpec::make(FeatureKind::MinDist, {Metric::L1, Metric::L2}).normalize);
    CHECK_THROWS_AS(FeatureSpec::make(FeatureKind::MinDist, {}).validate(), ParameterError);
    CHECK_THROWS_AS(FeatureSpec::make(FeatureKind::MinDist, {Metric::L2}, 0).validate(), ParameterError);
    CHECK(FeatureSpec::make(FeatureKind::AvgDist, {Metric::L2}, 2).r == 1);
    FeatureSpec bad{FeatureKind::AvgDist, {Metric::L2}, 2, false};
    CHECK_THROWS_AS(bad.validate(), ParameterError);

    CHECK(FeatureSpec::make(FeatureKind::MinDist, {Metric::L1, Metric::L2}, 3).width(2, 20) == 12);
    CHECK(FeatureSpec::make(FeatureKind::AvgDist, {Metric::L2}).width(3, 20) == 3);
    CHECK(FeatureSpec::make(FeatureKind::AllPoints, {Metric::L1}).width(2, 20) == 20);

    for (auto c : kAll) CHECK(parse_named_classifier(to_string(c)) == c);
    CHECK(parse_named_classifier("rmdistc") == NamedClassifier::rMDistC);
    CHECK_FALSE(parse_named_classifier("nope").has_value());
    CHECK(uses_neighbor_count(NamedClassifier::rMDist));
    CHECK_FALSE(uses_neighbor_count(NamedClassifier::MDist));
}

TEST_CASE("minimum-distance features on a hand example") {
    LabeledDataset train(Matrix::from_rows({{0}, {2}, {5}}), {0, 0, 1}, 2);
    const auto spec = FeatureSpec::make(FeatureKind::MinDist, {Metric::L1});
    const std::vector<std::size_t> self{1};
    auto f = extract_features(train, Matrix::from_rows({{2}}), spec, std::span<const std::size_t>(self));
    CHECK(f.rows.row(0)[0] == 2.0);
    CHECK(f.rows.row(0)[1] == 3.0);
    CHECK(f.loo);

    auto plain = extract_features(train, Matrix::from_rows({{2}}), spec);
    CHECK(plain.rows.row(0)[0] == 0.0);
    CHECK(plain.rows.row(0)[1] == 3.0);

    auto avg = extract_features(train, Matrix::from_rows({{1}}), FeatureSpec::make(FeatureKind::AvgDist, {Metric::L1}));
    CHECK(avg.rows.row(0)[0] == 1.0);
    CHECK(avg.rows.row(0)[1] == 4.0);
}

TEST_CASE("features equal the sort-based oracle, with and without exclusion") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> N;
    for (int t = 0; t < 30; ++t) {
        auto data = oracle::random_data(rng, {5, 4, 6}, 7, 0.4);
        auto ds = oracle::to_dataset(data);
        for (auto kind : {FeatureKind::MinDist, FeatureKind::AvgDist, FeatureKind::AllPoints}) {
            for (std::size_t r : {1, 3}) {
                if (kind != FeatureKind::MinDist && r != 1) continue;
                for (auto metrics : {std::vector<Metric>{Metric::L2}, std::vector<Metric>{Metric::L1, Metric::L2},
                                     std::vector<Metric>{Metric::SquaredL2}}) {
                    const auto spec = FeatureSpec::make(kind, metrics, r);
                    const auto os = to_oracle(spec);
                    auto tf = training_feature_matrix(ds, spec);
                    for (std::size_t i = 0; i < data.n(); ++i) {
                        const auto want = oracle::features(data, data.x[i], os, i);
                        const auto got = tf.rows.row(i);
                        REQUIRE(got.size() == want.size());
                        CHECK(std::equal(got.begin(), got.end(), want.begin()));
                    }
                    std::vector<double> z(7);
                    for (auto& x : z) x = N(rng);
                    auto q = extract_features(ds, Matrix::from_rows({z}), spec);
                    const auto want = oracle::features(data, z, os, data.n());
                    CHECK(std::equal(q.rows.row(0).begin(), q.rows.row(0).end(), want.begin()));
                }
            }
        }
    }
}

TEST_CASE("minimum-distance features are nondecreasing within each class block") {
    std::mt19937_64 rng(32);
    auto data = oracle::random_data(rng, {8, 8}, 5);
    auto ds = oracle::to_dataset(data);
    const auto spec = FeatureSpec::make(FeatureKind::MinDist, {Metric::L2}, 5);
    auto f = training_feature_matrix(ds, spec);
    for (std::size_t i = 0; i < f.rows.rows(); ++i) {
        auto row = f.rows.row(i);
        for (std::size_t b = 0; b < 2; ++b) {
            for (std::size_t k = 1; k < 5; ++k) CHECK(row[b * 5 + k - 1] <= row[b * 5 + k]);
        }
    }
}

TEST_CASE("features reject an r larger than a class allows") {
    LabeledDataset train(Matrix::from_rows({{0}, {1}, {2}, {5}, {6}}), {0, 0, 0, 1, 1}, 2);
    CHECK_THROWS_AS(training_feature_matrix(train, FeatureSpec::make(FeatureKind::MinDist, {Metric::L2}, 2)), ParameterError);
    CHECK_NOTHROW(training_feature_matrix(train, FeatureSpec::make(FeatureKind::MinDist, {Metric::L2}, 1)));
    CHECK_THROWS_AS(fit(train, FeatureSpec::make(FeatureKind::MinDist, {Metric::L2}, 2)), ParameterError);
    CHECK_THROWS_AS(extract_features(train, Matrix(1, 3), FeatureSpec{}), DimensionError);
}

TEST_CASE("energy distance") {
    Matrix A = Matrix::from_rows({{0, 1}, {2, 3}, {-1, 4}});
    CHECK(avg_coordinatewise_energy_distance(A, A) == 0.0);
    CHECK(avg_coordinatewise_energy_distance(Matrix::from_rows({{0}, {0}}), Matrix::from_rows({{1}, {1}})) == 2.0);
    CHECK_THROWS_AS(avg_coordinatewise_energy_distance(A, Matrix(2, 3)), DimensionError);

    std::mt19937_64 rng(33);
    std::normal_distribution<double> N;
    for (int t = 0; t < 20; ++t) {
        Matrix X(6, 3), Y(5, 3);
        for (auto* M : {&X, &Y}) {
            for (std::size_t i = 0; i < M->rows(); ++i) {
                for (auto& v : M->row(i)) v = N(rng);
            }
        }
        const double e = avg_coordinatewise_energy_distance(X, Y);
        CHECK(e >= 0.0);
        CHECK(e == doctest::Approx(avg_coordinatewise_energy_distance(Y, X)).epsilon(1e-12));
    }
}

TEST_CASE("every named classifier matches the full-refit pipeline oracle") {
    std::mt19937_64 rng(34);
    std::normal_distribution<double> N;
    for (int t = 0; t < 15; ++t) {
        auto data = oracle::random_data(rng, {6, 5}, 4, 0.6);
        auto ds = oracle::to_dataset(data);
        Matrix Z(12, 4);
        for (std::size_t i = 0; i < Z.rows(); ++i) {
            for (auto& v : Z.row(i)) v = 1.3 * N(rng);
        }
        for (auto c : kAll) {
            const auto spec = feature_spec_for(c, 2);
            auto model = fit(ds, spec);
            auto batch = predict_batch(model, Z);
            for (std::size_t i = 0; i < Z.rows(); ++i) {
                std::vector<double> z(Z.row(i).begin(), Z.row(i).end());
                CHECK(batch[i] == predict(model, z));
                CHECK(batch[i].id == oracle::feature_nn(data, z, to_oracle(spec)));
            }
        }
    }
}

TEST_CASE("feature 1-NN separates well separated classes") {
    auto train = sample_dataset(make_gaussian_pair(90, 10.0, 1.0), 5, 10, 1);
    auto test = sample_dataset(make_gaussian_pair(90, 10.0, 1.0), 5, 10, 2);
    for (auto c : kAll) {
        auto model = fit(train, feature_spec_for(c, 2));
        auto pred = predict_batch(model, test.points());
        for (std::size_t i = 0; i < test.size(); ++i) CHECK(pred[i].id == test.labels()[i]);
    }
}

TEST_CASE("precomputed-distance path agrees with the model path") {
    std::mt19937_64 rng(35);
    auto data = oracle::random_data(rng, {5, 5}, 3, 0.5);
    auto ds = oracle::to_dataset(data);
    Matrix Z(6, 3);
    std::normal_distribution<double> N;
    for (std::size_t i = 0; i < Z.rows(); ++i) {
        for (auto& v : Z.row(i)) v = N(rng);
    }
    for (auto c : kAll) {
        const auto spec = feature_spec_for(c, 2);
        std::vector<DistanceMatrix> tt, qt;
        for (auto m : spec.metrics) {
            tt.push_back(cross_distance_matrix(ds.points(), ds.points(), m));
            qt.push_back(cross_distance_matrix(Z, ds.points(), m));
        }
        std::vector<const DistanceMatrix*> tp, qp;
        for (std::size_t b = 0; b < tt.size(); ++b) {
            tp.push_back(&tt[b]);
            qp.push_back(&qt[b]);
        }
        std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5};
        auto got = feature_nn_predict(spec, tp, qp, ds.labels(), ActiveSet::all(ds.labels(), 2), rows, 3);
        CHECK(got == predict_batch(fit(ds, spec), Z));
    }
}
