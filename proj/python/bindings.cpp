#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hdnn/distances.hpp"
#include "hdnn/experiments.hpp"
#include "hdnn/feature_classifiers.hpp"
#include "hdnn/model_selection.hpp"
#include "hdnn/scale_adjusted.hpp"
#include "hdnn/theory_checks.hpp"

namespace py = pybind11;
using namespace hdnn;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<std::size_t, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

Array to_array(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

std::vector<std::size_t> to_labels(const Labels& y) {
    if (y.ndim() != 1) throw DimensionError("labels must be a 1-d array");
    return {y.data(), y.data() + y.size()};
}

LabeledDataset dataset(const Array& X, const Labels& y) { return LabeledDataset(to_matrix(X), to_labels(y)); }

py::array_t<std::size_t> label_array(const std::vector<ClassLabel>& pred) {
    py::array_t<std::size_t> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) out.mutable_data()[i] = pred[i].id;
    return out;
}

py::array_t<std::size_t> predict_rows(const Array& X, const Labels& y, const Array& Z, const std::string& classifier,
                                      std::optional<std::size_t> r) {
    const auto choice = parse_classifier(classifier);
    auto train = dataset(X, y);
    const auto queries = to_matrix(Z);
    if (queries.cols() != train.dim()) throw DimensionError("query dimension does not match the training set");
    std::vector<ClassLabel> pred;
    switch (choice.kind) {
        case ClassifierChoice::Kind::Feature: {
            auto spec = feature_spec_for(choice.feature, r.value_or(1));
            if (uses_neighbor_count(choice.feature) && !r) spec.r = select_r(train, spec).chosen_r;
            pred = predict_batch(fit(std::move(train), spec), queries);
            break;
        }
        case ClassifierChoice::Kind::Bayes:
            throw ParameterError("Bayes needs known class densities; use sweep");
        default: {
            const auto model = ScaleAdjustedModel::fit(std::move(train));
            for (std::size_t i = 0; i < queries.rows(); ++i) {
                const auto z = queries.row(i);
                if (choice.kind == ClassifierChoice::Kind::KNN) pred.push_back(knn_classify(model, z, choice.k));
                if (choice.kind == ClassifierChoice::Kind::CH) pred.push_back(ch_classify(model, z));
                if (choice.kind == ClassifierChoice::Kind::MCH) pred.push_back(mch_classify(model, z));
            }
        }
    }
    return label_array(pred);
}

py::list results_to_list(const std::vector<ClassifierResult>& results) {
    py::list out;
    for (const auto& r : results) {
        py::dict d;
        d["classifier"] = r.classifier;
        d["error"] = r.error;
        d["n_errors"] = r.n_errors;
        d["n_test"] = r.n_test;
        d["param_k"] = r.param_k;
        d["param_r"] = r.param_r;
        d["errors_by_class"] = r.errors_by_class;
        out.append(d);
    }
    return out;
}

std::vector<ClassifierChoice> choices(const std::vector<std::string>& names) {
    std::vector<ClassifierChoice> out;
    for (const auto& n : names) out.push_back(parse_classifier(n));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Distance-based classifiers for high-dimension, low-sample-size data";

    py::register_exception<Error>(m, "HdnnError", PyExc_ValueError);

    m.def(
        "distance_matrix",
        [](const Array& A, const Array& B, const std::string& metric) {
            return to_array(cross_distance_matrix(to_matrix(A), to_matrix(B), parse_metric(metric)).values());
        },
        py::arg("A"), py::arg("B"), py::arg("metric") = "l2");

    m.def(
        "within_class_means",
        [](const Array& X, const Labels& y, const std::string& metric) {
            return within_class_means(dataset(X, y), parse_metric(metric)).per_class;
        },
        py::arg("X"), py::arg("y"), py::arg("metric") = "l2");

    m.def("predict", &predict_rows, py::arg("X"), py::arg("y"), py::arg("Z"), py::arg("classifier"),
          py::arg("r") = py::none(), "Fit on (X, y) and label the rows of Z.");

    m.def(
        "features",
        [](const Array& X, const Labels& y, const std::string& classifier, std::size_t r) {
            const auto c = parse_named_classifier(classifier);
            if (!c) throw ParameterError("not a feature classifier: " + classifier);
            return to_array(training_feature_matrix(dataset(X, y), feature_spec_for(*c, r)).rows);
        },
        py::arg("X"), py::arg("y"), py::arg("classifier") = "MDist", py::arg("r") = 1,
        "Leave-one-out training features.");

    m.def(
        "select_r",
        [](const Array& X, const Labels& y, const std::string& classifier, std::optional<std::size_t> r_max) {
            const auto c = parse_named_classifier(classifier);
            if (!c || !uses_neighbor_count(*c)) throw ParameterError("not an r-variant classifier: " + classifier);
            const auto report = select_r(dataset(X, y), feature_spec_for(*c), r_max);
            return py::make_tuple(report.chosen_r, report.per_r);
        },
        py::arg("X"), py::arg("y"), py::arg("classifier") = "rMDist", py::arg("r_max") = py::none());

    m.def(
        "loocv_error",
        [](const Array& X, const Labels& y, const std::string& classifier) {
            const auto c = parse_classifier(classifier);
            const auto train = dataset(X, y);
            if (c.kind == ClassifierChoice::Kind::Feature) return loocv_error(train, feature_spec_for(c.feature));
            if (c.kind == ClassifierChoice::Kind::CH) return loocv_error(train, ScaleRule::CH);
            if (c.kind == ClassifierChoice::Kind::MCH) return loocv_error(train, ScaleRule::MCH);
            if (c.kind == ClassifierChoice::Kind::KNN) return loocv_error(train, ScaleRule::KNN, c.k);
            throw ParameterError("no leave-one-out error for " + classifier);
        },
        py::arg("X"), py::arg("y"), py::arg("classifier"));

    m.def(
        "evaluate",
        [](const Array& X, const Labels& y, const Array& Z, const Labels& yz, const std::vector<std::string>& classifiers) {
            return results_to_list(evaluate_classifiers(dataset(X, y), dataset(Z, yz), choices(classifiers)));
        },
        py::arg("X"), py::arg("y"), py::arg("Z"), py::arg("z_labels"), py::arg("classifiers"));

    m.def(
        "sample",
        [](int example, std::size_t d, std::size_t n_per_class, std::uint64_t seed) {
            const auto ds = sample_dataset(make_example(example), d, n_per_class, seed);
            py::array_t<std::size_t> y(ds.size());
            std::copy(ds.labels().begin(), ds.labels().end(), y.mutable_data());
            return py::make_tuple(to_array(ds.points()), y);
        },
        py::arg("example"), py::arg("d"), py::arg("n_per_class"), py::arg("seed") = 0);

    m.def(
        "energy_distance",
        [](const Array& A, const Array& B) { return avg_coordinatewise_energy_distance(to_matrix(A), to_matrix(B)); },
        py::arg("A"), py::arg("B"));

    m.def(
        "sweep",
        [](int example, std::vector<std::size_t> dims, std::size_t n_train, std::size_t n_test, std::size_t reps,
           const std::vector<std::string>& classifiers, std::uint64_t seed, std::size_t jobs) {
            SweepConfig cfg;
            cfg.example = example;
            cfg.dims = std::move(dims);
            cfg.n_train_per_class = n_train;
            cfg.n_test_per_class = n_test;
            cfg.reps = reps;
            cfg.classifiers = choices(classifiers);
            cfg.base_seed = seed;
            cfg.jobs = jobs;
            py::list rows;
            for (const auto& r : run_sweep(cfg).summary) {
                py::dict d;
                d["d"] = r.d;
                d["classifier"] = r.classifier;
                d["reps"] = r.reps;
                d["mean_error"] = r.mean_error;
                d["std_error"] = r.std_error;
                rows.append(d);
            }
            return rows;
        },
        py::arg("example"), py::arg("dims"), py::arg("n_train") = 25, py::arg("n_test") = 250, py::arg("reps") = 20,
        py::arg("classifiers") = std::vector<std::string>{"1nn", "mdist"}, py::arg("seed") = 0, py::arg("jobs") = 1);

    m.def(
        "robustness",
        [](const Array& errors) {
            const auto e = to_matrix(errors);
            std::vector<std::string> rows(e.rows()), cols(e.cols());
            const auto t = robustness(e, rows, cols);
            return py::make_tuple(to_array(t.ratios), t.undefined);
        },
        py::arg("errors"));

    m.def(
        "verify",
        [](const std::string& check, std::optional<std::size_t> d, std::optional<std::size_t> n, std::size_t reps,
           std::uint64_t seed) {
            CheckParams p;
            p.d = d;
            p.n = n;
            p.reps = reps;
            p.seed = seed;
            const auto report = run_check(check, p);
            py::list lines;
            for (const auto& l : report.lines) lines.append(py::make_tuple(l.label, l.observed, l.expected, l.pass));
            return py::make_tuple(report.passed(), lines);
        },
        py::arg("check"), py::arg("d") = py::none(), py::arg("n") = py::none(), py::arg("reps") = 5,
        py::arg("seed") = 0);
}
