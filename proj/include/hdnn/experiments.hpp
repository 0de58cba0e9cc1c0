#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdnn/core_types.hpp"
#include "hdnn/datagen.hpp"
#include "hdnn/feature_classifiers.hpp"
#include "hdnn/ingestion.hpp"

namespace hdnn {

struct ClassifierChoice {
    enum class Kind { KNN, CH, MCH, Feature, Bayes };

    Kind kind = Kind::KNN;
    std::size_t k = 1;
    NamedClassifier feature = NamedClassifier::MDist;

    /// Display name used in CSV output: "1NN", "3NN", "CH", "MCH", "MDist", ..., "Bayes".
    std::string name() const;

    friend bool operator==(const ClassifierChoice&, const ClassifierChoice&) = default;
};

/// Accepts "1nn", "knn" (k = 1), "<k>nn", "knn:<k>", "ch", "mch", "bayes" and the feature
/// classifier names, case-insensitively.
ClassifierChoice parse_classifier(std::string_view token);
std::vector<ClassifierChoice> parse_classifier_list(std::string_view comma_separated);

/// 1NN, MDist, MDist1, rMDist, rMDist1, rMDistC, TRAD, TRIPD1, TRIPD2, plus CH/MCH when asked.
std::vector<ClassifierChoice> default_classifiers(bool include_scale_adjusted);

struct ClassifierResult {
    std::string classifier;
    std::size_t n_errors = 0;
    std::size_t n_test = 0;
    double error = 0.0;
    std::optional<std::size_t> param_k;
    std::optional<std::size_t> param_r;
    double seconds = 0.0;
    /// Misclassified test points per true class (used by the theorem checks).
    std::vector<std::size_t> errors_by_class;
};

struct TrialReport {
    std::string example;
    std::size_t d = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::vector<ClassifierResult> results;

    const ClassifierResult& result(std::string_view classifier) const;
};

/// Fits and scores every classifier on one train/test pair. Distance matrices of all test and
/// training rows against the training rows are computed once per metric and shared; r for the
/// multi-neighbour variants is picked by leave-one-out on the training rows. `bayes` supplies
/// densities when a Bayes row is requested.
std::vector<ClassifierResult> evaluate_classifiers(const LabeledDataset& train, const LabeledDataset& test,
                                                   std::span<const ClassifierChoice> classifiers,
                                                   const ExampleSpec* bayes = nullptr,
                                                   std::optional<std::size_t> r_max = std::nullopt);

struct SweepConfig {
    int example = 1;
    std::vector<std::size_t> dims{10, 20, 50, 100, 200, 500};
    std::size_t n_train_per_class = 25;
    std::size_t n_test_per_class = 250;
    std::size_t reps = 20;
    std::vector<ClassifierChoice> classifiers;
    std::uint64_t base_seed = 0;
    std::optional<std::size_t> r_max;
    std::size_t jobs = 1;

    void validate() const;
};

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t d, std::size_t rep);

/// One (d, rep) cell: samples train and test sets from the trial seed and scores every classifier.
TrialReport run_trial(const SweepConfig& cfg, std::size_t d, std::size_t rep);

struct SummaryRow {
    std::string example;
    std::size_t d = 0;
    std::string classifier;
    std::size_t reps = 0;
    double mean_error = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(reps); 0 when reps == 1
};

/// Groups by (example, d, classifier) in first-appearance order.
std::vector<SummaryRow> aggregate(std::span<const TrialReport> trials);

struct SweepResult {
    std::vector<TrialReport> trials;  // ordered by (d, rep)
    std::vector<SummaryRow> summary;
};

/// Runs all dims x reps cells on up to cfg.jobs threads. Output does not depend on jobs.
SweepResult run_sweep(const SweepConfig& cfg);

struct BenchDataset {
    std::string name;
    std::filesystem::path path;
    std::optional<std::filesystem::path> second_path;  // e.g. an archive's separate test file, pooled with `path`
    DelimitedOptions options;
    std::size_t train_size = 0;
};

struct BenchConfig {
    std::vector<BenchDataset> datasets;
    std::size_t reps = 20;
    std::vector<ClassifierChoice> classifiers;
    std::uint64_t base_seed = 0;
    std::optional<std::size_t> r_max;
    std::size_t jobs = 1;

    void validate() const;
};

struct RobustnessTable {
    std::vector<std::string> datasets;
    std::vector<std::string> classifiers;
    Matrix errors;              // datasets x classifiers
    Matrix ratios;              // errors / per-dataset minimum; +inf where that minimum is 0
    std::vector<bool> undefined;  // per dataset: minimum error is 0, ratios not meaningful
};

RobustnessTable robustness(const Matrix& errors, std::vector<std::string> datasets, std::vector<std::string> classifiers);

struct BenchResult {
    std::vector<TrialReport> trials;  // ordered by (dataset, rep)
    std::vector<SummaryRow> summary;
    std::vector<Split> splits;        // same order as trials
    RobustnessTable robustness;
};

/// Seeded stratified resplits of each dataset, every classifier scored on each split.
BenchResult run_bench(const BenchConfig& cfg);

// CSV output. Numbers are written in shortest round-trip form so repeated runs are byte-identical.

/// example,d,rep,classifier,error,param_k,param_r,seconds. `seconds` is left empty unless
/// `with_seconds` (wall time is not reproducible).
void write_trials_csv(std::ostream& out, std::span<const TrialReport> trials, bool with_seconds);
/// example,d,classifier,reps,mean_error,std_error
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
/// d followed by one mean-error column per classifier.
void write_plot_data(std::ostream& out, std::span<const SummaryRow> rows);
/// dataset,classifier,error,ratio,undefined
void write_robustness_csv(std::ostream& out, const RobustnessTable& table);

std::string format_number(double v);

}  // namespace hdnn
