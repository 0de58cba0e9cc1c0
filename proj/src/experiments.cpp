#include "hdnn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "hdnn/distances.hpp"
#include "hdnn/model_selection.hpp"
#include "hdnn/scale_adjusted.hpp"

namespace hdnn {

// ---------------------------------------------------------------------------------------------
// Classifier names

std::string ClassifierChoice::name() const {
    switch (kind) {
        case Kind::KNN: return std::to_string(k) + "NN";
        case Kind::CH: return "CH";
        case Kind::MCH: return "MCH";
        case Kind::Feature: return std::string(to_string(feature));
        case Kind::Bayes: return "Bayes";
    }
    return "?";
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::optional<std::size_t> parse_size(std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

}  // namespace

ClassifierChoice parse_classifier(std::string_view token) {
    const std::string t = lower(token);
    ClassifierChoice c;
    if (t == "ch") {
        c.kind = ClassifierChoice::Kind::CH;
        return c;
    }
    if (t == "mch") {
        c.kind = ClassifierChoice::Kind::MCH;
        return c;
    }
    if (t == "bayes") {
        c.kind = ClassifierChoice::Kind::Bayes;
        return c;
    }
    if (t == "knn" || t == "nn") return c;
    if (t.starts_with("knn:")) {
        if (auto k = parse_size(std::string_view(t).substr(4)); k && *k > 0) {
            c.k = *k;
            return c;
        }
    }
    if (t.size() > 2 && t.ends_with("nn")) {
        if (auto k = parse_size(std::string_view(t).substr(0, t.size() - 2)); k && *k > 0) {
            c.k = *k;
            return c;
        }
    }
    if (auto f = parse_named_classifier(token)) {
        c.kind = ClassifierChoice::Kind::Feature;
        c.feature = *f;
        return c;
    }
    throw ParameterError("unknown classifier '" + std::string(token) + "'");
}

std::vector<ClassifierChoice> parse_classifier_list(std::string_view comma_separated) {
    std::vector<ClassifierChoice> out;
    std::size_t start = 0;
    while (start <= comma_separated.size()) {
        const auto pos = comma_separated.find(',', start);
        auto token = comma_separated.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
        while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
        if (!token.empty()) out.push_back(parse_classifier(token));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (out.empty()) throw ParameterError("classifier list is empty");
    return out;
}

std::vector<ClassifierChoice> default_classifiers(bool include_scale_adjusted) {
    std::vector<ClassifierChoice> out{ClassifierChoice{}};
    if (include_scale_adjusted) {
        out.push_back({ClassifierChoice::Kind::CH});
        out.push_back({ClassifierChoice::Kind::MCH});
    }
    for (auto f : {NamedClassifier::MDist, NamedClassifier::MDist1, NamedClassifier::rMDist, NamedClassifier::rMDist1,
                   NamedClassifier::rMDistC, NamedClassifier::TRAD, NamedClassifier::TRIPD1, NamedClassifier::TRIPD2}) {
        out.push_back({ClassifierChoice::Kind::Feature, 1, f});
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Scoring one train/test pair

const ClassifierResult& TrialReport::result(std::string_view classifier) const {
    for (const auto& r : results) {
        if (r.classifier == classifier) return r;
    }
    throw ParameterError("trial has no result for '" + std::string(classifier) + "'");
}

namespace {

/// Distances of every train and test row to the training rows, one matrix per metric, computed
/// on first use. Rows 0..n-1 are the training rows themselves.
class SharedDistances {
public:
    SharedDistances(const LabeledDataset& train, const LabeledDataset& test)
        : all_(Matrix::vstack(train.points(), test.points())), train_(train) {}

    const DistanceMatrix& get(Metric m) {
        auto it = cache_.find(m);
        if (it == cache_.end()) it = cache_.emplace(m, cross_distance_matrix(all_, train_.points(), m)).first;
        return it->second;
    }

    std::vector<const DistanceMatrix*> for_spec(const FeatureSpec& spec) {
        std::vector<const DistanceMatrix*> out;
        for (auto m : spec.metrics) out.push_back(&get(m));
        return out;
    }

private:
    Matrix all_;
    const LabeledDataset& train_;
    std::map<Metric, DistanceMatrix> cache_;
};

}  // namespace

std::vector<ClassifierResult> evaluate_classifiers(const LabeledDataset& train, const LabeledDataset& test,
                                                   std::span<const ClassifierChoice> classifiers,
                                                   const ExampleSpec* bayes, std::optional<std::size_t> r_max) {
    if (train.dim() != test.dim()) throw DimensionError("train and test sets have different dimensions");
    if (train.num_classes() != test.num_classes()) throw DimensionError("train and test sets have different class counts");

    const std::size_t n = train.size();
    const std::size_t m = test.size();
    const std::size_t J = train.num_classes();
    const auto active = ActiveSet::all(train.labels(), J);
    std::vector<std::size_t> test_rows(m);
    for (std::size_t i = 0; i < m; ++i) test_rows[i] = n + i;

    SharedDistances dist(train, test);
    std::vector<ClassifierResult> results;
    results.reserve(classifiers.size());

    for (const auto& choice : classifiers) {
        const auto start = std::chrono::steady_clock::now();
        ClassifierResult res;
        res.classifier = choice.name();
        std::vector<ClassLabel> pred;
        pred.reserve(m);

        switch (choice.kind) {
            case ClassifierChoice::Kind::KNN: {
                if (choice.k >= n + 1) throw ParameterError("k = " + std::to_string(choice.k) + " exceeds the training size");
                const auto& l2 = dist.get(Metric::L2);
                for (auto q : test_rows) pred.push_back(knn_vote(l2.row(q), train.labels(), active, choice.k));
                res.param_k = choice.k;
                break;
            }
            case ClassifierChoice::Kind::CH:
            case ClassifierChoice::Kind::MCH: {
                const Metric metric = choice.kind == ClassifierChoice::Kind::CH ? Metric::SquaredL2 : Metric::L2;
                const auto& mat = dist.get(metric);
                const auto means = within_class_means(mat, active.by_class);
                for (auto q : test_rows) pred.push_back(adjusted_nearest(mat.row(q), active, means.per_class));
                break;
            }
            case ClassifierChoice::Kind::Feature: {
                FeatureSpec spec = feature_spec_for(choice.feature);
                auto mats = dist.for_spec(spec);
                if (uses_neighbor_count(choice.feature)) {
                    const std::size_t limit = r_max ? *r_max : default_r_max(train);
                    const auto report = select_r(spec, mats, train.labels(), J, train.dim(), limit);
                    spec.r = report.chosen_r;
                }
                if (spec.kind == FeatureKind::MinDist) res.param_r = spec.r;
                pred = feature_nn_predict(spec, mats, mats, train.labels(), active, test_rows, train.dim());
                break;
            }
            case ClassifierChoice::Kind::Bayes: {
                if (bayes == nullptr || !bayes->log_densities) {
                    throw ParameterError("Bayes classifier requested without class densities");
                }
                for (std::size_t i = 0; i < m; ++i) pred.push_back(bayes_classify(*bayes, test.points().row(i)));
                break;
            }
        }

        res.n_test = m;
        res.errors_by_class.assign(J, 0);
        for (std::size_t i = 0; i < m; ++i) {
            if (pred[i].id != test.labels()[i]) {
                ++res.n_errors;
                ++res.errors_by_class[test.labels()[i]];
            }
        }
        res.error = static_cast<double>(res.n_errors) / static_cast<double>(m);
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        results.push_back(std::move(res));
    }
    return results;
}

// ---------------------------------------------------------------------------------------------
// Sweeps

void SweepConfig::validate() const {
    const auto spec = make_example(example);
    if (dims.empty()) throw ParameterError("sweep needs at least one dimension");
    for (auto d : dims) {
        if (d < 1) throw ParameterError("dimensions must be positive");
        if (spec.requires_even_dim && d % 2 != 0) {
            throw ParameterError("Example " + std::to_string(example) + " needs even dimensions, got " + std::to_string(d));
        }
    }
    if (reps < 1) throw ParameterError("reps must be at least 1");
    if (n_train_per_class < 2) throw ParameterError("need at least 2 training rows per class");
    if (n_test_per_class < 1) throw ParameterError("need at least 1 test row per class");
    if (classifiers.empty()) throw ParameterError("no classifiers selected");
    const std::size_t n_train = n_train_per_class * spec.num_classes();
    for (const auto& c : classifiers) {
        if (c.kind == ClassifierChoice::Kind::KNN && c.k > n_train) {
            throw ParameterError("k = " + std::to_string(c.k) + " exceeds the " + std::to_string(n_train) + " training rows");
        }
        if (c.kind == ClassifierChoice::Kind::Feature && uses_neighbor_count(c.feature)) {
            if (n_train_per_class < 3) throw ParameterError(c.name() + " needs at least 3 training rows per class");
            if (r_max && (*r_max < 1 || *r_max + 2 > n_train_per_class)) {
                throw ParameterError("r_max must lie in 1.." + std::to_string(n_train_per_class - 2));
            }
        }
    }
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t d, std::size_t rep) {
    return mix_seed({base_seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(rep)});
}

TrialReport run_trial(const SweepConfig& cfg, std::size_t d, std::size_t rep) {
    const auto spec = make_example(cfg.example);
    TrialReport report;
    report.example = std::to_string(cfg.example);
    report.d = d;
    report.rep = rep;
    report.seed = trial_seed(cfg.base_seed, d, rep);
    const auto train = sample_dataset(spec, d, cfg.n_train_per_class, report.seed, 0);
    const auto test = sample_dataset(spec, d, cfg.n_test_per_class, report.seed, cfg.n_train_per_class);
    report.results = evaluate_classifiers(train, test, cfg.classifiers, &spec, cfg.r_max);
    return report;
}

namespace {

/// Runs task(i) for i in [0, count) on up to `jobs` threads. The first exception is rethrown.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<SummaryRow> aggregate(std::span<const TrialReport> trials) {
    struct Acc {
        std::vector<double> errors;
    };
    std::vector<SummaryRow> rows;
    std::vector<Acc> accs;
    std::map<std::tuple<std::string, std::size_t, std::string>, std::size_t> index;
    for (const auto& t : trials) {
        for (const auto& r : t.results) {
            auto key = std::make_tuple(t.example, t.d, r.classifier);
            auto [it, inserted] = index.try_emplace(key, rows.size());
            if (inserted) {
                rows.push_back(SummaryRow{t.example, t.d, r.classifier, 0, 0.0, 0.0});
                accs.emplace_back();
            }
            accs[it->second].errors.push_back(r.error);
        }
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& e = accs[k].errors;
        const auto reps = static_cast<double>(e.size());
        double mean = 0.0;
        for (double v : e) mean += v;
        mean /= reps;
        double ss = 0.0;
        for (double v : e) ss += (v - mean) * (v - mean);
        rows[k].reps = e.size();
        rows[k].mean_error = mean;
        rows[k].std_error = e.size() > 1 ? std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps) : 0.0;
    }
    return rows;
}

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const std::size_t cells = cfg.dims.size() * cfg.reps;
    SweepResult result;
    result.trials.resize(cells);
    parallel_for(cells, cfg.jobs, [&](std::size_t i) {
        result.trials[i] = run_trial(cfg, cfg.dims[i / cfg.reps], i % cfg.reps);
    });
    result.summary = aggregate(result.trials);
    return result;
}

// ---------------------------------------------------------------------------------------------
// Benchmarks

void BenchConfig::validate() const {
    if (datasets.empty()) throw ParameterError("no datasets given");
    if (reps < 1) throw ParameterError("reps must be at least 1");
    if (classifiers.empty()) throw ParameterError("no classifiers selected");
    for (const auto& c : classifiers) {
        if (c.kind == ClassifierChoice::Kind::Bayes) {
            throw ParameterError("the Bayes classifier needs known densities and is not available for benchmark data");
        }
    }
    for (const auto& ds : datasets) {
        if (ds.train_size == 0) throw ParameterError("dataset '" + ds.name + "' needs a positive train size");
    }
}

RobustnessTable robustness(const Matrix& errors, std::vector<std::string> datasets, std::vector<std::string> classifiers) {
    if (errors.rows() != datasets.size() || errors.cols() != classifiers.size()) {
        throw DimensionError("robustness: error matrix shape does not match the labels");
    }
    RobustnessTable table{std::move(datasets), std::move(classifiers), errors, Matrix(errors.rows(), errors.cols()), {}};
    table.undefined.assign(errors.rows(), false);
    for (std::size_t i = 0; i < errors.rows(); ++i) {
        const auto row = errors.row(i);
        const double best = *std::min_element(row.begin(), row.end());
        if (best <= 0.0) {
            table.undefined[i] = true;
            for (std::size_t t = 0; t < row.size(); ++t) table.ratios(i, t) = std::numeric_limits<double>::infinity();
            continue;
        }
        for (std::size_t t = 0; t < row.size(); ++t) table.ratios(i, t) = row[t] / best;
    }
    return table;
}

BenchResult run_bench(const BenchConfig& cfg) {
    cfg.validate();
    std::vector<RawTable> tables;
    for (const auto& ds : cfg.datasets) {
        auto a = load_delimited(ds.path, ds.options);
        std::optional<RawTable> b;
        if (ds.second_path) b = load_delimited(*ds.second_path, ds.options);
        tables.push_back(merge_tables(a, b));
    }

    const std::size_t cells = cfg.datasets.size() * cfg.reps;
    BenchResult result;
    result.trials.resize(cells);
    std::vector<std::optional<Split>> splits(cells);
    parallel_for(cells, cfg.jobs, [&](std::size_t i) {
        const std::size_t di = i / cfg.reps;
        const std::size_t rep = i % cfg.reps;
        const auto& ds = cfg.datasets[di];
        const auto seed = mix_seed({cfg.base_seed, static_cast<std::uint64_t>(di), static_cast<std::uint64_t>(rep)});
        auto split = merge_and_split(tables[di], std::nullopt, ds.train_size, seed);
        TrialReport report;
        report.example = ds.name;
        report.d = split.train.dim();
        report.rep = rep;
        report.seed = seed;
        report.results = evaluate_classifiers(split.train, split.test, cfg.classifiers, nullptr, cfg.r_max);
        result.trials[i] = std::move(report);
        splits[i] = std::move(split);
    });
    for (auto& s : splits) result.splits.push_back(std::move(*s));
    result.summary = aggregate(result.trials);

    std::vector<std::string> names;
    for (const auto& ds : cfg.datasets) names.push_back(ds.name);
    std::vector<std::string> clf;
    for (const auto& c : cfg.classifiers) clf.push_back(c.name());
    Matrix errors(names.size(), clf.size());
    for (const auto& row : result.summary) {
        const auto di = static_cast<std::size_t>(std::find(names.begin(), names.end(), row.example) - names.begin());
        const auto ci = static_cast<std::size_t>(std::find(clf.begin(), clf.end(), row.classifier) - clf.begin());
        errors(di, ci) = row.mean_error;
    }
    result.robustness = robustness(errors, std::move(names), std::move(clf));
    return result;
}

// ---------------------------------------------------------------------------------------------
// CSV

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::string opt(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

void write_trials_csv(std::ostream& out, std::span<const TrialReport> trials, bool with_seconds) {
    out << "example,d,rep,classifier,error,param_k,param_r,seconds\n";
    for (const auto& t : trials) {
        for (const auto& r : t.results) {
            out << t.example << ',' << t.d << ',' << t.rep << ',' << r.classifier << ',' << format_number(r.error) << ','
                << opt(r.param_k) << ',' << opt(r.param_r) << ',' << (with_seconds ? format_number(r.seconds) : "")
                << '\n';
        }
    }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
    out << "example,d,classifier,reps,mean_error,std_error\n";
    for (const auto& r : rows) {
        out << r.example << ',' << r.d << ',' << r.classifier << ',' << r.reps << ',' << format_number(r.mean_error) << ','
            << format_number(r.std_error) << '\n';
    }
}

void write_plot_data(std::ostream& out, std::span<const SummaryRow> rows) {
    std::vector<std::string> classifiers;
    std::vector<std::size_t> dims;
    std::map<std::pair<std::size_t, std::string>, double> value;
    for (const auto& r : rows) {
        if (std::find(classifiers.begin(), classifiers.end(), r.classifier) == classifiers.end()) {
            classifiers.push_back(r.classifier);
        }
        if (std::find(dims.begin(), dims.end(), r.d) == dims.end()) dims.push_back(r.d);
        value[{r.d, r.classifier}] = r.mean_error;
    }
    out << 'd';
    for (const auto& c : classifiers) out << ',' << c;
    out << '\n';
    for (auto d : dims) {
        out << d;
        for (const auto& c : classifiers) {
            auto it = value.find({d, c});
            out << ',' << (it == value.end() ? std::string() : format_number(it->second));
        }
        out << '\n';
    }
}

void write_robustness_csv(std::ostream& out, const RobustnessTable& table) {
    out << "dataset,classifier,error,ratio,undefined\n";
    for (std::size_t i = 0; i < table.datasets.size(); ++i) {
        for (std::size_t t = 0; t < table.classifiers.size(); ++t) {
            out << table.datasets[i] << ',' << table.classifiers[t] << ',' << format_number(table.errors(i, t)) << ','
                << format_number(table.ratios(i, t)) << ',' << (table.undefined[i] ? 1 : 0) << '\n';
        }
    }
}

}  // namespace hdnn
