#include "hdnn/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "hdnn/datagen.hpp"
#include "hdnn/distances.hpp"
#include "hdnn/errors.hpp"
#include "hdnn/experiments.hpp"
#include "hdnn/features.hpp"

namespace hdnn {

bool CheckReport::passed() const {
    return !lines.empty() && std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.pass; });
}

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{"lemma1", "theorem1", "theorem2", "theorem3", "energy"};
    return names;
}

namespace {

CheckLine at_most(std::string label, double observed, double bound) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "<= %g", bound);
    return {std::move(label), observed, buf, observed <= bound};
}

CheckLine at_least(std::string label, double observed, double bound) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ">= %g", bound);
    return {std::move(label), observed, buf, observed >= bound};
}

struct CellErrors {
    SweepResult sweep;
    std::size_t n_test_per_class = 0;

    double mean(std::string_view classifier) const {
        for (const auto& row : sweep.summary) {
            if (row.classifier == classifier) return row.mean_error;
        }
        throw ParameterError("no summary row for " + std::string(classifier));
    }

    /// Fraction of class j's test points misclassified, pooled over reps.
    double class_error(std::string_view classifier, std::size_t j) const {
        std::size_t wrong = 0;
        for (const auto& t : sweep.trials) wrong += t.result(classifier).errors_by_class.at(j);
        return static_cast<double>(wrong) / static_cast<double>(n_test_per_class * sweep.trials.size());
    }
};

CellErrors run_cell(int example, std::size_t d, const CheckParams& p, std::size_t n_train,
                    const std::vector<std::string>& classifiers) {
    SweepConfig cfg;
    cfg.example = example;
    cfg.dims = {d};
    cfg.n_train_per_class = n_train;
    cfg.n_test_per_class = p.n_test;
    cfg.reps = p.reps;
    cfg.base_seed = mix_seed({p.seed, static_cast<std::uint64_t>(example)});
    cfg.jobs = p.jobs;
    for (const auto& c : classifiers) cfg.classifiers.push_back(parse_classifier(c));
    return {run_sweep(cfg), p.n_test};
}

std::string tag(int example, std::string_view what) { return "Example " + std::to_string(example) + " " + std::string(what); }

CheckReport lemma1(const CheckParams& p) {
    const std::size_t d = p.d.value_or(2000);
    const std::size_t n = p.n.value_or(200);
    CheckReport report{"lemma1", {}};
    for (int example = 1; example <= 3; ++example) {
        const auto spec = make_example(example);
        const auto data = sample_dataset(spec, d, 2 * n, mix_seed({p.seed, 0x1E77A1ULL}), 0);
        const auto members = partition_by_class(data);
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t i = j; i < 2; ++i) {
                // row k of class j against row n + k of class i: independent pairs
                double sum = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    sum += point_distance(data.points().row(members[j][k]), data.points().row(members[i][n + k]),
                                          Metric::SquaredL2);
                }
                const double observed = sum / static_cast<double>(n) / static_cast<double>(d);
                const double expected = spec.limits.sigma_sq[j] + spec.limits.sigma_sq[i] + spec.limits.nu_sq(j, i);
                char target[64];
                std::snprintf(target, sizeof target, "%g +/- 5%%", expected);
                report.lines.push_back({tag(example, "E|X-Y|^2/d, classes " + std::to_string(j + 1) + "," +
                                                         std::to_string(i + 1)),
                                        observed, target, std::abs(observed - expected) <= 0.05 * expected});
            }
        }
    }
    return report;
}

CheckReport theorem1(const CheckParams& p) {
    const std::size_t d = p.d.value_or(1000);
    const std::size_t n = p.n.value_or(25);
    CheckReport report{"theorem1", {}};

    const auto e1 = run_cell(1, d, p, n, {"1nn", "ch", "mch"});
    for (auto c : {"1NN", "CH", "MCH"}) report.lines.push_back(at_most(tag(1, c) + " error", e1.mean(c), 0.05));

    const auto e2 = run_cell(2, d, p, n, {"1nn", "ch", "mch"});
    for (auto c : {"CH", "MCH"}) report.lines.push_back(at_most(tag(2, c) + " error", e2.mean(c), 0.05));
    report.lines.push_back(at_least(tag(2, "1NN error on the larger-variance class"), e2.class_error("1NN", 1), 0.90));

    const auto e3 = run_cell(3, d, p, n, {"1nn", "ch", "mch"});
    report.lines.push_back(at_most(tag(3, "MCH error"), e3.mean("MCH"), 0.05));
    report.lines.push_back(at_least(tag(3, "1NN error on the larger-variance class"), e3.class_error("1NN", 1), 0.90));
    // informational: the smaller-variance class is classified correctly
    const double small = e3.class_error("1NN", 0);
    report.lines.push_back({tag(3, "1NN error on the smaller-variance class"), small, "any (informational)", true});
    return report;
}

CheckReport theorem2(const CheckParams& p) {
    const std::size_t d = p.d.value_or(500);
    const std::size_t n = p.n.value_or(25);
    CheckReport report{"theorem2", {}};
    for (int example = 1; example <= 3; ++example) {
        const auto e = run_cell(example, d, p, n, {"mdist"});
        report.lines.push_back(at_most(tag(example, "MDist error"), e.mean("MDist"), 0.05));
    }
    return report;
}

CheckReport theorem3(const CheckParams& p) {
    const std::size_t d = p.d.value_or(500);
    const std::size_t n = p.n.value_or(25);
    CheckReport report{"theorem3", {}};
    const auto e7 = run_cell(7, d, p, n, {"mdist1"});
    report.lines.push_back(at_most(tag(7, "MDist1 error"), e7.mean("MDist1"), 0.05));
    const auto e8 = run_cell(8, d, p, n, {"mdist1", "mdist"});
    const double gap = e8.mean("MDist") - e8.mean("MDist1");
    report.lines.push_back({tag(8, "MDist error minus MDist1 error"), gap, "> 0", gap > 0.0});
    return report;
}

CheckReport energy(const CheckParams& p) {
    const std::size_t d = p.d.value_or(200);
    const std::size_t n = p.n.value_or(500);
    CheckReport report{"energy", {}};

    const auto same = sample_dataset(make_gaussian_pair(0, 0.0, 1.0), 1, n, mix_seed({p.seed, 0xE0ULL}), 0);
    // both classes of a (0, 1) Gaussian pair are N(0, 1)
    const auto m = partition_by_class(same);
    const double null_stat =
        avg_coordinatewise_energy_distance(same.points().select_rows(m[0]), same.points().select_rows(m[1]));
    report.lines.push_back({"identical N(0,1) samples, d = 1", null_stat, "|x| < 0.05", std::abs(null_stat) < 0.05});

    const auto ex8 = sample_dataset(make_example(8), d, n, mix_seed({p.seed, 0xE8ULL}), 0);
    const auto m8 = partition_by_class(ex8);
    const double stat =
        avg_coordinatewise_energy_distance(ex8.points().select_rows(m8[0]), ex8.points().select_rows(m8[1]));
    report.lines.push_back({"Example 8 N(0,3) vs t3, d = " + std::to_string(d), stat, "> 0.1", stat > 0.1});
    return report;
}

}  // namespace

CheckReport run_check(std::string_view name, const CheckParams& params) {
    if (name == "lemma1") return lemma1(params);
    if (name == "theorem1") return theorem1(params);
    if (name == "theorem2") return theorem2(params);
    if (name == "theorem3") return theorem3(params);
    if (name == "energy") return energy(params);
    throw ParameterError("unknown check '" + std::string(name) + "' (expected lemma1, theorem1, theorem2, theorem3 or energy)");
}

void print_report(std::ostream& out, const CheckReport& report) {
    for (const auto& l : report.lines) {
        char value[32];
        std::snprintf(value, sizeof value, "%.6g", l.observed);
        out << (l.pass ? "PASS" : "FAIL") << "  " << report.check << ": " << l.label << "  observed=" << value
            << "  expected " << l.expected << '\n';
    }
}

}  // namespace hdnn
