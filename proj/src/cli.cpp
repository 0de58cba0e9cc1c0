#include "hdnn/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hdnn/experiments.hpp"
#include "hdnn/theory_checks.hpp"

namespace hdnn {

namespace {

namespace fs = std::filesystem;

struct SweepArgs {
    int example = 1;
    std::string dims = "10,20,50,100,200,500";
    std::size_t n_train = 25;
    std::size_t n_test = 250;
    std::size_t reps = 20;
    std::string classifiers;
    bool scale_adjusted = false;
    std::uint64_t seed = 0;
    std::size_t r_max = 0;
    std::size_t jobs = 1;
    std::string out = "hdnn_out";
    bool record_time = false;
};

struct BenchArgs {
    std::vector<std::string> data;
    std::string test_data;
    std::vector<std::string> names;
    std::string label_col = "0";
    std::string delimiter = ",";
    bool header = false;
    std::size_t train_size = 0;
    std::size_t reps = 20;
    std::string classifiers;
    bool scale_adjusted = false;
    std::uint64_t seed = 0;
    std::size_t r_max = 0;
    std::size_t jobs = 1;
    std::string out = "hdnn_bench";
    bool record_time = false;
};

struct VerifyArgs {
    std::vector<std::string> checks;
    std::size_t d = 0;
    std::size_t n = 0;
    std::size_t n_test = 250;
    std::size_t reps = 5;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || v == 0) throw ParameterError("--dims: '" + item + "' is not a positive integer");
        dims.push_back(static_cast<std::size_t>(v));
    }
    if (dims.empty()) throw ParameterError("--dims needs at least one dimension");
    return dims;
}

char parse_delimiter(const std::string& text) {
    if (text == "tab" || text == "\\t") return '\t';
    if (text == "space" || text == "whitespace") return ' ';
    if (text.size() == 1) return text[0];
    throw ParameterError("--delimiter must be a single character, 'tab' or 'space'");
}

LabelColumn parse_label_column(const std::string& text) {
    if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
        return static_cast<std::size_t>(std::stoull(text));
    }
    return text;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    return f;
}

fs::path prepare_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory '" + dir + "'");
    return fs::path(dir);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Timestamps and wall times go here so the CSVs stay byte-identical across runs.
void write_metadata(const fs::path& dir, const std::string& command, double seconds,
                    std::span<const TrialReport> trials) {
    auto f = open_out(dir / "metadata.txt");
    f << "command " << command << '\n' << "finished_utc " << utc_timestamp() << '\n' << "wall_seconds " << seconds << '\n';
    auto t = open_out(dir / "timing.csv");
    write_trials_csv(t, trials, true);
}

std::vector<ClassifierChoice> resolve_classifiers(const std::string& list, bool scale_adjusted, bool with_bayes) {
    if (!list.empty()) return parse_classifier_list(list);
    auto out = default_classifiers(scale_adjusted);
    if (with_bayes) out.push_back({ClassifierChoice::Kind::Bayes});
    return out;
}

std::string quoted(const std::string& s) { return '"' + s + '"'; }

std::string dump(const SweepArgs& a) {
    std::ostringstream o;
    o << "example=" << a.example << "\ndims=" << quoted(a.dims) << "\nn-train=" << a.n_train << "\nn-test=" << a.n_test
      << "\nreps=" << a.reps << "\nclassifiers=" << quoted(a.classifiers)
      << "\nscale-adjusted=" << (a.scale_adjusted ? "true" : "false") << "\nseed=" << a.seed << "\nr-max=" << a.r_max
      << "\njobs=" << a.jobs << "\nout=" << quoted(a.out) << "\nrecord-time=" << (a.record_time ? "true" : "false")
      << '\n';
    return o.str();
}

std::string dump(const BenchArgs& a) {
    std::ostringstream o;
    auto list = [](const std::vector<std::string>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + quoted(v[i]);
        return s + "]";
    };
    o << "data=" << list(a.data) << "\ntest-data=" << quoted(a.test_data) << "\nname=" << list(a.names)
      << "\nlabel-col=" << quoted(a.label_col) << "\ndelimiter=" << quoted(a.delimiter)
      << "\nheader=" << (a.header ? "true" : "false") << "\ntrain-size=" << a.train_size << "\nreps=" << a.reps
      << "\nclassifiers=" << quoted(a.classifiers) << "\nscale-adjusted=" << (a.scale_adjusted ? "true" : "false")
      << "\nseed=" << a.seed << "\nr-max=" << a.r_max << "\njobs=" << a.jobs << "\nout=" << quoted(a.out)
      << "\nrecord-time=" << (a.record_time ? "true" : "false") << '\n';
    return o.str();
}

std::string joined_args(int argc, const char* const* argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string unquote(std::string s) {
    s = trim(std::move(s));
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
    return s;
}

/// Items of a `[a, "b", ...]` list; commas inside quotes are kept.
std::vector<std::string> split_list(const std::string& body) {
    std::vector<std::string> items;
    std::string cur;
    char quote = 0;
    for (char c : body) {
        if (quote) {
            if (c == quote) quote = 0;
            cur += c;
        } else if (c == '"' || c == '\'') {
            quote = c;
            cur += c;
        } else if (c == ',') {
            items.push_back(unquote(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) items.push_back(unquote(cur));
    return items;
}

/// Replaces `--config FILE` with the flags it holds, placed right after the subcommand so that
/// flags on the command line come later and win. Lines are key=value; '#' starts a comment,
/// [section] lines are ignored, true/false toggle flags and [a, b] repeats a flag. The format
/// matches what --dump-config prints.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::size_t sub = 0;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (sub == 0 && (args[i] == "sweep" || args[i] == "bench" || args[i] == "verify")) sub = i;
        std::string path;
        std::size_t width = 1;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            width = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            continue;
        }
        if (sub == 0) break;  // let the parser report the misplaced flag
        std::ifstream in(path);
        if (!in) throw Error("cannot read --config file '" + path + "'");
        std::vector<std::string> flags;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            line = trim(line);
            if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw Error("--config file '" + path + "' line " + std::to_string(line_no) + ": expected key=value");
            }
            std::string key = trim(line.substr(0, eq));
            std::replace(key.begin(), key.end(), '_', '-');
            const std::string raw = trim(line.substr(eq + 1));
            const std::string flag = "--" + key;
            if (raw == "true") {
                flags.push_back(flag);
            } else if (raw == "false") {
            } else if (raw.size() >= 2 && raw.front() == '[' && raw.back() == ']') {
                for (auto& item : split_list(raw.substr(1, raw.size() - 2))) {
                    flags.push_back(flag);
                    flags.push_back(item);
                }
            } else if (const auto v = unquote(raw); !v.empty()) {
                flags.push_back(flag);
                flags.push_back(v);
            }
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + width));
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub + 1), flags.begin(), flags.end());
        break;
    }
    return args;
}

int do_sweep(const SweepArgs& a, const std::string& command, std::ostream& out) {
    SweepConfig cfg;
    cfg.example = a.example;
    cfg.dims = parse_dims(a.dims);
    cfg.n_train_per_class = a.n_train;
    cfg.n_test_per_class = a.n_test;
    cfg.reps = a.reps;
    cfg.base_seed = a.seed;
    cfg.jobs = a.jobs;
    if (a.r_max) cfg.r_max = a.r_max;
    const auto spec = make_example(a.example);
    cfg.classifiers = resolve_classifiers(a.classifiers, a.scale_adjusted, spec.log_densities.has_value());
    cfg.validate();
    const auto dir = prepare_out_dir(a.out);

    const auto start = std::chrono::steady_clock::now();
    const auto result = run_sweep(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    auto trials = open_out(dir / "trials.csv");
    write_trials_csv(trials, result.trials, a.record_time);
    auto summary = open_out(dir / "summary.csv");
    write_summary_csv(summary, result.summary);
    auto plot = open_out(dir / "plot_data.csv");
    write_plot_data(plot, result.summary);
    write_metadata(dir, command, secs, result.trials);

    out << "example " << cfg.example << ", " << cfg.reps << " reps, mean error (standard error)\n";
    for (const auto& r : result.summary) {
        char line[160];
        std::snprintf(line, sizeof line, "  d=%-6zu %-8s %.4f (%.4f)\n", r.d, r.classifier.c_str(), r.mean_error,
                      r.std_error);
        out << line;
    }
    out << "wrote " << (dir / "trials.csv").string() << ", summary.csv, plot_data.csv\n";
    return 0;
}

int do_bench(const BenchArgs& a, const std::string& command, std::ostream& out) {
    if (a.data.empty()) throw ParameterError("bench needs --data");
    if (!a.test_data.empty() && a.data.size() != 1) throw ParameterError("--test-data pairs with exactly one --data file");
    if (!a.names.empty() && a.names.size() != a.data.size()) throw ParameterError("--name must be given once per --data file");
    if (a.train_size == 0) throw ParameterError("bench needs a positive --train-size");

    BenchConfig cfg;
    cfg.reps = a.reps;
    cfg.base_seed = a.seed;
    cfg.jobs = a.jobs;
    if (a.r_max) cfg.r_max = a.r_max;
    cfg.classifiers = resolve_classifiers(a.classifiers, a.scale_adjusted, false);
    DelimitedOptions opts{parse_delimiter(a.delimiter), parse_label_column(a.label_col), a.header};
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        if (!fs::is_regular_file(a.data[i])) throw Error("cannot read --data file '" + a.data[i] + "'");
        BenchDataset ds;
        ds.name = a.names.empty() ? fs::path(a.data[i]).stem().string() : a.names[i];
        ds.path = a.data[i];
        if (!a.test_data.empty()) {
            if (!fs::is_regular_file(a.test_data)) throw Error("cannot read --test-data file '" + a.test_data + "'");
            ds.second_path = a.test_data;
        }
        ds.options = opts;
        ds.train_size = a.train_size;
        cfg.datasets.push_back(std::move(ds));
    }
    cfg.validate();
    const auto dir = prepare_out_dir(a.out);

    const auto start = std::chrono::steady_clock::now();
    const auto result = run_bench(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    auto trials = open_out(dir / "trials.csv");
    write_trials_csv(trials, result.trials, a.record_time);
    auto summary = open_out(dir / "summary.csv");
    write_summary_csv(summary, result.summary);
    auto rob = open_out(dir / "robustness.csv");
    write_robustness_csv(rob, result.robustness);
    auto splits = open_out(dir / "splits.txt");
    for (std::size_t i = 0; i < result.splits.size(); ++i) {
        splits << "dataset " << result.trials[i].example << " rep " << result.trials[i].rep << '\n';
        write_split_manifest(splits, result.splits[i]);
    }
    write_metadata(dir, command, secs, result.trials);

    out << "misclassification rates in % over " << cfg.reps << " splits, mean (standard error)\n";
    for (const auto& r : result.summary) {
        char line[200];
        std::snprintf(line, sizeof line, "  %-20s %-8s %6.2f (%.2f)\n", r.example.c_str(), r.classifier.c_str(),
                      100.0 * r.mean_error, 100.0 * r.std_error);
        out << line;
    }
    out << "wrote " << (dir / "summary.csv").string() << ", trials.csv, robustness.csv, splits.txt\n";
    return 0;
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
    CheckParams p;
    if (a.d) p.d = a.d;
    if (a.n) p.n = a.n;
    p.n_test = a.n_test;
    p.reps = a.reps;
    p.seed = a.seed;
    p.jobs = a.jobs;
    std::vector<std::string> checks = a.checks;
    if (checks.size() == 1 && checks[0] == "all") checks = check_names();
    for (const auto& c : checks) {
        if (std::find(check_names().begin(), check_names().end(), c) == check_names().end()) {
            throw ParameterError("--check: unknown check '" + c + "'");
        }
    }
    bool ok = true;
    for (const auto& c : checks) {
        const auto report = run_check(c, p);
        print_report(out, report);
        ok = ok && report.passed();
    }
    out << (ok ? "verification passed" : "verification FAILED") << '\n';
    return ok ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distance-based classifiers for high-dimension, low-sample-size data"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    // a flag given twice (config file, then command line) keeps the later value
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Synthetic error-versus-dimension sweep");
    std::string config_path;
    sweep->add_option("--config", config_path, "Read flags from a key=value file (flags given on the command line win)");
    sweep->add_option("--example", sw.example, "Example id, 1 to 8")->check(CLI::Range(1, 8))->capture_default_str();
    sweep->add_option("--dims", sw.dims, "Comma-separated dimensions")->capture_default_str();
    sweep->add_option("--n-train", sw.n_train, "Training rows per class")->capture_default_str();
    sweep->add_option("--n-test", sw.n_test, "Test rows per class")->capture_default_str();
    sweep->add_option("--reps", sw.reps, "Replications per dimension")->capture_default_str();
    sweep->add_option("--classifiers", sw.classifiers,
                      "Comma-separated list, e.g. 1nn,3nn,ch,mch,mdist,rmdistc,trad,tripd1,bayes "
                      "(default: all feature classifiers, 1NN and Bayes)");
    sweep->add_flag("--scale-adjusted", sw.scale_adjusted, "Add CH and MCH to the default classifier list");
    sweep->add_option("--seed", sw.seed, "Base seed; all randomness derives from it")->capture_default_str();
    sweep->add_option("--r-max", sw.r_max, "Largest r tried by leave-one-out (0: min(10, smallest class - 2))")
        ->capture_default_str();
    sweep->add_option("--jobs", sw.jobs, "Concurrent trials; output does not depend on it")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--out", sw.out, "Output directory")->capture_default_str();
    sweep->add_flag("--record-time", sw.record_time, "Fill the seconds column of trials.csv");
    bool sweep_dump = false;
    sweep->add_flag("--dump-config", sweep_dump, "Print the resolved configuration and exit");

    BenchArgs bn;
    auto* bench = app.add_subcommand("bench", "Seeded stratified resplits of delimited datasets");
    bench->add_option("--config", config_path, "Read flags from a key=value file (flags given on the command line win)");
    bench->add_option("--data", bn.data, "Delimited data file; repeat for several datasets")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    bench->add_option("--test-data", bn.test_data, "Second file pooled with --data before resplitting");
    bench->add_option("--name", bn.names, "Dataset name per --data (default: file stem)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    bench->add_option("--label-col", bn.label_col, "Label column, zero-based index or header name")->capture_default_str();
    bench->add_option("--delimiter", bn.delimiter, "Field delimiter: one character, 'tab' or 'space'")
        ->capture_default_str();
    bench->add_flag("--header", bn.header, "First line is a header");
    bench->add_option("--train-size", bn.train_size, "Training rows per split (stratified)");
    bench->add_option("--reps", bn.reps, "Number of resplits")->capture_default_str();
    bench->add_option("--classifiers", bn.classifiers, "Comma-separated list (default: 1NN and all feature classifiers)");
    bench->add_flag("--scale-adjusted", bn.scale_adjusted, "Add CH and MCH to the default classifier list");
    bench->add_option("--seed", bn.seed, "Base seed")->capture_default_str();
    bench->add_option("--r-max", bn.r_max, "Largest r tried by leave-one-out (0: automatic)")->capture_default_str();
    bench->add_option("--jobs", bn.jobs, "Concurrent resplits")->check(CLI::PositiveNumber)->capture_default_str();
    bench->add_option("--out", bn.out, "Output directory")->capture_default_str();
    bench->add_flag("--record-time", bn.record_time, "Fill the seconds column of trials.csv");
    bool bench_dump = false;
    bench->add_flag("--dump-config", bench_dump, "Print the resolved configuration and exit");

    VerifyArgs vf;
    auto* verify = app.add_subcommand("verify", "Statistical checks of the distance-concentration results");
    verify->add_option("--check", vf.checks, "lemma1, theorem1, theorem2, theorem3, energy or all")
        ->required()
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    verify->add_option("--d", vf.d, "Dimension (0: per-check default)")->capture_default_str();
    verify->add_option("--n", vf.n, "Sample size per class (0: per-check default)")->capture_default_str();
    verify->add_option("--n-test", vf.n_test, "Test rows per class for classifier checks")->capture_default_str();
    verify->add_option("--reps", vf.reps, "Replications for classifier checks")->capture_default_str();
    verify->add_option("--seed", vf.seed, "Base seed")->capture_default_str();
    verify->add_option("--jobs", vf.jobs, "Concurrent trials")->check(CLI::PositiveNumber)->capture_default_str();

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(argc, argv);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    std::vector<const char*> expanded_argv;
    for (const auto& a : expanded) expanded_argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(expanded_argv.size()), expanded_argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return 1;
    }

    const std::string command = joined_args(argc, argv);
    try {
        if (sweep->parsed()) {
            if (sweep_dump) {
                out << dump(sw);
                return 0;
            }
            return do_sweep(sw, command, out);
        }
        if (bench->parsed()) {
            if (bench_dump) {
                out << dump(bn);
                return 0;
            }
            return do_bench(bn, command, out);
        }
        return do_verify(vf, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (bench->parsed() && bn.data.empty()) err << bench->help();
        return 1;
    }
}

}  // namespace hdnn
