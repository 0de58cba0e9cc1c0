#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hdnn {

/// One observed-vs-expected comparison.
struct CheckLine {
    std::string label;
    double observed = 0.0;
    std::string expected;  // human readable target, e.g. "<= 0.05"
    bool pass = false;
};

struct CheckReport {
    std::string check;
    std::vector<CheckLine> lines;

    bool passed() const;
};

/// Parameters shared by the statistical checks. Unset fields take per-check defaults:
///   lemma1   d = 2000, n = 200 pairs per class pair
///   theorem1 d = 1000, n = 25 training rows per class, 250 test rows per class
///   theorem2 d = 500
///   theorem3 d = 500
///   energy   d = 200, n = 500 rows per sample
struct CheckParams {
    std::optional<std::size_t> d;
    std::optional<std::size_t> n;
    std::size_t n_test = 250;
    std::size_t reps = 5;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

const std::vector<std::string>& check_names();

/// Runs lemma1, theorem1, theorem2, theorem3 or energy. Throws ParameterError for other names.
CheckReport run_check(std::string_view name, const CheckParams& params);

/// One "PASS|FAIL  label  observed=...  expected ..." line per comparison.
void print_report(std::ostream& out, const CheckReport& report);

}  // namespace hdnn
