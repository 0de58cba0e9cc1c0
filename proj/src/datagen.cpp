#include "hdnn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hdnn {

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> key) {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (auto k : key) {
        h ^= k + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        // splitmix64 finalizer
        h += 0x9E3779B97F4A7C15ULL;
        h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
        h = (h ^ (h >> 27)) * 0x94D049BB133111EBULL;
        h ^= h >> 31;
    }
    return h;
}

namespace {

constexpr double kPi = std::numbers::pi;

double sq_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double log_normal_iso(std::span<const double> x, double mean_first, double mean_second, bool alternate, double var) {
    // N(m, var I) where m_q = mean_first on even q and mean_second on odd q when `alternate`
    double s = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) {
        const double m = (alternate && (q % 2 == 1)) ? mean_second : mean_first;
        const double diff = x[q] - m;
        s += diff * diff;
    }
    const auto d = static_cast<double>(x.size());
    return -0.5 * d * std::log(2.0 * kPi * var) - s / (2.0 * var);
}

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void fill_normal(Rng& rng, std::span<double> out, double mean, double sd) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : out) v = mean + sd * normal(rng);
}

double folded_normal_mean(double mean, double sd) {
    // E|N(mean, sd^2)|
    return sd * std::sqrt(2.0 / kPi) * std::exp(-mean * mean / (2.0 * sd * sd)) +
           mean * (1.0 - 2.0 * 0.5 * std::erfc(mean / (sd * std::sqrt(2.0))));
}

Matrix symmetric2(double diag0, double off, double diag1) {
    Matrix m(2, 2);
    m(0, 0) = diag0;
    m(0, 1) = m(1, 0) = off;
    m(1, 1) = diag1;
    return m;
}

/// log of the (unnormalized) uniform-shell density: -log(b^d - a^d) on the shell, -inf outside.
double log_shell_density(double s, double a, double b, std::size_t dim) {
    if (s < a || s > b) return -std::numeric_limits<double>::infinity();
    const auto d = static_cast<double>(dim);
    return -(d * std::log(b) + std::log1p(-std::pow(a / b, d)));
}

double shell_radius(std::span<const double> x) {
    std::vector<double> y(x.size());
    shell_sqrt_apply(x, y, false);
    return std::sqrt(sq_norm(y));
}

double log_t_univariate(double x, double df) {
    return std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * kPi) -
           (df + 1.0) / 2.0 * std::log1p(x * x / df);
}

}  // namespace

void shell_sqrt_apply(std::span<const double> x, std::span<double> y, bool inverse) {
    if (x.size() != y.size()) throw DimensionError("shell_sqrt_apply: size mismatch");
    const auto d = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= d;
    // S = 0.5 (I - P) + (0.5 + 0.5 d) P with P = 11^T / d
    const double off = inverse ? 1.0 / std::sqrt(0.5) : std::sqrt(0.5);
    const double along = inverse ? 1.0 / std::sqrt(0.5 + 0.5 * d) : std::sqrt(0.5 + 0.5 * d);
    for (std::size_t q = 0; q < x.size(); ++q) y[q] = off * (x[q] - mean) + along * mean;
}

std::vector<double> sample_uniform_shell(double a, double b, std::size_t d, Rng& rng) {
    if (!(a > 0.0) || !(a < b)) throw ParameterError("uniform shell needs 0 < a < b");
    if (d < 1) throw ParameterError("dimension must be at least 1");
    std::vector<double> u(d);
    fill_normal(rng, u, 0.0, 1.0);
    double norm = std::sqrt(sq_norm(u));
    while (norm == 0.0) {
        fill_normal(rng, u, 0.0, 1.0);
        norm = std::sqrt(sq_norm(u));
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double t = std::pow(a / b, static_cast<double>(d));
    const double radius = b * std::pow(t + unif(rng) * (1.0 - t), 1.0 / static_cast<double>(d));
    for (auto& v : u) v *= radius / norm;
    std::vector<double> x(d);
    shell_sqrt_apply(u, x, true);
    return x;
}

std::vector<double> sample_mvt(double df, std::size_t d, Rng& rng) {
    std::vector<double> x(d);
    fill_normal(rng, x, 0.0, 1.0);
    std::chi_squared_distribution<double> chi(df);
    const double scale = 1.0 / std::sqrt(chi(rng) / df);
    for (auto& v : x) v *= scale;
    return x;
}

ExampleSpec make_gaussian_pair(int id, double mu, double sigma) {
    ExampleSpec spec;
    spec.id = id;
    spec.name = "Example " + std::to_string(id);
    spec.class_samplers = {
        [](Rng& rng, std::span<double> out) { fill_normal(rng, out, 0.0, 1.0); },
        [mu, sigma](Rng& rng, std::span<double> out) { fill_normal(rng, out, mu, sigma); },
    };
    spec.log_densities = std::vector<LogDensity>{
        [](std::span<const double> x) { return log_normal_iso(x, 0.0, 0.0, false, 1.0); },
        [mu, sigma](std::span<const double> x) { return log_normal_iso(x, mu, mu, false, sigma * sigma); },
    };
    const double s2 = sigma * sigma;
    spec.limits.sigma_sq = {1.0, s2};
    spec.limits.nu_sq = symmetric2(0.0, mu * mu, 0.0);
    spec.limits.tau = symmetric2(folded_normal_mean(0.0, std::sqrt(2.0)), folded_normal_mean(mu, std::sqrt(1.0 + s2)),
                                 folded_normal_mean(0.0, std::sqrt(2.0 * s2)));
    spec.limits.notes = "iid Gaussian coordinates; (A1)-(A3) hold";
    return spec;
}

ExampleSpec make_example(int id) {
    switch (id) {
        case 1: return make_gaussian_pair(1, 1.0, 1.0);
        case 2: return make_gaussian_pair(2, 1.0, 2.0);
        case 3: return make_gaussian_pair(3, 0.0, 2.0);
        default: break;
    }

    ExampleSpec spec;
    spec.id = id;
    spec.name = "Example " + std::to_string(id);
    switch (id) {
        case 4: {
            // alpha_d has 1 at odd (1-based) positions, i.e. at even 0-based indices
            auto mixture = [](bool second_class) {
                return [second_class](Rng& rng, std::span<double> out) {
                    std::bernoulli_distribution pick(0.5);
                    const bool wide = pick(rng);
                    std::normal_distribution<double> normal(0.0, 1.0);
                    const double sd = wide ? std::sqrt(2.0) : 1.0;
                    for (std::size_t q = 0; q < out.size(); ++q) {
                        const double alpha = (q % 2 == 0) ? 1.0 : 0.0;
                        double mean = wide ? 1.0 : 0.0;
                        if (second_class) mean = wide ? 1.0 - alpha : alpha;
                        out[q] = mean + sd * normal(rng);
                    }
                };
            };
            spec.class_samplers = {mixture(false), mixture(true)};
            spec.log_densities = std::vector<LogDensity>{
                [](std::span<const double> x) {
                    return log_sum_exp(std::log(0.5) + log_normal_iso(x, 0.0, 0.0, false, 1.0),
                                       std::log(0.5) + log_normal_iso(x, 1.0, 1.0, false, 2.0));
                },
                [](std::span<const double> x) {
                    return log_sum_exp(std::log(0.5) + log_normal_iso(x, 1.0, 0.0, true, 1.0),
                                       std::log(0.5) + log_normal_iso(x, 0.0, 1.0, true, 2.0));
                },
            };
            spec.limits.sigma_sq = {1.75, 1.75};
            spec.limits.nu_sq = symmetric2(0.0, 0.0, 0.0);
            spec.limits.notes = "mixtures; (A2) fails for both classes; nu^2 = 0 and equal sigma^2";
            spec.requires_even_dim = true;
            return spec;
        }
        case 5: {
            spec.class_samplers = {
                [](Rng& rng, std::span<double> out) {
                    auto x = sample_uniform_shell(1.0, 1.5, out.size(), rng);
                    std::copy(x.begin(), x.end(), out.begin());
                },
                [](Rng& rng, std::span<double> out) {
                    std::bernoulli_distribution pick(0.5);
                    auto x = pick(rng) ? sample_uniform_shell(1.5, 2.0, out.size(), rng)
                                       : sample_uniform_shell(0.5, 1.0, out.size(), rng);
                    std::copy(x.begin(), x.end(), out.begin());
                },
            };
            // The common factor det(S)^{1/2} / vol(unit ball) cancels between classes.
            spec.log_densities = std::vector<LogDensity>{
                [](std::span<const double> x) { return log_shell_density(shell_radius(x), 1.0, 1.5, x.size()); },
                [](std::span<const double> x) {
                    const double s = shell_radius(x);
                    return std::log(0.5) + log_sum_exp(log_shell_density(s, 0.5, 1.0, x.size()),
                                                       log_shell_density(s, 1.5, 2.0, x.size()));
                },
            };
            spec.limits.sigma_sq = {0.0, 0.0};
            spec.limits.nu_sq = symmetric2(0.0, 0.0, 0.0);
            spec.limits.notes = "bounded shells: trace/d -> 0 and (A2) fails; distances do not grow with d";
            return spec;
        }
        case 6: {
            spec.class_samplers = {
                [](Rng& rng, std::span<double> out) { fill_normal(rng, out, 0.0, std::sqrt(3.0)); },
                [](Rng& rng, std::span<double> out) {
                    auto x = sample_mvt(3.0, out.size(), rng);
                    std::copy(x.begin(), x.end(), out.begin());
                },
            };
            spec.log_densities = std::vector<LogDensity>{
                [](std::span<const double> x) { return log_normal_iso(x, 0.0, 0.0, false, 3.0); },
                [](std::span<const double> x) {
                    const double df = 3.0;
                    const auto d = static_cast<double>(x.size());
                    return std::lgamma((df + d) / 2.0) - std::lgamma(df / 2.0) - 0.5 * d * std::log(df * kPi) -
                           (df + d) / 2.0 * std::log1p(sq_norm(x) / df);
                },
            };
            spec.limits.sigma_sq = {3.0, 3.0};
            spec.limits.nu_sq = symmetric2(0.0, 0.0, 0.0);
            spec.limits.notes = "shared chi-square mixing breaks (A2) for the t class; nu^2 = 0 and equal sigma^2";
            return spec;
        }
        case 7: {
            auto sampler = [](bool swapped) {
                return [swapped](Rng& rng, std::span<double> out) {
                    std::normal_distribution<double> normal(0.0, 1.0);
                    const std::size_t half = out.size() / 2;
                    for (std::size_t q = 0; q < out.size(); ++q) {
                        const bool first = q < half;
                        const double var = (first != swapped) ? 0.5 : 2.0;
                        out[q] = std::sqrt(var) * normal(rng);
                    }
                };
            };
            auto density = [](bool swapped) {
                return [swapped](std::span<const double> x) {
                    const std::size_t half = x.size() / 2;
                    double s = 0.0;
                    for (std::size_t q = 0; q < x.size(); ++q) {
                        const bool first = q < half;
                        const double var = (first != swapped) ? 0.5 : 2.0;
                        s += -0.5 * std::log(2.0 * kPi * var) - x[q] * x[q] / (2.0 * var);
                    }
                    return s;
                };
            };
            spec.class_samplers = {sampler(false), sampler(true)};
            spec.log_densities = std::vector<LogDensity>{density(false), density(true)};
            spec.limits.sigma_sq = {1.25, 1.25};
            spec.limits.nu_sq = symmetric2(0.0, 0.0, 0.0);
            const double within = 1.5 * std::sqrt(2.0 / kPi);
            spec.limits.tau = symmetric2(within, std::sqrt(5.0 / kPi), within);
            spec.limits.notes = "equal traces and means; marginals differ, so the coordinate energy distance is positive";
            spec.requires_even_dim = true;
            return spec;
        }
        case 8: {
            spec.class_samplers = {
                [](Rng& rng, std::span<double> out) { fill_normal(rng, out, 0.0, std::sqrt(3.0)); },
                [](Rng& rng, std::span<double> out) {
                    std::normal_distribution<double> normal(0.0, 1.0);
                    std::chi_squared_distribution<double> chi(3.0);
                    for (auto& v : out) v = normal(rng) / std::sqrt(chi(rng) / 3.0);
                },
            };
            spec.log_densities = std::vector<LogDensity>{
                [](std::span<const double> x) { return log_normal_iso(x, 0.0, 0.0, false, 3.0); },
                [](std::span<const double> x) {
                    double s = 0.0;
                    for (double v : x) s += log_t_univariate(v, 3.0);
                    return s;
                },
            };
            spec.limits.sigma_sq = {3.0, 3.0};
            spec.limits.nu_sq = symmetric2(0.0, 0.0, 0.0);
            spec.limits.notes = "independent coordinates; equal first two moments, different marginals";
            return spec;
        }
        default: break;
    }
    throw ParameterError("unknown example id " + std::to_string(id) + " (expected 1..8)");
}

LabeledDataset sample_dataset(const ExampleSpec& spec, std::size_t d, std::size_t n_per_class, std::uint64_t seed,
                              std::size_t first_row) {
    if (d < 1) throw ParameterError("dimension must be at least 1");
    if (spec.requires_even_dim && d % 2 != 0) {
        throw ParameterError("Example " + std::to_string(spec.id) + " needs an even dimension, got " + std::to_string(d));
    }
    if (n_per_class < 1) throw ParameterError("need at least one row per class");
    const std::size_t J = spec.num_classes();
    Matrix points(J * n_per_class, d);
    std::vector<std::size_t> labels(J * n_per_class);
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const std::size_t row = j * n_per_class + i;
            Rng rng(mix_seed({seed, static_cast<std::uint64_t>(spec.id), j, first_row + i}));
            spec.class_samplers[j](rng, points.row(row));
            labels[row] = j;
        }
    }
    return LabeledDataset(std::move(points), std::move(labels), J);
}

ClassLabel bayes_classify(const ExampleSpec& spec, std::span<const double> z) {
    if (!spec.log_densities) throw ParameterError(spec.name + " has no class densities");
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < spec.log_densities->size(); ++j) {
        const double v = (*spec.log_densities)[j](z);
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    return ClassLabel{best};
}

}  // namespace hdnn
