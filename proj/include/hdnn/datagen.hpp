#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hdnn/core_types.hpp"

namespace hdnn {

using Rng = std::mt19937_64;

/// splitmix64-style combination of a key tuple into one 64-bit seed.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> key);

/// Limiting constants of the class distributions as d grows:
///   sigma_sq[j]  = lim trace(Sigma_j) / d
///   nu_sq(j, i)  = lim ||mu_j - mu_i||^2 / d
///   tau(j, i)    = lim E||X - Y||_1 / d,  X ~ F_j, Y ~ F_i   (only where a closed form exists)
struct LimitProfile {
    std::vector<double> sigma_sq;
    Matrix nu_sq;
    std::optional<Matrix> tau;
    std::string notes;
};

using ClassSampler = std::function<void(Rng&, std::span<double>)>;
using LogDensity = std::function<double(std::span<const double>)>;

/// One of the eight synthetic two-class problems.
///   1-3: N(0, I) vs N(mu 1, sigma^2 I) with (mu, sigma) = (1, 1), (1, 2), (0, 2)
///   4:   .5 N(0, I) + .5 N(1, 2I)  vs  .5 N(alpha, I) + .5 N(1 - alpha, 2I), alpha = (1, 0, 1, 0, ...)
///   5:   U_d(1, 1.5) vs .5 U_d(0.5, 1) + .5 U_d(1.5, 2), uniform on {a <= ||S^1/2 x|| <= b}
///   6:   N(0, 3I) vs multivariate t_3
///   7:   N(0, diag(1/2.., 2..)) vs N(0, diag(2.., 1/2..)), blocks split at d/2
///   8:   iid N(0, 3) coordinates vs iid univariate t_3 coordinates
struct ExampleSpec {
    int id = 0;
    std::string name;
    std::vector<ClassSampler> class_samplers;
    LimitProfile limits;
    std::optional<std::vector<LogDensity>> log_densities;
    bool requires_even_dim = false;

    std::size_t num_classes() const noexcept { return class_samplers.size(); }
};

ExampleSpec make_example(int id);

/// N(0, I) vs N(mu 1, sigma^2 I); Examples 1-3 are instances of this family.
ExampleSpec make_gaussian_pair(int id, double mu, double sigma);

/// n_per_class rows per class, class 0 first. Row i of class j is drawn from the stream keyed by
/// (seed, example id, j, first_row + i), so any row can be regenerated on its own.
LabeledDataset sample_dataset(const ExampleSpec& spec, std::size_t d, std::size_t n_per_class, std::uint64_t seed,
                              std::size_t first_row = 0);

/// y = S^{1/2} x (or S^{-1/2} x when `inverse`) for S = 0.5 I + 0.5 11^T, using its two eigenvalues
/// (0.5 + 0.5 d along 1, 0.5 elsewhere).
void shell_sqrt_apply(std::span<const double> x, std::span<double> y, bool inverse);

/// Uniform draw from {x : a <= ||S^{1/2} x|| <= b}: a uniform direction times a radius with
/// density proportional to r^{d-1} on [a, b], mapped back through S^{-1/2}.
std::vector<double> sample_uniform_shell(double a, double b, std::size_t d, Rng& rng);

/// Z / sqrt(W / df) with one chi-square(df) W shared by all d coordinates.
std::vector<double> sample_mvt(double df, std::size_t d, Rng& rng);

/// Equal-prior Bayes rule: argmax of the class log-densities, ties to the lower class id.
ClassLabel bayes_classify(const ExampleSpec& spec, std::span<const double> z);

}  // namespace hdnn
