#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfa/errors.hpp"

namespace sfa {

// Complete n-by-k matrix of binary outcomes; rows are matched samples (draws
// paired by index), columns are the four frames. Rows with missing entries
// must be dropped before construction.
class BinaryBlockMatrix {
public:
    BinaryBlockMatrix(int n_rows, int n_cols);
    static BinaryBlockMatrix from_rows(const std::vector<std::vector<int>>& rows);

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }
    int at(int r, int c) const { return entries_[static_cast<std::size_t>(r) * n_cols_ + c]; }
    void set(int r, int c, int v);

private:
    int n_rows_;
    int n_cols_;
    std::vector<std::uint8_t> entries_;
};

struct TestResult {
    double statistic = 0.0;
    std::optional<int> df;
    double p_value = 1.0;
    std::optional<double> p_adjusted;  // after multiplicity correction, when applied
    std::optional<double> effect_size;
    std::optional<std::string> effect_name;
};

struct IntervalEstimate {
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.95;
    enum class Method { bootstrap_percentile, posterior } method = Method::bootstrap_percentile;
};

struct PosteriorSummary {
    std::string group;
    double mu_post = 0.0;
    double sd_post = 0.0;
    IntervalEstimate ci95;
    std::map<std::string, double> prob_greater;
};

// Equality of proportions across related binary outcomes; p from the
// chi-square upper tail with df = k-1. A matrix with no within-row variation
// is degenerate and reports statistic 0, p 1.
TestResult cochran_q(const BinaryBlockMatrix& m);

// Benjamini-Hochberg step-up at FDR level q. Returns the original indices of
// rejected hypotheses, ascending.
std::vector<std::size_t> bh_fdr(const std::vector<double>& p_values, double q = 0.05);

// Rank-based k-group test with mid-rank tie correction. Effect size is
// epsilon-squared = (H - k + 1) / (N - k).
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Two-group rank test. U counts (a over b) pairs with ties worth 0.5, so
// Cliff's delta = 2U/(|a||b|) - 1 is negative when `a` sits stochastically
// below `b`. Exact permutation p when min(|a|,|b|) <= 12, else a normal
// approximation with tie correction and continuity correction. p_adjusted is
// Bonferroni: min(1, p * corrections).
TestResult mann_whitney(std::span<const double> a, std::span<const double> b, int corrections = 1);

// Paired test on a-b differences; zero differences are dropped, mid-ranks on
// |diff|. Exact distribution up to 20 nonzero pairs, else normal
// approximation. Statistic is the positive-rank sum W+.
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// Seeded percentile bootstrap. Resample r draws from substream (seed, r+1) of
// the project RNG, so results are bit-identical for a fixed seed regardless
// of evaluation order.
IntervalEstimate bootstrap_ci(std::span<const double> data,
                              const std::function<double(std::span<const double>)>& statistic,
                              int resamples = 5000, double level = 0.95,
                              std::uint64_t seed = 0);

double mean_of(std::span<const double> data);
double sample_variance(std::span<const double> data);  // ddof = 1

// Conjugate normal-normal update with the likelihood variance treated as
// known. n = 0 returns the prior unchanged.
struct NormalPosterior {
    double mean;
    double sd;
};
NormalPosterior normal_posterior(double prior_mean, double prior_sd, int n, double sample_mean,
                                 double sample_var);

// Per-group posteriors under a N(prior_mean, prior_sd^2) prior, likelihood
// variance set to each group's sample variance. prob_greater is computed
// analytically from the difference of independent normal posteriors.
std::map<std::string, PosteriorSummary> bayesian_group_compare(
    const std::map<std::string, std::vector<double>>& groups, double prior_mean = 0.5,
    double prior_sd = 0.3);

// Power of the chi-square test at effect size w and total sample size n_total
// (noncentrality n_total * w^2).
double chisq_power(double w, int df, double n_total, double alpha = 0.05);

// Smallest w reaching target_power, by bisection to 3 decimals.
double chisq_power_mde(double alpha, int df, double n_total, double target_power = 0.80);

// Distribution helpers shared with tests.
double chi_squared_sf(double x, int df);
double normal_cdf(double z);
double normal_quantile(double p);

// Mid-ranks of `values` (average rank across ties), 1-based.
std::vector<double> midranks(std::span<const double> values);

}  // namespace sfa
