#include "sfa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "sfa/rng.hpp"

namespace sfa {

double chi_squared_sf(double x, int df) {
    if (x <= 0.0) return 1.0;
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

double normal_cdf(double z) {
    static const boost::math::normal dist;
    return boost::math::cdf(dist, z);
}

double normal_quantile(double p) {
    static const boost::math::normal dist;
    return boost::math::quantile(dist, p);
}

// ---------------------------------------------------------------------------
// BinaryBlockMatrix
// ---------------------------------------------------------------------------

BinaryBlockMatrix::BinaryBlockMatrix(int n_rows, int n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), entries_(static_cast<std::size_t>(n_rows) * n_cols, 0) {
    if (n_rows < 1 || n_cols < 1) throw ValidationError("block matrix must be non-empty");
}

void BinaryBlockMatrix::set(int r, int c, int v) {
    if (v != 0 && v != 1) throw ValidationError("block matrix entries must be 0 or 1");
    entries_[static_cast<std::size_t>(r) * n_cols_ + c] = static_cast<std::uint8_t>(v);
}

BinaryBlockMatrix BinaryBlockMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    if (rows.empty()) throw ValidationError("block matrix must have at least one row");
    auto cols = rows.front().size();
    BinaryBlockMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw ValidationError("block matrix rows differ in length");
        for (std::size_t c = 0; c < cols; ++c) m.set(static_cast<int>(r), static_cast<int>(c), rows[r][c]);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Cochran's Q
// ---------------------------------------------------------------------------

TestResult cochran_q(const BinaryBlockMatrix& m) {
    int n = m.rows();
    int k = m.cols();
    if (k < 2) throw ValidationError("Cochran's Q needs at least 2 related outcomes");
    if (n < 2) throw ValidationError("Cochran's Q needs at least 2 matched blocks");

    std::vector<int> col_totals(k, 0);
    double denom = 0.0;
    int grand = 0;
    for (int r = 0; r < n; ++r) {
        int row_total = 0;
        for (int c = 0; c < k; ++c) {
            int v = m.at(r, c);
            col_totals[c] += v;
            row_total += v;
        }
        grand += row_total;
        denom += static_cast<double>(row_total) * (k - row_total);
    }

    TestResult res;
    res.df = k - 1;
    if (denom == 0.0) {  // every block constant: no within-row variation
        res.statistic = 0.0;
        res.p_value = 1.0;
        return res;
    }
    double mean_col = static_cast<double>(grand) / k;
    double spread = 0.0;
    for (int c = 0; c < k; ++c) {
        double d = col_totals[c] - mean_col;
        spread += d * d;
    }
    res.statistic = static_cast<double>(k) * (k - 1) * spread / denom;
    res.p_value = chi_squared_sf(res.statistic, k - 1);
    return res;
}

// ---------------------------------------------------------------------------
// Benjamini-Hochberg
// ---------------------------------------------------------------------------

std::vector<std::size_t> bh_fdr(const std::vector<double>& p_values, double q) {
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("p-value outside [0, 1]: " + std::to_string(p));
    if (p_values.empty()) return {};

    std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });

    double threshold = -1.0;
    for (std::size_t i = m; i >= 1; --i) {
        double p = p_values[order[i - 1]];
        if (p <= static_cast<double>(i) / static_cast<double>(m) * q) {
            threshold = p;
            break;
        }
    }
    std::vector<std::size_t> rejected;
    if (threshold < 0.0) return rejected;
    for (std::size_t i = 0; i < m; ++i)
        if (p_values[i] <= threshold) rejected.push_back(i);
    return rejected;
}

// ---------------------------------------------------------------------------
// Rank helpers
// ---------------------------------------------------------------------------

std::vector<double> midranks(std::span<const double> values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = static_cast<double>(i + j + 2) / 2.0;  // average of 1-based positions
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

namespace {

// Doubled mid-ranks are exact integers (tie run [i..j] 0-based has doubled
// rank i+j+2), which keeps the exact-distribution DPs free of float fuzz.
std::vector<long long> doubled_midranks(std::span<const double> values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<long long> ranks(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        long long doubled = static_cast<long long>(i + j + 2);
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = doubled;
        i = j + 1;
    }
    return ranks;
}

double tie_cubed_sum(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        sum += t * t * t - t;
        i = j + 1;
    }
    return sum;
}

double two_sided_from_z(double z) {
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(z))));
}

}  // namespace

// ---------------------------------------------------------------------------
// Kruskal-Wallis
// ---------------------------------------------------------------------------

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    int k = static_cast<int>(groups.size());
    if (k < 2) throw ValidationError("Kruskal-Wallis needs at least 2 groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) throw ValidationError("Kruskal-Wallis groups must be non-empty");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    auto n_total = static_cast<double>(pooled.size());
    auto ranks = midranks(pooled);

    double h = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
        h += rank_sum * rank_sum / static_cast<double>(g.size());
        offset += g.size();
    }
    h = 12.0 / (n_total * (n_total + 1.0)) * h - 3.0 * (n_total + 1.0);

    double correction = 1.0 - tie_cubed_sum(pooled) / (n_total * n_total * n_total - n_total);
    TestResult res;
    res.df = k - 1;
    if (correction <= 0.0) {  // all observations identical
        res.statistic = 0.0;
        res.p_value = 1.0;
    } else {
        res.statistic = h / correction;
        res.p_value = chi_squared_sf(res.statistic, k - 1);
    }
    if (n_total > k) {
        res.effect_size = (res.statistic - k + 1) / (n_total - k);
        res.effect_name = "epsilon_squared";
    }
    return res;
}

// ---------------------------------------------------------------------------
// Mann-Whitney
// ---------------------------------------------------------------------------

namespace {

// Null distribution of the doubled group-a rank sum over all C(N, n1) label
// assignments, holding the observed (tied) pooled values fixed. Returns
// P(sum <= s_obs) and P(sum >= s_obs).
std::pair<double, double> exact_rank_sum_tails(const std::vector<long long>& doubled_ranks,
                                               std::size_t n1, long long s_obs) {
    long long max_sum = 0;
    std::vector<long long> sorted = doubled_ranks;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (std::size_t i = 0; i < n1; ++i) max_sum += sorted[i];

    // counts[j][s]: number of size-j subsets with doubled-rank sum s
    std::vector<std::vector<double>> counts(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
    counts[0][0] = 1.0;
    for (long long r : doubled_ranks) {
        for (std::size_t j = std::min(n1, static_cast<std::size_t>(counts.size() - 1)); j >= 1; --j) {
            auto& row = counts[j];
            const auto& prev = counts[j - 1];
            for (long long s = max_sum; s >= r; --s) row[s] += prev[s - r];
        }
    }
    double total = 0.0, le = 0.0, ge = 0.0;
    for (long long s = 0; s <= max_sum; ++s) {
        double c = counts[n1][s];
        if (c == 0.0) continue;
        total += c;
        if (s <= s_obs) le += c;
        if (s >= s_obs) ge += c;
    }
    return {le / total, ge / total};
}

constexpr std::size_t kMannWhitneyExactLimit = 12;
constexpr std::size_t kWilcoxonExactLimit = 20;

}  // namespace

TestResult mann_whitney(std::span<const double> a, std::span<const double> b, int corrections) {
    if (a.empty() || b.empty()) throw ValidationError("Mann-Whitney groups must be non-empty");
    if (corrections < 1) throw ValidationError("corrections must be >= 1");

    auto n1 = a.size();
    auto n2 = b.size();
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto doubled = doubled_midranks(pooled);

    long long r1_doubled = 0;
    for (std::size_t i = 0; i < n1; ++i) r1_doubled += doubled[i];
    // U = R1 - n1(n1+1)/2, which equals the (a over b) pair count with ties at 0.5.
    double u = (static_cast<double>(r1_doubled) - static_cast<double>(n1) * (n1 + 1)) / 2.0;

    TestResult res;
    res.statistic = u;
    res.effect_size = 2.0 * u / (static_cast<double>(n1) * static_cast<double>(n2)) - 1.0;
    res.effect_name = "cliffs_delta";

    if (std::min(n1, n2) <= kMannWhitneyExactLimit) {
        auto [le, ge] = exact_rank_sum_tails(doubled, n1, r1_doubled);
        res.p_value = std::min(1.0, 2.0 * std::min(le, ge));
    } else {
        double n1d = static_cast<double>(n1), n2d = static_cast<double>(n2);
        double total = n1d + n2d;
        double mu = n1d * n2d / 2.0;
        double tie_term = tie_cubed_sum(pooled) / (total * (total - 1.0));
        double var = n1d * n2d / 12.0 * ((total + 1.0) - tie_term);
        if (var <= 0.0) {
            res.p_value = 1.0;
        } else {
            double diff = u - mu;
            double cc = diff > 0 ? -0.5 : (diff < 0 ? 0.5 : 0.0);
            res.p_value = two_sided_from_z((diff + cc) / std::sqrt(var));
        }
    }
    res.p_adjusted = std::min(1.0, res.p_value * corrections);
    return res;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank
// ---------------------------------------------------------------------------

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ValidationError("Wilcoxon signed-rank needs paired vectors of equal length");
    if (a.empty()) throw ValidationError("Wilcoxon signed-rank needs at least one pair");

    std::vector<double> abs_diffs;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        if (d == 0.0) continue;
        abs_diffs.push_back(std::fabs(d));
        positive.push_back(d > 0.0);
    }

    TestResult res;
    auto m = abs_diffs.size();
    if (m == 0) {  // all differences zero
        res.statistic = 0.0;
        res.p_value = 1.0;
        return res;
    }

    auto doubled = doubled_midranks(abs_diffs);
    long long w_plus_doubled = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (positive[i]) w_plus_doubled += doubled[i];
    res.statistic = static_cast<double>(w_plus_doubled) / 2.0;

    if (m <= kWilcoxonExactLimit) {
        long long max_sum = 0;
        for (long long r : doubled) max_sum += r;
        std::vector<double> counts(max_sum + 1, 0.0);
        counts[0] = 1.0;
        for (long long r : doubled)
            for (long long s = max_sum; s >= r; --s) counts[s] += counts[s - r];
        double total = std::ldexp(1.0, static_cast<int>(m));
        double le = 0.0, ge = 0.0;
        for (long long s = 0; s <= max_sum; ++s) {
            if (s <= w_plus_doubled) le += counts[s];
            if (s >= w_plus_doubled) ge += counts[s];
        }
        res.p_value = std::min(1.0, 2.0 * std::min(le / total, ge / total));
    } else {
        double md = static_cast<double>(m);
        double mu = md * (md + 1.0) / 4.0;
        double var = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_cubed_sum(abs_diffs) / 48.0;
        if (var <= 0.0) {
            res.p_value = 1.0;
        } else {
            double w = static_cast<double>(w_plus_doubled) / 2.0;
            double diff = w - mu;
            double cc = diff > 0 ? -0.5 : (diff < 0 ? 0.5 : 0.0);
            res.p_value = two_sided_from_z((diff + cc) / std::sqrt(var));
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Bootstrap
// ---------------------------------------------------------------------------

double mean_of(std::span<const double> data) {
    double sum = 0.0;
    for (double v : data) sum += v;
    return sum / static_cast<double>(data.size());
}

double sample_variance(std::span<const double> data) {
    if (data.size() < 2) throw ValidationError("sample variance needs at least 2 observations");
    double m = mean_of(data);
    double ss = 0.0;
    for (double v : data) ss += (v - m) * (v - m);
    return ss / static_cast<double>(data.size() - 1);
}

namespace {

double linear_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    double h = q * static_cast<double>(sorted.size() - 1);
    auto i = static_cast<std::size_t>(h);
    if (i + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace

IntervalEstimate bootstrap_ci(std::span<const double> data,
                              const std::function<double(std::span<const double>)>& statistic,
                              int resamples, double level, std::uint64_t seed) {
    if (data.empty()) throw ValidationError("bootstrap needs non-empty data");
    if (resamples < 1000) throw ValidationError("bootstrap needs at least 1000 resamples");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("bootstrap level must be in (0, 1)");

    auto n = data.size();
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    std::vector<double> buffer(n);
    for (int r = 0; r < resamples; ++r) {
        Pcg32 rng(seed, static_cast<std::uint64_t>(r) + 1);
        for (std::size_t i = 0; i < n; ++i)
            buffer[i] = data[rng.bounded(static_cast<std::uint32_t>(n))];
        stats[static_cast<std::size_t>(r)] = statistic(buffer);
    }
    std::sort(stats.begin(), stats.end());

    IntervalEstimate est;
    est.point = statistic(data);
    est.level = level;
    est.method = IntervalEstimate::Method::bootstrap_percentile;
    double alpha = (1.0 - level) / 2.0;
    est.lo = linear_quantile(stats, alpha);
    est.hi = linear_quantile(stats, 1.0 - alpha);
    return est;
}

// ---------------------------------------------------------------------------
// Bayesian group comparison
// ---------------------------------------------------------------------------

NormalPosterior normal_posterior(double prior_mean, double prior_sd, int n, double sample_mean,
                                 double sample_var) {
    if (prior_sd <= 0.0) throw ValidationError("prior sd must be positive");
    if (n == 0) return {prior_mean, prior_sd};
    if (sample_var <= 0.0) return {sample_mean, 0.0};  // degenerate: data pin the mean
    double prior_precision = 1.0 / (prior_sd * prior_sd);
    double data_precision = static_cast<double>(n) / sample_var;
    double precision = prior_precision + data_precision;
    double mean = (prior_mean * prior_precision + sample_mean * data_precision) / precision;
    return {mean, std::sqrt(1.0 / precision)};
}

std::map<std::string, PosteriorSummary> bayesian_group_compare(
    const std::map<std::string, std::vector<double>>& groups, double prior_mean, double prior_sd) {
    std::map<std::string, PosteriorSummary> out;
    for (const auto& [name, values] : groups) {
        if (values.size() < 2)
            throw ValidationError("group '" + name +
                                  "' has fewer than 2 observations; sample variance undefined");
        auto post = normal_posterior(prior_mean, prior_sd, static_cast<int>(values.size()),
                                     mean_of(values), sample_variance(values));
        PosteriorSummary s;
        s.group = name;
        s.mu_post = post.mean;
        s.sd_post = post.sd;
        double z = normal_quantile(0.975);
        s.ci95 = IntervalEstimate{post.mean, post.mean - z * post.sd, post.mean + z * post.sd,
                                  0.95, IntervalEstimate::Method::posterior};
        out.emplace(name, std::move(s));
    }
    for (auto& [name, summary] : out) {
        for (const auto& [other, other_summary] : out) {
            if (other == name) continue;
            double denom = std::hypot(summary.sd_post, other_summary.sd_post);
            double p;
            if (denom == 0.0)
                p = summary.mu_post > other_summary.mu_post
                        ? 1.0
                        : (summary.mu_post < other_summary.mu_post ? 0.0 : 0.5);
            else
                p = normal_cdf((summary.mu_post - other_summary.mu_post) / denom);
            summary.prob_greater[other] = p;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chi-square power / MDE
// ---------------------------------------------------------------------------

double chisq_power(double w, int df, double n_total, double alpha) {
    if (w < 0.0) throw ValidationError("effect size w must be >= 0");
    boost::math::chi_squared central(df);
    double crit = boost::math::quantile(boost::math::complement(central, alpha));
    double lambda = n_total * w * w;
    if (lambda <= 0.0) return alpha;
    boost::math::non_central_chi_squared nc(df, lambda);
    return boost::math::cdf(boost::math::complement(nc, crit));
}

double chisq_power_mde(double alpha, int df, double n_total, double target_power) {
    if (n_total < 2) throw ValidationError("power analysis needs n_total >= 2");
    if (!(target_power > 0.0 && target_power < 1.0))
        throw ValidationError("target power must be in (0, 1)");
    if (chisq_power(0.0, df, n_total, alpha) >= target_power) return 0.0;

    double hi = 0.1;
    constexpr double kMaxEffect = 10.0;
    while (chisq_power(hi, df, n_total, alpha) < target_power) {
        hi *= 2.0;
        if (hi > kMaxEffect)
            throw ValidationError("target power unattainable at this sample size");
    }
    double lo = hi / 2.0;
    while (hi - lo > 1e-4) {
        double mid = 0.5 * (lo + hi);
        if (chisq_power(mid, df, n_total, alpha) >= target_power)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace sfa
