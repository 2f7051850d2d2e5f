#pragma once

// Brute-force oracles for the statistics suite. Everything here recomputes
// results from first principles (pair counting, exhaustive enumeration) and
// never calls the library routines it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace oracle {

// U by direct pair counting; ties contribute 0.5.
inline double u_pair_count(std::span<const double> a, std::span<const double> b) {
    double u = 0.0;
    for (double x : a)
        for (double y : b) {
            if (x > y)
                u += 1.0;
            else if (x == y)
                u += 0.5;
        }
    return u;
}

// Exact two-sided Mann-Whitney p over all C(n1+n2, n1) group assignments,
// holding the pooled values fixed. p = min(1, 2*min(P(U<=u), P(U>=u))).
inline double mwu_exact_p_enum(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::size_t n = pooled.size();
    std::size_t n1 = a.size();
    double u_obs = u_pair_count(a, b);

    std::vector<std::size_t> idx(n1);
    std::iota(idx.begin(), idx.end(), 0);
    long long total = 0, le = 0, ge = 0;
    std::vector<double> ga, gb;
    for (;;) {
        ga.clear();
        gb.clear();
        std::vector<bool> in_a(n, false);
        for (auto i : idx) in_a[i] = true;
        for (std::size_t i = 0; i < n; ++i) (in_a[i] ? ga : gb).push_back(pooled[i]);
        double u = u_pair_count(ga, gb);
        ++total;
        if (u <= u_obs + 1e-12) ++le;
        if (u >= u_obs - 1e-12) ++ge;

        // next combination
        std::size_t k = n1;
        while (k > 0 && idx[k - 1] == n - n1 + k - 1) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t j = k; j < n1; ++j) idx[j] = idx[j - 1] + 1;
    }
    double p = 2.0 * std::min(static_cast<double>(le) / total, static_cast<double>(ge) / total);
    return std::min(1.0, p);
}

// Exact two-sided Wilcoxon signed-rank p over all 2^m sign assignments.
// Mid-ranks on |diff|, zero differences dropped.
inline double wilcoxon_exact_p_enum(std::span<const double> a, std::span<const double> b) {
    std::vector<double> abs_d;
    std::vector<int> sign;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        if (d == 0.0) continue;
        abs_d.push_back(std::fabs(d));
        sign.push_back(d > 0 ? 1 : -1);
    }
    std::size_t m = abs_d.size();
    if (m == 0) return 1.0;

    std::vector<double> ranks(m);
    {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t i, std::size_t j) { return abs_d[i] < abs_d[j]; });
        std::size_t i = 0;
        while (i < m) {
            std::size_t j = i;
            while (j + 1 < m && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
            double r = static_cast<double>(i + j + 2) / 2.0;
            for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
            i = j + 1;
        }
    }
    double w_obs = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (sign[i] > 0) w_obs += ranks[i];

    long long total = 1LL << m;
    long long le = 0, ge = 0;
    for (long long mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1LL << i)) w += ranks[i];
        if (w <= w_obs + 1e-12) ++le;
        if (w >= w_obs - 1e-12) ++ge;
    }
    double p = 2.0 * std::min(static_cast<double>(le) / total, static_cast<double>(ge) / total);
    return std::min(1.0, p);
}

// Cochran's Q via the variance-form identity
//   Q = k(k-1) * sum_j (C_j - Cbar)^2 / (k*T - sum_i R_i^2),
// an algebraically independent route from the implementation's formula.
inline double cochran_q_direct(const std::vector<std::vector<int>>& rows) {
    std::size_t k = rows.front().size();
    std::vector<double> col(k, 0.0);
    double grand = 0.0, row_sq = 0.0;
    for (const auto& r : rows) {
        double rt = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            col[c] += r[c];
            rt += r[c];
        }
        grand += rt;
        row_sq += rt * rt;
    }
    double cbar = grand / static_cast<double>(k);
    double spread = 0.0;
    for (double c : col) spread += (c - cbar) * (c - cbar);
    double denom = static_cast<double>(k) * grand - row_sq;
    if (denom == 0.0) return 0.0;
    return static_cast<double>(k) * (k - 1) * spread / denom;
}

// Exact within-row permutation p-value for Q: enumerates all k!^n entry
// orderings per row (k=4 -> 24^n; keep n small).
inline double cochran_q_perm_p(const std::vector<std::vector<int>>& rows, double q_obs) {
    std::size_t k = rows.front().size();
    std::vector<std::vector<std::vector<int>>> row_perms;
    for (const auto& r : rows) {
        std::vector<int> sorted = r;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::vector<int>> perms;
        do {
            perms.push_back(sorted);
        } while (std::next_permutation(sorted.begin(), sorted.end()));
        row_perms.push_back(std::move(perms));
    }
    long long total = 0, ge = 0;
    std::vector<std::vector<int>> current(rows.size(), std::vector<int>(k));
    std::function<void(std::size_t)> walk = [&](std::size_t row) {
        if (row == rows.size()) {
            // weight by the number of index permutations mapping to this
            // distinct arrangement: irrelevant for uniformity because all
            // rows enumerate distinct multiset permutations with equal mass
            ++total;
            if (cochran_q_direct(current) >= q_obs - 1e-12) ++ge;
            return;
        }
        for (const auto& perm : row_perms[row]) {
            current[row] = perm;
            walk(row + 1);
        }
    };
    walk(0);
    return static_cast<double>(ge) / static_cast<double>(total);
}

// SVI from first principles: the largest pairwise gap between frame rates.
inline double svi_enum(const std::vector<double>& rates) {
    double worst = 0.0;
    for (double x : rates)
        for (double y : rates) worst = std::max(worst, x - y);
    return worst;
}

// Brute-force BH: largest rejection set R such that every p in R is at most
// |R| * q / m using the step-up ordering.
inline std::vector<std::size_t> bh_enum(const std::vector<double>& ps, double q) {
    std::size_t m = ps.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return ps[i] < ps[j]; });
    std::size_t cut = 0;
    for (std::size_t i = 1; i <= m; ++i)
        if (ps[order[i - 1]] <= static_cast<double>(i) * q / static_cast<double>(m)) cut = i;
    std::vector<std::size_t> rejected;
    if (cut == 0) return rejected;
    double thresh = ps[order[cut - 1]];
    for (std::size_t i = 0; i < m; ++i)
        if (ps[i] <= thresh) rejected.push_back(i);
    return rejected;
}

}  // namespace oracle
