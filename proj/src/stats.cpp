#include "refdoc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

namespace refdoc {

namespace {

// Midranks for the concatenation of x and y, in input order.
std::vector<double> midranks(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> all;
    all.reserve(x.size() + y.size());
    all.insert(all.end(), x.begin(), x.end());
    all.insert(all.end(), y.begin(), y.end());

    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return all[a] < all[b]; });

    std::vector<double> ranks(all.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && all[order[j]] == all[order[i]]) {
            ++j;
        }
        // Positions i..j-1 hold a tie group; everyone gets the average rank.
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            ranks[order[k]] = avg;
        }
        i = j;
    }
    return ranks;
}

// Exact permutation distribution: fraction of assignments of n1 of the
// midranks to x with U' >= U (and <= U). Enumerated iteratively over
// index combinations.
void exact_tail(const std::vector<double>& ranks, std::size_t n1, double u_stat,
                double& p_ge, double& p_le) {
    const std::size_t n = ranks.size();
    const double offset = static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;

    std::vector<std::size_t> idx(n1);
    for (std::size_t i = 0; i < n1; ++i) {
        idx[i] = i;
    }
    std::uint64_t total = 0, ge = 0, le = 0;
    while (true) {
        double sum = 0.0;
        for (const std::size_t i : idx) {
            sum += ranks[i];
        }
        const double u = sum - offset;
        ++total;
        if (u >= u_stat) {
            ++ge;
        }
        if (u <= u_stat) {
            ++le;
        }

        // Advance to the next combination in lexicographic order.
        std::size_t k = n1;
        while (k > 0) {
            --k;
            if (idx[k] != k + n - n1) {
                ++idx[k];
                for (std::size_t j = k + 1; j < n1; ++j) {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if (k == 0) {
                p_ge = static_cast<double>(ge) / static_cast<double>(total);
                p_le = static_cast<double>(le) / static_cast<double>(total);
                return;
            }
        }
        if (n1 == 0) {
            break;
        }
    }
    p_ge = static_cast<double>(ge) / static_cast<double>(total);
    p_le = static_cast<double>(le) / static_cast<double>(total);
}

double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

} // namespace

RankTestResult mann_whitney_u(const std::vector<double>& x,
                              const std::vector<double>& y,
                              Alternative alternative,
                              MethodChoice method) {
    const std::size_t n1 = x.size();
    const std::size_t n2 = y.size();
    const std::size_t n = n1 + n2;

    const auto ranks = midranks(x, y);
    double rank_sum_x = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        rank_sum_x += ranks[i];
    }
    const double u = rank_sum_x - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;

    RankTestResult result;
    result.u_statistic = u;
    result.alternative = alternative;

    const bool use_exact =
        method == MethodChoice::exact || (method == MethodChoice::automatic && n1 <= 8 && n2 <= 8);

    if (use_exact) {
        result.method = RankMethod::exact;
        double p_ge = 1.0, p_le = 1.0;
        exact_tail(ranks, n1, u, p_ge, p_le);
        if (alternative == Alternative::greater) {
            result.p_value = p_ge;
        } else {
            result.p_value = std::min(1.0, 2.0 * std::min(p_ge, p_le));
        }
        return result;
    }

    result.method = RankMethod::normal_approx;
    const double dn1 = static_cast<double>(n1);
    const double dn2 = static_cast<double>(n2);
    const double dn = static_cast<double>(n);

    // Tie correction: sum of t^3 - t over tie groups of the pooled sample.
    std::map<double, std::size_t> groups;
    for (const double r : ranks) {
        ++groups[r];
    }
    double tie_sum = 0.0;
    for (const auto& [rank, count] : groups) {
        const double t = static_cast<double>(count);
        tie_sum += t * t * t - t;
    }

    const double mean = dn1 * dn2 / 2.0;
    const double variance = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));
    if (variance <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    const double sd = std::sqrt(variance);
    if (alternative == Alternative::greater) {
        const double z = (u - mean - 0.5) / sd;
        result.p_value = std::min(1.0, normal_sf(z));
    } else {
        const double z = (std::abs(u - mean) - 0.5) / sd;
        result.p_value = std::min(1.0, 2.0 * normal_sf(z));
    }
    return result;
}

McNemarResult mcnemar_from_counts(std::size_t b, std::size_t c) {
    McNemarResult result;
    const std::size_t n = b + c;
    if (n == 0) {
        result.statistic = 0.0;
        result.p_value = 1.0;
        result.exact = true;
        return result;
    }
    if (n < 25) {
        // Two-sided exact binomial with theta = 1/2. Counts fit comfortably
        // in 64 bits (n <= 24), so the tail sum is computed exactly.
        const std::size_t k = std::min(b, c);
        std::uint64_t tail = 0;
        std::uint64_t binom = 1; // C(n, 0)
        for (std::size_t i = 0; i <= k; ++i) {
            tail += binom;
            binom = binom * (n - i) / (i + 1);
        }
        const double denom = static_cast<double>(std::uint64_t{1} << n);
        result.statistic = static_cast<double>(k);
        result.p_value = std::min(1.0, 2.0 * static_cast<double>(tail) / denom);
        result.exact = true;
        return result;
    }
    const double db = static_cast<double>(b);
    const double dc = static_cast<double>(c);
    const double stat = (std::abs(db - dc) - 1.0) * (std::abs(db - dc) - 1.0) / (db + dc);
    result.statistic = stat;
    // Chi-square survival with 1 dof: P(X >= x) = erfc(sqrt(x/2)).
    result.p_value = std::erfc(std::sqrt(stat / 2.0));
    result.exact = false;
    return result;
}

} // namespace refdoc
