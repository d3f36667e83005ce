#pragma once

#include <cstddef>
#include <vector>

namespace refdoc {

enum class Alternative { greater, two_sided };
enum class RankMethod { exact, normal_approx };

// How to select the p-value computation. `automatic` enumerates exactly when
// both samples have at most 8 elements and falls back to the normal
// approximation otherwise; the other two force a path.
enum class MethodChoice { automatic, exact, normal };

struct RankTestResult {
    double u_statistic = 0.0;
    double p_value = 1.0;
    Alternative alternative = Alternative::greater;
    RankMethod method = RankMethod::exact;
};

// Mann-Whitney U over two independent samples. U is computed from midranks
// (ties share the average rank); the exact path enumerates all
// C(n1+n2, n1) assignments of the observed midranks, the approximate path
// uses the normal distribution with +/-0.5 continuity correction and
// tie-corrected variance. Zero variance (all values tied) yields p = 1.
RankTestResult mann_whitney_u(const std::vector<double>& x,
                              const std::vector<double>& y,
                              Alternative alternative,
                              MethodChoice method = MethodChoice::automatic);

// The rank-sum test the toolkit reports under its other common name; same
// statistic, same kernel.
inline RankTestResult wilcoxon_rank_sum(const std::vector<double>& x,
                                        const std::vector<double>& y,
                                        Alternative alternative,
                                        MethodChoice method = MethodChoice::automatic) {
    return mann_whitney_u(x, y, alternative, method);
}

struct McNemarResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool exact = false;
};

// McNemar's test from the discordant-pair counts: b = first right & second
// wrong, c = first wrong & second right. Exact two-sided binomial when
// b + c < 25 (statistic = min(b, c)); otherwise the chi-square statistic
// (|b-c|-1)^2/(b+c) with one degree of freedom. b = c = 0 gives p = 1.
McNemarResult mcnemar_from_counts(std::size_t b, std::size_t c);

} // namespace refdoc
