#ifndef MATCON_STATS_HPP
#define MATCON_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace matcon {

/// Compensated (Kahan–Babuška) running sum.
class KahanSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Mean and standard error of the mean, summed in index order.
struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
};
MeanSE mean_se(const std::vector<double>& xs);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// P[Bin(n, p) ≤ k].
double binomial_cdf(std::int64_t k, std::int64_t n, double p);

/// Exact one-sided upper confidence limit for a binomial proportion: the
/// p solving P[Bin(n, p) ≤ k] = alpha (1 when k = n).
double clopper_pearson_upper(std::int64_t k, std::int64_t n, double alpha = 0.01);

} // namespace matcon

#endif
