#include "matcon/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace matcon {

void KahanSum::add(double x)
{
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

MeanSE mean_se(const std::vector<double>& xs)
{
    if (xs.empty())
        return {};
    KahanSum s;
    for (double x : xs)
        s.add(x);
    const double n = static_cast<double>(xs.size());
    const double mean = s.value() / n;
    if (xs.size() < 2)
        return {mean, 0.0};
    KahanSum ss;
    for (double x : xs)
        ss.add((x - mean) * (x - mean));
    return {mean, std::sqrt(ss.value() / (n - 1.0) / n)};
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_cf(double a, double b, double x)
{
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + aa * d;
        d = std::abs(d) < tiny ? tiny : d;
        c = 1.0 + aa / c;
        c = std::abs(c) < tiny ? tiny : c;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + aa * d;
        d = std::abs(d) < tiny ? tiny : d;
        c = 1.0 + aa / c;
        c = std::abs(c) < tiny ? tiny : c;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

} // namespace

double incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("incomplete_beta: a and b must be positive");
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double binomial_cdf(std::int64_t k, std::int64_t n, double p)
{
    if (n < 0)
        throw std::invalid_argument("binomial_cdf: n must be >= 0");
    if (k < 0)
        return 0.0;
    if (k >= n)
        return 1.0;
    // P[Bin(n,p) ≤ k] = I_{1−p}(n−k, k+1)
    return incomplete_beta(static_cast<double>(n - k), static_cast<double>(k + 1), 1.0 - p);
}

double clopper_pearson_upper(std::int64_t k, std::int64_t n, double alpha)
{
    if (n < 1 || k < 0 || k > n)
        throw std::invalid_argument("clopper_pearson_upper: need 0 <= k <= n, n >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("clopper_pearson_upper: alpha must lie in (0, 1)");
    if (k == n)
        return 1.0;
    if (k == 0)
        return -std::expm1(std::log(alpha) / static_cast<double>(n));
    // binomial_cdf is decreasing in p.
    double lo = static_cast<double>(k) / static_cast<double>(n), hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon(); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (binomial_cdf(k, n, mid) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

} // namespace matcon
