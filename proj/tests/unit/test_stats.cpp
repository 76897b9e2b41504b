#include "doctest.h"

#include "matcon/parallel.hpp"
#include "matcon/stats.hpp"

#include <cmath>

using namespace matcon;

namespace {

// P[Bin(n,p) ≤ k] by direct summation in log space.
double brute_cdf(std::int64_t k, std::int64_t n, double p)
{
    double s = 0.0;
    for (std::int64_t i = 0; i <= k; ++i)
        s += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                      (n - i) * std::log1p(-p));
    return s;
}

} // namespace

TEST_CASE("binomial cdf agrees with direct summation")
{
    for (auto [k, n, p] : {std::tuple{0, 10, 0.1}, {3, 10, 0.25}, {9, 50, 0.2}, {40, 100, 0.45}, {5, 1000, 0.003}})
        CHECK(binomial_cdf(k, n, p) == doctest::Approx(brute_cdf(k, n, p)).epsilon(1e-10));
    CHECK(binomial_cdf(10, 10, 0.3) == 1.0);
    CHECK(binomial_cdf(-1, 10, 0.3) == 0.0);
}

TEST_CASE("Clopper-Pearson upper limit")
{
    // k = 0 closed form.
    CHECK(clopper_pearson_upper(0, 100, 0.01) == doctest::Approx(1.0 - std::pow(0.01, 0.01)).epsilon(1e-12));
    for (auto [k, n] : {std::pair{1, 20}, {9, 100000}, {65, 100000}, {500, 2000}}) {
        const double u = clopper_pearson_upper(k, n, 0.01);
        CHECK(u > static_cast<double>(k) / n);
        CHECK(brute_cdf(k, n, u) == doctest::Approx(0.01).epsilon(1e-8));
    }
    CHECK(clopper_pearson_upper(5, 5) == 1.0);
    CHECK_THROWS_AS(clopper_pearson_upper(6, 5), std::invalid_argument);
}

TEST_CASE("incomplete beta at symmetric and closed-form points")
{
    CHECK(incomplete_beta(2.0, 2.0, 0.5) == doctest::Approx(0.5));
    // I_x(1, b) = 1 − (1−x)^b
    CHECK(incomplete_beta(1.0, 3.0, 0.2) == doctest::Approx(1.0 - std::pow(0.8, 3)));
}

TEST_CASE("Kahan sum and mean/SE")
{
    KahanSum s;
    s.add(1e16);
    for (int i = 0; i < 1000; ++i)
        s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == 1000.0);
    const auto ms = mean_se({1.0, 2.0, 3.0, 4.0});
    CHECK(ms.mean == 2.5);
    CHECK(ms.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("parallel_map keeps index order")
{
    const auto one = parallel_map(1000, 1, [](std::size_t i) { return static_cast<double>(i) * 0.5; });
    const auto four = parallel_map(1000, 4, [](std::size_t i) { return static_cast<double>(i) * 0.5; });
    CHECK(one == four);
    CHECK_THROWS_AS(parallel_map(10, 3,
                                 [](std::size_t i) -> int {
                                     if (i == 7)
                                         throw std::runtime_error("boom");
                                     return 0;
                                 }),
                    std::runtime_error);
    CHECK(resolve_threads(3) == 3);
}
