#include "doctest.h"
#include "support.hpp"

#include "matcon/martingale.hpp"
#include "matcon/stats.hpp"

using namespace matcon;
using namespace testing_support;

namespace {

TensorProcess scalar_tensor(double v, double horizon)
{
    Tensor4d t(1, 1, 1, 1);
    t(0, 0, 0, 0) = v;
    return TensorProcess::constant(t, horizon);
}

} // namespace

TEST_CASE("jump integral on a hand-built stream")
{
    JumpStream s;
    s.p = s.q = 1;
    s.horizon = 1.0;
    s.events = {{0.5, 0, 0, 1.0}};
    s.drift_rate = MatrixProcess::constant(MatrixXd::Ones(1, 1), 1.0);
    const auto c = MatrixProcess::constant(MatrixXd::Ones(1, 1), 1.0);
    const auto path = integrate_jump(scalar_tensor(2.0, 1.0), c, s);
    REQUIRE(path.values.size() == 2);
    CHECK(path.times[0] == 0.5);
    CHECK(path.values[0](0, 0) == doctest::Approx(1.0));  // −2·0.5 + 2
    CHECK(path.terminal()(0, 0) == doctest::Approx(0.0)); // −2·1 + 2
    CHECK(path.increments.size() == 1);
    CHECK(path.increments[0](0, 0) == doctest::Approx(2.0));
}

TEST_CASE("jump integral follows piecewise coefficients")
{
    // C = 1 on [0,1), 3 on [1,2]; no events, drift rate 1: Z_2 = −(1 + 3).
    JumpStream s;
    s.p = s.q = 1;
    s.horizon = 2.0;
    s.drift_rate = MatrixProcess::constant(MatrixXd::Ones(1, 1), 2.0);
    const MatrixProcess c({0.0, 1.0, 2.0}, {MatrixXd::Ones(1, 1), MatrixXd::Constant(1, 1, 3.0)});
    const auto path = integrate_jump(scalar_tensor(1.0, 2.0), c, s);
    CHECK(path.terminal()(0, 0) == doctest::Approx(-4.0));
    CHECK_THROWS_AS(integrate_jump(scalar_tensor(1.0, 1.0), c, s), std::invalid_argument);
}

TEST_CASE("Brownian integral is the sum of tensor images")
{
    std::mt19937_64 g(12);
    const auto t0 = random_tensor(2, 3, 2, 2, g), t1 = random_tensor(2, 3, 2, 2, g);
    const TensorProcess tensor({0.0, 0.5, 1.0}, {t0, t1});
    const MatrixXd c0 = random_matrix(2, 2, g);
    const auto c = MatrixProcess::constant(c0, 1.0);
    BrownianPath w;
    w.p = w.q = 2;
    w.grid = {0.0, 0.5, 1.0};
    w.increments = {random_matrix(2, 2, g), random_matrix(2, 2, g)};
    const auto path = integrate_brownian(tensor, c, w);
    MatrixXd expect = MatrixXd::Zero(2, 3);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j)
            for (Index k = 0; k < 2; ++k)
                for (Index l = 0; l < 2; ++l)
                    expect(i, j) += t0(i, j, k, l) * c0(k, l) * w.increments[0](k, l) +
                                    t1(i, j, k, l) * c0(k, l) * w.increments[1](k, l);
    CHECK(max_abs_diff(path.terminal(), expect) < 1e-12);
    CHECK(path.values.front().isZero());

    w.grid = {0.0, 1.0};
    w.increments = {random_matrix(2, 2, g)};
    CHECK_THROWS_WITH_AS(integrate_brownian(tensor, c, w), doctest::Contains("missing coefficient breakpoint"),
                         std::invalid_argument);
}

TEST_CASE("AB and matrix-integrand specializations")
{
    std::mt19937_64 g(13);
    const MatrixXd a = random_matrix(3, 4, g), b = random_matrix(2, 5, g), x = random_matrix(4, 2, g);
    CHECK(max_abs_diff(tensor_apply(tensor_from_ab(a, b), x), a * x * b) < 1e-12);

    const MatrixProcess ap({0.0, 1.0, 2.0}, {a, 2.0 * a});
    const MatrixProcess bp({0.0, 0.5, 2.0}, {b, -b});
    const auto t = specialize_AB(ap, bp);
    CHECK(t.breakpoints() == std::vector<double>{0.0, 0.5, 1.0, 2.0});
    CHECK(max_abs_diff(tensor_apply(t.at(1.5), x), -2.0 * a * x * b) < 1e-12);

    const auto mi = specialize_matrix_integrand(MatrixProcess::constant(b, 1.0));
    CHECK(max_abs_diff(tensor_apply(mi.at(0.0), MatrixXd::Constant(1, 1, 3.0)), 3.0 * b) < 1e-12);
}

TEST_CASE("realized covariations sum increment products")
{
    MartingalePath p;
    p.m = 2;
    p.n = 1;
    MatrixXd d1(2, 1), d2(2, 1);
    d1 << 1, 2;
    d2 << -1, 0.5;
    p.increments = {d1, d2};
    const auto [cols, rows] = realized_column_row_covariations(p);
    CHECK(max_abs_diff(cols.matrix(), d1 * d1.transpose() + d2 * d2.transpose()) < 1e-15);
    CHECK(rows(0, 0) == doctest::Approx(5.0 + 1.25));
}

TEST_CASE("simulated jump martingale has zero mean")
{
    std::mt19937_64 g(14);
    const auto tensor = TensorProcess::constant(random_tensor(2, 2, 2, 1, g), 1.0);
    const auto c = MatrixProcess::constant(random_matrix(2, 1, g), 1.0);
    const auto rate = IntensitySpec::constant(MatrixXd::Constant(2, 1, 2.0), 1.0);
    const auto marks = JumpMarkSpec::two_point(1.0, 0.7);
    std::vector<double> z01;
    for (std::uint64_t r = 0; r < 20000; ++r) {
        const auto path = simulate_counting(rate, marks, StreamKey{21, r});
        z01.push_back(integrate_jump(tensor, c, martingale_jump_stream(path, marks, rate)).terminal()(0, 1));
    }
    const auto s = mean_se(z01);
    CHECK(std::abs(s.mean) <= 4.0 * s.se);
}
