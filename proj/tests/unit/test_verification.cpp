#include "doctest.h"
#include "support.hpp"

#include "matcon/verification.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace matcon;
using namespace testing_support;

namespace {

ScenarioConfig jump_tensor_scenario(const Tensor4d& t, const MatrixXd& c, const MatrixXd& lam,
                                    const JumpMarkSpec& marks, double horizon)
{
    ScenarioConfig s;
    s.m = t.m();
    s.n = t.n();
    s.p = t.p();
    s.q = t.q();
    s.driver = Driver::jump;
    s.tensor = TensorProcess::constant(t, horizon);
    s.c = MatrixProcess::constant(c, horizon);
    s.intensity = IntensitySpec::constant(lam, horizon);
    s.marks = marks;
    s.horizon = horizon;
    return s;
}

// E[exp(ξ c J 𝒮) − ξ c J 𝒮 − I] for a two-valued J, by eigendecomposition.
MatrixXd slice_compensator_oracle(const MatrixXd& slice, double c, double xi, double a, double prob)
{
    const MatrixXd d = dilation(slice).matrix();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(d);
    auto term = [&](double j) {
        const VectorXd ev = (xi * c * j * es.eigenvalues().array()).exp().matrix();
        return MatrixXd(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose() - xi * c * j * d -
                        MatrixXd::Identity(d.rows(), d.cols()));
    };
    return prob * term(a) + (1.0 - prob) * term(-a);
}

} // namespace

TEST_CASE("C = 0 gives zero exceedances and exact zero covariations")
{
    auto s = jump_tensor_scenario(Tensor4d::slicewise_identity(2, 2), MatrixXd::Zero(2, 2), MatrixXd::Ones(2, 2),
                                  JumpMarkSpec::constant_one(), 1.0);
    const auto e = run_tail_experiment(s, {1.0, 2.0}, {1, 200, 1});
    for (const auto& r : e.rows)
        CHECK(r.exceed_count == 0);
    CHECK(e.pass());
    const auto v = check_variance_consistency(s, {1, 50, 1});
    CHECK(v.mean_top.matrix().isZero());
    CHECK(v.pass());
    const auto mb = check_mean_bound(s, {1, 50, 1});
    CHECK(mb.mean == 0.0);
    CHECK(mb.pass);
}

TEST_CASE("tail experiment output does not depend on thread count")
{
    const auto p = corollary_preset("counting_matrix", {{"p", 2}, {"q", 2}, {"t", 1}});
    const auto a = run_tail_experiment(p.scenario, {0.5, 1.0}, {7, 2000, 1}, p.rule);
    const auto b = run_tail_experiment(p.scenario, {0.5, 1.0}, {7, 2000, 3}, p.rule);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].exceed_count == b.rows[i].exceed_count);
        CHECK(a.rows[i].upper_cl == b.rows[i].upper_cl);
    }
}

TEST_CASE("supermartingale checks at ξ = 0 give m + n exactly")
{
    const auto g = corollary_preset("static_gaussian", {{"n", 2}, {"m", 3}});
    const auto c = check_supermartingale_continuous(g.scenario, 0.0, {1, 20, 1});
    for (double v : c.values)
        CHECK(v == doctest::Approx(5.0).epsilon(1e-14));
    const auto p = corollary_preset("static_poisson", {{"n", 2}, {"m", 2}, {"lambda", 1}});
    const auto j = check_supermartingale_jump(p.scenario, 0.0, {1, 20, 1});
    CHECK(j.mean == doctest::Approx(4.0));
    CHECK_THROWS_AS(check_supermartingale_jump(g.scenario, 1.0, {1, 20, 1}), std::invalid_argument);
    CHECK_THROWS_AS(check_supermartingale_jump(p.scenario, 3.5, {1, 20, 1}), std::invalid_argument);
}

TEST_CASE("deviation lemma on trivial and noisy pairs")
{
    const auto eq = check_deviation_lemma(equal_pair_sampler(3), {1.0}, {1, 500, 1});
    CHECK(eq.rows[0].exceed_count == 0);
    CHECK(eq.rows[0].k_hat == doctest::Approx(3.0));
    CHECK(eq.pass());
    CHECK(check_deviation_lemma(diagonal_noise_sampler(3), {2.0}, {2, 5000, 1}).pass());
}

TEST_CASE("odd-power bound")
{
    CHECK(odd_power_margin(MatrixXd::Zero(2, 3), 1) == doctest::Approx(0.0));
    // X = [1], k = 1: 𝒮³ = [[0,1],[1,0]], RHS = I.
    CHECK(odd_power_margin(MatrixXd::Ones(1, 1), 1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(check_odd_power_bound(20, 4, 6, {0, 1, 2}, 3).pass());
}

TEST_CASE("Golden-Thompson")
{
    CHECK(check_golden_thompson(20, 5, 4).pass());
}

TEST_CASE("dilation_power agrees with repeated multiplication")
{
    std::mt19937_64 g(51);
    const MatrixXd t = random_matrix(3, 2, g);
    MatrixXd d = dilation(t).matrix(), acc = MatrixXd::Identity(5, 5);
    for (int k = 0; k <= 7; ++k) {
        CHECK(max_abs_diff(dilation_power(t, k).matrix(), acc) < 1e-10 * std::max(1.0, acc.norm()));
        acc = acc * d;
    }
}

TEST_CASE("compensator series: scalar constant marks")
{
    // 𝒮([1]) has even powers I and odd powers [[0,1],[1,0]], so λ_max(Λ̂) is
    // Σ_{k=2}^K ξᵏ/k! · λt while the right side is φ(ξ)λt·I.
    auto s = jump_tensor_scenario(Tensor4d::slicewise_identity(1, 1), MatrixXd::Ones(1, 1),
                                  MatrixXd::Constant(1, 1, 2.0), JumpMarkSpec::constant_one(), 1.5);
    const auto r = check_compensator_domination(s, 0.8, 6);
    double even = 0.0, odd = 0.0, term = 1.0;
    for (int k = 1; k <= 6; ++k) {
        term *= 0.8 / k;
        if (k >= 2)
            (k % 2 == 0 ? even : odd) += term;
    }
    CHECK(r.lambda_hat(0, 0) == doctest::Approx(even * 3.0).epsilon(1e-13));
    CHECK(r.lambda_hat(0, 1) == doctest::Approx(odd * 3.0).epsilon(1e-13));
    CHECK(lambda_max(r.lambda_hat) == doctest::Approx((even + odd) * 3.0).epsilon(1e-13));
    CHECK(r.rhs(0, 0) == doctest::Approx(phi(0.8) * 3.0).epsilon(1e-13));
    CHECK(r.pass);
    CHECK_THROWS_AS(check_compensator_domination(s, 1.0, 1), std::invalid_argument);
}

TEST_CASE("compensator series converges to the exact expectation")
{
    std::mt19937_64 g(52);
    const Tensor4d t = random_tensor(2, 2, 2, 2, g);
    const MatrixXd c = 0.5 * random_matrix(2, 2, g);
    MatrixXd lam(2, 2);
    lam << 1.0, 0.5, 2.0, 0.0;
    const auto marks = JumpMarkSpec::two_point(0.8, 0.7);
    const auto s = jump_tensor_scenario(t, c, lam, marks, 1.3);
    const double xi = 0.6;
    MatrixXd exact = MatrixXd::Zero(4, 4);
    for (Index k = 0; k < 2; ++k)
        for (Index l = 0; l < 2; ++l)
            exact += 1.3 * lam(k, l) * slice_compensator_oracle(t.slice(k, l), c(k, l), xi, 0.8, 0.7);
    const auto r = check_compensator_domination(s, xi, 30);
    CHECK(max_abs_diff(r.lambda_hat.matrix(), exact) < 1e-10);
    CHECK(r.pass);
}

TEST_CASE("compensator domination at small ξ")
{
    std::mt19937_64 g(53);
    const auto s = jump_tensor_scenario(random_tensor(2, 2, 2, 2, g), random_matrix(2, 2, g), MatrixXd::Ones(2, 2),
                                        JumpMarkSpec::uniform(1.0), 1.0);
    const auto r = check_compensator_domination(s, 0.1, 25);
    CHECK(r.pass);
    CHECK(r.tail < 1e-20);
}

TEST_CASE("variance consistency on scalar Poisson")
{
    const auto p = corollary_preset("counting_matrix", {{"p", 1}, {"q", 1}, {"t", 5}});
    const auto v = check_variance_consistency(p.scenario, {3, 4000, 2});
    CHECK(v.mean_top(0, 0) == doctest::Approx(5.0).epsilon(0.05));
    CHECK(v.pass());
}
