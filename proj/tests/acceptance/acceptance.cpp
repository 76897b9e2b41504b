// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails.

#include "matcon/bounds.hpp"
#include "matcon/martingale.hpp"
#include "matcon/parallel.hpp"
#include "matcon/report.hpp"
#include "matcon/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace matcon;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr double kTroppTol = 1e-12;
constexpr double kAmbTol = 1e-10;
constexpr double kOddPowerTol = 1e-8;
constexpr double kGoldenThompsonTol = 1e-12;
constexpr double kCompensatorTol = 1e-10;

unsigned g_threads = 1;

MatrixXd normal_matrix(Index r, Index c, std::mt19937_64& g)
{
    std::normal_distribution<double> n;
    MatrixXd a(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            a(i, j) = n(g);
    return a;
}

Tensor4d normal_tensor(Index m, Index n, Index p, Index q, std::mt19937_64& g)
{
    Tensor4d t(m, n, p, q);
    for (Index l = 0; l < q; ++l)
        for (Index k = 0; k < p; ++k)
            t.slice(k, l) = normal_matrix(m, n, g);
    return t;
}

ScenarioConfig tensor_scenario(const std::string& name, Driver driver, const TensorProcess& t, const MatrixProcess& c)
{
    ScenarioConfig s;
    const auto& t0 = t.values().front();
    s.name = name;
    s.m = t0.m();
    s.n = t0.n();
    s.p = t0.p();
    s.q = t0.q();
    s.driver = driver;
    s.tensor = t;
    s.c = c;
    s.horizon = t.horizon();
    return s;
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string tail_summary(const TailExperiment& e)
{
    std::string s;
    for (const auto& r : e.rows)
        s += " x=" + fmt(r.x) + ":" + std::to_string(r.exceed_count) + "/" + std::to_string(r.replicates) +
             " ucl=" + fmt(r.upper_cl) + "<=cap=" + fmt(r.cap);
    return s;
}

struct Outcome {
    bool pass;
    std::string detail;
};

int g_failures = 0;

void run(int id, const std::string& title, double time_limit, const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < time_limit;
    const bool pass = o.pass && in_time;
    if (!pass)
        ++g_failures;
    std::printf("criterion %2d %s: %s | %s | %.1fs (limit %.0fs)%s\n", id, pass ? "PASS" : "FAIL", title.c_str(),
                o.detail.c_str(), secs, time_limit, in_time ? "" : " over time");
    std::fflush(stdout);
}

ScenarioConfig criterion1_scenario()
{
    return corollary_preset("counting_matrix", {{"p", 3}, {"q", 3}, {"lambda", 1}, {"c", 1}, {"t", 5}}).scenario;
}

Outcome criterion1()
{
    const auto s = criterion1_scenario();
    const auto e = run_tail_experiment(s, {1, 2, 3}, {kSeed, 100000, g_threads});
    return {e.pass(), "3x3 compensated Poisson, t=5, log_dimension threshold;" + tail_summary(e)};
}

ScenarioConfig criterion2_scenario()
{
    std::mt19937_64 g(2);
    const TensorProcess t({0.0, 0.5, 1.0}, {normal_tensor(4, 2, 3, 2, g), normal_tensor(4, 2, 3, 2, g)});
    const MatrixProcess c({0.0, 0.3, 1.0}, {normal_matrix(3, 2, g), normal_matrix(3, 2, g)});
    return tensor_scenario("brownian_4x2", Driver::brownian, t, c);
}

Outcome criterion2()
{
    const auto s = criterion2_scenario();
    const auto r = analyze(s);
    const auto e = run_tail_experiment(s, {1, 2, 3}, {kSeed, 100000, g_threads});
    return {e.pass() && r.b_t == 0.0, "4x2 Brownian, sigma_sq=" + fmt(r.sigma_sq) + " b=0;" + tail_summary(e)};
}

Outcome criterion3()
{
    std::mt19937_64 g(3);
    const auto cont = tensor_scenario("brownian_2x2", Driver::brownian,
                                      TensorProcess::constant(normal_tensor(2, 2, 2, 2, g), 1.0),
                                      MatrixProcess::constant(0.5 * normal_matrix(2, 2, g), 1.0));
    const auto c = check_supermartingale_continuous(cont, 1.0, {kSeed, 10000, g_threads});
    std::string detail = "continuous xi=1: mean=" + fmt(c.mean) + " se=" + fmt(c.se) + " cap=4";
    bool pass = c.pass;

    const auto poisson =
        corollary_preset("static_poisson", {{"n", 2}, {"m", 2}, {"lambda", 1}}).scenario;
    for (double xi : {1.0, 3.0}) {
        const auto j = check_supermartingale_jump(poisson, xi, {kSeed, 10000, g_threads});
        detail += "; jump xi=" + fmt(xi) + ": mean=" + fmt(j.mean) + " se=" + fmt(j.se);
        pass = pass && j.pass;
    }
    return {pass, detail};
}

Outcome criterion4()
{
    const auto p = corollary_preset("static_gaussian", {{"n", 20}, {"m", 20}, {"c", 1}});
    const double closed_form = std::sqrt(2.0 * 20.0 * std::log(40.0));
    const auto mean = check_mean_bound(p.scenario, {kSeed, 2000, g_threads}, std::sqrt(p.sigma_sq), 0.0);
    const auto tail = run_tail_experiment(p.scenario, {2.0}, {kSeed, 2000, g_threads}, p.rule);
    const bool sigma_ok = p.sigma_sq == 20.0 && analyze(p.scenario).sigma_sq == 20.0;
    return {sigma_ok && mean.mean <= closed_form && tail.pass(),
            "sigma_sq=" + fmt(p.sigma_sq) + " (expect 20); mean|G|=" + fmt(mean.mean) + "<=" + fmt(closed_form) + ";" +
                tail_summary(tail)};
}

Outcome criterion5()
{
    const auto p = corollary_preset("static_poisson", {{"n", 5}, {"m", 5}, {"lambda", 2}});
    const MatrixXd lam = MatrixXd::Constant(5, 5, 2.0);
    const bool norms_ok = norm_p_inf(lam, 1) == 10.0 && norm_inf_p(lam, 1) == 10.0 && p.sigma_sq == 10.0;
    const auto tail = run_tail_experiment(p.scenario, {4.0}, {kSeed, 100000, g_threads}, p.rule);
    return {norms_ok && tail.pass(), "variance term=" + fmt(p.sigma_sq) + " (expect 10); threshold=" +
                                         fmt(p.rule.threshold(4.0)) + ";" + tail_summary(tail)};
}

Outcome criterion6()
{
    std::mt19937_64 g(6);
    std::vector<double> bps{0, 1, 2, 3, 4};
    std::vector<Tensor4d> ts;
    for (int k = 0; k < 4; ++k)
        ts.push_back(normal_tensor(3, 2, 2, 2, g));
    const MatrixXd c = normal_matrix(2, 2, g);
    const auto s = tensor_scenario("tropp_reduction", Driver::brownian, TensorProcess(bps, ts),
                                   MatrixProcess::constant(c, 4.0));
    const double sigma = analyze(s).sigma_sq;
    std::vector<SummandCovariance> summands;
    for (const auto& t : ts)
        summands.push_back(summand_covariance(t, c, MatrixXd::Ones(2, 2)));
    const double tropp = tropp_variance(summands);
    const double err = std::abs(sigma - tropp);
    bool pass = err <= kTroppTol * std::max(1.0, sigma);

    int aw_ok = 0;
    for (int list = 0; list < 100; ++list) {
        std::uniform_int_distribution<int> len(1, 8);
        std::vector<SummandCovariance> xs;
        const int count = len(g);
        for (int i = 0; i < count; ++i)
            xs.push_back(summand_covariance(normal_tensor(3, 4, 2, 3, g), normal_matrix(2, 3, g),
                                            normal_matrix(2, 3, g).cwiseAbs()));
        const double tv = tropp_variance(xs), av = aw_variance(xs);
        aw_ok += av >= tv * (1.0 - 1e-12) ? 1 : 0;
    }
    pass = pass && aw_ok == 100;
    return {pass, "sigma_sq(V_4)=" + fmt(sigma) + " tropp=" + fmt(tropp) + " |diff|=" + fmt(err) +
                      "; aw>=tropp on " + std::to_string(aw_ok) + "/100 lists"};
}

Outcome criterion7()
{
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    double worst_w = 0.0, worst_b = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const MatrixXd a = normal_matrix(3, 4, g), b = normal_matrix(2, 2, g), c = normal_matrix(4, 2, g);
        MatrixXd lam(4, 2);
        for (Index j = 0; j < 2; ++j)
            for (Index i = 0; i < 4; ++i)
                lam(i, j) = u(g);
        const auto marks = JumpMarkSpec::uniform(u(g));
        const MatrixXd ej2 = marks.second_moment_matrix(4, 2);
        const auto general = w_discontinuous(tensor_from_ab(a, b), c, lam, ej2);
        const auto special = w_ab_form(a, b, c, lam, ej2);
        worst_w = std::max(worst_w, (general.matrix() - special.matrix()).cwiseAbs().maxCoeff() /
                                        std::max(1.0, general.matrix().cwiseAbs().maxCoeff()));
        const auto ap = MatrixProcess::constant(a, 1.0), bp = MatrixProcess::constant(b, 1.0),
                   cp = MatrixProcess::constant(c, 1.0);
        const double bg = b_t(specialize_AB(ap, bp), cp, marks.j_max(), 1.0);
        const double bs = b_t_ab(ap, bp, cp, marks.j_max(), 1.0);
        worst_b = std::max(worst_b, std::abs(bg - bs) / std::max(1.0, bg));
    }
    return {worst_w <= kAmbTol && worst_b <= kAmbTol,
            "100 instances (3,2,4,2): max W discrepancy=" + fmt(worst_w) + " max b_t discrepancy=" + fmt(worst_b)};
}

Outcome criterion8()
{
    const auto odd = check_odd_power_bound(100, 4, 6, {0, 1, 2}, kSeed, kOddPowerTol);
    const auto gt = check_golden_thompson(100, 5, kSeed, kGoldenThompsonTol);
    const RunOptions opts{kSeed, 20000, g_threads};
    const auto dev_noise = check_deviation_lemma(diagonal_noise_sampler(3), {1, 2}, opts);
    const auto dev_wigner = check_deviation_lemma(wigner_sampler(3), {1, 2}, opts);
    const auto dev_equal = check_deviation_lemma(equal_pair_sampler(3), {1, 2}, opts);

    std::mt19937_64 g(8);
    ScenarioConfig s = tensor_scenario("compensator_2x2x2x2", Driver::jump,
                                       TensorProcess::constant(normal_tensor(2, 2, 2, 2, g), 1.0),
                                       MatrixProcess::constant(normal_matrix(2, 2, g), 1.0));
    s.intensity = IntensitySpec::constant(normal_matrix(2, 2, g).cwiseAbs(), 1.0);
    s.marks = JumpMarkSpec::two_point(1.0, 0.7);
    const auto comp = check_compensator_domination(s, 1.0, 25, kCompensatorTol);

    const bool pass = odd.pass() && gt.pass() && dev_noise.pass() && dev_wigner.pass() && dev_equal.pass() && comp.pass;
    return {pass, "odd-power " + std::to_string(odd.trials - odd.failures) + "/" + std::to_string(odd.trials) +
                      " worst=" + fmt(odd.worst_margin) + "; golden-thompson " +
                      std::to_string(gt.trials - gt.failures) + "/" + std::to_string(gt.trials) + "; deviation " +
                      verdict(dev_noise.pass()) + "/" + verdict(dev_wigner.pass()) + "/" + verdict(dev_equal.pass()) +
                      "; compensator margin=" + fmt(comp.margin) + " tol=" + fmt(comp.tolerance)};
}

Outcome criterion9()
{
    std::mt19937_64 g(9);
    ScenarioConfig jump = tensor_scenario("variance_jump", Driver::jump,
                                          TensorProcess::constant(normal_tensor(2, 2, 2, 2, g), 2.0),
                                          MatrixProcess::constant(normal_matrix(2, 2, g), 2.0));
    jump.intensity = IntensitySpec::constant(MatrixXd::Constant(2, 2, 1.5), 2.0);
    jump.marks = JumpMarkSpec::uniform(1.0);
    const auto brown = tensor_scenario("variance_brownian", Driver::brownian,
                                       TensorProcess({0.0, 0.5, 1.0}, {normal_tensor(3, 2, 2, 2, g), normal_tensor(3, 2, 2, 2, g)}),
                                       MatrixProcess::constant(normal_matrix(2, 2, g), 1.0));
    const auto a = check_variance_consistency(jump, {kSeed, 10000, g_threads});
    const auto b = check_variance_consistency(brown, {kSeed, 10000, g_threads});
    return {a.pass() && b.pass(), "jump worst |mean-V|/(3SE)=" + fmt(a.worst_ratio) + " sigma_sq " + fmt(a.sigma_sq) +
                                      " vs mc " + fmt(a.sigma_sq_mc) + "; brownian worst=" + fmt(b.worst_ratio) +
                                      " sigma_sq " + fmt(b.sigma_sq) + " vs mc " + fmt(b.sigma_sq_mc)};
}

Outcome criterion10()
{
    const auto s = criterion1_scenario();
    const auto one = tail_csv({run_tail_experiment(s, {1, 2, 3}, {kSeed, 100000, 1})});
    const auto four = tail_csv({run_tail_experiment(s, {1, 2, 3}, {kSeed, 100000, 4})});
    const auto p = corollary_preset("static_gaussian", {{"n", 20}, {"m", 20}});
    const auto g1 = tail_csv({run_tail_experiment(p.scenario, {2}, {kSeed, 2000, 1}, p.rule)});
    const auto g4 = tail_csv({run_tail_experiment(p.scenario, {2}, {kSeed, 2000, 4}, p.rule)});
    return {one == four && g1 == g4, "criterion-1 and criterion-4 CSVs at --threads 1 vs 4: " +
                                         std::string(one == four && g1 == g4 ? "byte-identical" : "differ")};
}

} // namespace

int main(int argc, char** argv)
{
    g_threads = resolve_threads(argc > 1 ? static_cast<unsigned>(std::stoul(argv[1])) : 0);
    run(1, "jump tail bound", 120, criterion1);
    run(2, "Brownian tail bound", 120, criterion2);
    run(3, "trace-exponential supermartingales", 120, criterion3);
    run(4, "Gaussian corollary", 60, criterion4);
    run(5, "Poisson corollary", 60, criterion5);
    run(6, "discrete reduction", 60, criterion6);
    run(7, "AB block form consistency", 60, criterion7);
    run(8, "matrix lemma suite", 60, criterion8);
    run(9, "variance consistency", 120, criterion9);
    run(10, "reproducibility across thread counts", 120, criterion10);
    std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
    return g_failures == 0 ? 0 : 1;
}
