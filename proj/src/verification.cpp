#include "matcon/verification.hpp"

#include "matcon/parallel.hpp"
#include "matcon/process.hpp"
#include "matcon/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace matcon {

namespace {

// Everything a replicate needs that does not depend on the replicate.
struct Simulator {
    const ScenarioConfig& scenario;
    const TensorProcess& tensor;
    IntensitySpec intensity;
    std::vector<double> grid;

    Simulator(const ScenarioConfig& s, const TensorProcess& t) : scenario(s), tensor(t)
    {
        if (s.driver == Driver::jump) {
            const auto& rate = s.intensity.rate();
            intensity = IntensitySpec(rate.restrict_to(merge_breakpoints({&rate.breakpoints()}, s.horizon)));
        } else {
            grid = refine_grid(merge_breakpoints({&t.breakpoints(), &s.c.breakpoints()}, s.horizon), s.grid_steps);
        }
    }

    MartingalePath operator()(const StreamKey& key) const
    {
        if (scenario.driver == Driver::jump) {
            const auto counting = simulate_counting(intensity, scenario.marks, key);
            return integrate_jump(tensor, scenario.c, martingale_jump_stream(counting, scenario.marks, intensity));
        }
        return integrate_brownian(tensor, scenario.c, grid, key);
    }
};

std::vector<double> terminal_norms(const ScenarioConfig& scenario, const RunOptions& opts)
{
    scenario.validate();
    if (opts.replicates < 1)
        throw std::invalid_argument("replicates must be >= 1");
    const auto tensor = scenario.resolved_tensor();
    const Simulator sim(scenario, tensor);
    return parallel_map(opts.replicates, resolve_threads(opts.threads), [&](std::size_t r) {
        return dilation_norm(sim(StreamKey{opts.seed, r}).terminal());
    });
}

std::vector<MatrixXd> terminal_values(const ScenarioConfig& scenario, const TensorProcess& tensor,
                                      const RunOptions& opts)
{
    if (opts.replicates < 1)
        throw std::invalid_argument("replicates must be >= 1");
    const Simulator sim(scenario, tensor);
    return parallel_map(opts.replicates, resolve_threads(opts.threads),
                        [&](std::size_t r) { return MatrixXd(sim(StreamKey{opts.seed, r}).terminal()); });
}

MatrixXd random_normal(Index rows, Index cols, SplitMix64& g)
{
    std::normal_distribution<double> normal;
    MatrixXd x(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            x(i, j) = normal(g);
    return x;
}

SymMatrixXd random_symmetric(Index d, SplitMix64& g)
{
    const MatrixXd x = random_normal(d, d, g);
    return SymMatrixXd::symmetrized(0.5 * (x + x.transpose()));
}

// Entrywise mean and standard error, summed in replicate order.
std::pair<MatrixXd, MatrixXd> matrix_mean_se(const std::vector<MatrixXd>& xs)
{
    const Index r = xs.front().rows(), c = xs.front().cols();
    MatrixXd mean(r, c), se(r, c);
    std::vector<double> entry(xs.size());
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) {
            for (std::size_t k = 0; k < xs.size(); ++k)
                entry[k] = xs[k](i, j);
            const auto ms = mean_se(entry);
            mean(i, j) = ms.mean;
            se(i, j) = ms.se;
        }
    return {mean, se};
}

SupermartingaleCheck summarize(double xi, std::vector<double> values, double cap)
{
    SupermartingaleCheck out;
    out.xi = xi;
    const auto ms = mean_se(values);
    out.values = std::move(values);
    out.mean = ms.mean;
    out.se = ms.se;
    out.cap = cap;
    out.pass = out.mean <= cap + 3.0 * out.se;
    return out;
}

} // namespace

MartingalePath simulate_scenario(const ScenarioConfig& scenario, const TensorProcess& tensor, const StreamKey& key)
{
    return Simulator(scenario, tensor)(key);
}

MartingalePath simulate_scenario(const ScenarioConfig& scenario, const StreamKey& key)
{
    scenario.validate();
    const auto tensor = scenario.resolved_tensor();
    return simulate_scenario(scenario, tensor, key);
}

double dilation_norm(const MatrixXd& z) { return std::max(0.0, lambda_max(dilation(z))); }

// ---------------------------------------------------------------------------

bool TailExperiment::pass() const
{
    return std::all_of(rows.begin(), rows.end(), [](const TailRow& r) { return r.pass; });
}

TailExperiment run_tail_experiment(const ScenarioConfig& scenario, const std::vector<double>& x_values,
                                   const RunOptions& opts, const TailRule& rule)
{
    const auto norms = terminal_norms(scenario, opts);
    TailExperiment out;
    out.scenario = scenario.name;
    out.rule = rule.label;
    out.seed = opts.seed;
    const auto n = static_cast<std::int64_t>(norms.size());
    for (double x : x_values) {
        TailRow row;
        row.x = x;
        row.threshold = rule.threshold(x);
        row.replicates = n;
        // A zero norm never counts: with v = b = 0 the threshold is 0 and Z ≡ 0.
        row.exceed_count = std::count_if(norms.begin(), norms.end(),
                                         [&](double v) { return v > 0.0 && v >= row.threshold; });
        row.emp_prob = static_cast<double>(row.exceed_count) / static_cast<double>(n);
        row.upper_cl = clopper_pearson_upper(row.exceed_count, n, 0.01);
        row.cap = rule.cap(x);
        row.pass = row.upper_cl <= row.cap;
        out.rows.push_back(row);
    }
    return out;
}

TailExperiment run_tail_experiment(const ScenarioConfig& scenario, const std::vector<double>& x_values,
                                   const RunOptions& opts)
{
    const auto report = analyze(scenario);
    return run_tail_experiment(scenario, x_values, opts, scenario_rule(scenario, report));
}

// ---------------------------------------------------------------------------

SupermartingaleCheck check_supermartingale_continuous(const ScenarioConfig& scenario, double xi,
                                                      const RunOptions& opts)
{
    scenario.validate();
    if (scenario.driver != Driver::brownian)
        throw std::invalid_argument("continuous supermartingale check needs a Brownian scenario");
    if (!(xi >= 0.0) || !std::isfinite(xi))
        throw std::invalid_argument("xi must be finite and >= 0");
    const auto tensor = scenario.resolved_tensor();
    const SymMatrixXd shift = (0.5 * xi * xi) * v_t_continuous(tensor, scenario.c, scenario.horizon);
    const auto zs = terminal_values(scenario, tensor, opts);
    std::vector<double> values(zs.size());
    for (std::size_t r = 0; r < zs.size(); ++r) {
        const auto te = trace_exp(SymMatrixXd(xi * dilation(zs[r]) - shift));
        if (te.overflow)
            throw std::runtime_error("xi too large: trace exponential overflows at replicate " + std::to_string(r));
        values[r] = te.value;
    }
    return summarize(xi, std::move(values), static_cast<double>(scenario.m + scenario.n));
}

SupermartingaleCheck check_supermartingale_jump(const ScenarioConfig& scenario, double xi, const RunOptions& opts)
{
    scenario.validate();
    if (scenario.driver != Driver::jump)
        throw std::invalid_argument("jump supermartingale check needs a jump scenario");
    if (!(xi >= 0.0 && xi <= 3.0))
        throw std::invalid_argument("xi must lie in [0, 3]");
    const auto tensor = scenario.resolved_tensor();
    const double j_max = scenario.marks.j_max();
    const double b = b_t(tensor, scenario.c, j_max, scenario.horizon);
    if (!(b > 0.0))
        throw std::invalid_argument("scenario has b_t = 0; the jump check needs b_t > 0");
    const double theta = xi / b;
    const auto& lam = scenario.intensity.rate();
    const MatrixXd ej2 = scenario.marks.second_moment_matrix(scenario.p, scenario.q);
    const SymMatrixXd shift = integrability_integral(tensor, scenario.c, lam, ej2, j_max, scenario.horizon, theta);

    const auto zs = terminal_values(scenario, tensor, opts);
    std::vector<double> values(zs.size());
    for (std::size_t r = 0; r < zs.size(); ++r) {
        const auto te = trace_exp(SymMatrixXd(theta * dilation(zs[r]) - shift));
        if (te.overflow)
            throw std::runtime_error("xi too large: trace exponential overflows at replicate " + std::to_string(r));
        values[r] = te.value;
    }
    return summarize(xi, std::move(values), static_cast<double>(scenario.m + scenario.n));
}

// ---------------------------------------------------------------------------

bool DeviationCheck::pass() const
{
    return std::all_of(rows.begin(), rows.end(), [](const DeviationRow& r) { return r.pass; });
}

DeviationCheck check_deviation_lemma(const SymPairSampler& sampler, const std::vector<double>& x_values,
                                     const RunOptions& opts, double slack)
{
    if (opts.replicates < 1)
        throw std::invalid_argument("replicates must be >= 1");
    struct Sample {
        double gap = 0.0;
        double trace = 0.0;
    };
    const auto samples = parallel_map(opts.replicates, resolve_threads(opts.threads), [&](std::size_t r) {
        auto g = StreamKey{opts.seed, r}.stream(0, 11);
        const auto [x, y] = sampler(g);
        const auto te = trace_exp(SymMatrixXd(x - y));
        if (te.overflow)
            throw std::runtime_error("deviation lemma sampler: trace exponential overflows");
        return Sample{lambda_max(x) - lambda_max(y), te.value};
    });

    std::vector<double> traces(samples.size());
    for (std::size_t r = 0; r < samples.size(); ++r)
        traces[r] = samples[r].trace;
    const auto k = mean_se(traces);
    const auto n = static_cast<std::int64_t>(samples.size());

    DeviationCheck out;
    for (double x : x_values) {
        DeviationRow row;
        row.x = x;
        row.exceed_count =
            std::count_if(samples.begin(), samples.end(), [&](const Sample& s) { return s.gap >= x; });
        row.upper_cl = clopper_pearson_upper(row.exceed_count, n, 0.01);
        row.k_hat = k.mean;
        row.k_upper = k.mean + 3.0 * k.se;
        row.bound = row.k_upper * std::exp(-x) * (1.0 + slack);
        row.pass = row.upper_cl <= row.bound;
        out.rows.push_back(row);
    }
    return out;
}

SymPairSampler equal_pair_sampler(Index d)
{
    return [d](SplitMix64& g) {
        auto y = random_symmetric(d, g);
        return std::make_pair(y, y);
    };
}

SymPairSampler diagonal_noise_sampler(Index d, double noise_sd)
{
    return [d, noise_sd](SplitMix64& g) {
        auto y = random_symmetric(d, g);
        std::normal_distribution<double> normal(0.0, noise_sd);
        VectorXd noise(d);
        for (Index i = 0; i < d; ++i)
            noise(i) = normal(g);
        auto x = y + SymMatrixXd::diagonal(noise);
        return std::make_pair(x, y);
    };
}

SymPairSampler wigner_sampler(Index d)
{
    return [d](SplitMix64& g) { return std::make_pair(random_symmetric(d, g), SymMatrixXd(d)); };
}

double odd_power_margin(const MatrixXd& x, int k)
{
    if (k < 0)
        throw std::invalid_argument("k must be >= 0");
    const auto lhs = sym_int_pow(dilation(x), 2 * k + 1);
    const double e = static_cast<double>(k) + 0.5;
    const auto rhs = block_diag(psd_pow(SymMatrixXd::symmetrized(x * x.transpose()), e),
                                psd_pow(SymMatrixXd::symmetrized(x.transpose() * x), e));
    const double scale = std::max(1.0, std::pow(operator_norm(x), 2 * k + 1));
    return psd_margin(lhs, rhs) / scale;
}

LemmaCheck check_odd_power_bound(std::size_t trials, Index m, Index n, const std::vector<int>& k_values,
                                 std::uint64_t seed, double tol)
{
    LemmaCheck out;
    out.name = "odd_power";
    for (std::size_t t = 0; t < trials; ++t) {
        auto g = StreamKey{seed, t}.stream(0, 21);
        const MatrixXd x = random_normal(m, n, g);
        for (int k : k_values) {
            const double margin = odd_power_margin(x, k);
            ++out.trials;
            out.worst_margin = std::min(out.worst_margin, margin);
            if (margin < -tol)
                ++out.failures;
        }
    }
    return out;
}

LemmaCheck check_golden_thompson(std::size_t trials, Index d, std::uint64_t seed, double tol)
{
    LemmaCheck out;
    out.name = "golden_thompson";
    for (std::size_t t = 0; t < trials; ++t) {
        auto g = StreamKey{seed, t}.stream(0, 31);
        const auto a = random_symmetric(d, g);
        const auto b = random_symmetric(d, g);
        const double lhs = trace_exp(SymMatrixXd(a + b)).value;
        const double rhs = (sym_exp(a).matrix() * sym_exp(b).matrix()).trace();
        const double margin = (rhs - lhs) / std::max(1.0, std::abs(rhs));
        ++out.trials;
        out.worst_margin = std::min(out.worst_margin, margin);
        if (margin < -tol)
            ++out.failures;
    }
    return out;
}

// ---------------------------------------------------------------------------

SymMatrixXd dilation_power(const MatrixXd& t, int k)
{
    if (k < 0)
        throw std::invalid_argument("k must be >= 0");
    const Index m = t.rows(), n = t.cols();
    const int j = k / 2;
    const MatrixXd g1 = sym_int_pow(SymMatrixXd::symmetrized(t * t.transpose()), j).matrix();
    MatrixXd out = MatrixXd::Zero(m + n, m + n);
    if (k % 2 == 0) {
        const MatrixXd g2 = sym_int_pow(SymMatrixXd::symmetrized(t.transpose() * t), j).matrix();
        out.topLeftCorner(m, m) = g1;
        out.bottomRightCorner(n, n) = g2;
    } else {
        const MatrixXd h = g1 * t;
        out.topRightCorner(m, n) = h;
        out.bottomLeftCorner(n, m) = h.transpose();
    }
    return SymMatrixXd::symmetrized(out);
}

CompensatorSeries check_compensator_domination(const ScenarioConfig& scenario, double xi, int K, double tol)
{
    if (K < 2)
        throw std::invalid_argument("truncation K must be >= 2");
    scenario.validate();
    if (scenario.driver != Driver::jump)
        throw std::invalid_argument("compensator check needs a jump scenario");
    if (!(xi >= 0.0) || !std::isfinite(xi))
        throw std::invalid_argument("xi must be finite and >= 0");

    const auto tensor = scenario.resolved_tensor();
    const auto& lam = scenario.intensity.rate();
    const auto& marks = scenario.marks;
    const double j_max = marks.j_max();
    const Index m = scenario.m, n = scenario.n;

    std::vector<double> moments(static_cast<std::size_t>(K) + 1, 0.0);
    for (int k = 2; k <= K; ++k)
        moments[static_cast<std::size_t>(k)] = marks.moment(k);
    const double log_fact = std::lgamma(static_cast<double>(K) + 2.0);

    CompensatorSeries out;
    out.K = K;
    out.xi = xi;
    MatrixXd acc = MatrixXd::Zero(m + n, m + n);
    const auto grid =
        merge_breakpoints({&tensor.breakpoints(), &scenario.c.breakpoints(), &lam.breakpoints()}, scenario.horizon);
    for (std::size_t piece = 0; piece + 1 < grid.size(); ++piece) {
        const double s = grid[piece], delta = grid[piece + 1] - s;
        const auto& ti = tensor.at(s);
        const auto& ci = scenario.c.at(s);
        const auto& li = lam.at(s);
        const double beta = j_max * norm_entry_inf(ci) * slice_norm_bound(ti);
        if (xi * beta > 0.0)
            out.tail += delta * li.sum() *
                        std::exp((K + 1) * std::log(xi * beta) - log_fact + xi * beta);

        for (Index l = 0; l < scenario.q; ++l)
            for (Index k = 0; k < scenario.p; ++k) {
                const double rate = li(k, l), c = ci(k, l);
                if (rate == 0.0 || c == 0.0)
                    continue;
                const MatrixXd slice = ti.slice(k, l);
                const MatrixXd g1 = slice * slice.transpose();
                const MatrixXd g2 = slice.transpose() * slice;
                MatrixXd g1_pow = MatrixXd::Identity(m, m); // (TTᵀ)^j
                MatrixXd g2_pow = MatrixXd::Identity(n, n); // (TᵀT)^j
                double coef = delta * rate * xi * c;        // Δλ ξᵏ cᵏ / k!, at k = 1
                for (int power = 2; power <= K; ++power) {
                    coef *= xi * c / power;
                    const double w = coef * moments[static_cast<std::size_t>(power)];
                    if (power % 2 == 0) {
                        g1_pow = g1_pow * g1;
                        g2_pow = g2_pow * g2;
                        if (w != 0.0) {
                            acc.topLeftCorner(m, m) += w * g1_pow;
                            acc.bottomRightCorner(n, n) += w * g2_pow;
                        }
                    } else if (w != 0.0) {
                        const MatrixXd h = w * (g1_pow * slice);
                        acc.topRightCorner(m, n) += h;
                        acc.bottomLeftCorner(n, m) += h.transpose();
                    }
                }
            }
    }
    out.lambda_hat = SymMatrixXd::symmetrized(acc);
    out.rhs = integrability_integral(tensor, scenario.c, lam,
                                     marks.second_moment_matrix(scenario.p, scenario.q), j_max, scenario.horizon, xi);
    out.margin = psd_margin(out.lambda_hat, out.rhs);
    const double scale = std::max({1.0, sym_norm(out.rhs), sym_norm(out.lambda_hat)});
    out.tolerance = tol * scale + out.tail;
    out.pass = out.margin >= -out.tolerance;
    return out;
}

// ---------------------------------------------------------------------------

VarianceConsistency check_variance_consistency(const ScenarioConfig& scenario, const RunOptions& opts)
{
    scenario.validate();
    if (opts.replicates < 2)
        throw std::invalid_argument("variance consistency needs at least 2 replicates");
    const auto tensor = scenario.resolved_tensor();
    const Simulator sim(scenario, tensor);
    struct Sample {
        MatrixXd top, bottom, zzt, ztz;
    };
    const auto samples = parallel_map(opts.replicates, resolve_threads(opts.threads), [&](std::size_t r) {
        const auto path = sim(StreamKey{opts.seed, r});
        const auto [top, bottom] = realized_column_row_covariations(path);
        const MatrixXd& z = path.terminal();
        return Sample{top.matrix(), bottom.matrix(), z * z.transpose(), z.transpose() * z};
    });

    auto column = [&](auto member) {
        std::vector<MatrixXd> xs;
        xs.reserve(samples.size());
        for (const auto& s : samples)
            xs.push_back(s.*member);
        return matrix_mean_se(xs);
    };
    const auto [mean_top, se_top] = column(&Sample::top);
    const auto [mean_bottom, se_bottom] = column(&Sample::bottom);
    const auto [mean_zzt, se_zzt] = column(&Sample::zzt);
    const auto [mean_ztz, se_ztz] = column(&Sample::ztz);

    VarianceConsistency out;
    out.v = analyze(scenario).v;
    out.mean_top = SymMatrixXd::symmetrized(mean_top);
    out.mean_bottom = SymMatrixXd::symmetrized(mean_bottom);
    out.se_top = se_top;
    out.se_bottom = se_bottom;

    const Index m = scenario.m, n = scenario.n;
    const MatrixXd v_top = out.v.matrix().topLeftCorner(m, m);
    const MatrixXd v_bottom = out.v.matrix().bottomRightCorner(n, n);
    out.entries_pass = true;
    auto compare = [&](const MatrixXd& mean, const MatrixXd& se, const MatrixXd& exact) {
        for (Index j = 0; j < mean.cols(); ++j)
            for (Index i = 0; i < mean.rows(); ++i) {
                const double diff = std::abs(mean(i, j) - exact(i, j));
                const double allowed = 3.0 * se(i, j) + 1e-12 * std::max(1.0, std::abs(exact(i, j)));
                if (diff > allowed)
                    out.entries_pass = false;
                if (se(i, j) > 0.0)
                    out.worst_ratio = std::max(out.worst_ratio, diff / (3.0 * se(i, j)));
            }
    };
    compare(mean_top, se_top, v_top);
    compare(mean_bottom, se_bottom, v_bottom);

    out.sigma_sq = sigma_sq(out.v);
    out.sigma_sq_mc = std::max(sym_norm(SymMatrixXd::symmetrized(mean_zzt)), sym_norm(SymMatrixXd::symmetrized(mean_ztz)));
    out.sigma_sq_tol = 3.0 * std::max(se_zzt.norm(), se_ztz.norm()) + 1e-12 * std::max(1.0, out.sigma_sq);
    out.sigma_pass = std::abs(out.sigma_sq_mc - out.sigma_sq) <= out.sigma_sq_tol;
    return out;
}

MeanBoundCheck check_mean_bound(const ScenarioConfig& scenario, const RunOptions& opts, double sigma, double b)
{
    const auto norms = terminal_norms(scenario, opts);
    const auto ms = mean_se(norms);
    MeanBoundCheck out;
    out.mean = ms.mean;
    out.se = ms.se;
    out.bound = mean_bound(sigma, b, scenario.m, scenario.n);
    out.pass = out.mean <= out.bound + 3.0 * out.se;
    return out;
}

MeanBoundCheck check_mean_bound(const ScenarioConfig& scenario, const RunOptions& opts)
{
    const auto report = analyze(scenario);
    return check_mean_bound(scenario, opts, std::sqrt(report.sigma_sq), report.b_t);
}

} // namespace matcon
