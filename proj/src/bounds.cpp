#include "matcon/bounds.hpp"

#include "matcon/martingale.hpp"
#include "matcon/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace matcon {

SymMatrixXd variance_rate(const Tensor4d& tensor, const MatrixXd& weights)
{
    if (weights.rows() != tensor.p() || weights.cols() != tensor.q())
        throw DimensionError("weights are " + dims_str(weights.rows(), weights.cols()) + ", tensor slices index " +
                             dims_str(tensor.p(), tensor.q()));
    MatrixXd top = MatrixXd::Zero(tensor.m(), tensor.m());
    MatrixXd bottom = MatrixXd::Zero(tensor.n(), tensor.n());
    for (Index l = 0; l < tensor.q(); ++l)
        for (Index k = 0; k < tensor.p(); ++k) {
            const double w = weights(k, l);
            if (w == 0.0)
                continue;
            const auto s = tensor.slice(k, l);
            top.noalias() += w * (s * s.transpose());
            bottom.noalias() += w * (s.transpose() * s);
        }
    return block_diag(SymMatrixXd::symmetrized(top), SymMatrixXd::symmetrized(bottom));
}

SymMatrixXd w_discontinuous(const Tensor4d& tensor, const MatrixXd& c, const MatrixXd& lambda, const MatrixXd& ej2)
{
    if (c.rows() != lambda.rows() || c.cols() != lambda.cols() || c.rows() != ej2.rows() || c.cols() != ej2.cols())
        throw DimensionError("C, λ and E[J²] must share dimensions");
    if ((lambda.array() < 0.0).any())
        throw std::invalid_argument("negative intensity entry");
    if ((ej2.array() < 0.0).any())
        throw std::invalid_argument("negative second moment entry");
    return variance_rate(tensor, ej2.cwiseProduct(c.cwiseAbs2()).cwiseProduct(lambda));
}

SymMatrixXd w_continuous(const Tensor4d& tensor, const MatrixXd& c)
{
    return variance_rate(tensor, c.cwiseAbs2());
}

namespace {

void check_time(double t, std::initializer_list<double> horizons)
{
    if (t < 0.0)
        throw std::invalid_argument("negative time " + std::to_string(t));
    for (double h : horizons)
        if (t > h)
            throw std::invalid_argument("time " + std::to_string(t) + " exceeds process horizon " + std::to_string(h));
}

Index out_dim(const TensorProcess& tensor)
{
    return tensor.values().front().m() + tensor.values().front().n();
}

// Calls f(begin, end) for each piece of the merged partition of [0, t].
template <typename F>
void for_each_piece(const std::vector<double>& grid, F&& f)
{
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        f(grid[i], grid[i + 1]);
}

} // namespace

SymMatrixXd v_t(const TensorProcess& tensor, const MatrixProcess& c, const MatrixProcess& lambda, const MatrixXd& ej2,
                double t)
{
    check_time(t, {tensor.horizon(), c.horizon(), lambda.horizon()});
    SymMatrixXd v(out_dim(tensor));
    if (t == 0.0)
        return v;
    const auto grid = merge_breakpoints({&tensor.breakpoints(), &c.breakpoints(), &lambda.breakpoints()}, t);
    for_each_piece(grid, [&](double a, double b) {
        v += (b - a) * w_discontinuous(tensor.at(a), c.at(a), lambda.at(a), ej2);
    });
    return v;
}

SymMatrixXd v_t_continuous(const TensorProcess& tensor, const MatrixProcess& c, double t)
{
    check_time(t, {tensor.horizon(), c.horizon()});
    SymMatrixXd v(out_dim(tensor));
    if (t == 0.0)
        return v;
    const auto grid = merge_breakpoints({&tensor.breakpoints(), &c.breakpoints()}, t);
    for_each_piece(grid, [&](double a, double b) { v += (b - a) * w_continuous(tensor.at(a), c.at(a)); });
    return v;
}

double sigma_sq(const SymMatrixXd& v) { return lambda_max(v); }

std::pair<double, double> block_norms(const SymMatrixXd& v, Index m)
{
    const Index n = v.dim() - m;
    auto top = SymMatrixXd::from_lower(v.matrix().topLeftCorner(m, m));
    auto bottom = SymMatrixXd::from_lower(v.matrix().bottomRightCorner(n, n));
    return {sym_norm(top), sym_norm(bottom)};
}

double slice_norm_bound(const Tensor4d& tensor)
{
    return std::max(tensor_op_inf_norm(tensor), tensor_op_inf_norm(tensor_transpose(tensor)));
}

double b_t(const TensorProcess& tensor, const MatrixProcess& c, double j_max, double t)
{
    check_time(t, {tensor.horizon(), c.horizon()});
    const auto grid = merge_breakpoints({&tensor.breakpoints(), &c.breakpoints()}, std::max(t, 0.0));
    double best = 0.0;
    auto visit = [&](double s) { best = std::max(best, norm_entry_inf(c.at(s)) * slice_norm_bound(tensor.at(s))); };
    if (grid.size() < 2)
        visit(0.0);
    for_each_piece(grid, [&](double a, double) { visit(a); });
    return j_max * best;
}

double phi(double x)
{
    if (std::abs(x) < 1e-3)
        return x * x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)));
    return std::expm1(x) - x;
}

SymMatrixXd integrability_integral(const TensorProcess& tensor, const MatrixProcess& c, const MatrixProcess& lambda,
                                   const MatrixXd& ej2, double j_max, double t, double xi)
{
    check_time(t, {tensor.horizon(), c.horizon(), lambda.horizon()});
    SymMatrixXd acc(out_dim(tensor));
    if (t == 0.0)
        return acc;
    const auto grid = merge_breakpoints({&tensor.breakpoints(), &c.breakpoints(), &lambda.breakpoints()}, t);
    for_each_piece(grid, [&](double a, double b) {
        const auto& ti = tensor.at(a);
        const auto& ci = c.at(a);
        const double beta = j_max * norm_entry_inf(ci) * slice_norm_bound(ti);
        const double factor = beta > 0.0 ? phi(xi * beta) / (beta * beta) : 0.5 * xi * xi;
        acc += (factor * (b - a)) * w_discontinuous(ti, ci, lambda.at(a), ej2);
    });
    return acc;
}

double freedman_threshold(const BoundQuery& q)
{
    const double u = q.x + std::log(static_cast<double>(q.m + q.n));
    return std::sqrt(2.0 * q.v * u) + q.b * u / 3.0;
}

double bare_threshold(double x, double v, double b) { return std::sqrt(2.0 * v * x) + b * x / 3.0; }

double mean_bound(double sigma, double b, Index m, Index n)
{
    const double l = std::log(static_cast<double>(m + n));
    return sigma * std::sqrt(2.0 * l) + b * l / 3.0;
}

TailRule plug_in_rule(ThresholdForm form, double v, double b, Index m, Index n)
{
    if (form == ThresholdForm::log_dimension)
        return {"log_dimension",
                [=](double x) { return freedman_threshold({x, v, b, m, n}); },
                [](double x) { return std::exp(-x); }};
    return {"dimension_factor",
            [=](double x) { return bare_threshold(x, v, b); },
            [=](double x) { return static_cast<double>(m + n) * std::exp(-x); }};
}

double tropp_variance(const std::vector<SummandCovariance>& summands)
{
    if (summands.empty())
        return 0.0;
    SymMatrixXd left = summands.front().left, right = summands.front().right;
    for (std::size_t i = 1; i < summands.size(); ++i) {
        left += summands[i].left;
        right += summands[i].right;
    }
    return std::max(sym_norm(left), sym_norm(right));
}

double aw_variance(const std::vector<SummandCovariance>& summands)
{
    double left = 0.0, right = 0.0;
    for (const auto& s : summands) {
        left += sym_norm(s.left);
        right += sym_norm(s.right);
    }
    return std::max(left, right);
}

SummandCovariance summand_covariance(const Tensor4d& tensor, const MatrixXd& c, const MatrixXd& variances)
{
    const Index m = tensor.m(), n = tensor.n();
    MatrixXd cov = MatrixXd::Zero(m * n, m * n);
    for (Index l = 0; l < tensor.q(); ++l)
        for (Index k = 0; k < tensor.p(); ++k) {
            const double w = variances(k, l) * c(k, l) * c(k, l);
            if (w == 0.0)
                continue;
            VectorXd f = vec(tensor.slice(k, l));
            cov.noalias() += w * f * f.transpose();
        }
    MatrixXd left = MatrixXd::Zero(m, m), right = MatrixXd::Zero(n, n);
    for (Index j = 0; j < n; ++j)
        left += cov.block(j * m, j * m, m, m);
    for (Index j = 0; j < n; ++j)
        for (Index jp = 0; jp < n; ++jp)
            right(j, jp) = cov.block(j * m, jp * m, m, m).trace();
    return {SymMatrixXd::symmetrized(left), SymMatrixXd::symmetrized(right)};
}

SymMatrixXd w_ab_form(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c, const MatrixXd& lambda,
                      const MatrixXd& ej2)
{
    const Index m = a.rows(), p = a.cols(), q = b.rows(), n = b.cols();
    if (c.rows() != p || c.cols() != q || lambda.rows() != p || lambda.cols() != q || ej2.rows() != p ||
        ej2.cols() != q)
        throw DimensionError("w_ab_form: C, λ, E[J²] must be " + dims_str(p, q));
    const MatrixXd k = ej2.cwiseProduct(c.cwiseAbs2()).cwiseProduct(lambda);
    const VectorXd d1 = k * b.rowwise().squaredNorm();
    const VectorXd d2 = k.transpose() * a.colwise().squaredNorm().transpose();

    MatrixXd d = MatrixXd::Zero(p + q, p + q);
    d.diagonal() << d1, d2;
    MatrixXd proj = MatrixXd::Zero(p + q, m + n);
    proj.topLeftCorner(p, m) = a.transpose();
    proj.bottomRightCorner(q, n) = b;
    return SymMatrixXd::symmetrized(proj.transpose() * d * proj);
}

double b_t_ab(const MatrixProcess& a, const MatrixProcess& b, const MatrixProcess& c, double j_max, double t)
{
    check_time(t, {a.horizon(), b.horizon(), c.horizon()});
    const auto grid = merge_breakpoints({&a.breakpoints(), &b.breakpoints(), &c.breakpoints()}, std::max(t, 0.0));
    double best = 0.0;
    auto visit = [&](double s) {
        best = std::max(best, norm_inf_p(a.at(s), 2) * norm_p_inf(b.at(s), 2) * norm_entry_inf(c.at(s)));
    };
    if (grid.size() < 2)
        visit(0.0);
    for_each_piece(grid, [&](double lo, double) { visit(lo); });
    return j_max * best;
}

VarianceReport analyze(const ScenarioConfig& scenario, double xi)
{
    scenario.validate();
    const auto tensor = scenario.resolved_tensor();
    VarianceReport r;
    if (scenario.driver == Driver::jump) {
        const auto& lam = scenario.intensity.rate();
        const MatrixXd ej2 = scenario.marks.second_moment_matrix(scenario.p, scenario.q);
        r.v = v_t(tensor, scenario.c, lam, ej2, scenario.horizon);
        r.b_t = b_t(tensor, scenario.c, scenario.marks.j_max(), scenario.horizon);
        r.integrability =
            integrability_integral(tensor, scenario.c, lam, ej2, scenario.marks.j_max(), scenario.horizon, xi);
    } else {
        r.v = v_t_continuous(tensor, scenario.c, scenario.horizon);
        r.b_t = 0.0;
        r.integrability = (0.5 * xi * xi) * r.v;
    }
    r.sigma_sq = sigma_sq(r.v);
    r.block_norms = block_norms(r.v, scenario.m);
    return r;
}

TailRule scenario_rule(const ScenarioConfig& scenario, const VarianceReport& report)
{
    return plug_in_rule(scenario.threshold_form, report.sigma_sq, report.b_t, scenario.m, scenario.n);
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"counting_matrix", "scalar_point_process", "static_gaussian",
                                                "static_poisson", "tropp_continuous"};
    return names;
}

namespace {

ScenarioConfig identity_ab_scenario(const std::string& name, const MatrixXd& c, double t)
{
    ScenarioConfig s;
    s.name = name;
    s.preset = name;
    s.p = c.rows();
    s.q = c.cols();
    s.m = s.p;
    s.n = s.q;
    s.form = CoefficientForm::ab;
    s.a = MatrixProcess::constant(MatrixXd::Identity(s.p, s.p), t);
    s.b = MatrixProcess::constant(MatrixXd::Identity(s.q, s.q), t);
    s.c = MatrixProcess::constant(c, t);
    s.horizon = t;
    return s;
}

double max_row_col_l1(const MatrixXd& x) { return std::max(norm_p_inf(x, 1), norm_inf_p(x, 1)); }

} // namespace

PresetResult preset_counting_matrix(const MatrixXd& c, const MatrixXd& lambda, double t)
{
    PresetResult r;
    r.scenario = identity_ab_scenario("counting_matrix", c, t);
    r.scenario.driver = Driver::jump;
    r.scenario.intensity = IntensitySpec::constant(lambda, t);
    r.scenario.marks = JumpMarkSpec::constant_one();
    r.scenario.threshold_form = ThresholdForm::log_dimension;
    r.sigma_sq = max_row_col_l1(t * c.cwiseAbs2().cwiseProduct(lambda));
    r.b_t = norm_entry_inf(c);
    r.rule = plug_in_rule(ThresholdForm::log_dimension, r.sigma_sq, r.b_t, c.rows(), c.cols());
    return r;
}

PresetResult preset_scalar_point_process(const VectorXd& a, const VectorXd& lambda, double t)
{
    if (a.size() != lambda.size())
        throw DimensionError("scalar_point_process: A and λ must have the same length");
    const Index q = a.size();
    PresetResult r;
    auto& s = r.scenario;
    s.name = s.preset = "scalar_point_process";
    s.m = s.n = 1;
    s.p = q;
    s.q = 1;
    s.driver = Driver::jump;
    s.form = CoefficientForm::ab;
    s.a = MatrixProcess::constant(MatrixXd(a.transpose()), t);
    s.b = MatrixProcess::constant(MatrixXd::Ones(1, 1), t);
    s.c = MatrixProcess::constant(MatrixXd::Ones(q, 1), t);
    s.intensity = IntensitySpec::constant(MatrixXd(lambda), t);
    s.marks = JumpMarkSpec::constant_one();
    s.horizon = t;
    s.threshold_form = ThresholdForm::dimension_factor;
    r.sigma_sq = t * a.cwiseAbs2().dot(lambda);
    r.b_t = a.cwiseAbs().maxCoeff();
    r.rule = plug_in_rule(ThresholdForm::dimension_factor, r.sigma_sq, r.b_t, 1, 1);
    return r;
}

PresetResult preset_static_gaussian(const MatrixXd& c)
{
    PresetResult r;
    r.scenario = identity_ab_scenario("static_gaussian", c, 1.0);
    r.scenario.driver = Driver::brownian;
    r.scenario.threshold_form = ThresholdForm::log_dimension;
    r.sigma_sq = max_row_col_l1(c.cwiseAbs2());
    r.b_t = 0.0;
    const double sigma = std::sqrt(r.sigma_sq);
    const double logd = std::log(static_cast<double>(c.rows() + c.cols()));
    // σ√(x + log(n+m)) with cap e^{−x}, as the corollary states it.
    r.rule = {"static_gaussian", [=](double x) { return sigma * std::sqrt(x + logd); },
              [](double x) { return std::exp(-x); }};
    return r;
}

PresetResult preset_static_poisson(const MatrixXd& lambda)
{
    PresetResult r;
    r.scenario = identity_ab_scenario("static_poisson", MatrixXd::Ones(lambda.rows(), lambda.cols()), 1.0);
    r.scenario.driver = Driver::jump;
    r.scenario.intensity = IntensitySpec::constant(lambda, 1.0);
    r.scenario.marks = JumpMarkSpec::constant_one();
    r.scenario.threshold_form = ThresholdForm::dimension_factor;
    r.sigma_sq = max_row_col_l1(lambda);
    r.b_t = 1.0;
    r.rule = plug_in_rule(ThresholdForm::dimension_factor, r.sigma_sq, r.b_t, lambda.rows(), lambda.cols());
    return r;
}

PresetResult preset_tropp_continuous(const MatrixProcess& a, Driver driver)
{
    PresetResult r;
    auto& s = r.scenario;
    const MatrixXd& a0 = a.values().front();
    s.name = s.preset = "tropp_continuous";
    s.m = a0.rows();
    s.n = a0.cols();
    s.p = s.q = 1;
    s.driver = driver;
    s.form = CoefficientForm::matrix_integrand;
    s.a = a;
    s.c = MatrixProcess::constant(MatrixXd::Ones(1, 1), a.horizon());
    s.horizon = a.horizon();
    s.threshold_form = ThresholdForm::dimension_factor;
    if (driver == Driver::jump) {
        s.intensity = IntensitySpec::constant(MatrixXd::Ones(1, 1), a.horizon());
        s.marks = JumpMarkSpec::constant_one();
    }

    MatrixXd left = MatrixXd::Zero(s.m, s.m), right = MatrixXd::Zero(s.n, s.n);
    double sup_norm = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto pc = a.piece(i);
        left += pc.length() * pc.value * pc.value.transpose();
        right += pc.length() * pc.value.transpose() * pc.value;
        sup_norm = std::max(sup_norm, operator_norm(pc.value));
    }
    r.sigma_sq = std::max(sym_norm(SymMatrixXd::symmetrized(left)), sym_norm(SymMatrixXd::symmetrized(right)));
    // Jump driver: b_t is the sup of ‖A_s‖_op, the value the general
    // tensor formula gives for an m×n×1×1 tensor.
    r.b_t = driver == Driver::jump ? sup_norm : 0.0;
    r.rule = plug_in_rule(ThresholdForm::dimension_factor, r.sigma_sq, r.b_t, s.m, s.n);
    return r;
}

namespace {

double param(const std::map<std::string, double>& params, const std::string& key, double fallback)
{
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

Index dim_param(const std::map<std::string, double>& params, const std::string& key, double fallback)
{
    const double v = param(params, key, fallback);
    if (v < 1 || v != std::floor(v))
        throw std::invalid_argument("preset parameter '" + key + "' must be a positive integer");
    return static_cast<Index>(v);
}

} // namespace

PresetResult corollary_preset(const std::string& name, const std::map<std::string, double>& params)
{
    PresetResult r;
    if (name == "counting_matrix") {
        const Index p = dim_param(params, "p", 3), q = dim_param(params, "q", 3);
        r = preset_counting_matrix(MatrixXd::Constant(p, q, param(params, "c", 1.0)),
                                   MatrixXd::Constant(p, q, param(params, "lambda", 1.0)), param(params, "t", 5.0));
    } else if (name == "scalar_point_process") {
        const Index q = dim_param(params, "q", 3);
        VectorXd a(q), lam(q);
        for (Index k = 0; k < q; ++k) {
            a(k) = param(params, "a", 1.0) * static_cast<double>(k + 1) / static_cast<double>(q);
            lam(k) = param(params, "lambda", 1.0) * static_cast<double>(k + 1);
        }
        r = preset_scalar_point_process(a, lam, param(params, "t", 1.0));
    } else if (name == "static_gaussian") {
        r = preset_static_gaussian(
            MatrixXd::Constant(dim_param(params, "n", 5), dim_param(params, "m", 5), param(params, "c", 1.0)));
    } else if (name == "static_poisson") {
        r = preset_static_poisson(
            MatrixXd::Constant(dim_param(params, "n", 5), dim_param(params, "m", 5), param(params, "lambda", 2.0)));
    } else if (name == "tropp_continuous") {
        const Index m = dim_param(params, "m", 3), n = dim_param(params, "n", 2);
        const Index pieces = dim_param(params, "pieces", 4);
        const StreamKey key{static_cast<std::uint64_t>(param(params, "seed", 7.0)), 0};
        std::vector<double> bps;
        std::vector<MatrixXd> vals;
        for (Index k = 0; k <= pieces; ++k)
            bps.push_back(static_cast<double>(k));
        for (Index k = 0; k < pieces; ++k) {
            auto g = key.stream(static_cast<std::uint64_t>(k), 7);
            std::normal_distribution<double> normal;
            MatrixXd ak(m, n);
            for (Index j = 0; j < n; ++j)
                for (Index i = 0; i < m; ++i)
                    ak(i, j) = normal(g);
            vals.push_back(ak);
        }
        r = preset_tropp_continuous(MatrixProcess(bps, vals),
                                    param(params, "jump", 0.0) != 0.0 ? Driver::jump : Driver::brownian);
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    r.scenario.preset_params = params;
    return r;
}

} // namespace matcon
