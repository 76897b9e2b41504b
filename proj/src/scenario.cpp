#include "matcon/scenario.hpp"

#include "matcon/martingale.hpp"

namespace matcon {

std::string to_string(Driver d) { return d == Driver::jump ? "jump" : "brownian"; }

std::string to_string(CoefficientForm f)
{
    switch (f) {
    case CoefficientForm::tensor: return "tensor";
    case CoefficientForm::ab: return "ab";
    case CoefficientForm::matrix_integrand: return "matrix_integrand";
    }
    return "?";
}

std::string to_string(ThresholdForm f)
{
    return f == ThresholdForm::log_dimension ? "log_dimension" : "dimension_factor";
}

Driver driver_from_string(const std::string& s)
{
    if (s == "jump")
        return Driver::jump;
    if (s == "brownian")
        return Driver::brownian;
    throw ConfigError("driver", "expected 'jump' or 'brownian', got '" + s + "'");
}

ThresholdForm threshold_form_from_string(const std::string& s)
{
    if (s == "log_dimension")
        return ThresholdForm::log_dimension;
    if (s == "dimension_factor")
        return ThresholdForm::dimension_factor;
    throw ConfigError("threshold_form", "expected 'log_dimension' or 'dimension_factor', got '" + s + "'");
}

TensorProcess ScenarioConfig::resolved_tensor() const
{
    switch (form) {
    case CoefficientForm::tensor: return tensor;
    case CoefficientForm::ab: return specialize_AB(a, b);
    case CoefficientForm::matrix_integrand: return specialize_matrix_integrand(a);
    }
    throw ConfigError("coefficients", "unknown coefficient form");
}

std::vector<double> ScenarioConfig::brownian_grid() const
{
    const auto t = resolved_tensor();
    return refine_grid(merge_breakpoints({&t.breakpoints(), &c.breakpoints()}, horizon), grid_steps);
}

namespace {

template <typename Value, typename Check>
void check_pieces(const PiecewiseProcess<Value>& proc, const std::string& field, double horizon, Check&& check)
{
    if (proc.size() == 0)
        throw ConfigError(field, "missing");
    if (proc.horizon() < horizon)
        throw ConfigError(field + ".breakpoints", "ends at " + std::to_string(proc.horizon()) +
                                                      ", before the horizon " + std::to_string(horizon));
    for (std::size_t i = 0; i < proc.size(); ++i)
        check(proc.values()[i], field + ".values[" + std::to_string(i) + "]");
}

void check_matrix(const MatrixXd& v, const std::string& field, Index rows, const std::string& rows_field, Index cols,
                  const std::string& cols_field)
{
    if (v.rows() != rows)
        throw ConfigError(field, "rows (" + std::to_string(v.rows()) + ") does not match " + rows_field + " (" +
                                     std::to_string(rows) + ")");
    if (v.cols() != cols)
        throw ConfigError(field, "cols (" + std::to_string(v.cols()) + ") does not match " + cols_field + " (" +
                                     std::to_string(cols) + ")");
    if (!v.allFinite())
        throw ConfigError(field, "non-finite entry");
}

} // namespace

void ScenarioConfig::validate() const
{
    if (m < 1 || n < 1 || p < 1 || q < 1)
        throw ConfigError("dims", "all dimensions must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ConfigError("horizon", "must be finite and > 0");
    if (grid_steps < 1)
        throw ConfigError("grid_steps", "must be >= 1");

    switch (form) {
    case CoefficientForm::tensor:
        check_pieces(tensor, "T", horizon, [&](const Tensor4d& t, const std::string& f) {
            if (t.m() != m || t.n() != n || t.p() != p || t.q() != q)
                throw ConfigError(f, "tensor dims do not match dims (m,n,p,q)");
            if (!t.all_finite())
                throw ConfigError(f, "non-finite entry");
        });
        break;
    case CoefficientForm::ab:
        check_pieces(a, "AB.A", horizon,
                     [&](const MatrixXd& v, const std::string& f) { check_matrix(v, f, m, "dims.m", p, "dims.p"); });
        check_pieces(b, "AB.B", horizon,
                     [&](const MatrixXd& v, const std::string& f) { check_matrix(v, f, q, "dims.q", n, "dims.n"); });
        break;
    case CoefficientForm::matrix_integrand:
        if (p != 1 || q != 1)
            throw ConfigError("dims", "matrix integrand form needs p = q = 1");
        check_pieces(a, "integrand", horizon,
                     [&](const MatrixXd& v, const std::string& f) { check_matrix(v, f, m, "dims.m", n, "dims.n"); });
        break;
    }
    check_pieces(c, "C", horizon,
                 [&](const MatrixXd& v, const std::string& f) { check_matrix(v, f, p, "dims.p", q, "dims.q"); });

    if (driver == Driver::jump) {
        check_pieces(intensity.rate(), "intensity", horizon, [&](const MatrixXd& v, const std::string& f) {
            check_matrix(v, f, p, "dims.p", q, "dims.q");
        });
    }
}

} // namespace matcon
