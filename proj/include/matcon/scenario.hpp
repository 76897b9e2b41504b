#ifndef MATCON_SCENARIO_HPP
#define MATCON_SCENARIO_HPP

#include "matcon/linalg.hpp"
#include "matcon/piecewise.hpp"
#include "matcon/process.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace matcon {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& reason)
        : std::runtime_error(field + ": " + reason), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class Driver { jump, brownian };
enum class CoefficientForm { tensor, ab, matrix_integrand };

/// Which version of the tail statement an experiment checks:
///   log_dimension     ‖Z‖ ≥ √(2v(x+log(m+n))) + b(x+log(m+n))/3 with cap e^{−x}
///   dimension_factor  ‖Z‖ ≥ √(2vx) + bx/3 with cap (m+n)e^{−x}
enum class ThresholdForm { log_dimension, dimension_factor };

std::string to_string(Driver d);
std::string to_string(CoefficientForm f);
std::string to_string(ThresholdForm f);
Driver driver_from_string(const std::string& s);
ThresholdForm threshold_form_from_string(const std::string& s);

/// Full description of one experiment: Z_t = ∫₀ᵗ 𝕋_s ∘ (C_s ⊙ dM_s) with a
/// jump or Brownian driver and deterministic piecewise-constant coefficients.
struct ScenarioConfig {
    std::string name = "scenario";
    Index m = 1, n = 1, p = 1, q = 1;
    Driver driver = Driver::jump;

    CoefficientForm form = CoefficientForm::tensor;
    TensorProcess tensor; // form == tensor
    MatrixProcess a;      // form == ab (m×p) or matrix_integrand (m×n)
    MatrixProcess b;      // form == ab (q×n)
    MatrixProcess c;      // p×q

    IntensitySpec intensity; // jump only
    JumpMarkSpec marks;      // jump only

    double horizon = 1.0;
    int grid_steps = 1; // Brownian: uniform substeps per coefficient piece
    ThresholdForm threshold_form = ThresholdForm::log_dimension;

    std::string preset;                       // optional tag
    std::map<std::string, double> preset_params;

    /// 𝕋_s for whichever coefficient form is in use.
    TensorProcess resolved_tensor() const;

    /// Brownian integration grid: every coefficient breakpoint refined by
    /// `grid_steps`.
    std::vector<double> brownian_grid() const;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

} // namespace matcon

#endif
