#ifndef MATCON_BOUNDS_HPP
#define MATCON_BOUNDS_HPP

#include "matcon/linalg.hpp"
#include "matcon/piecewise.hpp"
#include "matcon/scenario.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace matcon {

// ---------------------------------------------------------------------------
// Variance rate W_s and its integral V_t

/// blockdiag(𝕋𝕋ᵀ ∘ K, 𝕋ᵀ𝕋 ∘ K) for a nonnegative p×q weight matrix K.
SymMatrixXd variance_rate(const Tensor4d& tensor, const MatrixXd& weights);

/// W_s for a compensated compound counting driver: K = E[J²] ⊙ C² ⊙ λ.
SymMatrixXd w_discontinuous(const Tensor4d& tensor, const MatrixXd& c, const MatrixXd& lambda, const MatrixXd& ej2);

/// W_s for a Brownian driver: K = C².
SymMatrixXd w_continuous(const Tensor4d& tensor, const MatrixXd& c);

/// V_t = ∫₀ᵗ W_s ds, exact over constant pieces.
SymMatrixXd v_t(const TensorProcess& tensor, const MatrixProcess& c, const MatrixProcess& lambda, const MatrixXd& ej2,
                double t);
SymMatrixXd v_t_continuous(const TensorProcess& tensor, const MatrixProcess& c, double t);

double sigma_sq(const SymMatrixXd& v);

/// Operator norms of the two diagonal blocks of V (sizes m and n).
std::pair<double, double> block_norms(const SymMatrixXd& v, Index m);

/// max(‖𝕋‖_{op;∞}, ‖𝕋ᵀ‖_{op;∞})
double slice_norm_bound(const Tensor4d& tensor);

/// b_t = J_max · sup_{s ≤ t} ‖C_s‖_∞ · max(‖𝕋_s‖_{op;∞}, ‖𝕋_sᵀ‖_{op;∞})
double b_t(const TensorProcess& tensor, const MatrixProcess& c, double j_max, double t);

/// φ(x) = eˣ − 1 − x
double phi(double x);

/// ∫₀ᵗ φ(ξβ_s)/β_s² · W_s ds with β_s = J_max‖C_s‖_∞ max(‖𝕋_s‖_{op;∞}, ‖𝕋_sᵀ‖_{op;∞}).
/// Pieces with β_s = 0 contribute (ξ²/2)·W_s·Δs.
SymMatrixXd integrability_integral(const TensorProcess& tensor, const MatrixProcess& c, const MatrixProcess& lambda,
                                   const MatrixXd& ej2, double j_max, double t, double xi = 3.0);

// ---------------------------------------------------------------------------
// Thresholds

struct BoundQuery {
    double x = 1.0;
    double v = 0.0;
    double b = 0.0;
    Index m = 1;
    Index n = 1;
};

/// √(2v(x + log(m+n))) + b(x + log(m+n))/3
double freedman_threshold(const BoundQuery& q);

/// √(2vx) + bx/3, the form paired with the (m+n)e^{−x} cap.
double bare_threshold(double x, double v, double b);

/// σ√(2 log(m+n)) + b log(m+n)/3
double mean_bound(double sigma, double b, Index m, Index n);

/// A tail statement P[‖Z‖ ≥ threshold(x)] ≤ cap(x).
struct TailRule {
    std::string label;
    std::function<double(double)> threshold;
    std::function<double(double)> cap;
};

TailRule plug_in_rule(ThresholdForm form, double v, double b, Index m, Index n);

// ---------------------------------------------------------------------------
// Discrete series comparisons

struct SummandCovariance {
    SymMatrixXd left;  // E[S Sᵀ]
    SymMatrixXd right; // E[Sᵀ S]
};

/// max(‖Σ E SSᵀ‖, ‖Σ E SᵀS‖)
double tropp_variance(const std::vector<SummandCovariance>& summands);
/// max(Σ ‖E SSᵀ‖, Σ ‖E SᵀS‖)
double aw_variance(const std::vector<SummandCovariance>& summands);

/// Covariances of S = 𝕋 ∘ (C ⊙ G) where the entries of G are independent,
/// centered, with variances `variances`. Built from the covariance of vec(S).
SummandCovariance summand_covariance(const Tensor4d& tensor, const MatrixXd& c, const MatrixXd& variances);

// ---------------------------------------------------------------------------
// Z_t = ∫ A (C ⊙ dM) B

/// Pᵀ · blockdiag(diag[K·diag[BBᵀ]·1], diag[Kᵀ·diag[AᵀA]·1]) · P with
/// P = blockdiag(Aᵀ, B) and K = E[J²] ⊙ C² ⊙ λ.
SymMatrixXd w_ab_form(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c, const MatrixXd& lambda,
                      const MatrixXd& ej2);

/// J_max · sup ‖A_s‖_{∞,2} ‖B_s‖_{2,∞} ‖C_s‖_∞
double b_t_ab(const MatrixProcess& a, const MatrixProcess& b, const MatrixProcess& c, double j_max, double t);

// ---------------------------------------------------------------------------
// Whole-scenario analysis

struct VarianceReport {
    SymMatrixXd v;
    double sigma_sq = 0.0;
    double b_t = 0.0;
    std::pair<double, double> block_norms{0.0, 0.0};
    SymMatrixXd integrability;
};

/// V_t, σ², b_t and the integrability integral at ξ for a scenario. For a
/// Brownian driver b_t = 0 and the integrability entry is (ξ²/2)·V_t.
VarianceReport analyze(const ScenarioConfig& scenario, double xi = 3.0);

/// Plug-in rule (v = σ², b = b_t) in the scenario's threshold form.
TailRule scenario_rule(const ScenarioConfig& scenario, const VarianceReport& report);

// ---------------------------------------------------------------------------
// Closed-form corollaries

struct PresetResult {
    ScenarioConfig scenario;
    double sigma_sq = 0.0;
    double b_t = 0.0;
    TailRule rule;
};

const std::vector<std::string>& preset_names();

PresetResult preset_counting_matrix(const MatrixXd& c, const MatrixXd& lambda, double t);
PresetResult preset_scalar_point_process(const VectorXd& a, const VectorXd& lambda, double t);
PresetResult preset_static_gaussian(const MatrixXd& c);
PresetResult preset_static_poisson(const MatrixXd& lambda);
PresetResult preset_tropp_continuous(const MatrixProcess& a, Driver driver);

/// Builds a preset from numeric parameters; missing parameters take
/// defaults. Throws std::invalid_argument for unknown names.
PresetResult corollary_preset(const std::string& name, const std::map<std::string, double>& params = {});

} // namespace matcon

#endif
