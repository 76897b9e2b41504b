#ifndef MATCON_VERIFICATION_HPP
#define MATCON_VERIFICATION_HPP

#include "matcon/bounds.hpp"
#include "matcon/martingale.hpp"
#include "matcon/rng.hpp"
#include "matcon/scenario.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace matcon {

struct RunOptions {
    std::uint64_t seed = 42;
    std::size_t replicates = 1000;
    unsigned threads = 1; // 0: MATCON_THREADS or 1
};

/// One replicate of Z on [0, horizon]; replicate r reads StreamKey{seed, r}.
MartingalePath simulate_scenario(const ScenarioConfig& scenario, const TensorProcess& tensor, const StreamKey& key);
MartingalePath simulate_scenario(const ScenarioConfig& scenario, const StreamKey& key);

/// ‖Z‖_op computed as λ_max of the dilation.
double dilation_norm(const MatrixXd& z);

// ---------------------------------------------------------------------------
// Tail experiments

struct TailRow {
    double x = 0.0;
    double threshold = 0.0;
    std::int64_t replicates = 0;
    std::int64_t exceed_count = 0;
    double emp_prob = 0.0;
    double upper_cl = 0.0; // exact one-sided 99%
    double cap = 0.0;
    bool pass = false;
};

struct TailExperiment {
    std::string scenario;
    std::string rule;
    std::uint64_t seed = 0;
    std::vector<TailRow> rows;
    bool pass() const;
};

TailExperiment run_tail_experiment(const ScenarioConfig& scenario, const std::vector<double>& x_values,
                                   const RunOptions& opts, const TailRule& rule);
/// Plug-in rule v = σ², b = b_t in the scenario's threshold form.
TailExperiment run_tail_experiment(const ScenarioConfig& scenario, const std::vector<double>& x_values,
                                   const RunOptions& opts);

// ---------------------------------------------------------------------------
// Trace-exponential supermartingales

struct SupermartingaleCheck {
    double xi = 0.0;
    std::vector<double> values; // L per replicate
    double mean = 0.0;
    double se = 0.0;
    double cap = 0.0; // m + n
    bool pass = false;
};

/// L = tr exp(ξ·𝒮(Z_t) − (ξ²/2)·V_t). Brownian scenarios only.
SupermartingaleCheck check_supermartingale_continuous(const ScenarioConfig& scenario, double xi,
                                                      const RunOptions& opts);

/// L = tr exp((ξ/b)·𝒮(Z_t) − ∫ φ((ξ/b)β_s)/β_s² W_s ds) with b = b_t. Jump
/// scenarios with b_t > 0 only; ξ ∈ [0, 3].
SupermartingaleCheck check_supermartingale_jump(const ScenarioConfig& scenario, double xi, const RunOptions& opts);

// ---------------------------------------------------------------------------
// Lemma checks

using SymPairSampler = std::function<std::pair<SymMatrixXd, SymMatrixXd>(SplitMix64&)>;

struct DeviationRow {
    double x = 0.0;
    std::int64_t exceed_count = 0;
    double upper_cl = 0.0; // of P[λ_max(X) ≥ λ_max(Y) + x]
    double k_hat = 0.0;    // mean of tr exp(X − Y)
    double k_upper = 0.0;  // k_hat + 3·SE
    double bound = 0.0;    // k_upper·e^{−x}·(1 + slack)
    bool pass = false;
};

struct DeviationCheck {
    std::vector<DeviationRow> rows;
    bool pass() const;
};

DeviationCheck check_deviation_lemma(const SymPairSampler& sampler, const std::vector<double>& x_values,
                                     const RunOptions& opts, double slack = 0.0);

/// Samplers used by the lemma suite, all of dimension d.
SymPairSampler equal_pair_sampler(Index d);
SymPairSampler diagonal_noise_sampler(Index d, double noise_sd = 1.0);
SymPairSampler wigner_sampler(Index d);

struct LemmaCheck {
    std::string name;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double worst_margin = 0.0; // most negative normalized margin seen
    bool pass() const { return failures == 0; }
};

/// 𝒮(X)^{2k+1} ≼ blockdiag((XXᵀ)^{k+1/2}, (XᵀX)^{k+1/2}) on random m×n X,
/// with tolerance tol·max(1, ‖X‖^{2k+1}).
LemmaCheck check_odd_power_bound(std::size_t trials, Index m, Index n, const std::vector<int>& k_values,
                                 std::uint64_t seed, double tol = 1e-8);

/// Same check on a single matrix, returning the normalized margin.
double odd_power_margin(const MatrixXd& x, int k);

/// tr exp(A + B) ≤ tr(exp(A) exp(B)) on random symmetric d×d pairs.
LemmaCheck check_golden_thompson(std::size_t trials, Index d, std::uint64_t seed, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Compensator of tr exp(ξ𝒮(Z)) for jump drivers

struct CompensatorSeries {
    int K = 0;
    double xi = 0.0;
    SymMatrixXd lambda_hat; // Σ_pieces Δ Σ_ab λ_ab Σ_{k=2..K} ξᵏ/k! C_abᵏ E[Jᵏ] 𝒮(𝕋_ab)ᵏ
    SymMatrixXd rhs;        // integrability integral at ξ
    double tail = 0.0;      // bound on the operator norm of the dropped terms
    double tolerance = 0.0; // tol·scale + tail
    double margin = 0.0;    // λ_min(rhs − lambda_hat)
    bool pass = false;
};

/// 𝒮(T)ᵏ for a single slice, assembled from the Gram blocks:
///   even 2j  blockdiag((TTᵀ)ʲ, (TᵀT)ʲ)
///   odd 2j+1 off-diagonal T(TᵀT)ʲ and its transpose
SymMatrixXd dilation_power(const MatrixXd& t, int k);

CompensatorSeries check_compensator_domination(const ScenarioConfig& scenario, double xi, int K = 25,
                                               double tol = 1e-10);

// ---------------------------------------------------------------------------
// Moment checks

struct VarianceConsistency {
    SymMatrixXd v;            // analytic V_t
    SymMatrixXd mean_top;     // MC mean of Σ ΔZ ΔZᵀ
    SymMatrixXd mean_bottom;  // MC mean of Σ ΔZᵀ ΔZ
    MatrixXd se_top;
    MatrixXd se_bottom;
    double worst_ratio = 0.0; // max |mean − V| / (3·SE) over entries
    double sigma_sq = 0.0;
    double sigma_sq_mc = 0.0; // max(‖mean ZZᵀ‖, ‖mean ZᵀZ‖)
    double sigma_sq_tol = 0.0;
    bool entries_pass = false;
    bool sigma_pass = false;
    bool pass() const { return entries_pass && sigma_pass; }
};

VarianceConsistency check_variance_consistency(const ScenarioConfig& scenario, const RunOptions& opts);

struct MeanBoundCheck {
    double mean = 0.0;
    double se = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// MC mean of ‖Z_t‖ against σ√(2log(m+n)) + b log(m+n)/3 (+3·SE).
MeanBoundCheck check_mean_bound(const ScenarioConfig& scenario, const RunOptions& opts);
MeanBoundCheck check_mean_bound(const ScenarioConfig& scenario, const RunOptions& opts, double sigma, double b);

} // namespace matcon

#endif
