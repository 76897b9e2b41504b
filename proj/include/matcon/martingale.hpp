#ifndef MATCON_MARTINGALE_HPP
#define MATCON_MARTINGALE_HPP

#include "matcon/linalg.hpp"
#include "matcon/piecewise.hpp"
#include "matcon/process.hpp"

#include <utility>
#include <vector>

namespace matcon {

/// Realization of Z_t = ∫₀ᵗ 𝕋_s ∘ (C_s ⊙ dM_s).
///
/// Jump driver: `times`/`values` hold Z right after each driver event and,
/// last, at the horizon; `increments` holds the jump ΔZ of each event.
/// Brownian driver: `times` is the grid, `values[i]` is Z at grid[i] and
/// `increments[i]` is Z(grid[i+1]) − Z(grid[i]).
struct MartingalePath {
    Index m = 0;
    Index n = 0;
    double horizon = 0.0;
    bool continuous = false;
    std::vector<double> times;
    std::vector<MatrixXd> values;
    std::vector<MatrixXd> increments;

    const MatrixXd& terminal() const { return values.back(); }
};

MartingalePath integrate_jump(const TensorProcess& tensor, const MatrixProcess& c, const JumpStream& driver);

/// Requires every coefficient breakpoint inside the grid's span to be a grid
/// point; the law of Z at grid times is then exact.
MartingalePath integrate_brownian(const TensorProcess& tensor, const MatrixProcess& c, const BrownianPath& driver);
MartingalePath integrate_brownian(const TensorProcess& tensor, const MatrixProcess& c, const std::vector<double>& grid,
                                  const StreamKey& key);

/// 𝕋(i,j;k,l) = A(i,k)·B(l,j), so that 𝕋∘X = A·X·B.
Tensor4d tensor_from_ab(const MatrixXd& a, const MatrixXd& b);
TensorProcess specialize_AB(const MatrixProcess& a, const MatrixProcess& b);

/// 𝕋 of shape m×n×1×1 with 𝕋(·,·;0,0) = A, for a scalar driver.
TensorProcess specialize_matrix_integrand(const MatrixProcess& a);

/// (Σ_j [Z_{•,j}]_t, Σ_j [Z_{j,•}]_t) = (Σ ΔZ ΔZᵀ, Σ ΔZᵀ ΔZ).
std::pair<SymMatrixXd, SymMatrixXd> realized_column_row_covariations(const MartingalePath& path);

} // namespace matcon

#endif
