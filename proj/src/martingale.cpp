#include "matcon/martingale.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace matcon {

namespace {

void check_coefficients(const TensorProcess& tensor, const MatrixProcess& c, Index p, Index q, double horizon)
{
    for (const auto& t : tensor.values())
        if (t.p() != p || t.q() != q)
            throw DimensionError("tensor slices are " + dims_str(t.p(), t.q()) + ", driver is " + dims_str(p, q));
    for (const auto& ci : c.values())
        if (ci.rows() != p || ci.cols() != q)
            throw DimensionError("C is " + dims_str(ci.rows(), ci.cols()) + ", driver is " + dims_str(p, q));
    const auto& t0 = tensor.values().front();
    for (const auto& t : tensor.values())
        if (t.m() != t0.m() || t.n() != t0.n())
            throw DimensionError("tensor pieces have inconsistent output dimensions");
    if (tensor.horizon() < horizon || c.horizon() < horizon)
        throw std::invalid_argument("coefficient horizon is shorter than the driver horizon " + std::to_string(horizon));
}

} // namespace

MartingalePath integrate_jump(const TensorProcess& tensor, const MatrixProcess& c, const JumpStream& driver)
{
    check_coefficients(tensor, c, driver.p, driver.q, driver.horizon);
    const double horizon = driver.horizon;

    MartingalePath path;
    path.m = tensor.values().front().m();
    path.n = tensor.values().front().n();
    path.horizon = horizon;
    path.continuous = false;

    // Drift rate 𝕋_s ∘ (C_s ⊙ E[J]⊙λ_s) on each piece of the merged partition.
    const auto grid = merge_breakpoints(
        {&tensor.breakpoints(), &c.breakpoints(), &driver.drift_rate.breakpoints()}, horizon);
    std::vector<MatrixXd> drift;
    drift.reserve(grid.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double t = grid[i];
        drift.push_back(tensor_apply(tensor.at(t), c.at(t).cwiseProduct(driver.drift_rate.at(t))));
    }

    MatrixXd z = MatrixXd::Zero(path.m, path.n);
    std::size_t piece = 0;
    double now = 0.0;
    auto advance = [&](double until) {
        while (now < until) {
            const double end = std::min(grid[piece + 1], until);
            z.noalias() -= (end - now) * drift[piece];
            now = end;
            if (now >= grid[piece + 1] && piece + 2 < grid.size())
                ++piece;
        }
    };

    path.times.reserve(driver.events.size() + 1);
    path.values.reserve(driver.events.size() + 1);
    path.increments.reserve(driver.events.size());
    for (const auto& e : driver.events) {
        advance(e.time);
        const double weight = c.at(e.time)(e.row, e.col) * e.mark;
        MatrixXd jump = weight * tensor.at(e.time).slice(e.row, e.col);
        z += jump;
        path.times.push_back(e.time);
        path.values.push_back(z);
        path.increments.push_back(std::move(jump));
    }
    advance(horizon);
    path.times.push_back(horizon);
    path.values.push_back(z);
    return path;
}

MartingalePath integrate_brownian(const TensorProcess& tensor, const MatrixProcess& c, const BrownianPath& driver)
{
    if (driver.grid.empty())
        throw std::invalid_argument("Brownian driver has an empty grid");
    const double horizon = driver.grid.back();
    check_coefficients(tensor, c, driver.p, driver.q, horizon);
    for (const auto* bps : {&tensor.breakpoints(), &c.breakpoints()})
        for (double b : *bps)
            if (b > 0.0 && b < horizon && !std::binary_search(driver.grid.begin(), driver.grid.end(), b))
                throw std::invalid_argument("grid is missing coefficient breakpoint t=" + std::to_string(b));

    MartingalePath path;
    path.m = tensor.values().front().m();
    path.n = tensor.values().front().n();
    path.horizon = horizon;
    path.continuous = true;
    path.times = driver.grid;
    path.values.reserve(driver.grid.size());
    path.increments.reserve(driver.increments.size());

    MatrixXd z = MatrixXd::Zero(path.m, path.n);
    path.values.push_back(z);
    for (std::size_t i = 0; i < driver.increments.size(); ++i) {
        const double t = driver.grid[i];
        MatrixXd dz = tensor_apply(tensor.at(t), c.at(t).cwiseProduct(driver.increments[i]));
        z += dz;
        path.values.push_back(z);
        path.increments.push_back(std::move(dz));
    }
    return path;
}

MartingalePath integrate_brownian(const TensorProcess& tensor, const MatrixProcess& c, const std::vector<double>& grid,
                                  const StreamKey& key)
{
    const auto& c0 = c.values().front();
    return integrate_brownian(tensor, c, simulate_brownian(c0.rows(), c0.cols(), grid, key));
}

Tensor4d tensor_from_ab(const MatrixXd& a, const MatrixXd& b)
{
    Tensor4d t(a.rows(), b.cols(), a.cols(), b.rows());
    for (Index l = 0; l < b.rows(); ++l)
        for (Index k = 0; k < a.cols(); ++k)
            t.slice(k, l).noalias() = a.col(k) * b.row(l);
    return t;
}

TensorProcess specialize_AB(const MatrixProcess& a, const MatrixProcess& b)
{
    const double horizon = std::min(a.horizon(), b.horizon());
    const auto grid = merge_breakpoints({&a.breakpoints(), &b.breakpoints()}, horizon);
    std::vector<Tensor4d> vals;
    vals.reserve(grid.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const auto& ai = a.at(grid[i]);
        const auto& bi = b.at(grid[i]);
        if (ai.rows() != a.values().front().rows() || ai.cols() != a.values().front().cols() ||
            bi.rows() != b.values().front().rows() || bi.cols() != b.values().front().cols())
            throw DimensionError("A or B pieces have inconsistent dimensions");
        vals.push_back(tensor_from_ab(ai, bi));
    }
    return TensorProcess(grid, std::move(vals));
}

TensorProcess specialize_matrix_integrand(const MatrixProcess& a)
{
    return a.map([](const MatrixXd& ai) {
        Tensor4d t(ai.rows(), ai.cols(), 1, 1);
        t.slice(0, 0) = ai;
        return t;
    });
}

std::pair<SymMatrixXd, SymMatrixXd> realized_column_row_covariations(const MartingalePath& path)
{
    MatrixXd cols = MatrixXd::Zero(path.m, path.m);
    MatrixXd rows = MatrixXd::Zero(path.n, path.n);
    for (const auto& dz : path.increments) {
        cols.noalias() += dz * dz.transpose();
        rows.noalias() += dz.transpose() * dz;
    }
    return {SymMatrixXd::symmetrized(cols), SymMatrixXd::symmetrized(rows)};
}

} // namespace matcon
