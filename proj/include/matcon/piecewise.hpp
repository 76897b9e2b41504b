#ifndef MATCON_PIECEWISE_HPP
#define MATCON_PIECEWISE_HPP

#include "matcon/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace matcon {

/// Deterministic piecewise-constant process on [0, horizon]. Piece k holds
/// on [t_k, t_{k+1}); the horizon itself belongs to the last piece.
template <typename Value>
class PiecewiseProcess {
public:
    struct Piece {
        double begin;
        double end;
        const Value& value;
        double length() const { return end - begin; }
    };

    PiecewiseProcess() = default;

    PiecewiseProcess(std::vector<double> breakpoints, std::vector<Value> values)
        : breaks_(std::move(breakpoints)), values_(std::move(values))
    {
        if (breaks_.size() < 2)
            throw std::invalid_argument("piecewise process needs at least two breakpoints");
        if (breaks_.front() != 0.0)
            throw std::invalid_argument("piecewise process must start at t=0");
        for (std::size_t i = 1; i < breaks_.size(); ++i)
            if (!(breaks_[i] > breaks_[i - 1]) || !std::isfinite(breaks_[i]))
                throw std::invalid_argument("breakpoints must be finite and strictly increasing");
        if (values_.size() + 1 != breaks_.size())
            throw std::invalid_argument("piecewise process has " + std::to_string(values_.size()) +
                                        " values for " + std::to_string(breaks_.size()) + " breakpoints");
    }

    static PiecewiseProcess constant(Value v, double horizon) { return PiecewiseProcess({0.0, horizon}, {std::move(v)}); }

    double horizon() const { return breaks_.back(); }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<Value>& values() const { return values_; }
    Piece piece(std::size_t k) const { return {breaks_[k], breaks_[k + 1], values_[k]}; }

    std::size_t piece_index(double t) const
    {
        if (t < 0.0 || t > horizon())
            throw std::out_of_range("time " + std::to_string(t) + " outside [0, " + std::to_string(horizon()) + "]");
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        std::size_t k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
        return std::min(k, values_.size() - 1);
    }

    const Value& at(double t) const { return values_[piece_index(t)]; }

    /// Same process expressed on a finer set of breakpoints. `grid` must
    /// start at 0, end at or before the horizon, and be strictly increasing.
    PiecewiseProcess restrict_to(const std::vector<double>& grid) const
    {
        std::vector<Value> vals;
        vals.reserve(grid.size() - 1);
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            vals.push_back(at(grid[i]));
        return PiecewiseProcess(grid, std::move(vals));
    }

    template <typename F>
    auto map(F&& f) const
    {
        using Out = std::decay_t<decltype(f(values_.front()))>;
        std::vector<Out> out;
        out.reserve(values_.size());
        for (const auto& v : values_)
            out.push_back(f(v));
        return PiecewiseProcess<Out>(breaks_, std::move(out));
    }

private:
    std::vector<double> breaks_;
    std::vector<Value> values_;
};

using MatrixProcess = PiecewiseProcess<MatrixXd>;
using TensorProcess = PiecewiseProcess<Tensor4d>;

/// Sorted union of breakpoint sets, clipped to [0, horizon].
inline std::vector<double> merge_breakpoints(std::initializer_list<const std::vector<double>*> sets, double horizon)
{
    std::vector<double> out{0.0, horizon};
    for (const auto* s : sets)
        for (double t : *s)
            if (t > 0.0 && t < horizon)
                out.push_back(t);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace matcon

#endif
