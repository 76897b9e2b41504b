#include "matcon/process.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace matcon {

IntensitySpec::IntensitySpec(MatrixProcess rate) : rate_(std::move(rate))
{
    const auto& vals = rate_.values();
    for (const auto& v : vals) {
        if (v.rows() != vals.front().rows() || v.cols() != vals.front().cols())
            throw DimensionError("intensity pieces have inconsistent dimensions");
        if (!v.allFinite() || (v.array() < 0.0).any())
            throw std::invalid_argument("intensity entries must be finite and nonnegative");
    }
}

std::string to_string(MarkLaw law)
{
    switch (law) {
    case MarkLaw::constant_one: return "constant_one";
    case MarkLaw::uniform: return "uniform";
    case MarkLaw::rademacher_scaled: return "rademacher_scaled";
    case MarkLaw::two_point: return "two_point";
    }
    return "?";
}

MarkLaw mark_law_from_string(const std::string& s)
{
    if (s == "constant_one")
        return MarkLaw::constant_one;
    if (s == "uniform")
        return MarkLaw::uniform;
    if (s == "rademacher_scaled")
        return MarkLaw::rademacher_scaled;
    if (s == "two_point")
        return MarkLaw::two_point;
    throw std::invalid_argument("unknown mark law '" + s + "'");
}

JumpMarkSpec::JumpMarkSpec(MarkLaw law, double a, double prob) : law_(law), a_(a), prob_(prob)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("mark bound a must be finite and > 0");
    if (!(prob >= 0.0 && prob <= 1.0))
        throw std::invalid_argument("two_point probability must lie in [0, 1]");
}

double JumpMarkSpec::moment(int k) const
{
    if (k < 0)
        throw std::invalid_argument("negative moment order");
    if (k == 0)
        return 1.0;
    switch (law_) {
    case MarkLaw::constant_one:
        return 1.0;
    case MarkLaw::uniform:
        return k % 2 == 1 ? 0.0 : std::pow(a_, k) / (k + 1);
    case MarkLaw::rademacher_scaled:
        return k % 2 == 1 ? 0.0 : std::pow(a_, k);
    case MarkLaw::two_point:
        return k % 2 == 1 ? std::pow(a_, k) * (2.0 * prob_ - 1.0) : std::pow(a_, k);
    }
    return 0.0;
}

double JumpMarkSpec::draw(SplitMix64& g) const
{
    switch (law_) {
    case MarkLaw::constant_one:
        return 1.0;
    case MarkLaw::uniform:
        return a_ * (2.0 * uniform01(g) - 1.0);
    case MarkLaw::rademacher_scaled:
        return uniform01(g) < 0.5 ? a_ : -a_;
    case MarkLaw::two_point:
        return uniform01(g) < prob_ ? a_ : -a_;
    }
    return 0.0;
}

std::size_t CountingPath::total_jumps() const
{
    std::size_t n = 0;
    for (const auto& e : entries)
        n += e.size();
    return n;
}

MatrixXd CountingPath::counts_until(double t) const
{
    MatrixXd out = MatrixXd::Zero(p, q);
    for (Index l = 0; l < q; ++l)
        for (Index k = 0; k < p; ++k) {
            const auto& js = at(k, l);
            out(k, l) = static_cast<double>(
                std::upper_bound(js.begin(), js.end(), t, [](double v, const Jump& j) { return v < j.time; }) -
                js.begin());
        }
    return out;
}

namespace {

// Exponential inter-arrivals measured in integrated intensity, carried
// across the breakpoints of the rate.
std::vector<Jump> sample_entry(const MatrixProcess& rate, Index k, Index l, const JumpMarkSpec& marks,
                               SplitMix64 g)
{
    std::vector<Jump> out;
    auto next_exp = [&g] { return -std::log1p(-uniform01(g)); };
    double remaining = next_exp();
    for (std::size_t piece = 0; piece < rate.size(); ++piece) {
        const auto pc = rate.piece(piece);
        const double r = pc.value(k, l);
        double t = pc.begin;
        if (r <= 0.0)
            continue;
        while (true) {
            const double capacity = r * (pc.end - t);
            if (remaining >= capacity) {
                remaining -= capacity;
                break;
            }
            t += remaining / r;
            if (!out.empty() && !(t > out.back().time))
                t = std::nextafter(out.back().time, pc.end);
            out.push_back({t, marks.draw(g)});
            remaining = next_exp();
        }
    }
    return out;
}

} // namespace

CountingPath simulate_counting(const IntensitySpec& intensity, const JumpMarkSpec& marks, const StreamKey& key)
{
    CountingPath path;
    path.p = intensity.p();
    path.q = intensity.q();
    path.horizon = intensity.horizon();
    path.entries.resize(static_cast<std::size_t>(path.p * path.q));

    std::vector<std::uint64_t> attempt(path.entries.size(), 0);
    for (std::size_t e = 0; e < path.entries.size(); ++e) {
        const Index k = static_cast<Index>(e) % path.p, l = static_cast<Index>(e) / path.p;
        path.entries[e] = sample_entry(intensity.rate(), k, l, marks, key.stream(e, 0));
    }

    // Ties across entries have probability zero; in floating point they are
    // resolved by redrawing the higher-indexed entry on a fresh substream.
    for (;;) {
        std::vector<std::pair<double, std::size_t>> all;
        all.reserve(path.total_jumps());
        for (std::size_t e = 0; e < path.entries.size(); ++e)
            for (const auto& j : path.entries[e])
                all.emplace_back(j.time, e);
        std::sort(all.begin(), all.end());
        std::size_t clash = path.entries.size();
        for (std::size_t i = 1; i < all.size(); ++i)
            if (all[i].first == all[i - 1].first) {
                clash = std::max(all[i].second, all[i - 1].second);
                break;
            }
        if (clash == path.entries.size())
            break;
        const Index k = static_cast<Index>(clash) % path.p, l = static_cast<Index>(clash) / path.p;
        path.entries[clash] = sample_entry(intensity.rate(), k, l, marks, key.stream(clash, ++attempt[clash]));
    }
    return path;
}

MatrixXd compensator_at(const IntensitySpec& intensity, double t)
{
    if (t < 0.0 || t > intensity.horizon())
        throw std::out_of_range("compensator time " + std::to_string(t) + " outside [0, " +
                                std::to_string(intensity.horizon()) + "]");
    MatrixXd acc = MatrixXd::Zero(intensity.p(), intensity.q());
    const auto& rate = intensity.rate();
    for (std::size_t i = 0; i < rate.size(); ++i) {
        const auto pc = rate.piece(i);
        if (pc.begin >= t)
            break;
        acc += (std::min(pc.end, t) - pc.begin) * pc.value;
    }
    return acc;
}

std::vector<MatrixXd> compensator_path(const IntensitySpec& intensity, const std::vector<double>& grid)
{
    std::vector<MatrixXd> out;
    out.reserve(grid.size());
    for (double t : grid)
        out.push_back(compensator_at(intensity, t));
    return out;
}

JumpStream martingale_jump_stream(const CountingPath& path, const JumpMarkSpec& marks, const IntensitySpec& intensity)
{
    if (path.p != intensity.p() || path.q != intensity.q())
        throw DimensionError("counting path is " + dims_str(path.p, path.q) + ", intensity is " +
                             dims_str(intensity.p(), intensity.q()));
    JumpStream s;
    s.p = path.p;
    s.q = path.q;
    s.horizon = path.horizon;
    for (Index l = 0; l < path.q; ++l)
        for (Index k = 0; k < path.p; ++k)
            for (const auto& j : path.at(k, l))
                s.events.push_back({j.time, k, l, j.mark});
    std::sort(s.events.begin(), s.events.end(), [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
    const double mean = marks.moment(1);
    s.drift_rate = intensity.rate().map([mean](const MatrixXd& lam) -> MatrixXd { return mean * lam; });
    return s;
}

MatrixXd JumpStream::value_at(double t) const
{
    MatrixXd m = MatrixXd::Zero(p, q);
    for (const auto& e : events) {
        if (e.time > t)
            break;
        m(e.row, e.col) += e.mark;
    }
    for (std::size_t i = 0; i < drift_rate.size(); ++i) {
        const auto pc = drift_rate.piece(i);
        if (pc.begin >= t)
            break;
        m -= (std::min(pc.end, t) - pc.begin) * pc.value;
    }
    return m;
}

MatrixXd BrownianPath::value_at_index(std::size_t i) const
{
    MatrixXd m = MatrixXd::Zero(p, q);
    for (std::size_t j = 0; j < i; ++j)
        m += increments[j];
    return m;
}

BrownianPath simulate_brownian(Index p, Index q, const std::vector<double>& grid, const StreamKey& key)
{
    BrownianPath path;
    path.p = p;
    path.q = q;
    path.grid = grid;
    if (grid.size() < 2)
        return path;
    if (grid.front() != 0.0)
        throw std::invalid_argument("Brownian grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("Brownian grid must be strictly increasing");

    const std::size_t steps = grid.size() - 1;
    path.increments.assign(steps, MatrixXd::Zero(p, q));
    for (Index l = 0; l < q; ++l)
        for (Index k = 0; k < p; ++k) {
            auto g = key.stream(static_cast<std::uint64_t>(l * p + k), 1);
            std::normal_distribution<double> normal(0.0, 1.0);
            for (std::size_t i = 0; i < steps; ++i)
                path.increments[i](k, l) = std::sqrt(grid[i + 1] - grid[i]) * normal(g);
        }
    return path;
}

std::vector<double> refine_grid(const std::vector<double>& breakpoints, int steps)
{
    if (steps < 1)
        throw std::invalid_argument("grid refinement needs at least one step per piece");
    std::vector<double> out{breakpoints.front()};
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i], b = breakpoints[i + 1];
        for (int s = 1; s < steps; ++s)
            out.push_back(a + (b - a) * s / steps);
        out.push_back(b);
    }
    return out;
}

} // namespace matcon
