#ifndef MATCON_PROCESS_HPP
#define MATCON_PROCESS_HPP

#include "matcon/linalg.hpp"
#include "matcon/piecewise.hpp"
#include "matcon/rng.hpp"

#include <string>
#include <vector>

namespace matcon {

/// Deterministic piecewise-constant intensity matrix λ_t (p×q, entries ≥ 0).
class IntensitySpec {
public:
    IntensitySpec() = default;
    explicit IntensitySpec(MatrixProcess rate);

    static IntensitySpec constant(const MatrixXd& lambda, double horizon)
    {
        return IntensitySpec(MatrixProcess::constant(lambda, horizon));
    }

    const MatrixProcess& rate() const { return rate_; }
    Index p() const { return rate_.values().front().rows(); }
    Index q() const { return rate_.values().front().cols(); }
    double horizon() const { return rate_.horizon(); }

private:
    MatrixProcess rate_;
};

enum class MarkLaw { constant_one, uniform, rademacher_scaled, two_point };

std::string to_string(MarkLaw law);
MarkLaw mark_law_from_string(const std::string& s);

/// Law of the i.i.d. jump marks. All laws are bounded by j_max() almost
/// surely and have closed-form moments.
///   constant_one          J ≡ 1
///   uniform(a)            J ~ U(−a, a)
///   rademacher_scaled(a)  J = ±a with probability 1/2 each
///   two_point(a, prob)    J = +a with probability prob, −a otherwise
class JumpMarkSpec {
public:
    JumpMarkSpec() = default;

    static JumpMarkSpec constant_one() { return JumpMarkSpec(MarkLaw::constant_one, 1.0, 1.0); }
    static JumpMarkSpec uniform(double a) { return JumpMarkSpec(MarkLaw::uniform, a, 0.5); }
    static JumpMarkSpec rademacher_scaled(double a) { return JumpMarkSpec(MarkLaw::rademacher_scaled, a, 0.5); }
    static JumpMarkSpec two_point(double a, double prob) { return JumpMarkSpec(MarkLaw::two_point, a, prob); }

    MarkLaw law() const { return law_; }
    double a() const { return a_; }
    double prob() const { return prob_; }
    double j_max() const { return law_ == MarkLaw::constant_one ? 1.0 : a_; }

    /// E[J^k]
    double moment(int k) const;
    MatrixXd moment_matrix(int k, Index p, Index q) const { return MatrixXd::Constant(p, q, moment(k)); }
    MatrixXd mean_matrix(Index p, Index q) const { return moment_matrix(1, p, q); }
    MatrixXd second_moment_matrix(Index p, Index q) const { return moment_matrix(2, p, q); }

    double draw(SplitMix64& g) const;

    friend bool operator==(const JumpMarkSpec&, const JumpMarkSpec&) = default;

private:
    JumpMarkSpec(MarkLaw law, double a, double prob);

    MarkLaw law_ = MarkLaw::constant_one;
    double a_ = 1.0;
    double prob_ = 1.0;
};

struct Jump {
    double time;
    double mark;
};

/// One realization of N_t with marks: per-entry time-ordered jumps.
struct CountingPath {
    Index p = 0;
    Index q = 0;
    double horizon = 0.0;
    std::vector<std::vector<Jump>> entries; // entry (k,l) at index l·p + k

    const std::vector<Jump>& at(Index k, Index l) const { return entries[static_cast<std::size_t>(l * p + k)]; }
    std::size_t total_jumps() const;
    MatrixXd counts_until(double t) const;
};

/// Exact sampling of independent inhomogeneous Poisson processes, one per
/// entry, with i.i.d. marks. Entry (k,l) reads its own substream of `key`,
/// so the result does not depend on evaluation order. Jump times are
/// pairwise distinct across all entries.
CountingPath simulate_counting(const IntensitySpec& intensity, const JumpMarkSpec& marks, const StreamKey& key);

/// Λ_t = ∫₀ᵗ λ_s ds at each grid time.
std::vector<MatrixXd> compensator_path(const IntensitySpec& intensity, const std::vector<double>& grid);
MatrixXd compensator_at(const IntensitySpec& intensity, double t);

struct JumpEvent {
    double time;
    Index row;
    Index col;
    double mark; // ΔM at this time, on entry (row, col)
};

/// M_t = Σ_{s≤t} J⊙ΔN_s − ∫₀ᵗ E[J₁]⊙λ_s ds, as a merged event list plus
/// the deterministic drift rate E[J₁]⊙λ_s.
struct JumpStream {
    Index p = 0;
    Index q = 0;
    double horizon = 0.0;
    std::vector<JumpEvent> events; // strictly increasing times
    MatrixProcess drift_rate;

    MatrixXd value_at(double t) const;
};

JumpStream martingale_jump_stream(const CountingPath& path, const JumpMarkSpec& marks, const IntensitySpec& intensity);

/// Matrix of independent standard Brownian motions sampled on a grid.
struct BrownianPath {
    Index p = 0;
    Index q = 0;
    std::vector<double> grid;
    std::vector<MatrixXd> increments; // increments[i] = M(grid[i+1]) − M(grid[i])

    MatrixXd value_at_index(std::size_t i) const;
};

BrownianPath simulate_brownian(Index p, Index q, const std::vector<double>& grid, const StreamKey& key);

/// Uniform subdivision of every piece of `breakpoints` into `steps` parts.
std::vector<double> refine_grid(const std::vector<double>& breakpoints, int steps);

} // namespace matcon

#endif
