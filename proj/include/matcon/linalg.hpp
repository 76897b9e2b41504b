#ifndef MATCON_LINALG_HPP
#define MATCON_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace matcon {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Index = Eigen::Index;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline std::string dims_str(Index r, Index c)
{
    return std::to_string(r) + "x" + std::to_string(c);
}

/// Symmetric matrix whose symmetry is exact: every constructor mirrors one
/// triangle onto the other, and all arithmetic preserves it entrywise.
template <typename Scalar>
class SymMatrix {
public:
    using PlainMatrix = Matrix<Scalar>;

    SymMatrix() = default;
    explicit SymMatrix(Index dim) : m_(PlainMatrix::Zero(dim, dim)) {}

    /// Takes the lower triangle of `a` and mirrors it.
    template <typename Derived>
    static SymMatrix from_lower(const Eigen::MatrixBase<Derived>& a)
    {
        if (a.rows() != a.cols())
            throw DimensionError("SymMatrix needs a square matrix, got " + dims_str(a.rows(), a.cols()));
        SymMatrix s;
        s.m_ = a.template triangularView<Eigen::Lower>();
        s.m_.template triangularView<Eigen::StrictlyUpper>() = s.m_.transpose();
        return s;
    }

    /// (a + aᵀ)/2, then exact mirroring.
    template <typename Derived>
    static SymMatrix symmetrized(const Eigen::MatrixBase<Derived>& a)
    {
        if (a.rows() != a.cols())
            throw DimensionError("SymMatrix needs a square matrix, got " + dims_str(a.rows(), a.cols()));
        PlainMatrix h = (a + a.transpose()) * Scalar(0.5);
        return from_lower(h);
    }

    static SymMatrix zero(Index dim) { return SymMatrix(dim); }
    static SymMatrix identity(Index dim)
    {
        SymMatrix s(dim);
        s.m_.setIdentity();
        return s;
    }
    template <typename Derived>
    static SymMatrix diagonal(const Eigen::MatrixBase<Derived>& d)
    {
        SymMatrix s(d.size());
        s.m_.diagonal() = d;
        return s;
    }

    Index dim() const { return m_.rows(); }
    const PlainMatrix& matrix() const { return m_; }
    Scalar operator()(Index i, Index j) const { return m_(i, j); }

    SymMatrix& operator+=(const SymMatrix& o)
    {
        check_same(o);
        m_ += o.m_;
        return *this;
    }
    SymMatrix& operator-=(const SymMatrix& o)
    {
        check_same(o);
        m_ -= o.m_;
        return *this;
    }
    SymMatrix& operator*=(Scalar c)
    {
        m_ *= c;
        return *this;
    }

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(Scalar c, SymMatrix a) { return a *= c; }
    friend SymMatrix operator*(SymMatrix a, Scalar c) { return a *= c; }

    /// Adds c·(v vᵀ) keeping exact symmetry.
    template <typename Derived>
    void add_outer(const Eigen::MatrixBase<Derived>& v, Scalar c = Scalar(1))
    {
        PlainMatrix r = c * (v * v.transpose());
        *this += from_lower(r);
    }

private:
    void check_same(const SymMatrix& o) const
    {
        if (o.dim() != dim())
            throw DimensionError("SymMatrix dimension mismatch: " + std::to_string(dim()) + " vs " +
                                 std::to_string(o.dim()));
    }

    PlainMatrix m_;
};

using SymMatrixXd = SymMatrix<double>;

template <typename Scalar>
SymMatrix<Scalar> block_diag(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b)
{
    Matrix<Scalar> out = Matrix<Scalar>::Zero(a.dim() + b.dim(), a.dim() + b.dim());
    out.topLeftCorner(a.dim(), a.dim()) = a.matrix();
    out.bottomRightCorner(b.dim(), b.dim()) = b.matrix();
    return SymMatrix<Scalar>::from_lower(out);
}

/// Dense m×n×p×q tensor, viewed as a linear map from p×q matrices to m×n
/// matrices. Entries are stored slice by slice: slice (k,l) is the m×n
/// column-major block at offset (l·p + k)·m·n.
template <typename Scalar>
class Rank4Tensor {
public:
    using SliceMap = Eigen::Map<Matrix<Scalar>>;
    using ConstSliceMap = Eigen::Map<const Matrix<Scalar>>;

    Rank4Tensor() = default;
    Rank4Tensor(Index m, Index n, Index p, Index q) : m_(m), n_(n), p_(p), q_(q)
    {
        if (m < 1 || n < 1 || p < 1 || q < 1)
            throw DimensionError("Rank4Tensor dimensions must all be >= 1");
        data_.assign(static_cast<std::size_t>(m * n * p * q), Scalar(0));
    }

    Index m() const { return m_; }
    Index n() const { return n_; }
    Index p() const { return p_; }
    Index q() const { return q_; }

    Scalar& operator()(Index i, Index j, Index k, Index l) { return data_[offset(i, j, k, l)]; }
    Scalar operator()(Index i, Index j, Index k, Index l) const { return data_[offset(i, j, k, l)]; }

    SliceMap slice(Index k, Index l) { return SliceMap(data_.data() + slice_offset(k, l), m_, n_); }
    ConstSliceMap slice(Index k, Index l) const
    {
        return ConstSliceMap(data_.data() + slice_offset(k, l), m_, n_);
    }

    const std::vector<Scalar>& data() const { return data_; }

    bool all_finite() const
    {
        return std::all_of(data_.begin(), data_.end(), [](Scalar v) { return std::isfinite(v); });
    }

    Rank4Tensor& operator+=(const Rank4Tensor& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] += o.data_[i];
        return *this;
    }
    Rank4Tensor& operator*=(Scalar c)
    {
        for (auto& v : data_)
            v *= c;
        return *this;
    }
    friend Rank4Tensor operator+(Rank4Tensor a, const Rank4Tensor& b) { return a += b; }
    friend Rank4Tensor operator*(Scalar c, Rank4Tensor a) { return a *= c; }

    friend bool operator==(const Rank4Tensor& a, const Rank4Tensor& b)
    {
        return a.m_ == b.m_ && a.n_ == b.n_ && a.p_ == b.p_ && a.q_ == b.q_ && a.data_ == b.data_;
    }

    /// T(i,j;k,l) = δ_ik δ_jl, so that T∘A = A.
    static Rank4Tensor slicewise_identity(Index p, Index q)
    {
        Rank4Tensor t(p, q, p, q);
        for (Index l = 0; l < q; ++l)
            for (Index k = 0; k < p; ++k)
                t(k, l, k, l) = Scalar(1);
        return t;
    }

private:
    std::size_t slice_offset(Index k, Index l) const
    {
        return static_cast<std::size_t>((l * p_ + k) * m_ * n_);
    }
    std::size_t offset(Index i, Index j, Index k, Index l) const
    {
        return slice_offset(k, l) + static_cast<std::size_t>(j * m_ + i);
    }
    void check_same(const Rank4Tensor& o) const
    {
        if (o.m_ != m_ || o.n_ != n_ || o.p_ != p_ || o.q_ != q_)
            throw DimensionError("Rank4Tensor dimension mismatch");
    }

    Index m_ = 0, n_ = 0, p_ = 0, q_ = 0;
    std::vector<Scalar> data_;
};

using Tensor4d = Rank4Tensor<double>;

/// (T∘A)(i,j) = Σ_{k,l} T(i,j;k,l)·A(k,l)
template <typename Scalar, typename Derived>
Matrix<Scalar> tensor_apply(const Rank4Tensor<Scalar>& t, const Eigen::MatrixBase<Derived>& a)
{
    if (a.rows() != t.p() || a.cols() != t.q())
        throw DimensionError("tensor_apply: argument is " + dims_str(a.rows(), a.cols()) + ", tensor expects " +
                             dims_str(t.p(), t.q()));
    Matrix<Scalar> out = Matrix<Scalar>::Zero(t.m(), t.n());
    for (Index l = 0; l < t.q(); ++l)
        for (Index k = 0; k < t.p(); ++k)
            if (a(k, l) != Scalar(0))
                out.noalias() += a(k, l) * t.slice(k, l);
    return out;
}

/// Tᵀ(i,j;k,l) = T(j,i;k,l)
template <typename Scalar>
Rank4Tensor<Scalar> tensor_transpose(const Rank4Tensor<Scalar>& t)
{
    Rank4Tensor<Scalar> out(t.n(), t.m(), t.p(), t.q());
    for (Index l = 0; l < t.q(); ++l)
        for (Index k = 0; k < t.p(); ++k)
            out.slice(k, l) = t.slice(k, l).transpose();
    return out;
}

/// Slicewise product: (TT′)(·,·;k,l) = T(·,·;k,l)·T′(·,·;k,l).
template <typename Scalar>
Rank4Tensor<Scalar> tensor_compose(const Rank4Tensor<Scalar>& a, const Rank4Tensor<Scalar>& b)
{
    if (a.n() != b.m() || a.p() != b.p() || a.q() != b.q())
        throw DimensionError("tensor_compose: inner or slice dimensions disagree");
    Rank4Tensor<Scalar> out(a.m(), b.n(), a.p(), a.q());
    for (Index l = 0; l < a.q(); ++l)
        for (Index k = 0; k < a.p(); ++k)
            out.slice(k, l).noalias() = a.slice(k, l) * b.slice(k, l);
    return out;
}

template <typename DA, typename DB>
Matrix<typename DA::Scalar> hadamard(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("hadamard: " + dims_str(a.rows(), a.cols()) + " vs " + dims_str(b.rows(), b.cols()));
    return a.cwiseProduct(b);
}

template <typename Derived>
Matrix<typename Derived::Scalar> hadamard_pow(const Eigen::MatrixBase<Derived>& a, int k)
{
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> out = Matrix<Scalar>::Ones(a.rows(), a.cols());
    for (int i = 0; i < k; ++i)
        out = out.cwiseProduct(a);
    return out;
}

namespace detail {
inline void check_p(int p)
{
    if (p != 1 && p != 2)
        throw std::invalid_argument("unsupported norm order p=" + std::to_string(p) + " (expected 1 or 2)");
}
} // namespace detail

/// ‖A‖_{p,∞}: largest ℓ_p norm of a row.
template <typename Derived>
typename Derived::Scalar norm_p_inf(const Eigen::MatrixBase<Derived>& a, int p)
{
    detail::check_p(p);
    if (p == 1)
        return a.cwiseAbs().rowwise().sum().maxCoeff();
    return a.rowwise().norm().maxCoeff();
}

/// ‖A‖_{∞,p}: largest ℓ_p norm of a column.
template <typename Derived>
typename Derived::Scalar norm_inf_p(const Eigen::MatrixBase<Derived>& a, int p)
{
    detail::check_p(p);
    if (p == 1)
        return a.cwiseAbs().colwise().sum().maxCoeff();
    return a.colwise().norm().maxCoeff();
}

template <typename Derived>
typename Derived::Scalar norm_entry_inf(const Eigen::MatrixBase<Derived>& a)
{
    return a.cwiseAbs().maxCoeff();
}

/// Symmetric dilation [[0, X], [Xᵀ, 0]].
template <typename Derived>
SymMatrix<typename Derived::Scalar> dilation(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    const Index r = x.rows(), c = x.cols();
    Matrix<Scalar> out = Matrix<Scalar>::Zero(r + c, r + c);
    out.bottomLeftCorner(c, r) = x.transpose();
    return SymMatrix<Scalar>::from_lower(out);
}

template <typename Scalar>
struct SymEig {
    Vector<Scalar> values;  // descending
    Matrix<Scalar> vectors; // orthonormal columns, matching `values`
};

/// Eigendecomposition S = Q Λ Qᵀ with eigenvalues sorted descending.
template <typename Scalar>
SymEig<Scalar> sym_eig(const SymMatrix<Scalar>& s)
{
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(s.matrix());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("sym_eig: eigensolver did not converge");
    SymEig<Scalar> out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

template <typename Scalar>
Vector<Scalar> sym_eigenvalues(const SymMatrix<Scalar>& s)
{
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(s.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("sym_eig: eigensolver did not converge");
    return solver.eigenvalues().reverse();
}

template <typename Scalar>
Scalar lambda_max(const SymMatrix<Scalar>& s)
{
    return sym_eigenvalues(s)(0);
}

template <typename Scalar>
Scalar lambda_min(const SymMatrix<Scalar>& s)
{
    auto v = sym_eigenvalues(s);
    return v(v.size() - 1);
}

/// ‖S‖_op for symmetric S.
template <typename Scalar>
Scalar sym_norm(const SymMatrix<Scalar>& s)
{
    auto v = sym_eigenvalues(s);
    return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

/// Largest singular value, as sqrt(λ_max) of the smaller Gram matrix.
template <typename Derived>
typename Derived::Scalar operator_norm(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> gram = x.rows() <= x.cols() ? Matrix<Scalar>(x * x.transpose())
                                               : Matrix<Scalar>(x.transpose() * x);
    Scalar lm = lambda_max(SymMatrix<Scalar>::from_lower(gram));
    return std::sqrt(std::max(lm, Scalar(0)));
}

/// ‖T‖_{op;∞} = max over (k,l) of ‖T(·,·;k,l)‖_op.
template <typename Scalar>
Scalar tensor_op_inf_norm(const Rank4Tensor<Scalar>& t)
{
    Scalar best(0);
    for (Index l = 0; l < t.q(); ++l)
        for (Index k = 0; k < t.p(); ++k)
            best = std::max(best, operator_norm(t.slice(k, l)));
    return best;
}

/// Applies f to the spectrum: Q f(Λ) Qᵀ.
template <typename Scalar, typename F>
SymMatrix<Scalar> sym_apply(const SymMatrix<Scalar>& s, F&& f)
{
    auto e = sym_eig(s);
    Vector<Scalar> fv = e.values.unaryExpr(f);
    Matrix<Scalar> r = e.vectors * fv.asDiagonal() * e.vectors.transpose();
    return SymMatrix<Scalar>::symmetrized(r);
}

template <typename Scalar>
SymMatrix<Scalar> sym_exp(const SymMatrix<Scalar>& s)
{
    return sym_apply(s, [](Scalar v) { return std::exp(v); });
}

/// Power of a psd matrix. Eigenvalues that are negative but within
/// 1e-12·‖S‖ of zero are clamped to zero; clearly negative ones throw.
template <typename Scalar>
SymMatrix<Scalar> psd_pow(const SymMatrix<Scalar>& s, Scalar exponent)
{
    auto e = sym_eig(s);
    const Scalar scale = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
    const Scalar clamp = Scalar(1e-12) * scale;
    Vector<Scalar> fv(e.values.size());
    for (Index i = 0; i < e.values.size(); ++i) {
        Scalar v = e.values(i);
        if (v < -clamp)
            throw std::domain_error("psd_pow: matrix has a negative eigenvalue " + std::to_string(v));
        fv(i) = v <= 0 ? Scalar(0) : std::pow(v, exponent);
    }
    Matrix<Scalar> r = e.vectors * fv.asDiagonal() * e.vectors.transpose();
    return SymMatrix<Scalar>::symmetrized(r);
}

/// Integer power through repeated multiplication.
template <typename Scalar>
SymMatrix<Scalar> sym_int_pow(const SymMatrix<Scalar>& s, int k)
{
    Matrix<Scalar> r = Matrix<Scalar>::Identity(s.dim(), s.dim());
    for (int i = 0; i < k; ++i)
        r = r * s.matrix();
    return SymMatrix<Scalar>::symmetrized(r);
}

template <typename Scalar>
struct TraceExp {
    Scalar value;
    bool overflow; // spectrum exceeded the cap, value is +inf
};

inline constexpr double kTraceExpCap = 700.0;

template <typename Scalar>
TraceExp<Scalar> trace_exp(const SymMatrix<Scalar>& s, Scalar cap = Scalar(kTraceExpCap))
{
    auto v = sym_eigenvalues(s);
    if (v(0) > cap)
        return {std::numeric_limits<Scalar>::infinity(), true};
    Scalar sum(0);
    for (Index i = v.size(); i-- > 0;) // smallest first
        sum += std::exp(v(i));
    return {sum, false};
}

/// λ_min(B − A): nonnegative iff A ≼ B.
template <typename Scalar>
Scalar psd_margin(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b)
{
    return lambda_min(b - a);
}

/// A ≼ B up to tol, relative to max(1, ‖B − A‖_op).
template <typename Scalar>
bool psd_dominates(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b, Scalar tol)
{
    auto d = sym_eigenvalues(b - a);
    const Scalar lmin = d(d.size() - 1);
    const Scalar scale = std::max({Scalar(1), std::abs(d(0)), std::abs(lmin)});
    return lmin >= -tol * scale;
}

/// Column-stacking vectorization.
template <typename Derived>
Vector<typename Derived::Scalar> vec(const Eigen::MatrixBase<Derived>& x)
{
    Matrix<typename Derived::Scalar> plain = x;
    return Eigen::Map<const Vector<typename Derived::Scalar>>(plain.data(), plain.size());
}

} // namespace matcon

#endif
