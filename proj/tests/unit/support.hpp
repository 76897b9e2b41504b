#ifndef MATCON_TEST_SUPPORT_HPP
#define MATCON_TEST_SUPPORT_HPP

#include "matcon/linalg.hpp"

#include <random>

namespace testing_support {

using matcon::Index;
using matcon::MatrixXd;
using matcon::Tensor4d;

inline MatrixXd random_matrix(Index r, Index c, std::mt19937_64& g)
{
    std::normal_distribution<double> n;
    MatrixXd a(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            a(i, j) = n(g);
    return a;
}

inline Tensor4d random_tensor(Index m, Index n, Index p, Index q, std::mt19937_64& g)
{
    std::normal_distribution<double> d;
    Tensor4d t(m, n, p, q);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
            for (Index k = 0; k < p; ++k)
                for (Index l = 0; l < q; ++l)
                    t(i, j, k, l) = d(g);
    return t;
}

inline matcon::SymMatrixXd random_sym(Index d, std::mt19937_64& g)
{
    MatrixXd a = random_matrix(d, d, g);
    return matcon::SymMatrixXd::symmetrized(a);
}

inline double max_abs_diff(const MatrixXd& a, const MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace testing_support

#endif
