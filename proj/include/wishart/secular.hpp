#pragma once

#include <utility>
#include <vector>

namespace wishart {

// Symmetric arrow matrix
//
//   [ d_1            c_1 ]
//   [      ...       ... ]
//   [          d_t   c_t ]
//   [ c_1  ... c_t   c_n ]
//
// stored as the head diagonal d (t = n-1 entries) and the arrow column c
// (n entries, couplings first, corner last).  Solvers expect d sorted
// strictly decreasing; deflate() establishes that form.
struct ArrowMatrix {
    std::vector<double> d;
    std::vector<double> c;

    std::size_t dim() const { return c.size(); }
};

// Upper-triangular "broken arrow": diagonal b (n-1 strictly positive
// entries) plus a dense last column a (n entries, a_n is the corner).
// Its Gram matrix B^T B is an arrow matrix with d_i = b_i^2, c_i = a_i b_i
// and corner sum(a_i^2).
struct BrokenArrowMatrix {
    std::vector<double> b;
    std::vector<double> a;

    std::size_t dim() const { return a.size(); }
};

// Eigen (or singular value) decomposition restricted to what the recursion
// needs: the spectrum and the last row of the (right) basis.
//
// values  - non-increasing; strictly decreasing for generic input, exact
//           ties only when deflation found repeated diagonal entries
// q       - last row of the basis, one entry per value, all >= 0,
//           renormalized to unit length
// ortho_defect - | ||q||_2 - 1 | before renormalization
struct SpectralFactorization {
    std::vector<double> values;
    std::vector<double> q;
    double ortho_defect = 0.0;
};

// Result of deflating an arrow matrix: the irreducible core (head diagonal
// strictly decreasing, all couplings nonzero) plus eigenpairs that split
// off exactly.  'fixed' holds (eigenvalue, original coordinate); for
// repeated diagonal entries the coordinate refers to the rotated basis.
struct Deflation {
    ArrowMatrix reduced;
    std::vector<std::pair<double, int>> fixed;
    double tol = 0.0;
};

// Splits exact eigenpairs off an arrow matrix: negligible couplings
// (|c_j| <= tol) detach directly; coincident head entries are combined by
// Givens rotations until one coupling carries the pair norm and the rest
// detach.  tol = 64 * eps * max(|d|, |c|) * tol_scale.
Deflation deflate(const ArrowMatrix& A, double tol_scale = 1.0);

// Root of the secular function
//
//   f(lambda) = c_n - lambda - sum_j c_j^2 / (d_j - lambda)
//
// inside (bracket_lo, bracket_hi); the bracket must contain exactly one
// root and no pole.  Infinite ends are clipped to Gershgorin bounds.
// Newton iteration on a pole-shifted variable, bisection-safeguarded,
// residual tolerance 4 * eps * (|lambda| + sum_j |c_j^2/(d_j - lambda)|),
// at most 100 iterations before ConvergenceError.
double secular_root(double bracket_lo, double bracket_hi,
                    const std::vector<double>& d,
                    const std::vector<double>& c);

// Last row of the eigenvector basis of an arrow matrix with eigenvalues
// lambda:  q_k = (1 + sum_j c_j^2 / (lambda_k - d_j)^2)^(-1/2).
// Entries use the positive-quadrant convention.
std::vector<double> last_row_q(const std::vector<double>& lambda,
                               const std::vector<double>& d,
                               const std::vector<double>& c);

// Full spectral factorization of an arrow matrix: deflate, solve one
// secular root per interlacing gap, reassemble.  O(n^2) time, O(n) extra
// space.
SpectralFactorization arrow_eigen(const ArrowMatrix& A);

// Singular values sigma and last right-singular-vector row q of a broken
// arrow.  Works on the Gram arrow but solves in the sigma variable (poles
// at b_j) so small singular values keep full relative accuracy.
// tol_scale loosens the deflation threshold, used by retry paths.
SpectralFactorization broken_arrow_svd(const BrokenArrowMatrix& B,
                                       double tol_scale = 1.0);

} // namespace wishart
