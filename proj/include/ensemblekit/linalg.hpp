#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

// Dense complex linear algebra shared by every module. Eigendecompositions
// go through LAPACK (real path when the input has no imaginary part).
namespace ensemblekit::linalg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors
};

// Full eigendecomposition of a Hermitian matrix. Only the upper triangle is
// read. Throws NumericalError if LAPACK does not converge.
HermitianEigen eigh(const Matrix& a);
RealVector eigvalsh(const Matrix& a);

Matrix from_eigen(const HermitianEigen& e, const std::function<double(double)>& f);

Matrix hermitian_part(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol);
double operator_norm_hermitian(const Matrix& a);
double trace_norm_hermitian(const Matrix& a);
double max_eigenvalue(const Matrix& a);
double min_eigenvalue(const Matrix& a);

Matrix kron(const Matrix& a, const Matrix& b);

// Square root of a PSD matrix; negative eigenvalues are treated as zero.
Matrix sqrt_psd(const Matrix& a);
// Moore-Penrose pseudoinverse square root; eigenvalues <= threshold dropped.
Matrix pinv_sqrt_psd(const Matrix& a, double threshold = 1e-12);
// |A| for Hermitian A.
Matrix abs_hermitian(const Matrix& a);
// Projector onto the eigenspace of eigenvalues >= cutoff.
Matrix spectral_projector(const Matrix& a, double cutoff);

std::size_t int_pow(std::size_t base, std::size_t exp);

// Tensor-factor bookkeeping for operators on `num_sites` sites of local
// dimension `local_dim`, position 0 being the most significant factor.
//
// reduce() traces out every position not listed in `keep` and orders the
// remaining factors as listed, so it doubles as a factor permutation.
Matrix reduce(const Matrix& m, int local_dim, std::size_t num_sites,
              std::span<const std::size_t> keep);

// Reduced density matrix |psi><psi| traced down to `keep`, same conventions.
Matrix reduce_pure(const Vector& psi, int local_dim, std::size_t num_sites,
                   std::span<const std::size_t> keep);

// Index table used by reduce(): table[k * rest_dim + r] is the full index
// whose kept digits encode k and remaining digits encode r.
std::vector<std::size_t> split_index_table(int local_dim, std::size_t num_sites,
                                           std::span<const std::size_t> keep);

}  // namespace ensemblekit::linalg
