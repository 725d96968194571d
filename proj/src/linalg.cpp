#include "ensemblekit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "ensemblekit/error.hpp"

namespace ensemblekit::linalg {

namespace {

bool is_real(const Matrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      if (a(i, j).imag() != 0.0) return false;
  return true;
}

[[noreturn]] void lapack_failure(const char* routine, lapack_int info, Eigen::Index n) {
  std::ostringstream os;
  os << routine << " failed with info=" << info << " on a " << n << "x" << n << " matrix";
  if (info > 0) os << " (eigensolver did not converge)";
  throw NumericalError(os.str());
}

}  // namespace

HermitianEigen eigh(const Matrix& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw PreconditionError("eigh: matrix is not square");
  HermitianEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  if (is_real(a)) {
    Eigen::MatrixXd work = a.real();
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
                                     work.data(), static_cast<lapack_int>(n), out.values.data());
    if (info != 0) lapack_failure("dsyevd", info, n);
    out.vectors = work.cast<Complex>();
  } else {
    out.vectors = a;
    lapack_int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
        reinterpret_cast<lapack_complex_double*>(out.vectors.data()),
        static_cast<lapack_int>(n), out.values.data());
    if (info != 0) lapack_failure("zheevd", info, n);
  }
  return out;
}

RealVector eigvalsh(const Matrix& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw PreconditionError("eigvalsh: matrix is not square");
  RealVector values(n);
  if (n == 0) return values;
  if (is_real(a)) {
    Eigen::MatrixXd work = a.real();
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n),
                                     work.data(), static_cast<lapack_int>(n), values.data());
    if (info != 0) lapack_failure("dsyevd", info, n);
  } else {
    Matrix work = a;
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n),
                                     reinterpret_cast<lapack_complex_double*>(work.data()),
                                     static_cast<lapack_int>(n), values.data());
    if (info != 0) lapack_failure("zheevd", info, n);
  }
  return values;
}

Matrix from_eigen(const HermitianEigen& e, const std::function<double(double)>& f) {
  Eigen::VectorXd fv(e.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(e.values(i));
  return e.vectors * fv.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double operator_norm_hermitian(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  RealVector v = eigvalsh(a);
  return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

double trace_norm_hermitian(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return eigvalsh(hermitian_part(a)).cwiseAbs().sum();
}

double max_eigenvalue(const Matrix& a) {
  RealVector v = eigvalsh(hermitian_part(a));
  return v(v.size() - 1);
}

double min_eigenvalue(const Matrix& a) { return eigvalsh(hermitian_part(a))(0); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix sqrt_psd(const Matrix& a) {
  return from_eigen(eigh(hermitian_part(a)), [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

Matrix pinv_sqrt_psd(const Matrix& a, double threshold) {
  return from_eigen(eigh(hermitian_part(a)),
                    [threshold](double x) { return x > threshold ? 1.0 / std::sqrt(x) : 0.0; });
}

Matrix abs_hermitian(const Matrix& a) {
  return from_eigen(eigh(hermitian_part(a)), [](double x) { return std::abs(x); });
}

Matrix spectral_projector(const Matrix& a, double cutoff) {
  return from_eigen(eigh(hermitian_part(a)), [cutoff](double x) { return x >= cutoff ? 1.0 : 0.0; });
}

std::size_t int_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

std::vector<std::size_t> split_index_table(int local_dim, std::size_t num_sites,
                                           std::span<const std::size_t> keep) {
  const auto D = static_cast<std::size_t>(local_dim);
  std::vector<bool> kept(num_sites, false);
  for (std::size_t p : keep) {
    if (p >= num_sites || kept[p]) throw PreconditionError("reduce: invalid keep positions");
    kept[p] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < num_sites; ++p)
    if (!kept[p]) rest.push_back(p);

  // Place value of each position in the full index.
  std::vector<std::size_t> weight(num_sites);
  for (std::size_t p = 0; p < num_sites; ++p) weight[p] = int_pow(D, num_sites - 1 - p);

  const std::size_t keep_dim = int_pow(D, keep.size());
  const std::size_t rest_dim = int_pow(D, rest.size());

  std::vector<std::size_t> keep_offset(keep_dim, 0), rest_offset(rest_dim, 0);
  for (std::size_t k = 0; k < keep_dim; ++k) {
    std::size_t rem = k;
    for (std::size_t q = keep.size(); q-- > 0;) {
      keep_offset[k] += (rem % D) * weight[keep[q]];
      rem /= D;
    }
  }
  for (std::size_t r = 0; r < rest_dim; ++r) {
    std::size_t rem = r;
    for (std::size_t q = rest.size(); q-- > 0;) {
      rest_offset[r] += (rem % D) * weight[rest[q]];
      rem /= D;
    }
  }
  std::vector<std::size_t> table(keep_dim * rest_dim);
  for (std::size_t k = 0; k < keep_dim; ++k)
    for (std::size_t r = 0; r < rest_dim; ++r) table[k * rest_dim + r] = keep_offset[k] + rest_offset[r];
  return table;
}

Matrix reduce(const Matrix& m, int local_dim, std::size_t num_sites,
              std::span<const std::size_t> keep) {
  const auto full_dim = static_cast<Eigen::Index>(int_pow(static_cast<std::size_t>(local_dim), num_sites));
  if (m.rows() != full_dim || m.cols() != full_dim)
    throw PreconditionError("reduce: matrix dimension does not match site count");
  const auto table = split_index_table(local_dim, num_sites, keep);
  const std::size_t keep_dim = int_pow(static_cast<std::size_t>(local_dim), keep.size());
  const std::size_t rest_dim = table.size() / keep_dim;
  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  for (std::size_t a = 0; a < keep_dim; ++a) {
    const std::size_t* ra = &table[a * rest_dim];
    for (std::size_t b = 0; b < keep_dim; ++b) {
      const std::size_t* rb = &table[b * rest_dim];
      Complex acc = 0.0;
      for (std::size_t r = 0; r < rest_dim; ++r) acc += m(ra[r], rb[r]);
      out(a, b) = acc;
    }
  }
  return out;
}

Matrix reduce_pure(const Vector& psi, int local_dim, std::size_t num_sites,
                   std::span<const std::size_t> keep) {
  const auto table = split_index_table(local_dim, num_sites, keep);
  const std::size_t keep_dim = int_pow(static_cast<std::size_t>(local_dim), keep.size());
  const std::size_t rest_dim = table.size() / keep_dim;
  if (static_cast<std::size_t>(psi.size()) != table.size())
    throw PreconditionError("reduce_pure: vector dimension does not match site count");
  Matrix amp(keep_dim, rest_dim);
  for (std::size_t k = 0; k < keep_dim; ++k)
    for (std::size_t r = 0; r < rest_dim; ++r) amp(k, r) = psi(table[k * rest_dim + r]);
  return amp * amp.adjoint();
}

}  // namespace ensemblekit::linalg
