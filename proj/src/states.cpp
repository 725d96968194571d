#include "ensemblekit/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ensemblekit/error.hpp"

namespace ensemblekit {

using linalg::Complex;
using linalg::Matrix;
using linalg::RealVector;
using linalg::Vector;

namespace {

constexpr double kTraceTol = 1e-10;
constexpr double kNegativeTol = 1e-8;
constexpr double kHermitianTol = 1e-10;

std::size_t region_dim(const Region& r, int D) {
  return linalg::int_pow(static_cast<std::size_t>(D), r.size());
}

}  // namespace

DensityMatrix::DensityMatrix(Region support, int local_dim, Matrix matrix)
    : support_(std::move(support)), local_dim_(local_dim), matrix_(std::move(matrix)) {
  if (local_dim_ < 2) throw InvalidState("local dimension must be at least 2");
  const auto dim = static_cast<Eigen::Index>(region_dim(support_, local_dim_));
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    std::ostringstream os;
    os << "density matrix is " << matrix_.rows() << "x" << matrix_.cols() << ", support needs " << dim;
    throw InvalidState(os.str());
  }
  const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
  if (!linalg::is_hermitian(matrix_, kHermitianTol * scale)) throw InvalidState("density matrix is not Hermitian");
  matrix_ = linalg::hermitian_part(matrix_);
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os.precision(17);
    os << "density matrix has trace " << tr;
    throw InvalidState(os.str());
  }
  const RealVector ev = linalg::eigvalsh(matrix_);
  if (ev(0) < -kNegativeTol) {
    std::ostringstream os;
    os << "density matrix has eigenvalue " << ev(0) << " < -1e-8";
    throw InvalidState(os.str());
  }
  if (ev(0) < 0.0) {
    matrix_ = linalg::from_eigen(linalg::eigh(matrix_), [](double x) { return std::max(x, 0.0); });
    matrix_ /= matrix_.trace().real();
  }
}

DensityMatrix maximally_mixed(const Region& support, int local_dim) {
  const auto dim = static_cast<Eigen::Index>(region_dim(support, local_dim));
  return DensityMatrix(support, local_dim, Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix pure_density(const Region& support, int local_dim, const Vector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw InvalidState("pure state vector is zero");
  const Vector v = psi / norm;
  return DensityMatrix(support, local_dim, v * v.adjoint());
}

DensityMatrix random_density(const Region& support, int local_dim, std::mt19937_64& rng, std::size_t rank) {
  const auto dim = static_cast<Eigen::Index>(region_dim(support, local_dim));
  const Eigen::Index cols = rank == 0 ? dim : static_cast<Eigen::Index>(rank);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(support, local_dim, std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const Region& keep) {
  if (!keep.is_subset_of(rho.support())) throw PreconditionError("partial_trace: keep is not a subset of the support");
  std::vector<std::size_t> positions;
  positions.reserve(keep.size());
  for (std::size_t site : keep.sites()) positions.push_back(rho.support().position_of(site));
  return DensityMatrix(keep, rho.local_dim(),
                       linalg::reduce(rho.matrix(), rho.local_dim(), rho.support().size(), positions));
}

DensityMatrix tensor_product(std::span<const DensityMatrix> factors) {
  if (factors.empty()) throw PreconditionError("tensor_product: no factors");
  const int D = factors.front().local_dim();
  std::vector<std::size_t> listed;
  Region joint = factors.front().support();
  Matrix m = Matrix::Identity(1, 1);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (f.local_dim() != D) throw PreconditionError("tensor_product: mixed local dimensions");
    if (i > 0) {
      if (joint.overlaps(f.support())) throw PreconditionError("tensor_product: overlapping supports");
      joint = joint.unite(f.support());
    }
    listed.insert(listed.end(), f.support().sites().begin(), f.support().sites().end());
    m = linalg::kron(m, f.matrix());
  }
  std::vector<std::size_t> perm;
  perm.reserve(listed.size());
  for (std::size_t site : joint.sites())
    perm.push_back(static_cast<std::size_t>(std::find(listed.begin(), listed.end(), site) - listed.begin()));
  return DensityMatrix(joint, D, linalg::reduce(m, D, listed.size(), perm));
}

// GlobalState ---------------------------------------------------------------

GlobalState GlobalState::diagonal(std::shared_ptr<const SpectralDecomposition> basis, RealVector weights) {
  if (!basis) throw PreconditionError("GlobalState: missing eigenbasis");
  if (static_cast<std::size_t>(weights.size()) != basis->dim())
    throw PreconditionError("GlobalState: weight vector has wrong length");
  if (weights.minCoeff() < 0.0) throw InvalidState("GlobalState: negative weight");
  const double total = weights.sum();
  if (std::abs(total - 1.0) > kTraceTol) throw InvalidState("GlobalState: weights do not sum to one");
  GlobalState s;
  s.kind_ = Kind::Diagonal;
  s.basis_ = std::move(basis);
  s.weights_ = weights / total;
  return s;
}

GlobalState GlobalState::pure(std::shared_ptr<const SpectralDecomposition> basis, Vector coefficients) {
  if (!basis) throw PreconditionError("GlobalState: missing eigenbasis");
  if (static_cast<std::size_t>(coefficients.size()) != basis->dim())
    throw PreconditionError("GlobalState: coefficient vector has wrong length");
  const double norm = coefficients.norm();
  if (!(norm > 0.0)) throw InvalidState("GlobalState: zero coefficient vector");
  GlobalState s;
  s.kind_ = Kind::Pure;
  s.basis_ = std::move(basis);
  s.coefficients_ = coefficients / norm;
  return s;
}

GlobalState GlobalState::dense(DensityMatrix rho) {
  if (rho.support().size() != rho.support().lattice().num_sites())
    throw PreconditionError("GlobalState: dense state must cover the whole lattice");
  GlobalState s;
  s.kind_ = Kind::Dense;
  s.dense_ = std::make_shared<const DensityMatrix>(std::move(rho));
  return s;
}

const LatticeSpec& GlobalState::lattice() const noexcept {
  return kind_ == Kind::Dense ? dense_->support().lattice() : basis_->lattice;
}

int GlobalState::local_dim() const noexcept { return kind_ == Kind::Dense ? dense_->local_dim() : basis_->local_dim; }

std::size_t GlobalState::dim() const noexcept { return kind_ == Kind::Dense ? dense_->dim() : basis_->dim(); }

const RealVector& GlobalState::weights() const {
  if (kind_ != Kind::Diagonal) throw PreconditionError("GlobalState: not a diagonal state");
  return weights_;
}

const Vector& GlobalState::coefficients() const {
  if (kind_ != Kind::Pure) throw PreconditionError("GlobalState: not a pure state");
  return coefficients_;
}

const DensityMatrix& GlobalState::density() const {
  if (kind_ != Kind::Dense) throw PreconditionError("GlobalState: not a dense state");
  return *dense_;
}

DensityMatrix GlobalState::reduced(const Region& keep) const {
  if (!(keep.lattice() == lattice())) throw PreconditionError("reduced: region from a different lattice");
  const int D = local_dim();
  const std::size_t N = lattice().num_sites();
  switch (kind_) {
    case Kind::Dense:
      return partial_trace(*dense_, keep);
    case Kind::Pure: {
      const Vector psi = basis_->eigenvectors * coefficients_;
      return DensityMatrix(keep, D, linalg::reduce_pure(psi, D, N, keep.sites()));
    }
    case Kind::Diagonal: {
      const auto table = linalg::split_index_table(D, N, keep.sites());
      const std::size_t kd = region_dim(keep, D);
      const std::size_t rd = table.size() / kd;
      Matrix out = Matrix::Zero(static_cast<Eigen::Index>(kd), static_cast<Eigen::Index>(kd));
      Matrix amp(static_cast<Eigen::Index>(kd), static_cast<Eigen::Index>(rd));
      const Matrix& V = basis_->eigenvectors;
      for (Eigen::Index nu = 0; nu < weights_.size(); ++nu) {
        const double w = weights_(nu);
        if (w == 0.0) continue;
        for (std::size_t k = 0; k < kd; ++k)
          for (std::size_t r = 0; r < rd; ++r)
            amp(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = V(table[k * rd + r], nu);
        out.noalias() += w * (amp * amp.adjoint());
      }
      return DensityMatrix(keep, D, std::move(out));
    }
  }
  throw PreconditionError("reduced: unknown state kind");
}

DensityMatrix GlobalState::to_dense() const {
  const Region all = Region::whole(lattice());
  switch (kind_) {
    case Kind::Dense:
      return *dense_;
    case Kind::Pure: {
      const Vector psi = basis_->eigenvectors * coefficients_;
      return DensityMatrix(all, local_dim(), psi * psi.adjoint());
    }
    case Kind::Diagonal: {
      const Matrix& V = basis_->eigenvectors;
      return DensityMatrix(all, local_dim(), V * weights_.cast<Complex>().asDiagonal() * V.adjoint());
    }
  }
  throw PreconditionError("to_dense: unknown state kind");
}

RealVector GlobalState::populations(const SpectralDecomposition& spec) const {
  if (spec.dim() != dim()) throw PreconditionError("populations: dimension mismatch");
  if (kind_ != Kind::Dense && basis_.get() == &spec) {
    if (kind_ == Kind::Diagonal) return weights_;
    return coefficients_.cwiseAbs2();
  }
  const Matrix& V = spec.eigenvectors;
  Matrix rhoV;
  if (kind_ == Kind::Dense) {
    rhoV = dense_->matrix() * V;
  } else {
    rhoV = to_dense().matrix() * V;
  }
  RealVector pops(V.cols());
  for (Eigen::Index nu = 0; nu < V.cols(); ++nu) pops(nu) = V.col(nu).dot(rhoV.col(nu)).real();
  return pops;
}

double GlobalState::energy(const SpectralDecomposition& spec) const {
  return populations(spec).dot(spec.energies);
}

double GlobalState::entropy() const {
  RealVector p;
  switch (kind_) {
    case Kind::Pure:
      return 0.0;
    case Kind::Diagonal:
      p = weights_;
      break;
    case Kind::Dense:
      p = linalg::eigvalsh(dense_->matrix());
      break;
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) s -= p(i) * std::log(p(i));
  return s;
}

// Ensembles ---------------------------------------------------------------

GibbsResult gibbs(std::shared_ptr<const SpectralDecomposition> spec, double T) {
  if (!spec) throw PreconditionError("gibbs: missing spectrum");
  if (!(T > 0.0) || !std::isfinite(T)) throw PreconditionError("gibbs: temperature must be positive and finite");
  const RealVector& E = spec->energies;
  const double e_min = E(0);
  RealVector w(E.size());
  for (Eigen::Index i = 0; i < E.size(); ++i) w(i) = std::exp(-(E(i) - e_min) / T);
  const double sum_w = w.sum();
  const RealVector p = w / sum_w;
  const auto N = static_cast<double>(spec->num_sites());

  ThermalData th{};
  th.T = T;
  th.log_Z = -e_min / T + std::log(sum_w);
  th.Z = std::exp(th.log_Z);
  th.mean_energy = p.dot(E);
  double var = 0.0, ent = 0.0;
  for (Eigen::Index i = 0; i < E.size(); ++i) {
    const double dE = E(i) - th.mean_energy;
    var += p(i) * dE * dE;
    if (p(i) > 0.0) ent -= p(i) * std::log(p(i));
  }
  th.energy_variance = var;
  th.u = th.mean_energy / N;
  th.c = var / (N * T * T);
  th.s = ent / N;
  return {GlobalState::diagonal(std::move(spec), p), th};
}

MicrocanonicalWindow window_members(const SpectralDecomposition& spec, double e, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("microcanonical: delta must be positive");
  const auto N = static_cast<double>(spec.num_sites());
  MicrocanonicalWindow win{e, delta, delta * std::sqrt(N), {}};
  const double centre = e * N;
  double nearest = spec.energies(0);
  for (Eigen::Index i = 0; i < spec.energies.size(); ++i) {
    const double E = spec.energies(i);
    if (std::abs(E - centre) <= win.half_width) win.members.push_back(static_cast<std::size_t>(i));
    if (std::abs(E - centre) < std::abs(nearest - centre)) nearest = E;
  }
  if (win.members.empty()) {
    std::ostringstream os;
    os.precision(12);
    os << "microcanonical window |E - " << centre << "| <= " << win.half_width
       << " is empty; nearest eigenvalue " << nearest;
    throw EmptyWindow(os.str(), nearest);
  }
  return win;
}

MicrocanonicalResult microcanonical(std::shared_ptr<const SpectralDecomposition> spec, double e, double delta) {
  if (!spec) throw PreconditionError("microcanonical: missing spectrum");
  MicrocanonicalWindow win = window_members(*spec, e, delta);
  RealVector w = RealVector::Zero(static_cast<Eigen::Index>(spec->dim()));
  const double mass = 1.0 / static_cast<double>(win.dim());
  for (std::size_t nu : win.members) w(static_cast<Eigen::Index>(nu)) = mass;
  return {GlobalState::diagonal(std::move(spec), std::move(w)), std::move(win)};
}

double restricted_log_partition(const SpectralDecomposition& spec, double T, double e, double delta) {
  if (!(T > 0.0)) throw PreconditionError("restricted_partition: temperature must be positive");
  const MicrocanonicalWindow win = window_members(spec, e, delta);
  const double shift = spec.energies(static_cast<Eigen::Index>(win.members.front()));
  double sum = 0.0;
  for (std::size_t nu : win.members) sum += std::exp(-(spec.energies(static_cast<Eigen::Index>(nu)) - shift) / T);
  return -shift / T + std::log(sum);
}

double restricted_partition(const SpectralDecomposition& spec, double T, double e, double delta) {
  return std::exp(restricted_log_partition(spec, T, e, delta));
}

GlobalState haar_state(const MicrocanonicalWindow& window, std::shared_ptr<const SpectralDecomposition> spec,
                       std::uint64_t seed) {
  if (!spec) throw PreconditionError("haar_state: missing spectrum");
  if (window.members.empty()) throw PreconditionError("haar_state: empty window");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector c = Vector::Zero(static_cast<Eigen::Index>(spec->dim()));
  for (std::size_t nu : window.members) {
    if (nu >= spec->dim()) throw PreconditionError("haar_state: window does not match spectrum");
    const double re = normal(rng);
    const double im = normal(rng);
    c(static_cast<Eigen::Index>(nu)) = Complex(re, im);
  }
  // Global phase convention: first member coefficient real and positive.
  const Complex first = c(static_cast<Eigen::Index>(window.members.front()));
  if (std::abs(first) > 0.0) c *= std::conj(first) / std::abs(first);
  return GlobalState::pure(std::move(spec), std::move(c));
}

}  // namespace ensemblekit
