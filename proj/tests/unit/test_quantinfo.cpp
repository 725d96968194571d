#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ensemblekit/error.hpp"
#include "ensemblekit/quantinfo.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ensemblekit;
using doctest::Approx;

namespace {

DensityMatrix qubit(const linalg::Matrix& m) { return fixtures::whole(fixtures::chain(1), m); }

DensityMatrix diag2(double a, double b) {
  linalg::Matrix m = linalg::Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return qubit(m);
}

int qubits_for(std::size_t dim) { return dim == 2 ? 1 : dim == 4 ? 2 : 3; }

}  // namespace

TEST_SUITE("quantinfo") {

TEST_CASE("trace distance examples") {
  const auto zero = diag2(1, 0);
  const auto one = diag2(0, 1);
  const auto mixed = diag2(0.5, 0.5);
  CHECK(trace_distance(zero, zero) == Approx(0.0));
  CHECK(trace_distance(zero, one) == Approx(2.0));
  CHECK(trace_distance(zero, mixed) == Approx(1.0));
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(trace_distance(zero, fixtures::random_qubits(2, rng)), PreconditionError);
}

TEST_CASE("von Neumann entropy examples") {
  CHECK(von_neumann_entropy(diag2(1, 0)) == Approx(0.0));
  CHECK(von_neumann_entropy(diag2(0.5, 0.5)) == Approx(std::log(2.0)));
  CHECK(von_neumann_entropy(diag2(0.75, 0.25)) ==
        Approx(-0.75 * std::log(0.75) - 0.25 * std::log(0.25)).epsilon(1e-14));
  const auto lat = fixtures::chain(3);
  CHECK(von_neumann_entropy(maximally_mixed(Region::whole(lat), 2)) == Approx(3.0 * std::log(2.0)));
}

TEST_CASE("relative entropy examples") {
  const auto lat = fixtures::chain(2);
  const auto mixed = maximally_mixed(Region::whole(lat), 2);
  std::mt19937_64 rng(2);
  const auto psi = oracle::random_vector(4, rng);
  const auto pure = pure_density(Region::whole(lat), 2, psi);
  CHECK(relative_entropy(pure, mixed).value == Approx(2.0).epsilon(1e-10));
  CHECK(relative_entropy(pure, mixed, Unit::Nats).value == Approx(2.0 * std::log(2.0)).epsilon(1e-10));
  CHECK(relative_entropy(diag2(0, 1), diag2(1, 0)).value == std::numeric_limits<double>::infinity());
  CHECK_FALSE(relative_entropy(diag2(0, 1), diag2(1, 0)).finite());
  const auto v = relative_entropy(pure, mixed, Unit::Nats);
  CHECK(v.bits() == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("max relative entropy examples") {
  CHECK(max_relative_entropy(diag2(1, 0), diag2(0.5, 0.5)).value == Approx(1.0).epsilon(1e-12));
  CHECK(max_relative_entropy(diag2(0.75, 0.25), diag2(0.5, 0.5)).value == Approx(std::log2(1.5)).epsilon(1e-12));
  CHECK(max_relative_entropy(diag2(0, 1), diag2(1, 0)).value == std::numeric_limits<double>::infinity());
}

TEST_CASE("relative entropies agree with the Eigen oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto tau = fixtures::random_qubits(2, rng);
    const auto rho = fixtures::random_qubits(2, rng);
    CHECK(relative_entropy(tau, rho).value ==
          Approx(oracle::relative_entropy_bits(tau.matrix(), rho.matrix())).epsilon(1e-9));
    CHECK(max_relative_entropy(tau, rho).value ==
          Approx(oracle::max_relative_entropy_bits(tau.matrix(), rho.matrix())).epsilon(1e-9));
  }
}

TEST_CASE("divergence properties on random instances") {
  std::mt19937_64 rng(2024);
  for (std::size_t dim : {2u, 4u, 8u}) {
    const int n = qubits_for(dim);
    const auto lat = fixtures::chain(n);
    for (int trial = 0; trial < 100; ++trial) {
      const auto rho = fixtures::random_qubits(n, rng);
      const auto sigma = fixtures::random_qubits(n, rng);
      const double d1 = trace_distance(rho, sigma);
      const double s = relative_entropy(rho, sigma).value;
      CHECK(d1 * d1 <= std::log(4.0) * s + 1e-9);
      CHECK(s <= max_relative_entropy(rho, sigma).value + 1e-9);
      CHECK(s >= -1e-12);
      if (n > 1) {
        const Region a = Region::single(lat, 0);
        CHECK(trace_distance(partial_trace(rho, a), partial_trace(sigma, a)) <= d1 + 1e-9);
        CHECK(relative_entropy(partial_trace(rho, a), partial_trace(sigma, a)).value <= s + 1e-9);
      }
    }
  }
}

TEST_CASE("superadditivity over product references") {
  std::mt19937_64 rng(12);
  const auto lat = fixtures::chain(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pi = fixtures::random_qubits(3, rng);
    std::vector<DensityMatrix> refs;
    double sum = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
      refs.push_back(random_density(Region::single(lat, s), 2, rng));
      sum += relative_entropy(partial_trace(pi, Region::single(lat, s)), refs.back()).value;
    }
    CHECK(sum <= relative_entropy(pi, tensor_product(refs)).value + 1e-9);
  }
}

TEST_CASE("divergences vanish exactly on equal states") {
  std::mt19937_64 rng(6);
  const auto rho = fixtures::random_qubits(2, rng);
  CHECK(std::abs(relative_entropy(rho, rho).value) < 1e-9);
  CHECK(std::abs(max_relative_entropy(rho, rho).value) < 1e-9);
  CHECK(trace_distance(rho, rho) < 1e-12);
}

TEST_CASE("free energy") {
  const auto spec = fixtures::tfim_spectrum(4);
  const double T = 1.7;
  const auto g = gibbs(spec, T);
  CHECK(free_energy(g.state, *spec, T) == Approx(-T * g.thermal.log_Z).epsilon(1e-12));

  const auto rho_t = g.state.to_dense();
  const linalg::Matrix h = spec->eigenvectors * spec->energies.asDiagonal() * spec->eigenvectors.adjoint();
  CHECK(free_energy(rho_t, h, T) == Approx(-T * g.thermal.log_Z).epsilon(1e-10));

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto tau = fixtures::random_qubits(4, rng);
    const double lhs = T * relative_entropy(tau, rho_t, Unit::Nats).value;
    const double rhs = free_energy(tau, h, T) - free_energy(rho_t, h, T);
    CHECK(lhs == Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("units") {
  const DivergenceValue v{1.0, Unit::Bits};
  CHECK(v.nats() == Approx(std::log(2.0)));
  CHECK(v.in(Unit::Bits).value == 1.0);
  CHECK(std::string(unit_name(Unit::Nats)) == "nats");
}

}
