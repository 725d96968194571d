#include <doctest.h>

#include <cmath>
#include <random>

#include "ensemblekit/error.hpp"
#include "ensemblekit/quantinfo.hpp"
#include "ensemblekit/substate.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ensemblekit;
using doctest::Approx;

namespace {

DensityMatrix diag_qubit(double a, double b) {
  linalg::Matrix m = linalg::Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return fixtures::whole(fixtures::chain(1), m);
}

// Checks the returned witness against an independent evaluation.
void check_smooth(const DensityMatrix& tau, const DensityMatrix& rho, double eps) {
  const auto w = substate_smooth(tau, rho, eps);
  const double rel = oracle::relative_entropy_bits(tau.matrix(), rho.matrix());
  const double lambda = (rel + 1.0) / eps + std::log2(1.0 / (1.0 - eps));
  CHECK(w.lambda_bound == Approx(lambda).epsilon(1e-9));
  CHECK(oracle::max_relative_entropy_bits(w.pi.matrix(), rho.matrix()) <= lambda + 1e-9);
  CHECK(oracle::trace_norm(w.pi.matrix() - tau.matrix()) <= 2.0 * std::sqrt(eps) + 1e-9);
  CHECK(w.verified());
}

}  // namespace

TEST_SUITE("substate") {

TEST_CASE("smoothing the reference itself changes nothing") {
  std::mt19937_64 rng(1);
  const auto rho = fixtures::random_qubits(2, rng);
  const auto w = substate_smooth(rho, rho, 0.3);
  CHECK(w.achieved_smax == Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(w.distance == Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK((w.pi.matrix() - rho.matrix()).norm() < 1e-9);
}

TEST_CASE("pure eigenvector of the reference") {
  const auto rho = diag_qubit(0.8, 0.2);
  const auto tau = diag_qubit(0.0, 1.0);
  const auto w = substate_smooth(tau, rho, 0.5);
  CHECK(w.achieved_smax <= (std::log2(1.0 / 0.2) + 1.0) / 0.5 + 1.0 + 1e-9);
  CHECK(w.verified());
}

TEST_CASE("random pairs satisfy both guarantees") {
  std::mt19937_64 rng(77);
  const double epsilons[] = {0.1, 0.3, 0.5};
  for (int i = 0; i < 60; ++i) {
    const int n = 1 + i % 2;
    const auto lat = fixtures::chain(n);
    std::uniform_int_distribution<std::size_t> rank(1, std::size_t{1} << n);
    const auto tau = random_density(Region::whole(lat), 2, rng, rank(rng));
    const auto rho = random_density(Region::whole(lat), 2, rng);
    CAPTURE(i);
    check_smooth(tau, rho, epsilons[i % 3]);
  }
}

TEST_CASE("smoothing preconditions") {
  const auto rho = diag_qubit(1.0, 0.0);
  const auto tau = diag_qubit(0.0, 1.0);
  CHECK_THROWS_AS(substate_smooth(tau, rho, 0.3), PreconditionError);
  CHECK_THROWS_AS(substate_smooth(rho, rho, 0.0), PreconditionError);
  CHECK_THROWS_AS(substate_smooth(rho, rho, 1.0), PreconditionError);
}

TEST_CASE("transfer with an unchanged reference is the identity") {
  std::mt19937_64 rng(3);
  const auto rho = fixtures::random_qubits(2, rng);
  const auto pi_tilde = fixtures::random_qubits(2, rng);
  const double lambda = max_relative_entropy(pi_tilde, rho).value;
  const auto w = datta_renner_transfer(pi_tilde, rho, rho, lambda);
  CHECK(w.kappa == 0.0);
  CHECK((w.pi.matrix() - pi_tilde.matrix()).norm() < 1e-9);
  CHECK(w.checks.hold());
}

TEST_CASE("qubit transfer in closed form") {
  const auto rho = diag_qubit(0.5, 0.5);
  const auto rho_tilde = diag_qubit(0.55, 0.45);
  const auto w = datta_renner_transfer(rho, rho, rho_tilde, 0.0);
  CHECK(w.kappa == Approx(0.1).epsilon(1e-12));
  // Y = diag(.55,.45), Delta = diag(.05,.05), T = diag(sqrt(.55/.6), sqrt(.45/.5)).
  const double t0 = 0.55 / 0.6, t1 = 0.45 / 0.5;
  const double norm = 0.5 * t0 + 0.5 * t1;
  CHECK(w.pi.matrix()(0, 0).real() == Approx(0.5 * t0 / norm).epsilon(1e-12));
  CHECK(w.pi.matrix()(1, 1).real() == Approx(0.5 * t1 / norm).epsilon(1e-12));
  CHECK(w.achieved_smax <= std::log2(1.0 / 0.9) + 1e-9);
  CHECK(w.distance <= std::sqrt(0.8) + 1e-9);
  CHECK(w.checks.retained_weight == Approx(norm).epsilon(1e-12));
  CHECK(w.checks.hold());
}

TEST_CASE("transfer errors") {
  const auto rho = diag_qubit(0.5, 0.5);
  CHECK_THROWS_AS(datta_renner_transfer(diag_qubit(1.0, 0.0), rho, rho, 0.5), PreconditionError);
  CHECK_THROWS_AS(datta_renner_transfer(rho, rho, diag_qubit(0.9, 0.1), 2.0), KappaTooLarge);
}

TEST_CASE("random transfers satisfy the operator inequalities") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 40; ++i) {
    const int n = 1 + i % 3;
    const auto lat = fixtures::chain(n);
    const auto rho = random_density(Region::whole(lat), 2, rng);
    const auto pi_tilde = random_density(Region::whole(lat), 2, rng);
    const auto sigma = random_density(Region::whole(lat), 2, rng);
    const double lambda = max_relative_entropy(pi_tilde, rho).value;
    const double u = std::exp2(lambda) * oracle::trace_norm(sigma.matrix() - rho.matrix());
    const double t = 0.5 / u;
    const auto rho_tilde = fixtures::whole(lat, (1.0 - t) * rho.matrix() + t * sigma.matrix());
    const auto w = datta_renner_transfer(pi_tilde, rho, rho_tilde, lambda);
    CAPTURE(i);
    CHECK(w.kappa == Approx(0.5).epsilon(1e-9));
    CHECK(oracle::max_relative_entropy_bits(w.pi.matrix(), rho_tilde.matrix()) <=
          lambda + std::log2(1.0 / (1.0 - w.kappa)) + 1e-9);
    CHECK(oracle::trace_norm(w.pi.matrix() - pi_tilde.matrix()) <= std::sqrt(8.0 * w.kappa) + 1e-9);
    CHECK(w.checks.hold());
  }
}

TEST_CASE("product approximation on product states") {
  std::mt19937_64 rng(4);
  const auto lat = fixtures::chain(3);
  std::vector<DensityMatrix> parts;
  for (std::size_t s = 0; s < 3; ++s) parts.push_back(random_density(Region::single(lat, s), 2, rng));
  const auto rho = tensor_product(parts);
  const std::vector<Region> regions = {Region::single(lat, 0), Region::single(lat, 1), Region::single(lat, 2)};
  const auto a = product_approximation(rho, regions);
  CHECK(a.lhs == Approx(0.0).scale(1.0).epsilon(1e-12));
  for (double s : a.per_step) CHECK(s == Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("bipartite product approximation") {
  std::mt19937_64 rng(5);
  const auto lat = fixtures::chain(2);
  for (int i = 0; i < 20; ++i) {
    const auto rho = fixtures::random_qubits(2, rng);
    const auto a = product_approximation(rho, {Region::single(lat, 0), Region::single(lat, 1)});
    const oracle::Matrix delta = rho.matrix() - oracle::kron(oracle::partial_trace(rho.matrix(), 2, 2, {0}),
                                                   oracle::partial_trace(rho.matrix(), 2, 2, {1}));
    CHECK(a.lhs == Approx(oracle::trace_norm(delta)).epsilon(1e-12));
    CHECK(a.lhs <= a.rhs + 1e-9);
  }
}

TEST_CASE("GHZ state in singleton regions") {
  const auto lat = fixtures::chain(3);
  linalg::Vector ghz = linalg::Vector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  const auto rho = pure_density(Region::whole(lat), 2, ghz);
  const std::vector<Region> regions = {Region::single(lat, 0), Region::single(lat, 1), Region::single(lat, 2)};
  const auto a = product_approximation(rho, regions);
  REQUIRE(a.per_step.size() == 2);
  CHECK(a.lhs <= a.triangle_sum() + 1e-12);
  CHECK(a.lhs <= a.rhs + 1e-9);
  CHECK_THROWS_AS(product_approximation(rho, {Region(lat, {0, 1}), Region(lat, {1, 2})}), PreconditionError);
}

TEST_CASE("product reference with a single region is plain smoothing") {
  std::mt19937_64 rng(6);
  const auto lat = fixtures::chain(2);
  const auto tau = fixtures::random_qubits(2, rng);
  const auto rho = fixtures::random_qubits(2, rng);
  const auto w = product_reference_witness(tau, rho, {Region::whole(lat)}, 0.3);
  const auto s = substate_smooth(tau, rho, 0.3);
  CHECK((w.pi.matrix() - s.pi.matrix()).norm() < 1e-12);
  CHECK(w.kappa == 0.0);
  CHECK(w.verified());
}

TEST_CASE("product reference for a product state") {
  std::mt19937_64 rng(7);
  const auto lat = fixtures::chain(2);
  const DensityMatrix parts[] = {random_density(Region::single(lat, 0), 2, rng),
                                 random_density(Region::single(lat, 1), 2, rng)};
  const auto rho = tensor_product(parts);
  const auto w = product_reference_witness(rho, rho, {Region::single(lat, 0), Region::single(lat, 1)}, 0.2);
  CHECK(w.kappa < 1e-6);
  CHECK(w.achieved_smax < 1e-6);
  CHECK(w.verified());
}

TEST_CASE("TFIM end to end: two distant sites") {
  const auto spec = fixtures::tfim_spectrum(8);
  const auto lat = spec->lattice;
  const Region window(lat, {1, 2, 3, 4, 5});
  const auto rho = gibbs(spec, 5.0).state.reduced(window);
  const auto tau = microcanonical(spec, gibbs(spec, 5.0).thermal.u, 0.3).state.reduced(window);
  const auto w = product_reference_witness(tau, rho, {Region::single(lat, 1), Region::single(lat, 5)}, 0.5);
  CHECK(w.kappa < 1.0);
  CHECK(w.achieved_smax <= w.smax_bound + 1e-9);
  CHECK(w.distance <= w.distance_bound + 1e-9);
  CHECK(w.transferred.checks.hold());
}

}
