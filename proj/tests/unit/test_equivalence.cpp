#include <doctest.h>

#include <cmath>
#include <random>

#include "ensemblekit/equivalence.hpp"
#include "ensemblekit/error.hpp"
#include "ensemblekit/experiment.hpp"
#include "ensemblekit/quantinfo.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ensemblekit;
using doctest::Approx;

namespace {

ThermalContext context(int n, double T) {
  ThermalContext ctx;
  ctx.spec = fixtures::tfim_spectrum(n);
  ctx.T = T;
  const auto rho = gibbs(ctx.spec, T).state;
  ctx.profile = fit_profile(sample_site_pairs(rho, {1, 2, 3}, {}), static_cast<std::size_t>(n));
  return ctx;
}

const Condition& find(const std::vector<Condition>& cs, const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return c;
  FAIL("missing condition " << name);
  return cs.front();
}

}  // namespace

TEST_SUITE("equivalence") {

TEST_CASE("Lambert W") {
  const double w1 = oracle::bisect([](double w) { return w * std::exp(w) - 1.0; }, 0.0, 1.0);
  CHECK(lambert_w(1.0) == Approx(w1).epsilon(1e-14));
  CHECK(lambert_w(1.0) == Approx(0.567143290409784).epsilon(1e-14));
  CHECK(std::abs(lambert_w(std::exp(1.0)) - 1.0) <= 1e-13);
  CHECK(lambert_w(0.0) == 0.0);
  CHECK_THROWS_AS(lambert_w(-0.1), PreconditionError);
  for (double x : {1e-8, 0.3, 5.0, 1e3, 1e6, 1e100}) {
    const double w = lambert_w(x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, x));
  }
}

TEST_CASE("Lambert W from a logarithm") {
  for (double L : {-5.0, 0.0, 10.0, 600.0})
    CHECK(lambert_w_log(L) == Approx(lambert_w(std::exp(L))).epsilon(1e-13));
  for (double L : {800.0, 1e4, 1e8}) {
    const double w = lambert_w_log(L);
    CHECK(w + std::log(w) == Approx(L).epsilon(1e-14));
  }
  CHECK(lambert_w_log(-std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("local distance average") {
  const auto spec = fixtures::tfim_spectrum(4);
  const auto g = gibbs(spec, 1.0).state;
  const auto avg = local_distance_average(g, g, 1);
  CHECK(avg.mean == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(avg.per_cube.size() == 4);
  CHECK_THROWS_AS(local_distance_average(g, g, 0), Error);
  CHECK_THROWS_AS(local_distance_average(g, g, 5), Error);
}

TEST_CASE("states differing on one site of three") {
  std::mt19937_64 rng(10);
  const auto lat = fixtures::chain(3);
  const auto a = random_density(Region::single(lat, 0), 2, rng);
  const auto b = random_density(Region::single(lat, 1), 2, rng);
  const auto b2 = random_density(Region::single(lat, 1), 2, rng);
  const auto c = random_density(Region::single(lat, 2), 2, rng);
  const DensityMatrix p1[] = {a, b, c};
  const DensityMatrix p2[] = {a, b2, c};
  const auto s1 = GlobalState::dense(tensor_product(p1));
  const auto s2 = GlobalState::dense(tensor_product(p2));
  const double t = trace_distance(b, b2);
  const auto avg = local_distance_average(s1, s2, 1);
  CHECK(avg.mean == Approx(t / 3.0).epsilon(1e-12));
  CHECK(avg.max == Approx(t).epsilon(1e-12));
}

TEST_CASE("theorem check at desk scale") {
  const auto ctx = context(8, 5.0);
  const auto th = gibbs(ctx.spec, ctx.T).thermal;
  const double delta = std::sqrt(th.c * ctx.T * ctx.T);

  SUBCASE("small N: the lower window bound exceeds the upper one") {
    const auto r = check_theorem1(ctx, th.u, delta, 1, 0.01);
    CHECK(r.claim == "canonical_vs_microcanonical");
    const auto& lower = find(r.preconditions, "delta_window_nonempty");
    CHECK(lower.lhs == Approx(28.0 * r.be->value * delta * std::pow(std::log(8.0), 2) / std::sqrt(8.0)).epsilon(1e-12));
    CHECK_FALSE(lower.holds);
    CHECK_FALSE(r.preconditions_hold);
    CHECK(r.measured > 0.0);
    CHECK(r.window_dim == window_members(*ctx.spec, th.u, delta).dim());
    CHECK(r.paper_bound == Approx(7.0 * 0.1));
  }
  SUBCASE("large eps makes the conclusion trivial") {
    const auto r = check_theorem1(ctx, th.u, delta, 1, 0.1);
    CHECK(r.paper_bound >= 2.0);
    CHECK(r.trivially_true);
    CHECK(r.conclusion_holds);
  }
  SUBCASE("canonical state substituted for the microcanonical one") {
    const auto r = check_theorem1(ctx, th.u, delta, 2, 0.01, gibbs(ctx.spec, ctx.T).state);
    CHECK(r.measured == Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(r.conclusion_holds);
  }
}

TEST_CASE("strong form with identical states") {
  const auto ctx = context(6, 2.0);
  const auto g = gibbs(ctx.spec, ctx.T).state;
  const auto r = check_prop_strong(g, g, 1, 0.05, ctx.profile);
  CHECK(r.relative_entropy_bits == Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(r.measured == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(r.conclusion_holds);
}

TEST_CASE("entropy budget implies the separation condition") {
  int checked = 0;
  for (int d : {1, 2})
    for (int n : {10, 100, 1000, 100000, 10000000})
      for (int l : {1, 2, 3})
        for (double xi : {0.3, 1.0, 2.5})
          for (double z : {0.0, 1.0})
            for (double eps : {0.01, 0.1, 0.4})
              for (double S : {0.0, 1.0, 10.0, 100.0}) {
                if (l > n) continue;
                const auto c = strong_conditions(S, n, d, l, 2, xi, z, eps);
                if (!c.entropy_budget.holds) continue;
                ++checked;
                CAPTURE(d);
                CAPTURE(n);
                CAPTURE(l);
                CAPTURE(xi);
                CAPTURE(z);
                CAPTURE(eps);
                CAPTURE(S);
                CHECK(c.separation.holds);
              }
  CHECK(checked > 20);
}

TEST_CASE("microcanonical relative entropy closed form") {
  const auto ctx = context(6, 1.5);
  const auto th = gibbs(ctx.spec, ctx.T).thermal;
  for (double delta : {0.2, 0.5, 1.0}) {
    const auto mc = microcanonical(ctx.spec, th.u, delta);
    const auto generic = micro_relent_bound(ctx, mc.state, th.u, delta, true);
    const auto fast = micro_relent_bound(ctx, mc.state, th.u, delta, false);
    CHECK(generic.lhs == Approx(fast.lhs).epsilon(1e-9));
    CHECK(generic.lhs_closed_form == Approx(generic.lhs).epsilon(1e-9));
    CHECK(micro_relent_closed_form(*ctx.spec, ctx.T, mc.window) == Approx(generic.lhs).epsilon(1e-9));
    CHECK(generic.tau_entropy_bits == Approx(std::log2(static_cast<double>(mc.window.dim()))).epsilon(1e-9));
  }
}

TEST_CASE("full window: maximally mixed reference identity") {
  const auto ctx = context(5, 2.0);
  const auto th = gibbs(ctx.spec, ctx.T).thermal;
  const auto mc = microcanonical(ctx.spec, 0.0, 100.0);
  REQUIRE(mc.window.dim() == 32);
  const auto r = micro_relent_bound(ctx, mc.state, 0.0, 100.0);
  const double N = 5.0;
  const double mean_energy = ctx.spec->energies.mean();
  const double expected = th.log_Z / std::log(2.0) + mean_energy / (ctx.T * std::log(2.0)) - N;
  CHECK(r.lhs == Approx(expected).epsilon(1e-9));
}

TEST_CASE("relative entropy bound rejects states outside the window") {
  const auto ctx = context(5, 2.0);
  const auto th = gibbs(ctx.spec, ctx.T).thermal;
  CHECK_THROWS_AS(micro_relent_bound(ctx, gibbs(ctx.spec, ctx.T).state, th.u, 0.2), PreconditionError);
}

TEST_CASE("corollary: window-uniform state saturates the entropy condition") {
  const auto ctx = context(6, 3.0);
  const auto th = gibbs(ctx.spec, ctx.T).thermal;
  const double delta = std::sqrt(th.c * ctx.T * ctx.T);
  const auto mc = microcanonical(ctx.spec, th.u, delta);
  const auto c = check_corollary_state(ctx, th.u, delta, mc.state, 1, 0.05);
  CHECK(c.part == 1);
  CHECK(c.report.claim == "subspace_state");
  CHECK(find(c.report.preconditions, "entropy").margin() >= 0.0);
  const auto t = check_theorem1(ctx, th.u, delta, 1, 0.05);
  CHECK(c.report.measured == Approx(t.measured).epsilon(1e-12));

  CHECK_THROWS_AS(check_corollary_state(ctx, th.u, delta, gibbs(ctx.spec, ctx.T).state, 1, 0.05), PreconditionError);
}

TEST_CASE("corollary: one-dimensional window") {
  const auto ctx = context(4, 1.0);
  const double e0 = ctx.spec->energies(0) / 4.0;
  const double gap = ctx.spec->energies(1) - ctx.spec->energies(0);
  const double delta = 0.25 * gap / 2.0;
  REQUIRE(window_members(*ctx.spec, e0, delta).dim() == 1);
  const auto c = check_corollary_haar(ctx, e0, delta, 5, 1, 1, 0.05);
  CHECK(c.sample_std_error == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(c.sample_mean == Approx(c.window_value).epsilon(1e-12));
}

TEST_CASE("corollary: Haar samples are reproducible") {
  const auto ctx = context(6, 2.0);
  const auto th = gibbs(ctx.spec, ctx.T).thermal;
  const auto a = check_corollary_haar(ctx, th.u, 0.5, 8, 3, 1, 0.05);
  const auto b = check_corollary_haar(ctx, th.u, 0.5, 8, 3, 1, 0.05);
  CHECK(a.sample_values == b.sample_values);
  CHECK(a.samples == 8);
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("reports serialise non-finite numbers as strings") {
  Condition c{"x", std::numeric_limits<double>::infinity(), 1.0, false};
  const auto j = to_json(c);
  CHECK(j.at("lhs") == "inf");
  CHECK(j.at("holds") == false);
}

}
