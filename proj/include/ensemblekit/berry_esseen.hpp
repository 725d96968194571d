#pragma once

#include <string>
#include <vector>

#include "ensemblekit/operators.hpp"
#include "ensemblekit/states.hpp"

namespace ensemblekit {

// F(x) = sum of <nu|rho|nu> over E_nu <= x, with degenerate energies merged
// (1e-10 tolerance) so that left limits are well defined.
struct SpectralCDF {
  std::vector<double> jump_points;  // ascending, distinct
  std::vector<double> masses;       // mass at each jump point
  double mu = 0.0;                  // tr(rho H)
  double sigma2 = 0.0;              // tr(rho (H - mu)^2)

  double operator()(double x) const;  // right-continuous
  double left_limit(double x) const;
};

SpectralCDF spectral_cdf(const GlobalState& rho, const SpectralDecomposition& spec);
SpectralCDF spectral_cdf(const DensityMatrix& rho, const SpectralDecomposition& spec);
// Direct construction from (energy, weight) pairs; weights are renormalized
// only if they miss 1 by more than 1e-10.
SpectralCDF spectral_cdf(const std::vector<double>& energies, const std::vector<double>& weights);

// Gaussian CDF with mean mu and variance sigma2.
double gaussian_cdf(double x, double mu, double sigma2);

// sup_x |F(x) - G(x)|, evaluated at the jump points from both sides.
double kolmogorov_distance(const SpectralCDF& cdf);

struct BEDelta {
  double C_d = 1.0;
  int k = 1;
  double xi = 1.0;
  double z = 0.0;
  int d = 1;
  double T = 0.0;
  double N = 0.0;
  double sigma2 = 0.0;
  double K = 0.0;        // max{k, xi} (z + 1)
  double value = 0.0;    // Delta_{k,xi,z,T}
  double rhs = 0.0;      // Delta ln^{2d}(N) / sqrt(N)
  std::string branch;    // "log" when 1/(K ln N) is the larger term, else "variance"
};

struct BEParams {
  double C_d = 1.0;
  int k = 1;
  double xi = 1.0;
  double z = 0.0;
  int d = 1;
  double T = 0.0;
  double N = 0.0;
  double sigma2 = 0.0;
};

BEDelta delta_bound(const BEParams& p);

}  // namespace ensemblekit
