#pragma once

#include <span>
#include <variant>
#include <vector>

#include "evd/rng.hpp"

namespace evd {

// Sub-models of the extreme-value limit family for block maxima.
enum class Model { frechet, weibull, gumbel };

// Numeric range for the shape parameter; values outside are treated as
// support violations (log-densities return -inf) to avoid overflow in
// (.)^{±1/xi}.
inline constexpr double kXiMin = 1e-4;
inline constexpr double kXiMax = 1e3;

// Frechet in the nu-parametrization: P(X<x) = exp(-nu (x-mu)^{-1/xi}),
// x >= mu, where nu = sigma^{1/xi}.
struct FrechetParams {
    double mu = 0.0;
    double nu = 1.0;
    double xi = 1.0;
    bool valid() const { return nu > 0.0 && xi > 0.0; }
};

// Weibull with upper endpoint mu: P(X<x) = exp(-nu (mu-x)^{1/xi}), x <= mu.
struct WeibullParams {
    double mu = 0.0;
    double nu = 1.0;
    double xi = 1.0;
    bool valid() const { return nu > 0.0 && xi > 0.0; }
};

// Gumbel: P(X<x) = exp(-exp(-(x-mu)/sigma)).
struct GumbelParams {
    double mu = 0.0;
    double sigma = 1.0;
    bool valid() const { return sigma > 0.0; }
};

using DomainParams = std::variant<FrechetParams, WeibullParams, GumbelParams>;

double frechet_cdf(double x, const FrechetParams& p);
double weibull_cdf(double x, const WeibullParams& p);
double gumbel_cdf(double x, const GumbelParams& p);

double frechet_logpdf(double x, const FrechetParams& p);
double weibull_logpdf(double x, const WeibullParams& p);
double gumbel_logpdf(double x, const GumbelParams& p);

double frechet_quantile(double q, const FrechetParams& p);
double weibull_quantile(double q, const WeibullParams& p);
double gumbel_quantile(double q, const GumbelParams& p);

double cdf(double x, const DomainParams& p);
double quantile(double q, const DomainParams& p);

// Sum of per-point log densities; -inf (not an error) when any point falls
// outside the support or xi is outside the numeric range, so MCMC proposals
// are rejected naturally.
double loglik(std::span<const double> data, const FrechetParams& p);
double loglik(std::span<const double> data, const WeibullParams& p);
double loglik(std::span<const double> data, const GumbelParams& p);
double loglik(std::span<const double> data, const DomainParams& p);

// Inverse-CDF sampling, n >= 1.
std::vector<double> sample(const DomainParams& p, Rng& rng, std::size_t n);

}  // namespace evd
