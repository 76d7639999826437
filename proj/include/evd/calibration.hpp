#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "evd/priors.hpp"
#include "evd/rng.hpp"

namespace evd {

// Ordered predictive percentile constraints supplied by an expert.
struct ExpertQuantiles {
    struct Entry {
        double order = 0.0;  // in (0,1), strictly increasing
        double value = 0.0;  // data units, strictly increasing
    };
    std::vector<Entry> entries;

    void validate() const;
    std::vector<double> orders() const;
    std::vector<double> values() const;
};

// Constant importance sampling configuration for the Frechet predictive:
// mu ~ N(kappa_mu, sigma_mu), xi ~ InvGamma(m, m log rho_xi).
struct ISConfig {
    double kappa_mu = 0.0;
    double sigma_mu = 50.0;
    double rho_xi = 2.0;
    std::size_t n_draws = 100000;

    void validate() const;
};

struct PredictiveDiagnostics {
    double ess = 0.0;
    bool low_ess_warning = false;
};

// Cooke's criterion: discretized KL loss between target orders and achieved
// orders, both augmented with the 0 and 1 endpoints. +inf when an achieved
// gap vanishes.
double cooke_loss(std::span<const double> target, std::span<const double> achieved);

// Prior predictive CDF estimates. Frechet integrates the gamma nu-layer in
// closed form and handles (mu, xi) by importance sampling; Weibull uses exact
// common-random-numbers draws through the z-quantile table (unit weights).
double prior_predictive_cdf(double x, const FrechetHyper& h, const ISConfig& is, Rng& rng,
                            PredictiveDiagnostics* diag = nullptr);
double prior_predictive_cdf(double x, const WeibullHyper& h, const ISConfig& is, Rng& rng,
                            PredictiveDiagnostics* diag = nullptr);

// Coarse-to-fine anchor grid; the last step sets the final resolution.
struct AnchorGrid {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> steps = {8.0, 2.0, 0.5};

    static AnchorGrid spanning(const ExpertQuantiles& eq, double margin = 50.0);
};

// Log-spaced grid for the Weibull truncation ratio rho. The predictive fit
// improves monotonically as rho shrinks (more diffuse mu truncation), so the
// calibrated rho sits at the grid floor; the default floor 1e-3 matches the
// case-study scale.
struct RhoGrid {
    double lo = 1e-3;
    double hi = 1e-2;
    int per_decade = 4;

    std::vector<double> values() const;
};

struct FrechetCalibration {
    FrechetHyper hyper;
    std::vector<double> achieved_orders;
    double loss = 0.0;
    double ess = 0.0;
};

struct WeibullCalibration {
    WeibullHyper hyper;
    std::vector<double> achieved_orders;
    double loss = 0.0;
};

struct GumbelCalibration {
    GumbelHyper hyper;
    std::vector<double> achieved_orders;
    double loss = 0.0;
};

FrechetCalibration calibrate_frechet(double m, const ExpertQuantiles& eq, const AnchorGrid& grid,
                                     const ISConfig& is, double mu_inf, Rng& rng);

WeibullCalibration calibrate_weibull(double m, const ExpertQuantiles& eq, const AnchorGrid& grid,
                                     const RhoGrid& rho_grid, const ISConfig& is, Rng& rng);

// Quadrature settings for the Gumbel predictive (sigma log-spaced). The mu
// domain starts at 0 by default, the support of the exponential instrumental
// that defines the prior sampler.
struct GumbelQuadConfig {
    double mu_lo = 0.0;
    double mu_hi = 2000.0;
    int n_mu = 260;
    double sigma_lo = 0.25;
    double sigma_hi = 4000.0;
    int n_sigma = 260;
};

// Integer-triple search domain for the Gumbel virtual data.
struct TripleGrid {
    double lo = 0.0;
    double hi = 0.0;
    double coarse_step = 4.0;
    double fine_step = 1.0;

    static TripleGrid spanning(const ExpertQuantiles& eq, double below = 20.0, double above = 10.0);
};

// Prior predictive orders of the expert values under a given Gumbel virtual
// sample, by 2-D quadrature of the conjugate prior.
std::vector<double> gumbel_predictive_orders(const GumbelHyper& h, std::span<const double> xs,
                                             const GumbelQuadConfig& quad);

GumbelCalibration calibrate_gumbel_virtual(const ExpertQuantiles& eq, const TripleGrid& grid,
                                           const GumbelQuadConfig& quad);

// KL(first | second) between two predictive samples, discretized Cooke-style
// over CDF increments at equiprobable cuts of the second sample. Covers the
// full support: the tail mass the first sample parks beyond the reference
// quantiles is what separates the candidate virtual sizes.
struct KlConfig {
    int bins = 64;
};

double kl_marginal(const std::vector<double>& sample_first, const std::vector<double>& sample_second,
                   const KlConfig& cfg = {}, bool* disjoint_warning = nullptr);

// Prior predictive samples (observable draws) for the compatibility rule.
std::vector<double> predictive_sample(const FrechetHyper& h, std::size_t n, Rng& rng);
std::vector<double> predictive_sample(const WeibullHyper& h, std::size_t n, Rng& rng);
std::vector<double> predictive_sample(const GumbelHyper& h, double sir_alpha, std::size_t n,
                                      Rng& rng);

struct CompatibilityConfig {
    std::size_t n_predictive = 100000;
    double sir_alpha = 100.0;
    KlConfig kl;
};

struct CompatibilityResult {
    double m_star = 0.0;
    std::vector<std::pair<double, double>> kl_by_m;  // (m, KL)
};

// Virtual-size selection: minimize KL(g_model | g_Gumbel) over the
// candidate m's; ties break toward smaller m.
CompatibilityResult calibrate_virtual_size(const std::vector<FrechetCalibration>& calibrations,
                                           const GumbelHyper& gumbel,
                                           const CompatibilityConfig& cfg, Rng& rng);
CompatibilityResult calibrate_virtual_size(const std::vector<WeibullCalibration>& calibrations,
                                           const GumbelHyper& gumbel,
                                           const CompatibilityConfig& cfg, Rng& rng);

}  // namespace evd
