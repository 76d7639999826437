#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evd/models.hpp"
#include "evd/rng.hpp"

namespace evd {

// Hyperparameters of the semi-conjugate Frechet prior: a virtual sample of
// size m summarized by the shifted inverse arithmetic mean anchor x_e1 and
// the shifted geometric mean anchor x_e2, with mu truncated below at mu_inf
// so that pi(mu) is proper.
struct FrechetHyper {
    double m = 1.0;
    double x_e1 = 0.0;
    double x_e2 = 0.0;
    double mu_inf = 0.0;

    void validate() const;
    // Truncation ratio of the z = (x_e2-x_e1)/(x_e2-mu) reparametrization.
    double rho() const { return (x_e2 - x_e1) / (x_e2 - mu_inf); }
};

// Weibull analogue: anchors x_e3 < x_e4, and mu truncated above at
// mu_sup = x_e3 + (x_e4-x_e3)/rho.
struct WeibullHyper {
    double m = 1.0;
    double x_e3 = 0.0;
    double x_e4 = 0.0;
    double rho = 1e-3;

    void validate() const;
    double mu_sup() const { return x_e3 + (x_e4 - x_e3) / rho; }
    // Frechet image of this prior under x -> -x; pi(mu) and its samplers are
    // shared with the Frechet machinery through this reflection.
    FrechetHyper reflected() const { return {m, -x_e4, -x_e3, -mu_sup()}; }
};

// Conjugate Gumbel prior hyperparameters: the virtual sample itself, sorted
// strictly increasing, size >= 3 for propriety.
struct GumbelHyper {
    std::vector<double> virtual_data;

    void validate() const;
    int m() const { return static_cast<int>(virtual_data.size()); }
    double mean_virtual() const;
};

// Virtual-sample statistics entering the conditional priors.
double s1(double mu, double xi, const FrechetHyper& h);
double s2(double mu, const FrechetHyper& h);
double s3(double mu, double xi, const WeibullHyper& h);
double s4(double mu, const WeibullHyper& h);

// Unnormalized log pi(mu). Frechet support [mu_inf, x_e1), Weibull support
// (x_e4, mu_sup]; -inf outside.
double log_pi_mu_frechet(double mu, const FrechetHyper& h);
double log_pi_mu_weibull(double mu, const WeibullHyper& h);

struct ArDiagnostics {
    std::uint64_t proposals = 0;
    std::uint64_t accepts = 0;
    double rate() const { return proposals ? static_cast<double>(accepts) / proposals : 0.0; }
};

// Exact acceptance-rejection draw of mu from the normalized pi(mu), using the
// truncated inverse-gamma instrumental on z in [rho,1]. c > 0 tunes the
// envelope; smaller is uniformly better, default 0.01.
double sample_mu_frechet(const FrechetHyper& h, double c, Rng& rng,
                         ArDiagnostics* diag = nullptr);
double sample_mu_weibull(const WeibullHyper& h, double c, Rng& rng,
                         ArDiagnostics* diag = nullptr);

// Quantile table for the z-reparametrized prior on [rho,1), density
// z^{m-2} / (-log(1-z))^m. Serves both grid-inversion sampling (the fallback
// when the AR envelope is too loose) and the common-random-numbers predictive
// machinery in calibration.
class MuZTable {
public:
    MuZTable(double m, double rho, int knots = 4097);
    // u in (0,1) -> z quantile.
    double z_quantile(double u) const;
    // Unnormalized mass of the z-density over [rho,1).
    double target_mass() const { return target_mass_; }

private:
    std::vector<double> w_;    // w = 1/z knots, increasing on [1, 1/rho]
    std::vector<double> cdf_;  // cdf over w, decreasing in z
    double target_mass_ = 0.0;
};

// Prior mu sampler with a startup policy: use acceptance-rejection
// when the analytic expected acceptance is above min_acceptance, otherwise
// fall back to grid inversion of the z-density.
class MuSampler {
public:
    MuSampler(const FrechetHyper& h, double c = 0.01, double min_acceptance = 0.05);
    MuSampler(const WeibullHyper& h, double c = 0.01, double min_acceptance = 0.05);

    double draw(Rng& rng) const;
    bool uses_grid_inversion() const { return use_table_; }
    double expected_acceptance() const { return expected_acceptance_; }

private:
    FrechetHyper frechet_;  // Weibull is handled through its reflection
    bool reflect_ = false;
    double c_ = 0.01;
    bool use_table_ = false;
    double expected_acceptance_ = 1.0;
    MuZTable table_;
};

// Joint prior draws following the hierarchy mu -> xi|mu -> nu|mu,xi.
// log_nu is returned alongside nu: for extreme xi the gamma draw of nu
// under- or overflows a double while its log stays representable.
struct FrechetPriorDraw {
    FrechetParams params;
    double log_nu = 0.0;
};
struct WeibullPriorDraw {
    WeibullParams params;
    double log_nu = 0.0;
};

class FrechetPriorSampler {
public:
    explicit FrechetPriorSampler(const FrechetHyper& h, double c = 0.01);
    FrechetPriorDraw draw(Rng& rng) const;
    const FrechetHyper& hyper() const { return h_; }
    const MuSampler& mu_sampler() const { return mu_; }

private:
    FrechetHyper h_;
    MuSampler mu_;
};

class WeibullPriorSampler {
public:
    explicit WeibullPriorSampler(const WeibullHyper& h, double c = 0.01);
    WeibullPriorDraw draw(Rng& rng) const;
    const WeibullHyper& hyper() const { return h_; }
    const MuSampler& mu_sampler() const { return mu_; }

private:
    WeibullHyper h_;
    MuSampler mu_;
};

FrechetParams sample_prior_frechet(const FrechetHyper& h, Rng& rng);
WeibullParams sample_prior_weibull(const WeibullHyper& h, Rng& rng);

// Unnormalized conjugate Gumbel prior and posterior log-kernels.
double log_gumbel_prior(double mu, double sigma, const GumbelHyper& h);
double log_gumbel_posterior(double mu, double sigma, const GumbelHyper& h,
                            std::span<const double> data);

struct SirResult {
    std::vector<GumbelParams> draws;
    double ess = 0.0;              // effective sample size of the weights
    double acceptance_span = 0.0;  // max normalized weight, tail diagnostic
};

// Sampling importance resampling for the Gumbel prior: mu ~ Exp(mean alpha),
// sigma ~ InvGamma(m-1, m * mean_virtual), weights prior/instrumental.
SirResult sample_prior_gumbel(const GumbelHyper& h, double alpha, std::size_t n_proposals,
                              Rng& rng, std::size_t n_out = 0);

}  // namespace evd
