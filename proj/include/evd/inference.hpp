#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "evd/calibration.hpp"
#include "evd/models.hpp"
#include "evd/priors.hpp"
#include "evd/rng.hpp"

namespace evd {

// Prior model probabilities of the encompassing mixture.
struct MixtureConfig {
    std::vector<double> prior_weights;

    void validate(std::size_t n_components) const;
};

// One sub-model inside the mixture. Components work on an unconstrained
// vector u (location mapped onto its admissible interval, scales in logs) so
// posterior draws respect the support invariants by construction; log_prior_u
// includes the transform Jacobian.
class MixtureComponent {
public:
    virtual ~MixtureComponent() = default;

    virtual const std::string& name() const = 0;
    virtual int dim() const = 0;
    virtual std::vector<std::string> param_names() const = 0;
    virtual std::vector<double> initial_u(std::span<const double> data) const = 0;
    virtual double log_prior_u(std::span<const double> u) const = 0;
    virtual double loglik(std::span<const double> data, std::span<const double> u) const = 0;
    virtual std::vector<double> natural(std::span<const double> u) const = 0;
    virtual double cdf(double x, std::span<const double> u) const = 0;
    virtual double quantile(double q, std::span<const double> u) const = 0;

    // Coordinates updated by the random-walk Metropolis step; the conjugate
    // nu coordinate is collapsed out of this step and redrawn exactly.
    virtual std::vector<int> mh_coords() const {
        std::vector<int> all(dim());
        for (int i = 0; i < dim(); ++i) all[i] = i;
        return all;
    }

    // Log target of the MH block with nu integrated out analytically:
    // prior(mh coords) * (pi_c * integral[prior(nu) p_c(x|theta) dnu] + C).
    // The default (no conjugate coordinate) is the plain block target.
    virtual double log_collapsed_block(std::span<const double> data, std::span<const double> u,
                                       double log_prior_weight, double log_other_mass) const;

    // Exact conjugate nu update inside the mixture (two-branch Gibbs); returns
    // false when the component has no conjugate coordinate.
    virtual bool gibbs_nu(std::vector<double>& u, std::span<const double> data,
                          double log_prior_weight, double log_other_mass, Rng& rng) const {
        (void)u, (void)data, (void)log_prior_weight, (void)log_other_mass, (void)rng;
        return false;
    }
};

std::shared_ptr<MixtureComponent> make_frechet_component(const FrechetHyper& h,
                                                         std::span<const double> data,
                                                         std::string name = "frechet");
std::shared_ptr<MixtureComponent> make_weibull_component(const WeibullHyper& h,
                                                         std::span<const double> data,
                                                         std::string name = "weibull");
std::shared_ptr<MixtureComponent> make_gumbel_component(const GumbelHyper& h,
                                                        std::string name = "gumbel");

struct McmcSettings {
    int chains = 4;
    int iterations = 50000;
    int burn_in = 10000;
    int thin = 1;
    double target_accept = 0.3;
    bool gibbs_nu = true;  // exact conjugate nu updates between sweeps
    unsigned threads = 0;  // 0: hardware default

    void validate() const;
};

struct PosteriorDraws {
    std::vector<std::string> param_names;         // flattened natural parameters
    std::vector<std::string> u_names;             // unconstrained coordinates
    std::vector<std::vector<double>> params;      // draw -> natural parameters
    std::vector<std::vector<double>> u;           // draw -> unconstrained vector
    std::vector<std::vector<double>> weights;     // draw -> per-model W, sums to 1
    std::vector<double> log_mix_lik;              // draw -> log p(x|theta)
    std::vector<int> chain;                       // draw -> chain index
    std::vector<std::vector<double>> accept_rate; // chain -> per-block rate
    std::vector<double> rhat;                     // per u-coordinate split-Rhat
    std::vector<std::string> component_names;
    std::vector<int> component_dims;
    int n_components = 0;
    int chains = 0;
    int kept_per_chain = 0;
    int burn_in = 0;
    bool converged = true;

    std::size_t size() const { return params.size(); }
};

// Log of the mixture likelihood sum_M pi_M p_M(x|theta_M), computed by
// log-sum-exp from the per-component logliks.
double mixture_loglik(std::span<const double> component_logliks, const MixtureConfig& cfg);
double mixture_loglik(std::span<const double> data, const FrechetParams& f, const WeibullParams& w,
                      const GumbelParams& g, const MixtureConfig& cfg);

// Blocked random-walk Metropolis over the components, with exact conjugate
// Gibbs updates of the nu coordinates; proposal scales adapt during burn-in
// only. Chains run in parallel on independent streams derived from seed.
PosteriorDraws mixture_posterior_mcmc(std::span<const double> data,
                                      std::vector<std::shared_ptr<MixtureComponent>> components,
                                      const MixtureConfig& cfg, const McmcSettings& settings,
                                      std::uint64_t seed);

// Production three-model mixture.
PosteriorDraws mixture_posterior_mcmc(std::span<const double> data, const FrechetHyper& fh,
                                      const WeibullHyper& wh, const GumbelHyper& gh,
                                      const MixtureConfig& cfg, const McmcSettings& settings,
                                      std::uint64_t seed);

// Mean over draws of the per-draw weights W_M; components sum to 1.
std::vector<double> model_posterior_probs(const PosteriorDraws& draws);

// Batch-means Monte Carlo standard errors of model_posterior_probs.
std::vector<double> model_posterior_prob_se(const PosteriorDraws& draws, int batches = 20);

struct WeightedParamSample {
    std::vector<std::string> param_names;
    std::vector<std::vector<double>> params;  // natural parameters of the model block
    std::vector<double> weights;              // normalized W_M
};

// Importance-weighted sample of one model's block from the mixture draws.
WeightedParamSample per_model_posterior(const PosteriorDraws& draws, int component);

// Appendix conditionals for the semi-conjugate blocks.
struct GammaParams {
    double shape = 0.0;
    double rate = 0.0;
};
GammaParams conditional_nu_posterior(const FrechetHyper& h, double mu, double xi,
                                     std::span<const double> data);
GammaParams conditional_nu_posterior(const WeibullHyper& h, double mu, double xi,
                                     std::span<const double> data);

double log_conditional_xi(const FrechetHyper& h, double xi, double mu,
                          std::span<const double> data);
double log_conditional_xi(const WeibullHyper& h, double xi, double mu,
                          std::span<const double> data);

double log_conditional_mu(const FrechetHyper& h, double mu, double nu, double xi,
                          std::span<const double> data);
double log_conditional_mu(const WeibullHyper& h, double mu, double nu, double xi,
                          std::span<const double> data);

// Posterior-predictive CDF of the mixture (per-draw model-weighted), its
// quantile (inverted by bisection), and the derived T-block return level.
double predictive_cdf(const PosteriorDraws& draws,
                      const std::vector<std::shared_ptr<MixtureComponent>>& components, double x,
                      std::size_t max_draws = 20000);
double predictive_quantile(const PosteriorDraws& draws,
                           const std::vector<std::shared_ptr<MixtureComponent>>& components,
                           double q, std::size_t max_draws = 20000);
double return_level(const PosteriorDraws& draws,
                    const std::vector<std::shared_ptr<MixtureComponent>>& components, double T,
                    std::size_t max_draws = 20000);

// Split-chain potential scale reduction of one coordinate series.
double split_rhat(const std::vector<std::vector<double>>& chains_series);

}  // namespace evd
