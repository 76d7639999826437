#include "evd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "evd/detail/parallel.hpp"

namespace evd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(std::span<const double> v) {
    double mx = kNegInf;
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

double logsumexp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double mx = std::max(a, b);
    return mx + std::log(std::exp(a - mx) + std::exp(b - mx));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double guarded_exp(double x) {
    return x > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(x);
}

// log Gamma(nu; shape, rate) density evaluated through log nu and log rate.
double log_gamma_pdf_u(double log_nu, double shape, double log_rate) {
    const double t = log_nu + log_rate;
    if (t > 700.0) return kNegInf;
    return shape * log_rate + (shape - 1.0) * log_nu - std::exp(t) - std::lgamma(shape);
}

// log InvGamma(x; shape, scale) density.
double log_invgamma_pdf(double x, double shape, double scale) {
    const double t = std::log(scale) - std::log(x);
    if (t > 700.0) return kNegInf;
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) -
           std::exp(t);
}

class FrechetComponent final : public MixtureComponent {
public:
    FrechetComponent(const FrechetHyper& h, std::span<const double> data, std::string name)
        : h_(h), name_(std::move(name)) {
        h_.validate();
        mu_lo_ = h.mu_inf;
        mu_hi_ = h.x_e1;
        if (!data.empty()) mu_hi_ = std::min(mu_hi_, *std::min_element(data.begin(), data.end()));
        if (!(mu_lo_ < mu_hi_))
            throw std::invalid_argument(
                "frechet component: no admissible mu (data minimum is at or below mu_inf)");
    }

    const std::string& name() const override { return name_; }
    int dim() const override { return 3; }
    std::vector<std::string> param_names() const override { return {"mu", "nu", "xi"}; }

    std::vector<double> initial_u(std::span<const double> data) const override {
        const double mu0 = mu_lo_ + 0.5 * (mu_hi_ - mu_lo_);
        const double xi0 = 0.5;
        double log_rate = std::log(h_.m) - std::log(h_.x_e1 - mu0) / xi0;
        for (double x : data) log_rate = logsumexp2(log_rate, -std::log(x - mu0) / xi0);
        const double log_nu0 = std::log(h_.m + static_cast<double>(data.size())) - log_rate;
        return {0.0, log_nu0, std::log(xi0) - std::log(s2(mu0, h_))};
    }

    double log_prior_u(std::span<const double> u) const override {
        const double s = sigmoid(u[0]);
        const double mu = mu_lo_ + (mu_hi_ - mu_lo_) * s;
        if (!(mu > mu_lo_ && mu < mu_hi_)) return kNegInf;
        const double s2v = s2(mu, h_);
        const double xi = s2v * std::exp(u[2]);
        if (!(xi > kXiMin && xi < kXiMax)) return kNegInf;
        const double log_s1 = std::log(h_.m) - std::log(h_.x_e1 - mu) / xi;
        const double log_pi_mu = -h_.m * (std::log(h_.x_e2 - mu) + std::log(s2v));
        // xi is parametrized relative to its conditional prior scale s2(mu),
        // which keeps the (mu, xi) geometry walkable; d xi / du_2 = xi.
        const double log_jac = std::log(mu_hi_ - mu_lo_) + std::log(s) + std::log1p(-s) + u[1] +
                               std::log(xi);
        return log_pi_mu + log_gamma_pdf_u(u[1], h_.m, log_s1) +
               log_invgamma_pdf(xi, h_.m, s2v) + log_jac;
    }

    double loglik(std::span<const double> data, std::span<const double> u) const override {
        if (data.empty()) return 0.0;
        const double mu = mu_of(u);
        const double xi = xi_of(u);
        if (!(xi > kXiMin && xi < kXiMax)) return kNegInf;
        double sum_lx = 0.0, log_s = kNegInf;
        for (double x : data) {
            const double lx = std::log(x - mu);
            sum_lx += lx;
            log_s = logsumexp2(log_s, -lx / xi);
        }
        const double t = u[1] + log_s;
        if (t > 700.0) return kNegInf;
        const double n = static_cast<double>(data.size());
        return n * (u[1] - std::log(xi)) - (1.0 / xi + 1.0) * sum_lx - std::exp(t);
    }

    std::vector<double> natural(std::span<const double> u) const override {
        return {mu_of(u), std::exp(u[1]), xi_of(u)};
    }

    double cdf(double x, std::span<const double> u) const override {
        const double mu = mu_of(u);
        if (x <= mu) return 0.0;
        const double t = u[1] - std::log(x - mu) / xi_of(u);
        return t > 700.0 ? 0.0 : std::exp(-std::exp(t));
    }

    double quantile(double q, std::span<const double> u) const override {
        const double xi = xi_of(u);
        return mu_of(u) + guarded_exp(xi * (u[1] - std::log(-std::log(q))));
    }

    std::vector<int> mh_coords() const override { return {0, 2}; }

    double log_collapsed_block(std::span<const double> data, std::span<const double> u,
                               double log_prior_weight, double log_other_mass) const override {
        const double s = sigmoid(u[0]);
        const double mu = mu_lo_ + (mu_hi_ - mu_lo_) * s;
        if (!(mu > mu_lo_ && mu < mu_hi_)) return kNegInf;
        const double s2v = s2(mu, h_);
        const double xi = s2v * std::exp(u[2]);
        if (!(xi > kXiMin && xi < kXiMax)) return kNegInf;
        const double log_pi_mu = -h_.m * (std::log(h_.x_e2 - mu) + std::log(s2v));
        const double log_jac = std::log(s) + std::log1p(-s) + std::log(xi);
        const double prior_part = log_pi_mu + log_invgamma_pdf(xi, h_.m, s2v) + log_jac;
        return prior_part +
               logsumexp2(log_prior_weight + log_marginal_lik(data, mu, xi), log_other_mass);
    }

    bool gibbs_nu(std::vector<double>& u, std::span<const double> data, double log_prior_weight,
                  double log_other_mass, Rng& rng) const override {
        const double mu = mu_of(u);
        const double xi = xi_of(u);
        const double log_r0 = std::log(h_.m) - std::log(h_.x_e1 - mu) / xi;
        double log_s = kNegInf;
        for (double x : data) log_s = logsumexp2(log_s, -std::log(x - mu) / xi);
        const double log_rate = logsumexp2(log_r0, log_s);
        // Conditional of nu is a two-part mixture: the branch where this
        // component carries the data (conjugate gamma update) and the branch
        // where another component does (prior draw); branch masses from the
        // nu-integrals.
        const double log_b = log_prior_weight + log_marginal_lik(data, mu, xi);
        const double p_data_branch = 1.0 / (1.0 + std::exp(log_other_mass - log_b));
        if (rng.uniform() < p_data_branch) {
            u[1] = std::log(rng.gamma(h_.m + data.size(), 1.0)) - log_rate;
        } else {
            u[1] = std::log(rng.gamma(h_.m, 1.0)) - log_r0;
        }
        return true;
    }

private:
    double mu_of(std::span<const double> u) const {
        return mu_lo_ + (mu_hi_ - mu_lo_) * sigmoid(u[0]);
    }

    double xi_of(std::span<const double> u) const { return s2(mu_of(u), h_) * std::exp(u[2]); }

    // log integral of Gamma(nu; m, s1) p(x | mu, nu, xi) dnu.
    double log_marginal_lik(std::span<const double> data, double mu, double xi) const {
        if (data.empty()) return 0.0;
        const double n = static_cast<double>(data.size());
        const double log_r0 = std::log(h_.m) - std::log(h_.x_e1 - mu) / xi;
        double log_s = kNegInf, sum_lx = 0.0;
        for (double x : data) {
            const double lx = std::log(x - mu);
            sum_lx += lx;
            log_s = logsumexp2(log_s, -lx / xi);
        }
        const double log_rate = logsumexp2(log_r0, log_s);
        const double log_k = -n * std::log(xi) - (1.0 / xi + 1.0) * sum_lx;
        return log_k + h_.m * log_r0 - std::lgamma(h_.m) + std::lgamma(h_.m + n) -
               (h_.m + n) * log_rate;
    }

    FrechetHyper h_;
    double mu_lo_ = 0.0, mu_hi_ = 0.0;
    std::string name_;
};

class WeibullComponent final : public MixtureComponent {
public:
    WeibullComponent(const WeibullHyper& h, std::span<const double> data, std::string name)
        : h_(h), name_(std::move(name)) {
        h_.validate();
        mu_lo_ = h.x_e4;
        mu_hi_ = h.mu_sup();
        if (!data.empty()) mu_lo_ = std::max(mu_lo_, *std::max_element(data.begin(), data.end()));
        if (!(mu_lo_ < mu_hi_))
            throw std::invalid_argument(
                "weibull component: no admissible mu (data maximum is at or above mu_sup)");
    }

    const std::string& name() const override { return name_; }
    int dim() const override { return 3; }
    std::vector<std::string> param_names() const override { return {"mu", "nu", "xi"}; }

    std::vector<double> initial_u(std::span<const double> data) const override {
        // The prior on mu is nearly flat out to mu_sup while the posterior
        // concentrates just above max(x); start near the lower edge.
        const double frac = 0.05;
        const double mu0 = mu_lo_ + frac * (mu_hi_ - mu_lo_);
        const double xi0 = 0.5;
        double log_rate = std::log(h_.m) + std::log(mu0 - h_.x_e3) / xi0;
        for (double x : data) log_rate = logsumexp2(log_rate, std::log(mu0 - x) / xi0);
        const double log_nu0 = std::log(h_.m + static_cast<double>(data.size())) - log_rate;
        return {std::log(frac / (1.0 - frac)), log_nu0, std::log(xi0) - std::log(s4(mu0, h_))};
    }

    double log_prior_u(std::span<const double> u) const override {
        const double s = sigmoid(u[0]);
        const double mu = mu_lo_ + (mu_hi_ - mu_lo_) * s;
        if (!(mu > mu_lo_ && mu < mu_hi_)) return kNegInf;
        const double s4v = s4(mu, h_);
        const double xi = s4v * std::exp(u[2]);
        if (!(xi > kXiMin && xi < kXiMax)) return kNegInf;
        const double log_s3 = std::log(h_.m) + std::log(mu - h_.x_e3) / xi;
        const double log_pi_mu = -h_.m * (std::log(mu - h_.x_e3) + std::log(s4v));
        const double log_jac = std::log(mu_hi_ - mu_lo_) + std::log(s) + std::log1p(-s) + u[1] +
                               std::log(xi);
        return log_pi_mu + log_gamma_pdf_u(u[1], h_.m, log_s3) +
               log_invgamma_pdf(xi, h_.m, s4v) + log_jac;
    }

    double loglik(std::span<const double> data, std::span<const double> u) const override {
        if (data.empty()) return 0.0;
        const double mu = mu_of(u);
        const double xi = xi_of(u);
        if (!(xi > kXiMin && xi < kXiMax)) return kNegInf;
        double sum_lx = 0.0, log_s = kNegInf;
        for (double x : data) {
            const double lx = std::log(mu - x);
            sum_lx += lx;
            log_s = logsumexp2(log_s, lx / xi);
        }
        const double t = u[1] + log_s;
        if (t > 700.0) return kNegInf;
        const double n = static_cast<double>(data.size());
        return n * (u[1] - std::log(xi)) + (1.0 / xi - 1.0) * sum_lx - std::exp(t);
    }

    std::vector<double> natural(std::span<const double> u) const override {
        return {mu_of(u), std::exp(u[1]), xi_of(u)};
    }

    double cdf(double x, std::span<const double> u) const override {
        const double mu = mu_of(u);
        if (x >= mu) return 1.0;
        const double t = u[1] + std::log(mu - x) / xi_of(u);
        if (t > 700.0) return 0.0;
        return std::exp(-std::exp(t));
    }

    double quantile(double q, std::span<const double> u) const override {
        const double xi = xi_of(u);
        return mu_of(u) - guarded_exp(xi * (std::log(-std::log(q)) - u[1]));
    }

    std::vector<int> mh_coords() const override { return {0, 2}; }

    double log_collapsed_block(std::span<const double> data, std::span<const double> u,
                               double log_prior_weight, double log_other_mass) const override {
        const double s = sigmoid(u[0]);
        const double mu = mu_lo_ + (mu_hi_ - mu_lo_) * s;
        if (!(mu > mu_lo_ && mu < mu_hi_)) return kNegInf;
        const double s4v = s4(mu, h_);
        const double xi = s4v * std::exp(u[2]);
        if (!(xi > kXiMin && xi < kXiMax)) return kNegInf;
        const double log_pi_mu = -h_.m * (std::log(mu - h_.x_e3) + std::log(s4v));
        const double log_jac = std::log(s) + std::log1p(-s) + std::log(xi);
        const double prior_part = log_pi_mu + log_invgamma_pdf(xi, h_.m, s4v) + log_jac;
        return prior_part +
               logsumexp2(log_prior_weight + log_marginal_lik(data, mu, xi), log_other_mass);
    }

    bool gibbs_nu(std::vector<double>& u, std::span<const double> data, double log_prior_weight,
                  double log_other_mass, Rng& rng) const override {
        const double mu = mu_of(u);
        const double xi = xi_of(u);
        const double log_r0 = std::log(h_.m) + std::log(mu - h_.x_e3) / xi;
        double log_s = kNegInf;
        for (double x : data) log_s = logsumexp2(log_s, std::log(mu - x) / xi);
        const double log_rate = logsumexp2(log_r0, log_s);
        const double log_b = log_prior_weight + log_marginal_lik(data, mu, xi);
        const double p_data_branch = 1.0 / (1.0 + std::exp(log_other_mass - log_b));
        if (rng.uniform() < p_data_branch) {
            u[1] = std::log(rng.gamma(h_.m + data.size(), 1.0)) - log_rate;
        } else {
            u[1] = std::log(rng.gamma(h_.m, 1.0)) - log_r0;
        }
        return true;
    }

private:
    double mu_of(std::span<const double> u) const {
        return mu_lo_ + (mu_hi_ - mu_lo_) * sigmoid(u[0]);
    }

    double xi_of(std::span<const double> u) const { return s4(mu_of(u), h_) * std::exp(u[2]); }

    double log_marginal_lik(std::span<const double> data, double mu, double xi) const {
        if (data.empty()) return 0.0;
        const double n = static_cast<double>(data.size());
        const double log_r0 = std::log(h_.m) + std::log(mu - h_.x_e3) / xi;
        double log_s = kNegInf, sum_lx = 0.0;
        for (double x : data) {
            const double lx = std::log(mu - x);
            sum_lx += lx;
            log_s = logsumexp2(log_s, lx / xi);
        }
        const double log_rate = logsumexp2(log_r0, log_s);
        const double log_k = -n * std::log(xi) + (1.0 / xi - 1.0) * sum_lx;
        return log_k + h_.m * log_r0 - std::lgamma(h_.m) + std::lgamma(h_.m + n) -
               (h_.m + n) * log_rate;
    }

    WeibullHyper h_;
    double mu_lo_ = 0.0, mu_hi_ = 0.0;
    std::string name_;
};

// Gumbel block in (v, log sigma) with mu = mean_virtual + sigma * v: under
// the conjugate prior the location spreads proportionally to sigma, so the
// standardized v has a nearly sigma-free profile and the walk covers both
// the likelihood mode and the prior's heavy sigma tail.
class GumbelComponent final : public MixtureComponent {
public:
    GumbelComponent(const GumbelHyper& h, std::string name) : h_(h), name_(std::move(name)) {
        h_.validate();
        anchor_ = h_.mean_virtual();
    }

    const std::string& name() const override { return name_; }
    int dim() const override { return 2; }
    std::vector<std::string> param_names() const override { return {"mu", "sigma"}; }

    std::vector<double> initial_u(std::span<const double> data) const override {
        double mean = anchor_;
        double spread = h_.virtual_data.back() - h_.virtual_data.front();
        if (!data.empty()) {
            double s = 0.0;
            for (double x : data) s += x;
            mean = s / static_cast<double>(data.size());
            double ss = 0.0;
            for (double x : data) ss += (x - mean) * (x - mean);
            spread = std::sqrt(ss / std::max<std::size_t>(1, data.size() - 1));
        }
        const double sigma0 = std::max(1e-3, 0.78 * spread);
        const double mu0 = mean - 0.45 * sigma0;
        return {(mu0 - anchor_) / sigma0, std::log(sigma0)};
    }

    double log_prior_u(std::span<const double> u) const override {
        const double sigma = std::exp(u[1]);
        return log_gumbel_prior(anchor_ + sigma * u[0], sigma, h_) + 2.0 * u[1];
    }

    double loglik(std::span<const double> data, std::span<const double> u) const override {
        if (data.empty()) return 0.0;
        const double sigma = std::exp(u[1]);
        return evd::loglik(data, GumbelParams{anchor_ + sigma * u[0], sigma});
    }

    std::vector<double> natural(std::span<const double> u) const override {
        const double sigma = std::exp(u[1]);
        return {anchor_ + sigma * u[0], sigma};
    }

    double cdf(double x, std::span<const double> u) const override {
        const double sigma = std::exp(u[1]);
        return gumbel_cdf(x, GumbelParams{anchor_ + sigma * u[0], sigma});
    }

    double quantile(double q, std::span<const double> u) const override {
        const double sigma = std::exp(u[1]);
        return gumbel_quantile(q, GumbelParams{anchor_ + sigma * u[0], sigma});
    }

private:
    GumbelHyper h_;
    double anchor_ = 0.0;
    std::string name_;
};

struct ChainResult {
    std::vector<std::vector<double>> params, u, weights;
    std::vector<double> log_mix;
    std::vector<double> accept_rate;
};

}  // namespace

void MixtureConfig::validate(std::size_t n_components) const {
    if (prior_weights.size() != n_components)
        throw std::invalid_argument("mixture config: one prior weight per component required");
    double sum = 0.0;
    for (double w : prior_weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("mixture config: weights must be >= 0");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("mixture config: weights must sum to 1");
}

void McmcSettings::validate() const {
    if (chains < 2) throw std::invalid_argument("mcmc: at least 2 chains required");
    if (burn_in < 0 || iterations <= burn_in)
        throw std::invalid_argument("mcmc: chain length after burn-in must be positive");
    if (thin < 1) throw std::invalid_argument("mcmc: thin must be >= 1");
}

std::shared_ptr<MixtureComponent> make_frechet_component(const FrechetHyper& h,
                                                         std::span<const double> data,
                                                         std::string name) {
    return std::make_shared<FrechetComponent>(h, data, std::move(name));
}
std::shared_ptr<MixtureComponent> make_weibull_component(const WeibullHyper& h,
                                                         std::span<const double> data,
                                                         std::string name) {
    return std::make_shared<WeibullComponent>(h, data, std::move(name));
}
std::shared_ptr<MixtureComponent> make_gumbel_component(const GumbelHyper& h, std::string name) {
    return std::make_shared<GumbelComponent>(h, std::move(name));
}

double MixtureComponent::log_collapsed_block(std::span<const double> data,
                                             std::span<const double> u, double log_prior_weight,
                                             double log_other_mass) const {
    const double lp = log_prior_u(u);
    if (!std::isfinite(lp)) return lp;
    return lp + logsumexp2(log_prior_weight + loglik(data, u), log_other_mass);
}

double mixture_loglik(std::span<const double> component_logliks, const MixtureConfig& cfg) {
    cfg.validate(component_logliks.size());
    std::vector<double> terms(component_logliks.size());
    for (std::size_t c = 0; c < terms.size(); ++c)
        terms[c] = cfg.prior_weights[c] > 0.0
                       ? std::log(cfg.prior_weights[c]) + component_logliks[c]
                       : kNegInf;
    return logsumexp(terms);
}

double mixture_loglik(std::span<const double> data, const FrechetParams& f, const WeibullParams& w,
                      const GumbelParams& g, const MixtureConfig& cfg) {
    const double lls[3] = {loglik(data, f), loglik(data, w), loglik(data, g)};
    return mixture_loglik(lls, cfg);
}

PosteriorDraws mixture_posterior_mcmc(std::span<const double> data,
                                      std::vector<std::shared_ptr<MixtureComponent>> components,
                                      const MixtureConfig& cfg, const McmcSettings& settings,
                                      std::uint64_t seed) {
    if (components.empty()) throw std::invalid_argument("mixture mcmc: no components");
    cfg.validate(components.size());
    settings.validate();
    const std::size_t n_comp = components.size();
    std::vector<double> log_pi(n_comp);
    for (std::size_t c = 0; c < n_comp; ++c)
        log_pi[c] = cfg.prior_weights[c] > 0.0 ? std::log(cfg.prior_weights[c]) : kNegInf;

    const int kept = (settings.iterations - settings.burn_in + settings.thin - 1) / settings.thin;
    std::vector<ChainResult> results(settings.chains);

    detail::parallel_for(
        static_cast<std::size_t>(settings.chains),
        [&](std::size_t chain_id) {
            Rng rng = Rng::stream(seed, "mcmc_chain", chain_id);
            ChainResult& out = results[chain_id];
            out.params.reserve(kept);

            std::vector<std::vector<double>> u(n_comp);
            std::vector<double> lp(n_comp), ll(n_comp);
            for (std::size_t c = 0; c < n_comp; ++c) {
                const auto base = components[c]->initial_u(data);
                for (int tries = 0;; ++tries) {
                    u[c] = base;
                    if (tries > 0 || chain_id > 0)
                        for (auto& v : u[c]) v += 0.4 * rng.normal();
                    lp[c] = components[c]->log_prior_u(u[c]);
                    ll[c] = components[c]->loglik(data, u[c]);
                    if (std::isfinite(lp[c]) && std::isfinite(ll[c])) break;
                    if (tries >= 200)
                        throw std::runtime_error("mixture mcmc: cannot initialize component " +
                                                 components[c]->name());
                }
            }
            auto mix = [&] {
                std::vector<double> terms(n_comp);
                for (std::size_t c = 0; c < n_comp; ++c) terms[c] = log_pi[c] + ll[c];
                return logsumexp(terms);
            };
            double log_mix = mix();

            std::vector<double> scale(n_comp, 0.5);
            std::vector<std::uint64_t> prop_count(n_comp, 0), acc_count(n_comp, 0);
            std::vector<std::uint64_t> adapt_prop(n_comp, 0), adapt_acc(n_comp, 0);

            std::vector<std::vector<int>> mh_coords(n_comp);
            for (std::size_t c = 0; c < n_comp; ++c) {
                if (settings.gibbs_nu) {
                    mh_coords[c] = components[c]->mh_coords();
                } else {
                    mh_coords[c].resize(components[c]->dim());
                    for (int i = 0; i < components[c]->dim(); ++i) mh_coords[c][i] = i;
                }
            }

            for (int iter = 0; iter < settings.iterations; ++iter) {
                for (std::size_t c = 0; c < n_comp; ++c) {
                    double log_other = kNegInf;
                    for (std::size_t k = 0; k < n_comp; ++k)
                        if (k != c) log_other = logsumexp2(log_other, log_pi[k] + ll[k]);

                    bool accepted = false;
                    if (settings.gibbs_nu) {
                        // Random-walk on the block with nu collapsed out, then
                        // an exact conditional redraw of nu.
                        const double cur =
                            components[c]->log_collapsed_block(data, u[c], log_pi[c], log_other);
                        std::vector<double> prop = u[c];
                        for (int i : mh_coords[c]) prop[i] += scale[c] * rng.normal();
                        const double next =
                            components[c]->log_collapsed_block(data, prop, log_pi[c], log_other);
                        if (std::log(rng.uniform()) < next - cur) {
                            u[c] = std::move(prop);
                            accepted = true;
                        }
                        components[c]->gibbs_nu(u[c], data, log_pi[c], log_other, rng);
                        lp[c] = components[c]->log_prior_u(u[c]);
                        ll[c] = components[c]->loglik(data, u[c]);
                        log_mix = mix();
                    } else {
                        std::vector<double> prop = u[c];
                        for (int i : mh_coords[c]) prop[i] += scale[c] * rng.normal();
                        const double lp_new = components[c]->log_prior_u(prop);
                        if (std::isfinite(lp_new)) {
                            const double ll_new = components[c]->loglik(data, prop);
                            std::vector<double> terms(n_comp);
                            for (std::size_t k = 0; k < n_comp; ++k)
                                terms[k] = log_pi[k] + (k == c ? ll_new : ll[k]);
                            const double log_mix_new = logsumexp(terms);
                            const double delta = (lp_new - lp[c]) + (log_mix_new - log_mix);
                            if (std::log(rng.uniform()) < delta) {
                                u[c] = std::move(prop);
                                lp[c] = lp_new;
                                ll[c] = ll_new;
                                log_mix = log_mix_new;
                                accepted = true;
                            }
                        }
                    }
                    if (iter >= settings.burn_in) {
                        ++prop_count[c];
                        if (accepted) ++acc_count[c];
                    } else {
                        ++adapt_prop[c];
                        if (accepted) ++adapt_acc[c];
                        if (adapt_prop[c] == 50) {
                            const double rate = static_cast<double>(adapt_acc[c]) / 50.0;
                            scale[c] *= std::exp(rate - settings.target_accept);
                            scale[c] = std::clamp(scale[c], 1e-4, 10.0);
                            adapt_prop[c] = adapt_acc[c] = 0;
                        }
                    }
                }

                if (iter >= settings.burn_in && (iter - settings.burn_in) % settings.thin == 0) {
                    std::vector<double> w(n_comp);
                    double wsum = 0.0;
                    for (std::size_t c = 0; c < n_comp; ++c) {
                        w[c] = std::exp(log_pi[c] + ll[c] - log_mix);
                        wsum += w[c];
                    }
                    for (auto& v : w) v /= wsum;
                    std::vector<double> nat, uflat;
                    for (std::size_t c = 0; c < n_comp; ++c) {
                        const auto p = components[c]->natural(u[c]);
                        nat.insert(nat.end(), p.begin(), p.end());
                        uflat.insert(uflat.end(), u[c].begin(), u[c].end());
                    }
                    out.params.push_back(std::move(nat));
                    out.u.push_back(std::move(uflat));
                    out.weights.push_back(std::move(w));
                    out.log_mix.push_back(log_mix);
                }
            }
            out.accept_rate.resize(n_comp);
            for (std::size_t c = 0; c < n_comp; ++c)
                out.accept_rate[c] =
                    prop_count[c] ? static_cast<double>(acc_count[c]) / prop_count[c] : 0.0;
        },
        settings.threads);

    PosteriorDraws draws;
    draws.n_components = static_cast<int>(n_comp);
    draws.chains = settings.chains;
    draws.kept_per_chain = kept;
    draws.burn_in = settings.burn_in;
    for (std::size_t c = 0; c < n_comp; ++c) {
        draws.component_names.push_back(components[c]->name());
        draws.component_dims.push_back(components[c]->dim());
        const auto names = components[c]->param_names();
        for (const auto& pn : names) draws.param_names.push_back(components[c]->name() + "." + pn);
        for (const auto& pn : names)
            draws.u_names.push_back(components[c]->name() + ".u_" + pn);
    }
    for (int ch = 0; ch < settings.chains; ++ch) {
        auto& r = results[ch];
        for (std::size_t i = 0; i < r.params.size(); ++i) {
            draws.params.push_back(std::move(r.params[i]));
            draws.u.push_back(std::move(r.u[i]));
            draws.weights.push_back(std::move(r.weights[i]));
            draws.log_mix_lik.push_back(r.log_mix[i]);
            draws.chain.push_back(ch);
        }
        draws.accept_rate.push_back(std::move(r.accept_rate));
    }

    const std::size_t n_u = draws.u_names.size();
    draws.rhat.resize(n_u);
    for (std::size_t j = 0; j < n_u; ++j) {
        std::vector<std::vector<double>> per_chain(settings.chains);
        for (std::size_t i = 0; i < draws.size(); ++i)
            per_chain[draws.chain[i]].push_back(draws.u[i][j]);
        draws.rhat[j] = split_rhat(per_chain);
        if (!(draws.rhat[j] <= 1.1)) draws.converged = false;
    }
    return draws;
}

PosteriorDraws mixture_posterior_mcmc(std::span<const double> data, const FrechetHyper& fh,
                                      const WeibullHyper& wh, const GumbelHyper& gh,
                                      const MixtureConfig& cfg, const McmcSettings& settings,
                                      std::uint64_t seed) {
    std::vector<std::shared_ptr<MixtureComponent>> comps{make_frechet_component(fh, data),
                                                         make_weibull_component(wh, data),
                                                         make_gumbel_component(gh)};
    return mixture_posterior_mcmc(data, std::move(comps), cfg, settings, seed);
}

std::vector<double> model_posterior_probs(const PosteriorDraws& draws) {
    if (draws.size() == 0) throw std::invalid_argument("model_posterior_probs: empty draws");
    std::vector<double> probs(draws.n_components, 0.0);
    for (const auto& w : draws.weights)
        for (int c = 0; c < draws.n_components; ++c) probs[c] += w[c];
    double sum = 0.0;
    for (auto& p : probs) {
        p /= static_cast<double>(draws.size());
        sum += p;
    }
    for (auto& p : probs) p /= sum;
    return probs;
}

std::vector<double> model_posterior_prob_se(const PosteriorDraws& draws, int batches) {
    if (draws.size() == 0) throw std::invalid_argument("model_posterior_prob_se: empty draws");
    std::vector<double> se(draws.n_components, 0.0);
    for (int c = 0; c < draws.n_components; ++c) {
        std::vector<double> batch_means;
        for (int ch = 0; ch < draws.chains; ++ch) {
            std::vector<double> series;
            for (std::size_t i = 0; i < draws.size(); ++i)
                if (draws.chain[i] == ch) series.push_back(draws.weights[i][c]);
            const std::size_t blen = series.size() / batches;
            if (blen == 0) continue;
            for (int b = 0; b < batches; ++b) {
                double s = 0.0;
                for (std::size_t k = 0; k < blen; ++k) s += series[b * blen + k];
                batch_means.push_back(s / static_cast<double>(blen));
            }
        }
        if (batch_means.size() < 2) {
            se[c] = std::numeric_limits<double>::infinity();
            continue;
        }
        double mean = 0.0;
        for (double b : batch_means) mean += b;
        mean /= static_cast<double>(batch_means.size());
        double var = 0.0;
        for (double b : batch_means) var += (b - mean) * (b - mean);
        var /= static_cast<double>(batch_means.size() - 1);
        se[c] = std::sqrt(var / static_cast<double>(batch_means.size()));
    }
    return se;
}

WeightedParamSample per_model_posterior(const PosteriorDraws& draws, int component) {
    if (component < 0 || component >= draws.n_components)
        throw std::invalid_argument("per_model_posterior: bad component index");
    std::size_t begin = 0;
    for (int c = 0; c < component; ++c) begin += static_cast<std::size_t>(draws.component_dims[c]);
    const std::size_t end = begin + static_cast<std::size_t>(draws.component_dims[component]);
    WeightedParamSample out;
    double total = 0.0;
    for (std::size_t j = begin; j < end; ++j) out.param_names.push_back(draws.param_names[j]);
    out.params.reserve(draws.size());
    out.weights.reserve(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        out.params.emplace_back(draws.params[i].begin() + begin, draws.params[i].begin() + end);
        out.weights.push_back(draws.weights[i][component]);
        total += out.weights.back();
    }
    if (!(total > 0.0))
        throw std::runtime_error("per_model_posterior: vanishing total weight for component");
    for (auto& w : out.weights) w /= total;
    return out;
}

GammaParams conditional_nu_posterior(const FrechetHyper& h, double mu, double xi,
                                     std::span<const double> data) {
    h.validate();
    double rate = s1(mu, xi, h);
    for (double x : data) {
        if (!(x > mu))
            throw std::invalid_argument("conditional_nu_posterior: data at or below frechet mu");
        rate += std::exp(-std::log(x - mu) / xi);
    }
    return {h.m + static_cast<double>(data.size()), rate};
}

GammaParams conditional_nu_posterior(const WeibullHyper& h, double mu, double xi,
                                     std::span<const double> data) {
    h.validate();
    double rate = s3(mu, xi, h);
    for (double x : data) {
        if (!(x < mu))
            throw std::invalid_argument("conditional_nu_posterior: data at or above weibull mu");
        rate += std::exp(std::log(mu - x) / xi);
    }
    return {h.m + static_cast<double>(data.size()), rate};
}

double log_conditional_xi(const FrechetHyper& h, double xi, double mu,
                          std::span<const double> data) {
    if (!(xi > 0.0)) return kNegInf;
    if (!(mu < h.x_e1)) return kNegInf;
    const double n = static_cast<double>(data.size());
    double log_t = std::log(h.m) - std::log(h.x_e1 - mu) / xi;
    double sum_lx = 0.0;
    for (double x : data) {
        if (!(x > mu)) return kNegInf;
        const double lx = std::log(x - mu);
        sum_lx += lx;
        log_t = logsumexp2(log_t, -lx / xi);
    }
    return -(n + h.m + 1.0) * std::log(xi) - (h.m * std::log(h.x_e2 - mu) + sum_lx) / xi -
           (h.m + n) * log_t;
}

double log_conditional_xi(const WeibullHyper& h, double xi, double mu,
                          std::span<const double> data) {
    if (!(xi > 0.0)) return kNegInf;
    if (!(mu > h.x_e4)) return kNegInf;
    const double n = static_cast<double>(data.size());
    double log_t = std::log(h.m) + std::log(mu - h.x_e3) / xi;
    double sum_lx = 0.0;
    for (double x : data) {
        if (!(x < mu)) return kNegInf;
        const double lx = std::log(mu - x);
        sum_lx += lx;
        log_t = logsumexp2(log_t, lx / xi);
    }
    return -(n + h.m + 1.0) * std::log(xi) + (h.m * std::log(mu - h.x_e4) + sum_lx) / xi -
           (h.m + n) * log_t;
}

double log_conditional_mu(const FrechetHyper& h, double mu, double nu, double xi,
                          std::span<const double> data) {
    if (mu < h.mu_inf || mu >= h.x_e1) return kNegInf;
    double log_t = std::log(h.m) - std::log(h.x_e1 - mu) / xi;
    double sum_lx = 0.0;
    for (double x : data) {
        if (!(x > mu)) return kNegInf;
        const double lx = std::log(x - mu);
        sum_lx += lx;
        log_t = logsumexp2(log_t, -lx / xi);
    }
    const double t = std::log(nu) + log_t;
    if (t > 700.0) return kNegInf;
    return -std::exp(t) - (h.m * std::log(h.x_e2 - mu) + sum_lx) / xi - sum_lx -
           h.m * std::log(h.x_e2 - mu);
}

double log_conditional_mu(const WeibullHyper& h, double mu, double nu, double xi,
                          std::span<const double> data) {
    if (mu <= h.x_e4 || mu > h.mu_sup()) return kNegInf;
    double log_t = std::log(h.m) + std::log(mu - h.x_e3) / xi;
    double sum_lx = 0.0;
    for (double x : data) {
        if (!(x < mu)) return kNegInf;
        const double lx = std::log(mu - x);
        sum_lx += lx;
        log_t = logsumexp2(log_t, lx / xi);
    }
    const double t = std::log(nu) + log_t;
    if (t > 700.0) return kNegInf;
    return -std::exp(t) + (h.m * std::log(mu - h.x_e4) + sum_lx) / xi - sum_lx -
           h.m * std::log(mu - h.x_e3);
}

namespace {

double mixture_cdf_at(const PosteriorDraws& draws,
                      const std::vector<std::shared_ptr<MixtureComponent>>& components, double x,
                      std::size_t stride) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < draws.size(); i += stride) {
        std::size_t offset = 0;
        double per_draw = 0.0;
        for (std::size_t c = 0; c < components.size(); ++c) {
            const std::size_t d = static_cast<std::size_t>(components[c]->dim());
            std::span<const double> u(draws.u[i].data() + offset, d);
            per_draw += draws.weights[i][c] * components[c]->cdf(x, u);
            offset += d;
        }
        acc += per_draw;
        ++count;
    }
    return acc / static_cast<double>(count);
}

}  // namespace

double predictive_cdf(const PosteriorDraws& draws,
                      const std::vector<std::shared_ptr<MixtureComponent>>& components, double x,
                      std::size_t max_draws) {
    if (draws.size() == 0) throw std::invalid_argument("predictive_cdf: empty draws");
    const std::size_t stride = std::max<std::size_t>(1, draws.size() / max_draws);
    return mixture_cdf_at(draws, components, x, stride);
}

double predictive_quantile(const PosteriorDraws& draws,
                           const std::vector<std::shared_ptr<MixtureComponent>>& components,
                           double q, std::size_t max_draws) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("predictive_quantile: q in (0,1)");
    if (draws.size() == 0) throw std::invalid_argument("predictive_quantile: empty draws");
    const std::size_t stride = std::max<std::size_t>(1, draws.size() / max_draws);

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const std::size_t scan = std::max<std::size_t>(1, draws.size() / 64);
    for (std::size_t i = 0; i < draws.size(); i += scan) {
        std::size_t offset = 0;
        for (std::size_t c = 0; c < components.size(); ++c) {
            const std::size_t d = static_cast<std::size_t>(components[c]->dim());
            std::span<const double> u(draws.u[i].data() + offset, d);
            if (draws.weights[i][c] > 1e-12) {
                const double ql = components[c]->quantile(std::min(q, 0.01), u);
                const double qh = components[c]->quantile(std::max(q, 0.99), u);
                if (std::isfinite(ql)) lo = std::min(lo, ql);
                if (std::isfinite(qh)) hi = std::max(hi, qh);
            }
            offset += d;
        }
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::runtime_error("predictive_quantile: bracket failed");
    double width = std::max(1.0, hi - lo);
    for (int guard = 0; guard < 200 && mixture_cdf_at(draws, components, lo, stride) > q; ++guard)
        lo -= width;
    for (int guard = 0; guard < 200 && mixture_cdf_at(draws, components, hi, stride) < q; ++guard)
        hi += width;
    for (int iter = 0; iter < 200 && hi - lo > 1e-10 * std::max(1.0, std::fabs(hi)); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mixture_cdf_at(draws, components, mid, stride) < q) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double return_level(const PosteriorDraws& draws,
                    const std::vector<std::shared_ptr<MixtureComponent>>& components, double T,
                    std::size_t max_draws) {
    if (!(T > 1.0)) throw std::invalid_argument("return_level: T must exceed 1");
    return predictive_quantile(draws, components, 1.0 - 1.0 / T, max_draws);
}

double split_rhat(const std::vector<std::vector<double>>& chains_series) {
    std::vector<std::vector<double>> halves;
    for (const auto& s : chains_series) {
        const std::size_t h = s.size() / 2;
        if (h < 2) continue;
        halves.emplace_back(s.begin(), s.begin() + h);
        halves.emplace_back(s.begin() + h, s.begin() + 2 * h);
    }
    if (halves.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(halves.front().size());
    const double m = static_cast<double>(halves.size());
    std::vector<double> means(halves.size());
    double grand = 0.0;
    for (std::size_t j = 0; j < halves.size(); ++j) {
        double s = 0.0;
        for (double x : halves[j]) s += x;
        means[j] = s / n;
        grand += means[j];
    }
    grand /= m;
    double b = 0.0, w = 0.0;
    for (std::size_t j = 0; j < halves.size(); ++j) {
        b += (means[j] - grand) * (means[j] - grand);
        double v = 0.0;
        for (double x : halves[j]) v += (x - means[j]) * (x - means[j]);
        w += v / (n - 1.0);
    }
    b *= n / (m - 1.0);
    w /= m;
    if (!(w > 0.0)) return 1.0;  // constant coordinate
    const double var_plus = (n - 1.0) / n * w + b / n;
    return std::sqrt(var_plus / w);
}

}  // namespace evd
