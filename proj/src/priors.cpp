#include "evd/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace evd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Instrumental mass of the truncated IG(1,c) kernel z^{-2} exp(-c/z) on
// [rho,1]: (exp(-c) - exp(-c/rho)) / c.
double instrumental_mass(double c, double rho) {
    const double tail = (c / rho > 700.0) ? 0.0 : std::exp(-c / rho);
    return (std::exp(-c) - tail) / c;
}

double draw_mu_z(double m, double rho, double c, Rng& rng, ArDiagnostics* diag) {
    const double u_lo = (c / rho > 700.0) ? 0.0 : std::exp(-c / rho);
    const double u_hi = std::exp(-c);
    for (;;) {
        const double u1 = rng.uniform(u_lo, u_hi);
        const double z = -c / std::log(u1);
        // Envelope ratio in log form; the Delta(c) normalizer cancels.
        const double log_acc = m * (std::log(z) - std::log(-std::log1p(-z))) + c / z -
                               c / rho + m * std::log1p(0.5 * rho);
        if (diag) ++diag->proposals;
        if (std::log(rng.uniform()) <= log_acc) {
            if (diag) ++diag->accepts;
            return z;
        }
    }
}

double mu_from_z_frechet(double z, const FrechetHyper& h) {
    return h.x_e2 - (h.x_e2 - h.x_e1) / z;
}

}  // namespace

void FrechetHyper::validate() const {
    if (!(m > 0.0)) throw std::invalid_argument("frechet hyper: m must be > 0");
    if (!(mu_inf < x_e1 && x_e1 < x_e2))
        throw std::invalid_argument("frechet hyper: need mu_inf < x_e1 < x_e2");
    if (!std::isfinite(mu_inf)) throw std::invalid_argument("frechet hyper: mu_inf must be finite");
}

void WeibullHyper::validate() const {
    if (!(m > 0.0)) throw std::invalid_argument("weibull hyper: m must be > 0");
    if (!(x_e3 < x_e4)) throw std::invalid_argument("weibull hyper: need x_e3 < x_e4");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("weibull hyper: rho must be in (0,1)");
}

void GumbelHyper::validate() const {
    if (virtual_data.size() < 3)
        throw std::invalid_argument("gumbel hyper: need m >= 3 virtual points");
    for (std::size_t i = 1; i < virtual_data.size(); ++i)
        if (!(virtual_data[i - 1] < virtual_data[i]))
            throw std::invalid_argument("gumbel hyper: virtual data must be strictly increasing");
}

double GumbelHyper::mean_virtual() const {
    double sum = 0.0;
    for (double x : virtual_data) sum += x;
    return sum / static_cast<double>(virtual_data.size());
}

double s1(double mu, double xi, const FrechetHyper& h) {
    if (!(mu < h.x_e1)) throw std::invalid_argument("s1: mu must be < x_e1");
    if (!(xi > 0.0)) throw std::invalid_argument("s1: xi must be > 0");
    return h.m * std::exp(-std::log(h.x_e1 - mu) / xi);
}

double s2(double mu, const FrechetHyper& h) {
    if (!(mu < h.x_e1)) throw std::invalid_argument("s2: mu must be < x_e1");
    return h.m * (std::log(h.x_e2 - mu) - std::log(h.x_e1 - mu));
}

double s3(double mu, double xi, const WeibullHyper& h) {
    if (!(mu > h.x_e3)) throw std::invalid_argument("s3: mu must be > x_e3");
    if (!(xi > 0.0)) throw std::invalid_argument("s3: xi must be > 0");
    return h.m * std::exp(std::log(mu - h.x_e3) / xi);
}

double s4(double mu, const WeibullHyper& h) {
    if (!(mu > h.x_e4)) throw std::invalid_argument("s4: mu must be > x_e4");
    return h.m * (std::log(mu - h.x_e3) - std::log(mu - h.x_e4));
}

double log_pi_mu_frechet(double mu, const FrechetHyper& h) {
    if (mu < h.mu_inf || mu >= h.x_e1) return kNegInf;
    return -h.m * (std::log(h.x_e2 - mu) + std::log(s2(mu, h)));
}

double log_pi_mu_weibull(double mu, const WeibullHyper& h) {
    if (mu <= h.x_e4 || mu > h.mu_sup()) return kNegInf;
    return -h.m * (std::log(mu - h.x_e3) + std::log(s4(mu, h)));
}

double sample_mu_frechet(const FrechetHyper& h, double c, Rng& rng, ArDiagnostics* diag) {
    h.validate();
    if (!(c > 0.0)) throw std::invalid_argument("sample_mu_frechet: c must be > 0");
    return mu_from_z_frechet(draw_mu_z(h.m, h.rho(), c, rng, diag), h);
}

double sample_mu_weibull(const WeibullHyper& h, double c, Rng& rng, ArDiagnostics* diag) {
    h.validate();
    return -sample_mu_frechet(h.reflected(), c, rng, diag);
}

MuZTable::MuZTable(double m, double rho, int knots) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("MuZTable: rho must be in (0,1)");
    if (knots < 8) throw std::invalid_argument("MuZTable: too few knots");
    w_.resize(knots);
    cdf_.resize(knots);
    const double log_w_max = std::log(1.0 / rho);
    double prev_f = 0.0;
    for (int i = 0; i < knots; ++i) {
        const double w = std::exp(log_w_max * i / (knots - 1));
        w_[i] = w;
        // Density transported to w = 1/z: w^{-m} (-log(1-1/w))^{-m}; zero at w=1.
        double f = 0.0;
        if (w > 1.0) {
            const double log_term = -std::log1p(-1.0 / w);
            f = std::exp(-m * (std::log(w) + std::log(log_term)));
        }
        cdf_[i] = (i == 0) ? 0.0 : cdf_[i - 1] + 0.5 * (f + prev_f) * (w_[i] - w_[i - 1]);
        prev_f = f;
    }
    target_mass_ = cdf_.back();
    if (!(target_mass_ > 0.0)) throw std::runtime_error("MuZTable: degenerate target mass");
    for (double& v : cdf_) v /= target_mass_;
}

double MuZTable::z_quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("z_quantile: u must be in (0,1)");
    // z increases as w decreases, so the z-quantile at u is the w-quantile at 1-u.
    const double t = 1.0 - u;
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), t);
    std::size_t j = static_cast<std::size_t>(std::distance(cdf_.begin(), it));
    if (j == 0) j = 1;
    if (j >= cdf_.size()) j = cdf_.size() - 1;
    const double c0 = cdf_[j - 1], c1 = cdf_[j];
    const double frac = (c1 > c0) ? (t - c0) / (c1 - c0) : 0.5;
    const double w = w_[j - 1] + frac * (w_[j] - w_[j - 1]);
    return std::clamp(1.0 / w, std::numeric_limits<double>::min(), 1.0);
}

MuSampler::MuSampler(const FrechetHyper& h, double c, double min_acceptance)
    : frechet_(h), reflect_(false), c_(c), table_(h.m, (h.validate(), h.rho())) {
    const double rho = h.rho();
    const double log_envelope = c / rho - h.m * std::log1p(0.5 * rho);
    const double log_expected = std::log(table_.target_mass()) - log_envelope -
                                std::log(instrumental_mass(c, rho));
    expected_acceptance_ = std::exp(std::min(log_expected, 0.0));
    use_table_ = expected_acceptance_ < min_acceptance;
}

MuSampler::MuSampler(const WeibullHyper& h, double c, double min_acceptance)
    : MuSampler((h.validate(), h.reflected()), c, min_acceptance) {
    reflect_ = true;
}

double MuSampler::draw(Rng& rng) const {
    double mu;
    if (use_table_) {
        mu = mu_from_z_frechet(table_.z_quantile(rng.uniform()), frechet_);
    } else {
        mu = mu_from_z_frechet(draw_mu_z(frechet_.m, frechet_.rho(), c_, rng, nullptr), frechet_);
    }
    return reflect_ ? -mu : mu;
}

FrechetPriorSampler::FrechetPriorSampler(const FrechetHyper& h, double c) : h_(h), mu_(h, c) {}

FrechetPriorDraw FrechetPriorSampler::draw(Rng& rng) const {
    const double mu = mu_.draw(rng);
    const double xi = 1.0 / rng.gamma(h_.m, s2(mu, h_));
    // nu | mu,xi ~ Gamma(m, s1); drawn as Gamma(m,1)/s1 so log nu stays
    // representable when s1 under- or overflows at extreme xi.
    const double g = rng.gamma(h_.m, 1.0);
    const double log_nu = std::log(g) - std::log(h_.m) + std::log(h_.x_e1 - mu) / xi;
    return {FrechetParams{mu, std::exp(log_nu), xi}, log_nu};
}

WeibullPriorSampler::WeibullPriorSampler(const WeibullHyper& h, double c) : h_(h), mu_(h, c) {}

WeibullPriorDraw WeibullPriorSampler::draw(Rng& rng) const {
    const double mu = mu_.draw(rng);
    const double xi = 1.0 / rng.gamma(h_.m, s4(mu, h_));
    const double g = rng.gamma(h_.m, 1.0);
    const double log_nu = std::log(g) - std::log(h_.m) - std::log(mu - h_.x_e3) / xi;
    return {WeibullParams{mu, std::exp(log_nu), xi}, log_nu};
}

FrechetParams sample_prior_frechet(const FrechetHyper& h, Rng& rng) {
    return FrechetPriorSampler(h).draw(rng).params;
}

WeibullParams sample_prior_weibull(const WeibullHyper& h, Rng& rng) {
    return WeibullPriorSampler(h).draw(rng).params;
}

double log_gumbel_prior(double mu, double sigma, const GumbelHyper& h) {
    if (!(sigma > 0.0)) return kNegInf;
    const int m = h.m();
    double sum_exp = 0.0;
    for (double xt : h.virtual_data) {
        const double e = (mu - xt) / sigma;
        if (e > 700.0) return kNegInf;
        sum_exp += std::exp(e);
    }
    return -m * std::log(sigma) + m * (mu - h.mean_virtual()) / sigma - sum_exp;
}

double log_gumbel_posterior(double mu, double sigma, const GumbelHyper& h,
                            std::span<const double> data) {
    if (!(sigma > 0.0)) return kNegInf;
    const double m = static_cast<double>(h.m());
    const double n = static_cast<double>(data.size());
    double data_sum = 0.0;
    for (double x : data) data_sum += x;
    const double pooled_mean = (m * h.mean_virtual() + data_sum) / (m + n);
    double sum_exp = 0.0;
    for (double xt : h.virtual_data) {
        const double e = (mu - xt) / sigma;
        if (e > 700.0) return kNegInf;
        sum_exp += std::exp(e);
    }
    for (double x : data) {
        const double e = (mu - x) / sigma;
        if (e > 700.0) return kNegInf;
        sum_exp += std::exp(e);
    }
    return -(m + n) * std::log(sigma) + (m + n) * (mu - pooled_mean) / sigma - sum_exp;
}

SirResult sample_prior_gumbel(const GumbelHyper& h, double alpha, std::size_t n_proposals,
                              Rng& rng, std::size_t n_out) {
    h.validate();
    if (!(alpha > 0.0)) throw std::invalid_argument("sample_prior_gumbel: alpha must be > 0");
    if (n_proposals < 1) throw std::invalid_argument("sample_prior_gumbel: need proposals");
    if (n_out == 0) n_out = n_proposals;

    const double m = static_cast<double>(h.m());
    const double xbar = h.mean_virtual();
    const double ig_shape = m - 1.0;
    const double ig_scale = m * xbar;
    if (!(ig_scale > 0.0))
        throw std::invalid_argument("sample_prior_gumbel: instrumental needs mean_virtual > 0");
    const double log_ig_const = ig_shape * std::log(ig_scale) - std::lgamma(ig_shape);

    std::vector<double> mu(n_proposals), sigma(n_proposals), logw(n_proposals);
    double max_lw = kNegInf;
    for (std::size_t i = 0; i < n_proposals; ++i) {
        mu[i] = rng.exponential(1.0 / alpha);
        sigma[i] = rng.inverse_gamma(ig_shape, ig_scale);
        const double log_f_mu = -std::log(alpha) - mu[i] / alpha;
        const double log_f_sigma =
            log_ig_const - (ig_shape + 1.0) * std::log(sigma[i]) - ig_scale / sigma[i];
        logw[i] = log_gumbel_prior(mu[i], sigma[i], h) - log_f_mu - log_f_sigma;
        max_lw = std::max(max_lw, logw[i]);
    }
    if (!std::isfinite(max_lw))
        throw std::runtime_error("sample_prior_gumbel: all importance weights are zero");

    std::vector<double> w(n_proposals);
    double sum_w = 0.0, sum_w2 = 0.0;
    for (std::size_t i = 0; i < n_proposals; ++i) {
        w[i] = std::exp(logw[i] - max_lw);
        sum_w += w[i];
    }
    double max_norm = 0.0;
    for (std::size_t i = 0; i < n_proposals; ++i) {
        const double wn = w[i] / sum_w;
        sum_w2 += wn * wn;
        max_norm = std::max(max_norm, wn);
    }

    SirResult result;
    result.ess = 1.0 / sum_w2;
    result.acceptance_span = max_norm;
    result.draws.reserve(n_out);

    // Systematic resampling over the normalized weights.
    const double step = 1.0 / static_cast<double>(n_out);
    double position = rng.uniform() * step;
    double cumulative = w[0] / sum_w;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n_out; ++k) {
        while (cumulative < position && idx + 1 < n_proposals) {
            ++idx;
            cumulative += w[idx] / sum_w;
        }
        result.draws.push_back(GumbelParams{mu[idx], sigma[idx]});
        position += step;
    }
    return result;
}

}  // namespace evd
