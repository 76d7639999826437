#include "evd/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace evd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_valid(const FrechetParams& p) {
    if (!p.valid()) throw std::invalid_argument("frechet: nu and xi must be > 0");
}
void require_valid(const WeibullParams& p) {
    if (!p.valid()) throw std::invalid_argument("weibull: nu and xi must be > 0");
}
void require_valid(const GumbelParams& p) {
    if (!p.valid()) throw std::invalid_argument("gumbel: sigma must be > 0");
}
void require_prob(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile: q must be in (0,1)");
}

bool xi_in_range(double xi) { return xi > kXiMin && xi < kXiMax; }

}  // namespace

double frechet_cdf(double x, const FrechetParams& p) {
    require_valid(p);
    if (x <= p.mu) return 0.0;
    return std::exp(-p.nu * std::exp(-std::log(x - p.mu) / p.xi));
}

double weibull_cdf(double x, const WeibullParams& p) {
    require_valid(p);
    if (x >= p.mu) return 1.0;
    return std::exp(-p.nu * std::exp(std::log(p.mu - x) / p.xi));
}

double gumbel_cdf(double x, const GumbelParams& p) {
    require_valid(p);
    return std::exp(-std::exp(-(x - p.mu) / p.sigma));
}

double frechet_logpdf(double x, const FrechetParams& p) {
    require_valid(p);
    if (x <= p.mu || !xi_in_range(p.xi)) return kNegInf;
    const double lx = std::log(x - p.mu);
    return std::log(p.nu) - std::log(p.xi) - (1.0 / p.xi + 1.0) * lx -
           p.nu * std::exp(-lx / p.xi);
}

double weibull_logpdf(double x, const WeibullParams& p) {
    require_valid(p);
    if (x >= p.mu || !xi_in_range(p.xi)) return kNegInf;
    const double lx = std::log(p.mu - x);
    return std::log(p.nu) - std::log(p.xi) + (1.0 / p.xi - 1.0) * lx -
           p.nu * std::exp(lx / p.xi);
}

double gumbel_logpdf(double x, const GumbelParams& p) {
    require_valid(p);
    const double z = (x - p.mu) / p.sigma;
    return -std::log(p.sigma) - z - std::exp(-z);
}

double frechet_quantile(double q, const FrechetParams& p) {
    require_valid(p);
    require_prob(q);
    return p.mu + std::exp(p.xi * (std::log(p.nu) - std::log(-std::log(q))));
}

double weibull_quantile(double q, const WeibullParams& p) {
    require_valid(p);
    require_prob(q);
    return p.mu - std::exp(p.xi * (std::log(-std::log(q)) - std::log(p.nu)));
}

double gumbel_quantile(double q, const GumbelParams& p) {
    require_valid(p);
    require_prob(q);
    return p.mu - p.sigma * std::log(-std::log(q));
}

double cdf(double x, const DomainParams& p) {
    return std::visit(
        [x](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FrechetParams>) return frechet_cdf(x, m);
            else if constexpr (std::is_same_v<T, WeibullParams>) return weibull_cdf(x, m);
            else return gumbel_cdf(x, m);
        },
        p);
}

double quantile(double q, const DomainParams& p) {
    return std::visit(
        [q](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FrechetParams>) return frechet_quantile(q, m);
            else if constexpr (std::is_same_v<T, WeibullParams>) return weibull_quantile(q, m);
            else return gumbel_quantile(q, m);
        },
        p);
}

double loglik(std::span<const double> data, const FrechetParams& p) {
    require_valid(p);
    if (!xi_in_range(p.xi)) return kNegInf;
    double total = 0.0;
    for (double x : data) {
        if (x <= p.mu) return kNegInf;
        const double lx = std::log(x - p.mu);
        total += -(1.0 / p.xi + 1.0) * lx - p.nu * std::exp(-lx / p.xi);
    }
    const double n = static_cast<double>(data.size());
    return total + n * (std::log(p.nu) - std::log(p.xi));
}

double loglik(std::span<const double> data, const WeibullParams& p) {
    require_valid(p);
    if (!xi_in_range(p.xi)) return kNegInf;
    double total = 0.0;
    for (double x : data) {
        if (x >= p.mu) return kNegInf;
        const double lx = std::log(p.mu - x);
        total += (1.0 / p.xi - 1.0) * lx - p.nu * std::exp(lx / p.xi);
    }
    const double n = static_cast<double>(data.size());
    return total + n * (std::log(p.nu) - std::log(p.xi));
}

double loglik(std::span<const double> data, const GumbelParams& p) {
    require_valid(p);
    double total = 0.0;
    for (double x : data) {
        const double z = (x - p.mu) / p.sigma;
        total += -z - std::exp(-z);
    }
    return total - static_cast<double>(data.size()) * std::log(p.sigma);
}

double loglik(std::span<const double> data, const DomainParams& p) {
    return std::visit([data](const auto& m) { return loglik(data, m); }, p);
}

std::vector<double> sample(const DomainParams& p, Rng& rng, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(rng.uniform(), p));
    return out;
}

}  // namespace evd
