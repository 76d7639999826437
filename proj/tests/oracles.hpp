#pragma once

// Independent numeric oracles used by the unit and acceptance suites. These
// deliberately avoid the library's own evaluation paths: series summation,
// trapezoid quadrature and finite differences only.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "evd/priors.hpp"

namespace oracles {

// Series form of the normalized Frechet pi(mu): (1 + sum_k z^k/(k+1))^{-m}
// with z = (x_e2-x_e1)/(x_e2-mu). Expanding -log(1-z) gives harmonic
// denominators z^k/k; regrouped over z^{k}/(k+1) after factoring one z out.
inline double log_pi_mu_frechet_series(double mu, const evd::FrechetHyper& h) {
    if (mu < h.mu_inf || mu >= h.x_e1) return -std::numeric_limits<double>::infinity();
    const double z = (h.x_e2 - h.x_e1) / (h.x_e2 - mu);
    double sum = 0.0;
    double zk = 1.0;
    for (int k = 1; k <= 200000; ++k) {
        zk *= z;
        const double term = zk / (k + 1.0);
        sum += term;
        if (term < 1e-15 * (1.0 + sum)) break;
    }
    return -h.m * std::log1p(sum);
}

// Trapezoid-normalized CDF of an unnormalized log density on [lo, hi].
class GridCdf {
public:
    template <typename LogDensity>
    GridCdf(const LogDensity& logf, double lo, double hi, int n = 20001) : x_(n), cdf_(n) {
        std::vector<double> logv(n);
        double max_lv = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            x_[i] = lo + (hi - lo) * i / (n - 1);
            logv[i] = logf(x_[i]);
            max_lv = std::max(max_lv, logv[i]);
        }
        if (!std::isfinite(max_lv)) throw std::runtime_error("GridCdf: density vanishes");
        double acc = 0.0;
        double prev = std::exp(logv[0] - max_lv);
        cdf_[0] = 0.0;
        for (int i = 1; i < n; ++i) {
            const double cur = std::exp(logv[i] - max_lv);
            acc += 0.5 * (prev + cur) * (x_[i] - x_[i - 1]);
            cdf_[i] = acc;
            prev = cur;
        }
        if (!(acc > 0.0)) throw std::runtime_error("GridCdf: zero mass");
        for (double& v : cdf_) v /= acc;
    }

    double operator()(double x) const {
        if (x <= x_.front()) return 0.0;
        if (x >= x_.back()) return 1.0;
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t j = static_cast<std::size_t>(std::distance(x_.begin(), it));
        const double t = (x - x_[j - 1]) / (x_[j] - x_[j - 1]);
        return cdf_[j - 1] + t * (cdf_[j] - cdf_[j - 1]);
    }

private:
    std::vector<double> x_, cdf_;
};

// Two-sided Kolmogorov distance between a sample and a reference CDF.
template <typename Cdf>
double ks_distance(std::vector<double> sample, const Cdf& ref) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = ref(sample[i]);
        d = std::max(d, std::fabs((i + 1.0) / n - f));
        d = std::max(d, std::fabs(f - i / n));
    }
    return d;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// 2-D trapezoid integral of w(x,y)*exp(logf(x,y)) over a grid; y log-spaced.
template <typename LogF, typename Weight>
double quad2d(const LogF& logf, const Weight& w, double x_lo, double x_hi, int nx, double y_lo,
              double y_hi, int ny, double log_shift) {
    std::vector<double> xs(nx), ys(ny);
    for (int i = 0; i < nx; ++i) xs[i] = x_lo + (x_hi - x_lo) * i / (nx - 1);
    for (int j = 0; j < ny; ++j)
        ys[j] = std::exp(std::log(y_lo) + (std::log(y_hi) - std::log(y_lo)) * j / (ny - 1));
    double total = 0.0;
    for (int i = 0; i + 1 < nx; ++i) {
        for (int j = 0; j + 1 < ny; ++j) {
            const double area = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
            double cell = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    cell += w(xs[i + a], ys[j + b]) * std::exp(logf(xs[i + a], ys[j + b]) - log_shift);
            total += 0.25 * cell * area;
        }
    }
    return total;
}

}  // namespace oracles
