#include "evd/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "evd/detail/parallel.hpp"
#include "evd/models.hpp"

namespace evd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> grid_values(double lo, double hi, double step) {
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = lo + i * step;
        if (v > hi + 1e-9) break;
        out.push_back(v);
    }
    return out;
}

struct EstimateResult {
    std::vector<double> orders;
    double ess = 0.0;
    bool feasible = false;
};

// Frozen importance cloud for the Frechet predictive: mu ~ N(kappa, sigma),
// xi ~ InvGamma(m, m log rho_xi). Reused across every grid candidate so the
// loss surface is smooth in the anchors.
class FrechetPredictive {
public:
    FrechetPredictive(double m, const ISConfig& is, Rng& rng) : m_(m) {
        const std::size_t n = is.n_draws;
        mu_.resize(n);
        inv_xi_.resize(n);
        pre_.resize(n);
        const double b_xi = m * std::log(is.rho_xi);
        const double log_norm = -std::log(is.sigma_mu);  // N(kappa,sigma) kernel constant part
        for (std::size_t k = 0; k < n; ++k) {
            const double mu = rng.normal(is.kappa_mu, is.sigma_mu);
            const double xi = rng.inverse_gamma(m, b_xi);
            mu_[k] = mu;
            inv_xi_[k] = 1.0 / xi;
            const double t = (mu - is.kappa_mu) / is.sigma_mu;
            const double log_f_mu = log_norm - 0.5 * t * t;
            // Candidate-independent part of the weight: the -(m+1) log xi
            // kernels of the prior and the instrumental cancel, leaving b/xi.
            pre_[k] = b_xi * inv_xi_[k] - log_f_mu;
        }
    }

    void set_eval_points(std::span<const double> xs) {
        xs_.assign(xs.begin(), xs.end());
        const std::size_t n = mu_.size();
        lvx_.assign(xs_.size() * n, 0.0);
        for (std::size_t j = 0; j < xs_.size(); ++j)
            for (std::size_t k = 0; k < n; ++k)
                lvx_[j * n + k] = xs_[j] > mu_[k] ? std::log(xs_[j] - mu_[k]) : kInf;
    }

    // Weighted predictive orders at the eval points for one anchor candidate.
    EstimateResult estimate(double x_e1, double x_e2, double mu_inf) const {
        const std::size_t n = mu_.size();
        const std::size_t J = xs_.size();
        std::vector<double> logw(n, -kInf);
        std::vector<double> g(J * n, 0.0);
        double max_lw = -kInf;
        for (std::size_t k = 0; k < n; ++k) {
            const double mu = mu_[k];
            if (mu < mu_inf || mu >= x_e1) continue;
            const double lx1 = std::log(x_e1 - mu);
            const double lx2 = std::log(x_e2 - mu);
            const double s2v = m_ * (lx2 - lx1);
            // log pi(mu) + log IG(xi; m, s2) - log instrumental; the m log s2
            // factors cancel between pi(mu) and the IG normalizer.
            const double lw = -m_ * lx2 - s2v * inv_xi_[k] + pre_[k];
            logw[k] = lw;
            max_lw = std::max(max_lw, lw);
            for (std::size_t j = 0; j < J; ++j) {
                const double lv = lvx_[j * n + k];
                if (!std::isfinite(lv)) continue;  // x <= mu: CDF contribution 0
                const double t = -(lv - lx1) * inv_xi_[k];
                if (t > 690.0) continue;
                g[j * n + k] = std::exp(-m_ * std::log1p(std::exp(t) / m_));
            }
        }
        EstimateResult res;
        if (!std::isfinite(max_lw)) return res;
        double sum_w = 0.0, sum_w2 = 0.0;
        std::vector<double> sum_wg(J, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            if (!std::isfinite(logw[k])) continue;
            const double w = std::exp(logw[k] - max_lw);
            sum_w += w;
            sum_w2 += w * w;
            for (std::size_t j = 0; j < J; ++j) sum_wg[j] += w * g[j * n + k];
        }
        if (!(sum_w > 0.0)) return res;
        res.feasible = true;
        res.ess = sum_w * sum_w / sum_w2;
        res.orders.resize(J);
        for (std::size_t j = 0; j < J; ++j) res.orders[j] = sum_wg[j] / sum_w;
        return res;
    }

private:
    double m_;
    std::vector<double> mu_, inv_xi_, pre_;
    std::vector<double> xs_;
    std::vector<double> lvx_;
};

// Frozen common-random-numbers cloud for the Weibull predictive: uniforms map
// through the per-rho z-quantile table to exact mu draws, and gammas map to
// exact xi | mu draws, so the weights are identically one.
class WeibullPredictive {
public:
    WeibullPredictive(double m, std::size_t n_draws, Rng& rng) : m_(m) {
        u_.resize(n_draws);
        gam_.resize(n_draws);
        for (std::size_t k = 0; k < n_draws; ++k) {
            u_[k] = rng.uniform();
            gam_[k] = rng.gamma(m, 1.0);
        }
    }

    void set_eval_points(std::span<const double> xs) { xs_.assign(xs.begin(), xs.end()); }

    void ensure_rho(double rho) {
        if (clouds_.count(rho)) return;
        const MuZTable table(m_, rho);
        RhoCloud cloud;
        cloud.z.resize(u_.size());
        cloud.log_z.resize(u_.size());
        cloud.inv_xi.resize(u_.size());
        for (std::size_t k = 0; k < u_.size(); ++k) {
            const double z = table.z_quantile(u_[k]);
            cloud.z[k] = z;
            cloud.log_z[k] = std::log(z);
            const double s4v = -m_ * std::log1p(-z);
            cloud.inv_xi[k] = gam_[k] / s4v;  // 1/xi with xi = s4/gamma ~ IG(m, s4)
        }
        clouds_.emplace(rho, std::move(cloud));
    }

    EstimateResult estimate(double x_e3, double x_e4, double rho) const {
        const auto& cloud = clouds_.at(rho);
        const double b = x_e4 - x_e3;
        const double log_b = std::log(b);
        const std::size_t n = u_.size();
        const std::size_t J = xs_.size();
        EstimateResult res;
        res.feasible = true;
        res.ess = static_cast<double>(n);
        res.orders.assign(J, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double mu = x_e3 + b / cloud.z[k];
            const double l_anchor = log_b - cloud.log_z[k];  // log(mu - x_e3)
            for (std::size_t j = 0; j < J; ++j) {
                const double x = xs_[j];
                if (x >= mu) {
                    res.orders[j] += 1.0;
                    continue;
                }
                const double e = (std::log(mu - x) - l_anchor) * cloud.inv_xi[k];
                if (e > 690.0) continue;
                res.orders[j] += std::exp(-m_ * std::log1p(std::exp(e) / m_));
            }
        }
        for (double& v : res.orders) v /= static_cast<double>(n);
        return res;
    }

private:
    struct RhoCloud {
        std::vector<double> z, log_z, inv_xi;
    };
    double m_;
    std::vector<double> u_, gam_;
    std::vector<double> xs_;
    std::map<double, RhoCloud> clouds_;
};

struct Candidate {
    double a = 0.0, b = 0.0, rho = 0.0;
    double loss = kInf;
};

// Deterministic argmin: loss first, then the candidate tuple.
bool better(const Candidate& lhs, const Candidate& rhs) {
    if (lhs.loss != rhs.loss) return lhs.loss < rhs.loss;
    if (lhs.a != rhs.a) return lhs.a < rhs.a;
    if (lhs.b != rhs.b) return lhs.b < rhs.b;
    return lhs.rho < rhs.rho;
}

}  // namespace

void ExpertQuantiles::validate() const {
    if (entries.empty()) throw std::invalid_argument("expert quantiles: empty");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!(entries[i].order > 0.0 && entries[i].order < 1.0))
            throw std::invalid_argument("expert quantiles: orders must lie in (0,1)");
        if (i > 0 && !(entries[i - 1].order < entries[i].order &&
                       entries[i - 1].value < entries[i].value))
            throw std::invalid_argument("expert quantiles: orders and values must increase");
    }
}

std::vector<double> ExpertQuantiles::orders() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.order);
    return out;
}

std::vector<double> ExpertQuantiles::values() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.value);
    return out;
}

void ISConfig::validate() const {
    if (!(sigma_mu > 0.0)) throw std::invalid_argument("is config: sigma_mu must be > 0");
    if (!(rho_xi > 1.0)) throw std::invalid_argument("is config: rho_xi must be > 1");
    if (n_draws < 1) throw std::invalid_argument("is config: n_draws must be >= 1");
}

double cooke_loss(std::span<const double> target, std::span<const double> achieved) {
    if (target.size() != achieved.size())
        throw std::invalid_argument("cooke_loss: length mismatch");
    const std::size_t M = target.size();
    double loss = 0.0;
    double prev_t = 0.0, prev_a = 0.0;
    for (std::size_t i = 0; i <= M; ++i) {
        const double t = (i < M) ? target[i] : 1.0;
        const double a = (i < M) ? achieved[i] : 1.0;
        if (!(t >= prev_t) || t > 1.0 || a < 0.0 || a > 1.0)
            throw std::invalid_argument("cooke_loss: orders must be probabilities in order");
        const double dt = t - prev_t;
        const double da = a - prev_a;
        if (dt > 0.0) {
            if (!(da > 0.0)) return kInf;
            loss += dt * std::log(dt / da);
        }
        prev_t = t;
        prev_a = a;
    }
    return loss;
}

double prior_predictive_cdf(double x, const FrechetHyper& h, const ISConfig& is, Rng& rng,
                            PredictiveDiagnostics* diag) {
    h.validate();
    is.validate();
    FrechetPredictive pred(h.m, is, rng);
    const double xs[1] = {x};
    pred.set_eval_points(xs);
    const auto est = pred.estimate(h.x_e1, h.x_e2, h.mu_inf);
    if (!est.feasible)
        throw std::runtime_error("prior_predictive_cdf: no importance draw hits the support");
    if (diag) {
        diag->ess = est.ess;
        diag->low_ess_warning = est.ess < 100.0;
    }
    return est.orders[0];
}

double prior_predictive_cdf(double x, const WeibullHyper& h, const ISConfig& is, Rng& rng,
                            PredictiveDiagnostics* diag) {
    h.validate();
    is.validate();
    WeibullPredictive pred(h.m, is.n_draws, rng);
    const double xs[1] = {x};
    pred.set_eval_points(xs);
    pred.ensure_rho(h.rho);
    const auto est = pred.estimate(h.x_e3, h.x_e4, h.rho);
    if (diag) {
        diag->ess = est.ess;
        diag->low_ess_warning = est.ess < 100.0;
    }
    return est.orders[0];
}

AnchorGrid AnchorGrid::spanning(const ExpertQuantiles& eq, double margin) {
    eq.validate();
    AnchorGrid grid;
    grid.lo = eq.entries.front().value - margin;
    grid.hi = eq.entries.back().value + margin;
    return grid;
}

std::vector<double> RhoGrid::values() const {
    if (!(lo > 0.0 && lo < hi && hi < 1.0) || per_decade < 1)
        throw std::invalid_argument("rho grid: need 0 < lo < hi < 1");
    std::vector<double> out;
    const double step = 1.0 / per_decade;
    for (double e = std::log10(lo); e <= std::log10(hi) + 1e-9; e += step)
        out.push_back(std::pow(10.0, e));
    return out;
}

FrechetCalibration calibrate_frechet(double m, const ExpertQuantiles& eq, const AnchorGrid& grid,
                                     const ISConfig& is, double mu_inf, Rng& rng) {
    eq.validate();
    is.validate();
    if (is.n_draws < 10000)
        throw std::invalid_argument("calibrate_frechet: calibration runs need n_draws >= 10^4");
    if (grid.steps.empty() || !(grid.lo < grid.hi))
        throw std::invalid_argument("calibrate_frechet: bad anchor grid");

    FrechetPredictive pred(m, is, rng);
    const auto xs = eq.values();
    const auto target = eq.orders();
    pred.set_eval_points(xs);

    Candidate best;
    bool any = false;
    double window_lo1 = grid.lo, window_hi1 = grid.hi;
    double window_lo2 = grid.lo, window_hi2 = grid.hi;
    for (std::size_t level = 0; level < grid.steps.size(); ++level) {
        const double step = grid.steps[level];
        const auto v1 = grid_values(std::max(window_lo1, grid.lo), std::min(window_hi1, grid.hi), step);
        const auto v2 = grid_values(std::max(window_lo2, grid.lo), std::min(window_hi2, grid.hi), step);
        std::vector<Candidate> cands;
        for (double a : v1) {
            if (a <= mu_inf) continue;
            for (double b : v2)
                if (b > a) cands.push_back({a, b, 0.0, kInf});
        }
        detail::parallel_for(cands.size(), [&](std::size_t i) {
            const auto est = pred.estimate(cands[i].a, cands[i].b, mu_inf);
            if (est.feasible) cands[i].loss = cooke_loss(target, est.orders);
        });
        for (const auto& c : cands) {
            if (std::isfinite(c.loss) && (!any || better(c, best))) {
                best = c;
                any = true;
            }
        }
        if (!any) break;
        const double w = step * 1.5;
        window_lo1 = best.a - w;
        window_hi1 = best.a + w;
        window_lo2 = best.b - w;
        window_hi2 = best.b + w;
    }
    if (!any) throw std::invalid_argument("calibrate_frechet: empty feasible grid");

    FrechetCalibration out;
    out.hyper = FrechetHyper{m, best.a, best.b, mu_inf};
    const auto est = pred.estimate(best.a, best.b, mu_inf);
    out.achieved_orders = est.orders;
    out.loss = best.loss;
    out.ess = est.ess;
    return out;
}

WeibullCalibration calibrate_weibull(double m, const ExpertQuantiles& eq, const AnchorGrid& grid,
                                     const RhoGrid& rho_grid, const ISConfig& is, Rng& rng) {
    eq.validate();
    is.validate();
    if (is.n_draws < 10000)
        throw std::invalid_argument("calibrate_weibull: calibration runs need n_draws >= 10^4");
    if (grid.steps.empty() || !(grid.lo < grid.hi))
        throw std::invalid_argument("calibrate_weibull: bad anchor grid");

    WeibullPredictive pred(m, is.n_draws, rng);
    const auto xs = eq.values();
    const auto target = eq.orders();
    pred.set_eval_points(xs);
    const auto rhos = rho_grid.values();
    for (double r : rhos) pred.ensure_rho(r);

    Candidate best;
    bool any = false;
    double lo3 = grid.lo, hi3 = grid.hi, lo4 = grid.lo, hi4 = grid.hi;
    std::vector<double> rho_window = rhos;
    for (std::size_t level = 0; level < grid.steps.size(); ++level) {
        const double step = grid.steps[level];
        const auto v3 = grid_values(std::max(lo3, grid.lo), std::min(hi3, grid.hi), step);
        const auto v4 = grid_values(std::max(lo4, grid.lo), std::min(hi4, grid.hi), step);
        std::vector<Candidate> cands;
        for (double a : v3)
            for (double b : v4)
                if (b > a)
                    for (double r : rho_window) cands.push_back({a, b, r, kInf});
        detail::parallel_for(cands.size(), [&](std::size_t i) {
            const auto est = pred.estimate(cands[i].a, cands[i].b, cands[i].rho);
            if (est.feasible) cands[i].loss = cooke_loss(target, est.orders);
        });
        for (const auto& c : cands) {
            if (std::isfinite(c.loss) && (!any || better(c, best))) {
                best = c;
                any = true;
            }
        }
        if (!any) break;
        const double w = step * 1.5;
        lo3 = best.a - w;
        hi3 = best.a + w;
        lo4 = best.b - w;
        hi4 = best.b + w;
        // Keep the winning rho and its immediate log-grid neighbours.
        rho_window.clear();
        for (std::size_t i = 0; i < rhos.size(); ++i) {
            if (rhos[i] == best.rho) {
                if (i > 0) rho_window.push_back(rhos[i - 1]);
                rho_window.push_back(rhos[i]);
                if (i + 1 < rhos.size()) rho_window.push_back(rhos[i + 1]);
            }
        }
        if (rho_window.empty()) rho_window = rhos;
    }
    if (!any) throw std::invalid_argument("calibrate_weibull: empty feasible grid");

    WeibullCalibration out;
    out.hyper = WeibullHyper{m, best.a, best.b, best.rho};
    out.achieved_orders = pred.estimate(best.a, best.b, best.rho).orders;
    out.loss = best.loss;
    return out;
}

TripleGrid TripleGrid::spanning(const ExpertQuantiles& eq, double below, double above) {
    eq.validate();
    TripleGrid grid;
    grid.lo = std::floor(eq.entries.front().value - below);
    grid.hi = std::ceil(eq.entries.back().value + above);
    return grid;
}

namespace {

// Gumbel predictive machinery: trapezoid quadrature over (mu, log sigma) with
// the CDF factors precomputed once (they do not depend on the virtual data).
class GumbelQuadrature {
public:
    GumbelQuadrature(std::span<const double> xs, const GumbelQuadConfig& q) : q_(q) {
        mu_.resize(q.n_mu);
        wmu_.resize(q.n_mu);
        sg_.resize(q.n_sigma);
        wsg_.resize(q.n_sigma);
        for (int i = 0; i < q.n_mu; ++i)
            mu_[i] = q.mu_lo + (q.mu_hi - q.mu_lo) * i / (q.n_mu - 1);
        const double lls = std::log(q.sigma_lo), lhs = std::log(q.sigma_hi);
        for (int j = 0; j < q.n_sigma; ++j) sg_[j] = std::exp(lls + (lhs - lls) * j / (q.n_sigma - 1));
        for (int i = 0; i < q.n_mu; ++i) {
            const double a = (i == 0) ? mu_[0] : mu_[i - 1];
            const double b = (i + 1 == q.n_mu) ? mu_.back() : mu_[i + 1];
            wmu_[i] = 0.5 * (b - a);
        }
        for (int j = 0; j < q.n_sigma; ++j) {
            const double a = (j == 0) ? sg_[0] : sg_[j - 1];
            const double b = (j + 1 == q.n_sigma) ? sg_.back() : sg_[j + 1];
            wsg_[j] = 0.5 * (b - a);
        }
        cdf_.resize(xs.size());
        for (std::size_t t = 0; t < xs.size(); ++t) {
            cdf_[t].resize(static_cast<std::size_t>(q.n_mu) * q.n_sigma);
            for (int i = 0; i < q.n_mu; ++i)
                for (int j = 0; j < q.n_sigma; ++j)
                    cdf_[t][idx(i, j)] = gumbel_cdf(xs[t], GumbelParams{mu_[i], sg_[j]});
        }
    }

    std::vector<double> orders(const GumbelHyper& h) const {
        const int nm = q_.n_mu, ns = q_.n_sigma;
        std::vector<double> logp(static_cast<std::size_t>(nm) * ns);
        double max_lp = -kInf;
        for (int i = 0; i < nm; ++i)
            for (int j = 0; j < ns; ++j) {
                const double lp = log_gumbel_prior(mu_[i], sg_[j], h);
                logp[idx(i, j)] = lp;
                max_lp = std::max(max_lp, lp);
            }
        double z = 0.0;
        std::vector<double> acc(cdf_.size(), 0.0);
        for (int i = 0; i < nm; ++i)
            for (int j = 0; j < ns; ++j) {
                const double w = std::exp(logp[idx(i, j)] - max_lp) * wmu_[i] * wsg_[j];
                if (w == 0.0) continue;
                z += w;
                for (std::size_t t = 0; t < cdf_.size(); ++t) acc[t] += w * cdf_[t][idx(i, j)];
            }
        for (double& v : acc) v /= z;
        return acc;
    }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * q_.n_sigma + j; }

    GumbelQuadConfig q_;
    std::vector<double> mu_, wmu_, sg_, wsg_;
    std::vector<std::vector<double>> cdf_;
};

}  // namespace

std::vector<double> gumbel_predictive_orders(const GumbelHyper& h, std::span<const double> xs,
                                             const GumbelQuadConfig& quad) {
    h.validate();
    return GumbelQuadrature(xs, quad).orders(h);
}

GumbelCalibration calibrate_gumbel_virtual(const ExpertQuantiles& eq, const TripleGrid& grid,
                                           const GumbelQuadConfig& quad) {
    eq.validate();
    if (eq.entries.size() != 3)
        throw std::invalid_argument("calibrate_gumbel_virtual: needs exactly three quantiles");
    const auto xs = eq.values();
    const auto target = eq.orders();
    GumbelQuadrature machine(xs, quad);

    struct Triple {
        double a, b, c;
        double loss = kInf;
    };
    auto search = [&](double lo, double hi, double step, double t1c, double t2c, double t3c,
                      double window) {
        std::vector<Triple> cands;
        auto near = [&](double v, double center) {
            return window <= 0.0 || std::fabs(v - center) <= window + 1e-9;
        };
        for (double a = lo; a <= hi; a += step)
            for (double b = a + step; b <= hi; b += step)
                for (double c = b + step; c <= hi; c += step)
                    if (near(a, t1c) && near(b, t2c) && near(c, t3c)) cands.push_back({a, b, c, kInf});
        if (cands.empty())
            throw std::invalid_argument("calibrate_gumbel_virtual: empty candidate grid");
        detail::parallel_for(cands.size(), [&](std::size_t i) {
            GumbelHyper h{{cands[i].a, cands[i].b, cands[i].c}};
            cands[i].loss = cooke_loss(target, machine.orders(h));
        });
        Triple best = cands.front();
        for (const auto& c : cands)
            if (c.loss < best.loss ||
                (c.loss == best.loss && std::tie(c.a, c.b, c.c) < std::tie(best.a, best.b, best.c)))
                best = c;
        return best;
    };

    Triple best = search(grid.lo, grid.hi, grid.coarse_step, 0, 0, 0, -1.0);
    for (double step = grid.coarse_step / 2.0; step >= grid.fine_step; step /= 2.0)
        best = search(grid.lo, grid.hi, step, best.a, best.b, best.c, 1.5 * step * 2.0);

    // Integer pattern-descent polish; the loss surface has a flat ridge and
    // the windowed refinement can stall one lattice step away from it.
    auto loss_at = [&](double a, double b, double c) {
        if (!(a < b && b < c) || a < grid.lo || c > grid.hi) return kInf;
        return cooke_loss(target, machine.orders(GumbelHyper{{a, b, c}}));
    };
    for (int iter = 0; iter < 200; ++iter) {
        Triple step_best = best;
        for (int coord = 0; coord < 3; ++coord) {
            for (double d : {-grid.fine_step, grid.fine_step}) {
                Triple t = best;
                (coord == 0 ? t.a : coord == 1 ? t.b : t.c) += d;
                t.loss = loss_at(t.a, t.b, t.c);
                if (t.loss < step_best.loss) step_best = t;
            }
        }
        if (!(step_best.loss < best.loss)) break;
        best = step_best;
    }

    GumbelCalibration out;
    out.hyper = GumbelHyper{{best.a, best.b, best.c}};
    out.achieved_orders = machine.orders(out.hyper);
    out.loss = best.loss;
    return out;
}

double kl_marginal(const std::vector<double>& sample_first, const std::vector<double>& sample_second,
                   const KlConfig& cfg, bool* disjoint_warning) {
    if (sample_first.empty() || sample_second.empty())
        throw std::invalid_argument("kl_marginal: empty sample");
    if (cfg.bins < 2) throw std::invalid_argument("kl_marginal: need at least 2 bins");
    if (disjoint_warning) *disjoint_warning = false;

    std::vector<double> ref(sample_second);
    std::sort(ref.begin(), ref.end());

    std::size_t overlap = 0;
    for (double x : sample_first)
        if (x >= ref.front() && x <= ref.back()) ++overlap;
    if (overlap == 0) {
        if (disjoint_warning) *disjoint_warning = true;
        return kInf;
    }

    // Equiprobable cuts of the reference sample; the end bins are unbounded.
    std::vector<double> cuts(cfg.bins - 1);
    for (int i = 1; i < cfg.bins; ++i) {
        const double pos = static_cast<double>(i) / cfg.bins * (ref.size() - 1);
        const std::size_t j = static_cast<std::size_t>(pos);
        const double frac = pos - j;
        cuts[i - 1] = j + 1 < ref.size() ? ref[j] * (1.0 - frac) + ref[j + 1] * frac : ref[j];
    }

    std::vector<double> fgap(cfg.bins, 0.0);
    const double unit = 1.0 / static_cast<double>(sample_first.size());
    for (double x : sample_first) {
        const int b = static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
        fgap[b] += unit;
    }
    const double ggap = 1.0 / cfg.bins;
    double kl = 0.0;
    for (int b = 0; b < cfg.bins; ++b)
        if (fgap[b] > 0.0) kl += fgap[b] * std::log(fgap[b] / ggap);
    return kl;
}

std::vector<double> predictive_sample(const FrechetHyper& h, std::size_t n, Rng& rng) {
    FrechetPriorSampler sampler(h);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = sampler.draw(rng);
        const double e = -std::log(rng.uniform());  // -log U ~ Exp(1)
        out.push_back(d.params.mu + std::exp(d.params.xi * (d.log_nu - std::log(e))));
    }
    return out;
}

std::vector<double> predictive_sample(const WeibullHyper& h, std::size_t n, Rng& rng) {
    WeibullPriorSampler sampler(h);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = sampler.draw(rng);
        const double e = -std::log(rng.uniform());
        out.push_back(d.params.mu - std::exp(d.params.xi * (std::log(e) - d.log_nu)));
    }
    return out;
}

std::vector<double> predictive_sample(const GumbelHyper& h, double sir_alpha, std::size_t n,
                                      Rng& rng) {
    const auto sir = sample_prior_gumbel(h, sir_alpha, n, rng);
    std::vector<double> out;
    out.reserve(n);
    for (const auto& p : sir.draws) out.push_back(gumbel_quantile(rng.uniform(), p));
    return out;
}

namespace {

template <typename Calibration, typename Sampler>
CompatibilityResult compatibility_scan(const std::vector<Calibration>& calibrations,
                                       const GumbelHyper& gumbel, const CompatibilityConfig& cfg,
                                       Rng& rng, const Sampler& sample_model) {
    if (calibrations.empty())
        throw std::invalid_argument("calibrate_virtual_size: no candidate calibrations");
    const auto gumbel_cloud = predictive_sample(gumbel, cfg.sir_alpha, cfg.n_predictive, rng);
    CompatibilityResult res;
    bool any = false;
    double best_kl = kInf;
    for (const auto& calib : calibrations) {
        const auto cloud = sample_model(calib, rng);
        const double kl = kl_marginal(cloud, gumbel_cloud, cfg.kl);
        res.kl_by_m.emplace_back(calib.hyper.m, kl);
        if (!any || kl < best_kl) {  // strict <: ties resolve to the smaller m
            best_kl = kl;
            res.m_star = calib.hyper.m;
            any = true;
        }
    }
    return res;
}

}  // namespace

CompatibilityResult calibrate_virtual_size(const std::vector<FrechetCalibration>& calibrations,
                                           const GumbelHyper& gumbel,
                                           const CompatibilityConfig& cfg, Rng& rng) {
    auto sorted = calibrations;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.hyper.m < b.hyper.m; });
    return compatibility_scan(sorted, gumbel, cfg, rng, [&](const FrechetCalibration& c, Rng& r) {
        return predictive_sample(c.hyper, cfg.n_predictive, r);
    });
}

CompatibilityResult calibrate_virtual_size(const std::vector<WeibullCalibration>& calibrations,
                                           const GumbelHyper& gumbel,
                                           const CompatibilityConfig& cfg, Rng& rng) {
    auto sorted = calibrations;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.hyper.m < b.hyper.m; });
    return compatibility_scan(sorted, gumbel, cfg, rng, [&](const WeibullCalibration& c, Rng& r) {
        return predictive_sample(c.hyper, cfg.n_predictive, r);
    });
}

}  // namespace evd
