#include "evd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace evd {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

void require_keys(const json& j, const std::vector<std::string>& known, const std::string& where) {
    for (const auto& item : j.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
    }
}

struct WeightedStats {
    ParamSummary summary;
    double total_weight = 0.0;
};

WeightedStats weighted_stats(const std::vector<double>& values, const std::vector<double>& weights) {
    WeightedStats out;
    std::vector<std::size_t> idx(values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    double wsum = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        wsum += weights[i];
        mean += weights[i] * values[i];
    }
    out.total_weight = wsum;
    if (!(wsum > 0.0)) return out;
    mean /= wsum;
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        var += weights[i] * (values[i] - mean) * (values[i] - mean);
    var /= wsum;
    auto quantile = [&](double q) {
        double acc = 0.0;
        for (std::size_t k : idx) {
            acc += weights[k] / wsum;
            if (acc >= q) return values[k];
        }
        return values[idx.back()];
    };
    out.summary.mean = mean;
    out.summary.sd = std::sqrt(var);
    out.summary.q025 = quantile(0.025);
    out.summary.median = quantile(0.5);
    out.summary.q975 = quantile(0.975);
    return out;
}

json frechet_calibration_to_json(const FrechetCalibration& c) {
    return json{{"m", c.hyper.m},
                {"x_e1", c.hyper.x_e1},
                {"x_e2", c.hyper.x_e2},
                {"mu_inf", c.hyper.mu_inf},
                {"achieved_orders", c.achieved_orders},
                {"loss", c.loss},
                {"ess", c.ess}};
}

FrechetCalibration frechet_calibration_from_json(const json& j) {
    FrechetCalibration c;
    c.hyper = FrechetHyper{j.at("m"), j.at("x_e1"), j.at("x_e2"), j.at("mu_inf")};
    c.achieved_orders = j.at("achieved_orders").get<std::vector<double>>();
    c.loss = j.at("loss");
    c.ess = j.at("ess");
    return c;
}

json weibull_calibration_to_json(const WeibullCalibration& c) {
    return json{{"m", c.hyper.m},
                {"x_e3", c.hyper.x_e3},
                {"x_e4", c.hyper.x_e4},
                {"rho", c.hyper.rho},
                {"achieved_orders", c.achieved_orders},
                {"loss", c.loss}};
}

WeibullCalibration weibull_calibration_from_json(const json& j) {
    WeibullCalibration c;
    c.hyper = WeibullHyper{j.at("m"), j.at("x_e3"), j.at("x_e4"), j.at("rho")};
    c.achieved_orders = j.at("achieved_orders").get<std::vector<double>>();
    c.loss = j.at("loss");
    return c;
}

json compatibility_to_json(const CompatibilityResult& r) {
    json kl = json::array();
    for (const auto& [m, v] : r.kl_by_m) kl.push_back(json{{"m", m}, {"kl", v}});
    return json{{"m_star", r.m_star}, {"kl_by_m", kl}};
}

CompatibilityResult compatibility_from_json(const json& j) {
    CompatibilityResult r;
    r.m_star = j.at("m_star");
    for (const auto& e : j.at("kl_by_m")) r.kl_by_m.emplace_back(e.at("m"), e.at("kl"));
    return r;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<double> Dataset::values() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.value);
    return out;
}

void Dataset::validate() const {
    if (records.empty()) throw DataError("dataset: no records");
}

Dataset ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);
    Dataset data;
    std::string line;
    std::vector<std::string> bad_lines;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string::npos) {
            bad_lines.push_back("line " + std::to_string(line_no) + ": missing value column");
            continue;
        }
        const std::string label = trim(row.substr(0, comma));
        const std::string value_text = trim(row.substr(comma + 1));
        double value = 0.0;
        if (!parse_double(value_text, value)) {
            if (line_no == 1) continue;  // header row
            bad_lines.push_back("line " + std::to_string(line_no) + ": bad value '" + value_text +
                                "'");
            continue;
        }
        data.records.push_back({label, value});
    }
    if (!bad_lines.empty()) {
        std::string message = "malformed rows in " + path + ":";
        for (const auto& b : bad_lines) message += "\n  " + b;
        throw DataError(message);
    }
    if (data.records.empty()) throw DataError("empty data file: " + path);
    return data;
}

void RunConfig::validate() const {
    if (schema_version != 1) throw ConfigError("config: unsupported schema_version");
    try {
        expert.validate();
        importance.validate();
        MixtureConfig{prior_model_weights}.validate(3);
        mcmc.validate();
        rho_grid.values();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (candidate_ms.empty()) throw ConfigError("config: candidate_ms must be nonempty");
    for (double m : candidate_ms)
        if (!(m > 0.0)) throw ConfigError("config: candidate_ms must be positive");
    if (!(sir_alpha > 0.0)) throw ConfigError("config: sir_alpha must be positive");
    for (double t : return_periods)
        if (!(t > 1.0)) throw ConfigError("config: return periods must exceed 1");
}

AnchorGrid RunConfig::effective_anchor_grid() const {
    return anchor_grid_set ? anchor_grid : AnchorGrid::spanning(expert);
}

TripleGrid RunConfig::effective_triple_grid() const {
    return triple_grid_set ? triple_grid : TripleGrid::spanning(expert);
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    require_keys(j, {"schema_version", "seed", "expert_quantiles", "mu_inf", "candidate_ms",
                     "prior_model_weights", "importance_sampling", "anchor_grid", "rho_grid",
                     "gumbel_triple", "gumbel_quadrature", "compatibility", "sir_alpha", "mcmc",
                     "return_periods"},
                 "top level");
    try {
        if (j.contains("schema_version")) cfg.schema_version = j.at("schema_version");
        if (j.contains("seed")) cfg.seed = j.at("seed");
        if (j.contains("expert_quantiles")) {
            cfg.expert.entries.clear();
            for (const auto& e : j.at("expert_quantiles")) {
                require_keys(e, {"order", "value"}, "expert_quantiles");
                cfg.expert.entries.push_back({e.at("order"), e.at("value")});
            }
        }
        if (j.contains("mu_inf")) cfg.mu_inf = j.at("mu_inf");
        if (j.contains("candidate_ms"))
            cfg.candidate_ms = j.at("candidate_ms").get<std::vector<double>>();
        if (j.contains("prior_model_weights"))
            cfg.prior_model_weights = j.at("prior_model_weights").get<std::vector<double>>();
        if (j.contains("importance_sampling")) {
            const auto& is = j.at("importance_sampling");
            require_keys(is, {"kappa_mu", "sigma_mu", "rho_xi", "n_draws"}, "importance_sampling");
            if (is.contains("kappa_mu")) cfg.importance.kappa_mu = is.at("kappa_mu");
            if (is.contains("sigma_mu")) cfg.importance.sigma_mu = is.at("sigma_mu");
            if (is.contains("rho_xi")) cfg.importance.rho_xi = is.at("rho_xi");
            if (is.contains("n_draws")) cfg.importance.n_draws = is.at("n_draws");
        }
        if (j.contains("anchor_grid")) {
            const auto& g = j.at("anchor_grid");
            require_keys(g, {"lo", "hi", "steps"}, "anchor_grid");
            cfg.anchor_grid_set = true;
            cfg.anchor_grid.lo = g.at("lo");
            cfg.anchor_grid.hi = g.at("hi");
            if (g.contains("steps")) cfg.anchor_grid.steps = g.at("steps").get<std::vector<double>>();
        }
        if (j.contains("rho_grid")) {
            const auto& g = j.at("rho_grid");
            require_keys(g, {"lo", "hi", "per_decade"}, "rho_grid");
            if (g.contains("lo")) cfg.rho_grid.lo = g.at("lo");
            if (g.contains("hi")) cfg.rho_grid.hi = g.at("hi");
            if (g.contains("per_decade")) cfg.rho_grid.per_decade = g.at("per_decade");
        }
        if (j.contains("gumbel_triple")) {
            const auto& g = j.at("gumbel_triple");
            require_keys(g, {"lo", "hi", "coarse_step", "fine_step"}, "gumbel_triple");
            cfg.triple_grid_set = true;
            cfg.triple_grid.lo = g.at("lo");
            cfg.triple_grid.hi = g.at("hi");
            if (g.contains("coarse_step")) cfg.triple_grid.coarse_step = g.at("coarse_step");
            if (g.contains("fine_step")) cfg.triple_grid.fine_step = g.at("fine_step");
        }
        if (j.contains("gumbel_quadrature")) {
            const auto& g = j.at("gumbel_quadrature");
            require_keys(g, {"mu_lo", "mu_hi", "n_mu", "sigma_lo", "sigma_hi", "n_sigma"},
                         "gumbel_quadrature");
            if (g.contains("mu_lo")) cfg.gumbel_quad.mu_lo = g.at("mu_lo");
            if (g.contains("mu_hi")) cfg.gumbel_quad.mu_hi = g.at("mu_hi");
            if (g.contains("n_mu")) cfg.gumbel_quad.n_mu = g.at("n_mu");
            if (g.contains("sigma_lo")) cfg.gumbel_quad.sigma_lo = g.at("sigma_lo");
            if (g.contains("sigma_hi")) cfg.gumbel_quad.sigma_hi = g.at("sigma_hi");
            if (g.contains("n_sigma")) cfg.gumbel_quad.n_sigma = g.at("n_sigma");
        }
        if (j.contains("compatibility")) {
            const auto& g = j.at("compatibility");
            require_keys(g, {"n_predictive", "kl_bins"}, "compatibility");
            if (g.contains("n_predictive")) cfg.compatibility.n_predictive = g.at("n_predictive");
            if (g.contains("kl_bins")) cfg.compatibility.kl.bins = g.at("kl_bins");
        }
        if (j.contains("sir_alpha")) cfg.sir_alpha = j.at("sir_alpha");
        if (j.contains("mcmc")) {
            const auto& g = j.at("mcmc");
            require_keys(g, {"chains", "iterations", "burn_in", "thin", "threads"}, "mcmc");
            if (g.contains("chains")) cfg.mcmc.chains = g.at("chains");
            if (g.contains("iterations")) cfg.mcmc.iterations = g.at("iterations");
            if (g.contains("burn_in")) cfg.mcmc.burn_in = g.at("burn_in");
            if (g.contains("thin")) cfg.mcmc.thin = g.at("thin");
            if (g.contains("threads")) cfg.mcmc.threads = g.at("threads");
        }
        if (j.contains("return_periods"))
            cfg.return_periods = j.at("return_periods").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.compatibility.sir_alpha = cfg.sir_alpha;
    cfg.validate();
    return cfg;
}

json RunConfig::to_json() const {
    json expert = json::array();
    for (const auto& e : this->expert.entries)
        expert.push_back(json{{"order", e.order}, {"value", e.value}});
    json out{
        {"schema_version", schema_version},
        {"seed", seed},
        {"expert_quantiles", expert},
        {"mu_inf", mu_inf},
        {"candidate_ms", candidate_ms},
        {"prior_model_weights", prior_model_weights},
        {"importance_sampling",
         {{"kappa_mu", importance.kappa_mu},
          {"sigma_mu", importance.sigma_mu},
          {"rho_xi", importance.rho_xi},
          {"n_draws", importance.n_draws}}},
        {"rho_grid",
         {{"lo", rho_grid.lo}, {"hi", rho_grid.hi}, {"per_decade", rho_grid.per_decade}}},
        {"gumbel_quadrature",
         {{"mu_lo", gumbel_quad.mu_lo},
          {"mu_hi", gumbel_quad.mu_hi},
          {"n_mu", gumbel_quad.n_mu},
          {"sigma_lo", gumbel_quad.sigma_lo},
          {"sigma_hi", gumbel_quad.sigma_hi},
          {"n_sigma", gumbel_quad.n_sigma}}},
        {"compatibility",
         {{"n_predictive", compatibility.n_predictive}, {"kl_bins", compatibility.kl.bins}}},
        {"sir_alpha", sir_alpha},
        {"mcmc",
         {{"chains", mcmc.chains},
          {"iterations", mcmc.iterations},
          {"burn_in", mcmc.burn_in},
          {"thin", mcmc.thin},
          {"threads", mcmc.threads}}},
        {"return_periods", return_periods},
    };
    const AnchorGrid ag = effective_anchor_grid();
    out["anchor_grid"] = json{{"lo", ag.lo}, {"hi", ag.hi}, {"steps", ag.steps}};
    const TripleGrid tg = effective_triple_grid();
    out["gumbel_triple"] = json{{"lo", tg.lo},
                                {"hi", tg.hi},
                                {"coarse_step", tg.coarse_step},
                                {"fine_step", tg.fine_step}};
    return out;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return from_json(j);
}

std::string RunConfig::digest() const {
    const std::uint64_t h = fnv1a64(to_json().dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json CalibrationBundle::to_json() const {
    json f = json::array(), w = json::array();
    for (const auto& c : frechet) f.push_back(frechet_calibration_to_json(c));
    for (const auto& c : weibull) w.push_back(weibull_calibration_to_json(c));
    return json{{"gumbel",
                 {{"virtual_data", gumbel.hyper.virtual_data},
                  {"achieved_orders", gumbel.achieved_orders},
                  {"loss", gumbel.loss}}},
                {"frechet", f},
                {"weibull", w}};
}

CalibrationBundle CalibrationBundle::from_json(const json& j) {
    CalibrationBundle b;
    b.gumbel.hyper.virtual_data = j.at("gumbel").at("virtual_data").get<std::vector<double>>();
    b.gumbel.achieved_orders = j.at("gumbel").at("achieved_orders").get<std::vector<double>>();
    b.gumbel.loss = j.at("gumbel").at("loss");
    for (const auto& e : j.at("frechet")) b.frechet.push_back(frechet_calibration_from_json(e));
    for (const auto& e : j.at("weibull")) b.weibull.push_back(weibull_calibration_from_json(e));
    return b;
}

json SelectionResult::to_json() const {
    return json{{"frechet", compatibility_to_json(frechet)},
                {"weibull", compatibility_to_json(weibull)}};
}

SelectionResult SelectionResult::from_json(const json& j) {
    SelectionResult s;
    s.frechet = compatibility_from_json(j.at("frechet"));
    s.weibull = compatibility_from_json(j.at("weibull"));
    return s;
}

CalibrationBundle run_calibration_stage(const RunConfig& cfg) {
    cfg.validate();
    CalibrationBundle bundle;
    bundle.gumbel = calibrate_gumbel_virtual(cfg.expert, cfg.effective_triple_grid(),
                                             cfg.gumbel_quad);
    const AnchorGrid grid = cfg.effective_anchor_grid();
    for (std::size_t i = 0; i < cfg.candidate_ms.size(); ++i) {
        const double m = cfg.candidate_ms[i];
        Rng rng_f = Rng::stream(cfg.seed, "stage2_frechet", i);
        bundle.frechet.push_back(calibrate_frechet(m, cfg.expert, grid, cfg.importance, cfg.mu_inf,
                                                   rng_f));
        Rng rng_w = Rng::stream(cfg.seed, "stage2_weibull", i);
        bundle.weibull.push_back(
            calibrate_weibull(m, cfg.expert, grid, cfg.rho_grid, cfg.importance, rng_w));
    }
    return bundle;
}

SelectionResult run_selection_stage(const RunConfig& cfg, const CalibrationBundle& calibration) {
    SelectionResult sel;
    CompatibilityConfig compat = cfg.compatibility;
    compat.sir_alpha = cfg.sir_alpha;
    Rng rng_f = Rng::stream(cfg.seed, "stage3_frechet");
    sel.frechet = calibrate_virtual_size(calibration.frechet, calibration.gumbel.hyper, compat,
                                         rng_f);
    Rng rng_w = Rng::stream(cfg.seed, "stage3_weibull");
    sel.weibull = calibrate_virtual_size(calibration.weibull, calibration.gumbel.hyper, compat,
                                         rng_w);
    return sel;
}

namespace {

SelectionReport build_report(const RunConfig& cfg, const PipelineResult& partial,
                             const Dataset& data) {
    const auto& draws = partial.draws;
    SelectionReport rep;
    rep.model_names = draws.component_names;
    rep.model_probs = model_posterior_probs(draws);
    rep.model_prob_se = model_posterior_prob_se(draws);
    for (int c = 0; c < draws.n_components; ++c) {
        const auto block = per_model_posterior(draws, c);
        std::map<std::string, ParamSummary> block_summary;
        for (std::size_t p = 0; p < block.param_names.size(); ++p) {
            std::vector<double> vals(block.params.size());
            for (std::size_t i = 0; i < block.params.size(); ++i) vals[i] = block.params[i][p];
            const auto name = block.param_names[p].substr(block.param_names[p].find('.') + 1);
            block_summary[name] = weighted_stats(vals, block.weights).summary;
        }
        rep.summaries[draws.component_names[c]] = std::move(block_summary);
    }
    const int best = static_cast<int>(std::max_element(rep.model_probs.begin(),
                                                       rep.model_probs.end()) -
                                      rep.model_probs.begin());
    rep.shape_verdict = rep.model_names[best];
    for (int c = 0; c < draws.n_components; ++c) {
        const auto& name = rep.model_names[c];
        if (name == "frechet")
            rep.shape_by_model[name] = rep.summaries[name]["xi"].mean;
        else if (name == "weibull")
            rep.shape_by_model[name] = -rep.summaries[name]["xi"].mean;
        else
            rep.shape_by_model[name] = 0.0;
    }
    rep.shape_sign = rep.shape_verdict == "frechet" ? 1 : rep.shape_verdict == "weibull" ? -1 : 0;
    for (double t : cfg.return_periods)
        rep.return_levels[static_cast<int>(t)] = return_level(draws, partial.components, t);
    for (std::size_t j = 0; j < draws.u_names.size(); ++j) rep.rhat[draws.u_names[j]] = draws.rhat[j];
    rep.accept_rate = draws.accept_rate;
    rep.converged = draws.converged;
    const auto values = data.values();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    rep.flagged_degenerate_scale = var <= 1e-24 * mean * mean * values.size();
    rep.m_star_frechet = partial.selection.frechet.m_star;
    rep.m_star_weibull = partial.selection.weibull.m_star;
    rep.seed = cfg.seed;
    rep.config_digest = cfg.digest();
    rep.n_data = values.size();
    return rep;
}

}  // namespace

json SelectionReport::to_json() const {
    json summaries_json;
    for (const auto& [model, params] : summaries) {
        json block;
        for (const auto& [param, s] : params)
            block[param] = json{{"mean", s.mean},
                                {"sd", s.sd},
                                {"q025", s.q025},
                                {"median", s.median},
                                {"q975", s.q975}};
        summaries_json[model] = std::move(block);
    }
    json levels;
    for (const auto& [t, v] : return_levels) levels[std::to_string(t)] = v;
    return json{
        {"model_posterior",
         {{"names", model_names}, {"probs", model_probs}, {"mc_se", model_prob_se}}},
        {"summaries", summaries_json},
        {"gev_shape",
         {{"verdict", shape_verdict}, {"sign", shape_sign}, {"by_model", shape_by_model}}},
        {"return_levels", levels},
        {"diagnostics",
         {{"rhat", rhat},
          {"accept_rate", accept_rate},
          {"converged", converged},
          {"degenerate_scale_flag", flagged_degenerate_scale}}},
        {"selection", {{"m_star_frechet", m_star_frechet}, {"m_star_weibull", m_star_weibull}}},
        {"provenance",
         {{"seed", seed}, {"config_digest", config_digest}, {"n_data", n_data}}}};
}

PipelineResult run_pipeline(const RunConfig& cfg, const Dataset& data,
                            const CalibrationBundle* calibration, const SelectionResult* selection) {
    cfg.validate();
    data.validate();
    PipelineResult result;
    result.config = cfg;

    result.calibration = calibration ? *calibration : run_calibration_stage(cfg);
    result.selection = selection ? *selection
                                 : run_selection_stage(cfg, result.calibration);

    auto find_frechet = [&](double m) -> const FrechetCalibration& {
        for (const auto& c : result.calibration.frechet)
            if (c.hyper.m == m) return c;
        throw ConfigError("pipeline: selected Frechet m has no calibration");
    };
    auto find_weibull = [&](double m) -> const WeibullCalibration& {
        for (const auto& c : result.calibration.weibull)
            if (c.hyper.m == m) return c;
        throw ConfigError("pipeline: selected Weibull m has no calibration");
    };
    result.frechet_star = find_frechet(result.selection.frechet.m_star);
    result.weibull_star = find_weibull(result.selection.weibull.m_star);

    const auto values = data.values();
    result.components = {make_frechet_component(result.frechet_star.hyper, values),
                         make_weibull_component(result.weibull_star.hyper, values),
                         make_gumbel_component(result.calibration.gumbel.hyper)};
    result.draws = mixture_posterior_mcmc(values, result.components,
                                          MixtureConfig{cfg.prior_model_weights}, cfg.mcmc,
                                          Rng::derive_seed(cfg.seed, "stage4_mcmc"));
    result.report = build_report(cfg, result, data);
    return result;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit_report(const PipelineResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    json report = result.report.to_json();
    report["config"] = result.config.to_json();
    report["calibration"] = result.calibration.to_json();
    write_text_file(path("report.json"), report.dump(2) + "\n");
    write_text_file(path("calibration.json"), result.calibration.to_json().dump(2) + "\n");
    write_text_file(path("selection.json"), result.selection.to_json().dump(2) + "\n");

    const auto& draws = result.draws;
    {
        std::ostringstream csv;
        csv << "chain";
        for (const auto& n : draws.param_names) csv << ',' << n;
        for (const auto& n : draws.u_names) csv << ',' << n << "_u";
        for (const auto& n : draws.component_names) csv << ",W_" << n;
        csv << ",log_mix_lik\n";
        for (std::size_t i = 0; i < draws.size(); ++i) {
            csv << draws.chain[i];
            for (double v : draws.params[i]) csv << ',' << format_double(v);
            for (double v : draws.u[i]) csv << ',' << format_double(v);
            for (double v : draws.weights[i]) csv << ',' << format_double(v);
            csv << ',' << format_double(draws.log_mix_lik[i]) << '\n';
        }
        write_text_file(path("draws.csv"), csv.str());
    }
    {
        std::ostringstream csv;
        csv << "sweep";
        for (const auto& n : draws.component_names) csv << ",W_" << n;
        csv << ",chain\n";
        for (std::size_t i = 0; i < draws.size(); ++i) {
            csv << i;
            for (double v : draws.weights[i]) csv << ',' << format_double(v);
            csv << ',' << draws.chain[i] << '\n';
        }
        write_text_file(path("weight_trace.csv"), csv.str());
    }
    {
        const double lo = predictive_quantile(draws, result.components, 0.001);
        const double hi = predictive_quantile(draws, result.components, 0.999);
        std::ostringstream csv;
        csv << "x,predictive_cdf\n";
        const int points = 201;
        for (int i = 0; i < points; ++i) {
            const double x = lo + (hi - lo) * i / (points - 1);
            csv << format_double(x) << ',' << format_double(predictive_cdf(draws, result.components, x))
                << '\n';
        }
        write_text_file(path("predictive_curve.csv"), csv.str());
    }
}

}  // namespace evd
