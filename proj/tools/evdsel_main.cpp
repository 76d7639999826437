// evdsel: Bayesian selection of the extreme-value domain of attraction for
// block-maxima data (Frechet / Gumbel / Weibull), with expert-calibrated
// virtual-data priors and encompassing-mixture model probabilities.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "evd/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergenceFlag = 4;

evd::RunConfig load_config(const std::string& path, std::uint64_t seed_override, bool has_seed) {
    evd::RunConfig cfg = path.empty() ? evd::RunConfig{} : evd::RunConfig::load(path);
    if (has_seed) cfg.seed = seed_override;
    cfg.validate();
    return cfg;
}

void print_report_summary(const nlohmann::json& report, std::ostream& os) {
    const auto& posterior = report.at("model_posterior");
    os << "posterior model probabilities\n";
    for (std::size_t i = 0; i < posterior.at("names").size(); ++i) {
        os << "  " << posterior.at("names")[i].get<std::string>() << ": "
           << posterior.at("probs")[i].get<double>() << "  (mc se "
           << posterior.at("mc_se")[i].get<double>() << ")\n";
    }
    const auto& shape = report.at("gev_shape");
    os << "domain of attraction: " << shape.at("verdict").get<std::string>() << " (shape sign "
       << shape.at("sign").get<int>() << ")\n";
    os << "virtual sizes: frechet m*=" << report.at("selection").at("m_star_frechet").get<double>()
       << ", weibull m*=" << report.at("selection").at("m_star_weibull").get<double>() << "\n";
    os << "return levels:\n";
    for (const auto& item : report.at("return_levels").items())
        os << "  T=" << item.key() << ": " << item.value().get<double>() << "\n";
    os << "converged: " << (report.at("diagnostics").at("converged").get<bool>() ? "yes" : "no")
       << "\n";
}

int run_command(const std::string& config_path, const std::string& data_path,
                const std::string& out_dir, std::uint64_t seed, bool has_seed, bool resume,
                bool verbose) {
    const evd::RunConfig cfg = load_config(config_path, seed, has_seed);
    const evd::Dataset data = evd::ingest_csv(data_path);

    namespace fs = std::filesystem;
    evd::CalibrationBundle calibration;
    evd::SelectionResult selection;
    bool have_calibration = false, have_selection = false;
    if (resume) {
        const auto cal_path = fs::path(out_dir) / "calibration.json";
        const auto sel_path = fs::path(out_dir) / "selection.json";
        if (fs::exists(cal_path)) {
            calibration = evd::CalibrationBundle::from_json(
                nlohmann::json::parse(evd::read_text_file(cal_path.string())));
            have_calibration = true;
            if (verbose) std::cerr << "resume: loaded " << cal_path.string() << "\n";
        }
        if (fs::exists(sel_path)) {
            selection = evd::SelectionResult::from_json(
                nlohmann::json::parse(evd::read_text_file(sel_path.string())));
            have_selection = true;
            if (verbose) std::cerr << "resume: loaded " << sel_path.string() << "\n";
        }
    }
    if (!have_calibration) {
        if (verbose) std::cerr << "stage 1-2: calibrating priors\n";
        calibration = evd::run_calibration_stage(cfg);
    }
    if (!have_selection) {
        if (verbose) std::cerr << "stage 3: balancing virtual sizes\n";
        selection = evd::run_selection_stage(cfg, calibration);
    }
    if (verbose) std::cerr << "stage 4: mixture MCMC\n";
    const evd::PipelineResult result = evd::run_pipeline(cfg, data, &calibration, &selection);
    if (verbose) std::cerr << "stage 5: writing report to " << out_dir << "\n";
    evd::emit_report(result, out_dir);
    print_report_summary(result.report.to_json(), std::cout);
    return result.report.converged ? kExitOk : kExitConvergenceFlag;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian domain-of-attraction selection for block maxima"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_dir = "out";
    std::uint64_t seed = 0;
    bool verbose = false;
    bool resume = false;

    auto add_common = [&](CLI::App* cmd, bool needs_data) {
        cmd->add_option("--config", config_path, "JSON config file (defaults when omitted)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_flag("-v,--verbose", verbose, "progress to stderr");
        if (needs_data)
            cmd->add_option("--data", data_path, "CSV of label,value block maxima")->required();
    };

    auto* calibrate = app.add_subcommand("calibrate", "run prior calibration (stages 1-2)");
    add_common(calibrate, false);
    auto* select = app.add_subcommand("select", "virtual-size compatibility from a calibration");
    add_common(select, false);
    auto* run = app.add_subcommand("run", "full pipeline: calibrate, select, sample, report");
    add_common(run, true);
    run->add_flag("--resume", resume, "reuse calibration.json / selection.json from --out");
    auto* report = app.add_subcommand("report", "print the summary of an emitted report");
    add_common(report, false);

    CLI11_PARSE(app, argc, argv);
    const bool has_seed = app.get_subcommands().front()->count("--seed") > 0;

    try {
        namespace fs = std::filesystem;
        if (calibrate->parsed()) {
            const evd::RunConfig cfg = load_config(config_path, seed, has_seed);
            if (verbose) std::cerr << "calibrating priors\n";
            const auto bundle = evd::run_calibration_stage(cfg);
            fs::create_directories(out_dir);
            evd::write_text_file((fs::path(out_dir) / "calibration.json").string(),
                                 bundle.to_json().dump(2) + "\n");
            std::cout << "wrote " << (fs::path(out_dir) / "calibration.json").string() << "\n";
        } else if (select->parsed()) {
            const evd::RunConfig cfg = load_config(config_path, seed, has_seed);
            const auto cal_path = fs::path(out_dir) / "calibration.json";
            if (!fs::exists(cal_path))
                throw evd::ConfigError("select: missing " + cal_path.string() +
                                       " (run `calibrate` first)");
            const auto bundle = evd::CalibrationBundle::from_json(
                nlohmann::json::parse(evd::read_text_file(cal_path.string())));
            const auto sel = evd::run_selection_stage(cfg, bundle);
            fs::create_directories(out_dir);
            evd::write_text_file((fs::path(out_dir) / "selection.json").string(),
                                 sel.to_json().dump(2) + "\n");
            std::cout << "frechet m* = " << sel.frechet.m_star
                      << ", weibull m* = " << sel.weibull.m_star << "\n";
        } else if (run->parsed()) {
            return run_command(config_path, data_path, out_dir, seed, has_seed, resume, verbose);
        } else if (report->parsed()) {
            const auto path = fs::path(out_dir) / "report.json";
            if (!fs::exists(path)) throw evd::ConfigError("report: missing " + path.string());
            print_report_summary(nlohmann::json::parse(evd::read_text_file(path.string())),
                                 std::cout);
        }
    } catch (const evd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const evd::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
