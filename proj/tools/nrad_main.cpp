#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "nrad/common.hpp"
#include "nrad/errors.hpp"
#include "nrad/pipeline.hpp"
#include "nrad/rng.hpp"

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("NRAD_OUT_DIR");
    return env != nullptr ? env : "nrad_out";
}

struct CommonOpts {
    std::string config_path;
    std::string profile;
    std::string out_dir = default_out_dir();
    std::string score_source;
    long long seed = -1;
    double e1 = -1.0;
    bool resume = false;
};

nrad::PipelineConfig build_config(const CommonOpts& opts,
                                  std::vector<std::pair<std::string, std::string>> extra = {}) {
    std::vector<std::pair<std::string, std::string>> overrides;
    if (opts.seed >= 0) overrides.emplace_back("seed", std::to_string(opts.seed));
    if (opts.e1 >= 0.0) overrides.emplace_back("data.e1", std::to_string(opts.e1));
    if (!opts.score_source.empty()) {
        overrides.emplace_back("pointdet.score_source", opts.score_source);
    }
    for (auto& kv : extra) overrides.push_back(std::move(kv));
    return nrad::load_config(opts.config_path, opts.profile, overrides);
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "configuration file (key = value)");
    cmd->add_option("--profile", opts.profile,
                    "hyperparameter profile: emg|smd|psm|msl|smap|synth");
    cmd->add_option("--out-dir", opts.out_dir,
                    "output directory (default $NRAD_OUT_DIR or ./nrad_out)");
    cmd->add_option("--seed", opts.seed, "random seed override");
    cmd->add_option("--e1", opts.e1, "segment label noise rate override");
    cmd->add_option("--score-source", opts.score_source,
                    "stage-2 point score source: classifier|encoder");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nrad: point-level anomaly detection from noisy segment labels"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    auto* run_cmd = app.add_subcommand("run", "run the full two-stage pipeline");
    add_common(run_cmd, run_opts);
    run_cmd->add_flag("--resume", run_opts.resume,
                      "reuse matching stage artifacts from the output directory");

    CommonOpts ablate_opts;
    std::vector<std::string> toggles;
    auto* ablate_cmd = app.add_subcommand("ablate", "run toggle combinations on one dataset");
    add_common(ablate_cmd, ablate_opts);
    ablate_cmd->add_option("--toggles", toggles,
                           "comma separated subset of "
                           "extraction,propagation,pu_loss,tc_loss,rate_estimator")
        ->delimiter(',');

    std::string pred_path, truth_path;
    auto* eval_cmd = app.add_subcommand("eval", "score a prediction column against truth");
    eval_cmd->add_option("--pred", pred_path, "0/1 column file of predictions")->required();
    eval_cmd->add_option("--truth", truth_path, "0/1 column file of ground truth")->required();

    CommonOpts synth_opts;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic benchmark csv");
    add_common(synth_cmd, synth_opts);
    synth_cmd->add_option("--out", synth_out, "output csv path")->required();

    CommonOpts select_opts;
    auto* select_cmd = app.add_subcommand("select", "run sample selection only");
    add_common(select_cmd, select_opts);

    CommonOpts rate_opts;
    std::string rate_features;
    auto* rate_cmd = app.add_subcommand(
        "estimate-rate", "consensus rate estimate from a feature csv with a label column");
    add_common(rate_cmd, rate_opts);
    rate_cmd->add_option("--features", rate_features,
                         "csv of feature columns with a trailing 0/1 label column")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto cfg = build_config(run_opts);
            const auto rep = nrad::run_pipeline(cfg, run_opts.out_dir, run_opts.resume);
            std::cout << rep.text;
            return 0;
        }
        if (ablate_cmd->parsed()) {
            const auto cfg = build_config(ablate_opts);
            const std::string text = nrad::run_ablation(cfg, toggles, ablate_opts.out_dir);
            std::cout << text;
            return 0;
        }
        if (eval_cmd->parsed()) {
            const auto rep = nrad::eval_only(pred_path, truth_path);
            std::cout << rep.text;
            return 0;
        }
        if (synth_cmd->parsed()) {
            const auto cfg = build_config(synth_opts);
            nrad::SynthConfig sc = cfg.synth;
            sc.seed = nrad::Rng::derive(cfg.seed, 10);
            const auto result = nrad::synth_generate(sc);
            nrad::write_csv(result.dataset, synth_out);
            double rate = 0.0;
            for (int l : *result.dataset.point_labels) rate += l;
            rate /= static_cast<double>(result.dataset.length());
            std::printf("wrote %s: %zu points, %zu dims, %zu anomaly intervals, rate %.4f\n",
                        synth_out.c_str(), result.dataset.length(), result.dataset.dims(),
                        result.intervals.size(), rate);
            return 0;
        }
        if (select_cmd->parsed()) {
            const auto cfg = build_config(select_opts);
            std::filesystem::create_directories(select_opts.out_dir);
            const auto data = nrad::prepare_data(cfg, select_opts.out_dir, false);
            const auto sel = nrad::run_selection(data, cfg);
            nrad::save_selection(select_opts.out_dir + "/selection.txt", sel,
                                 nrad::config_fingerprint(cfg));
            std::printf("selection: |x_rn| = %zu, |x_lp| = %zu, |x_out| = %zu, refined = %zu\n",
                        sel.reliable_negatives.size(), sel.propagated_negatives.size(),
                        sel.excluded.size(), sel.refined_unlabeled.size());
            std::printf("sidecar written to %s/selection.txt\n", select_opts.out_dir.c_str());
            return 0;
        }
        if (rate_cmd->parsed()) {
            const auto ds = nrad::load_csv(rate_features, /*has_labels=*/true,
                                           nrad::NormScope::None);
            if (!ds.point_labels) {
                throw nrad::Error("estimate-rate: feature csv needs a label column");
            }
            std::vector<std::vector<double>> feats(ds.length());
            for (std::size_t t = 0; t < ds.length(); ++t) {
                feats[t].resize(ds.dims());
                for (std::size_t d = 0; d < ds.dims(); ++d) feats[t][d] = ds.values(d, t);
            }
            const auto est = nrad::estimate_clean_rate(feats, *ds.point_labels);
            std::printf("p_hat = %.4f\ne0_hat = %.4f\ne1_hat = %.4f\nresidual = %.6g\n"
                        "fallback = %d\n",
                        est.p_hat, est.e0_hat, est.e1_hat, est.residual,
                        est.degenerate_fallback ? 1 : 0);
            return 0;
        }
    } catch (const nrad::StageError& e) {
        std::fprintf(stderr, "error %s\n", e.what());
        return 2;
    } catch (const nrad::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
