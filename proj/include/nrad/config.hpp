#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nrad/criterion.hpp"
#include "nrad/dataset.hpp"
#include "nrad/encoder.hpp"
#include "nrad/pointdet.hpp"

namespace nrad {

enum class DataSource { Synth, Csv };
enum class EncoderMode { Dicnn, DicnnRandom, Stats };

struct PipelineConfig {
    std::uint64_t seed = 7;
    std::string profile;  // empty = no profile applied

    DataSource source = DataSource::Synth;
    std::string csv_path;
    bool has_labels = true;
    NormScope norm_scope = NormScope::Full;
    std::size_t window = 100;
    double train_fraction = 0.7;
    double e1 = 0.6;

    SynthConfig synth;

    EncoderMode encoder_mode = EncoderMode::Dicnn;
    EncoderConfig encoder;

    bool selector_extraction = true;
    bool selector_propagation = true;
    std::size_t knn_k = 5;
    double katz_beta = 0.05;
    std::size_t katz_l_max = 4;
    bool katz_closed_form = false;
    std::size_t selector_m = 4;
    double selector_lambda0 = 0.32;
    double selector_margin = 0.0;
    bool selector_clamp_rn = false;
    std::size_t prop_max_iter = 100;
    double prop_tol = 1e-6;

    CriterionConfig criterion;

    double train_lr = 1e-4;
    std::size_t train_batch_size = 32;
    std::size_t train_epochs = 100;
    double tau = 0.5;
    std::vector<std::size_t> hidden_widths = {256, 256, 128, 128};

    double pointdet_k = 0.5;
    ScoreSource score_source = ScoreSource::Classifier;
    bool rate_estimator = true;

    double eval_delta = 0.05;
    double eval_bayes_mismatch = 0.0;
};

PipelineConfig default_config();

// Named hyperparameter profiles (emg, smd, psm, msl, smap, synth).
void apply_profile(PipelineConfig& cfg, const std::string& name);

// Applies one key=value pair; unknown keys are hard errors.
void apply_kv(PipelineConfig& cfg, const std::string& key, const std::string& value);

// Parses the flat key=value file ('#' comments). A profile key inside the
// file is applied before any other keys; explicit keys then override it.
PipelineConfig load_config(const std::string& path, const std::string& profile_flag,
                           const std::vector<std::pair<std::string, std::string>>& overrides);

PipelineConfig make_config(const std::string& profile_flag,
                           const std::vector<std::pair<std::string, std::string>>& overrides);

// Deterministic full dump, one key = value per line, fixed key order; also
// the input of the artifact fingerprint.
std::string canonical_config(const PipelineConfig& cfg);

std::uint64_t config_fingerprint(const PipelineConfig& cfg);

}  // namespace nrad
