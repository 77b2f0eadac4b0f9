#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nrad/config.hpp"
#include "nrad/dataset.hpp"
#include "nrad/encoder.hpp"
#include "nrad/metrics.hpp"
#include "nrad/pointdet.hpp"
#include "nrad/selector.hpp"
#include "nrad/trainer.hpp"

namespace nrad {

// Everything the toggle-independent stage prefix produces (ingest, window,
// noise injection, temporal embedding). Ablation rows share one of these.
struct PipelineData {
    std::size_t t_total = 0;
    SegmentCollection train;  // PU labels injected
    SegmentCollection test;
    std::vector<std::vector<double>> emb_train;
    std::vector<std::vector<double>> emb_test;
    std::optional<EncoderParams> encoder;
    std::vector<double> encoder_history;
    std::size_t d_eff = 0;
    bool encoder_resumed = false;
};

struct DetectionReport {
    std::string text;

    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1_pa = 0.0;
    double f1_pa_k_auc = 0.0;
    double f1_segment = 0.0;
    double segment_precision = 0.0;
    double segment_recall = 0.0;
    double f1_no_estimator = 0.0;
    double bound = 0.0;
    bool zero_division = false;

    double p_hat = 0.0;
    double e0_hat = 0.0;
    double e1_hat = 0.0;
    bool estimator_fallback = false;

    SelectionResult selection;
    bool selector_fallback = false;

    std::vector<int> point_predictions;  // aligned to the full input series

    std::size_t n_segments = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t n_labeled = 0;
    std::size_t stages_resumed = 0;
};

PipelineData prepare_data(const PipelineConfig& cfg, const std::string& out_dir,
                          bool resume);

// The selection stage alone (KNN graph, Katz similarity, extraction,
// propagation, refined-set assembly) over the training embeddings.
SelectionResult run_selection(const PipelineData& data, const PipelineConfig& cfg);

DetectionReport run_stages(const PipelineData& data, const PipelineConfig& cfg,
                           const std::string& out_dir, bool resume,
                           bool write_artifacts);

// Full pipeline: ingest -> window -> noise -> embed -> select -> train ->
// point detection -> metrics, with artifacts in out_dir.
DetectionReport run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                             bool resume = false);

// Runs every on/off combination of the requested toggles on identical data
// and seed; rows report segment F1, point F1 without the rate estimator
// and point F1. Valid toggles: extraction, propagation, pu_loss, tc_loss,
// rate_estimator.
std::string run_ablation(const PipelineConfig& cfg, const std::vector<std::string>& toggles,
                         const std::string& out_dir);

struct EvalReport {
    std::string text;
    PrfResult point;
    double f1_pa = 0.0;
    double f1_pa_k_auc = 0.0;
};

// Metrics over two aligned 0/1 column files, no pipeline run.
EvalReport eval_only(const std::string& predictions_path, const std::string& truth_path);

std::vector<int> read_binary_column(const std::string& path);
void write_binary_column(const std::vector<int>& column, const std::string& path);

}  // namespace nrad
