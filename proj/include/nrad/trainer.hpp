#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nrad/criterion.hpp"
#include "nrad/matrix.hpp"

namespace nrad {

struct AffineLayer {
    Matrix weights;            // out x in
    std::vector<double> bias;  // out
};

// Six affine layers d -> widths... -> T -> 1 with a rectifier between
// layers; h is the rectified T-wide output of layer 5, f the logistic of
// the final scalar.
struct ClassifierParams {
    std::vector<AffineLayer> layers;
    std::size_t input_dim = 0;
    std::size_t point_dim = 0;  // T
};

struct TrainConfig {
    double learning_rate = 1e-4;
    std::size_t batch_size = 32;
    std::size_t epochs = 100;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    CriterionConfig criterion;
    double segment_threshold = 0.5;  // tau
    std::vector<std::size_t> hidden_widths = {256, 256, 128, 128};
};

struct ClassifierOutput {
    std::vector<double> h;  // T
    double f = 0.0;
};

ClassifierParams init_classifier(std::size_t d, std::size_t t, std::uint64_t seed,
                                 const std::vector<std::size_t>& hidden_widths = {
                                     256, 256, 128, 128});

ClassifierOutput forward(const ClassifierParams& params, const std::vector<double>& x);

// Loss and exact parameter gradients for one stratified batch; the
// criterion gradients are chained through both the f and h heads.
double batch_loss(const ClassifierParams& params,
                  const std::vector<std::vector<double>>& labeled_x,
                  const std::vector<std::vector<double>>& unlabeled_x,
                  const CriterionConfig& cfg);
double batch_grads(const ClassifierParams& params,
                   const std::vector<std::vector<double>>& labeled_x,
                   const std::vector<std::vector<double>>& unlabeled_x,
                   const CriterionConfig& cfg, std::vector<double>& grads_out,
                   LossBreakdown* breakdown = nullptr);

std::vector<double> flatten_classifier(const ClassifierParams& params);
void unflatten_classifier(const std::vector<double>& flat, ClassifierParams& params);

struct EpochStats {
    double total = 0.0;
    double base = 0.0;
    double smooth = 0.0;
    double sep = 0.0;
};

struct TrainResult {
    ClassifierParams params;
    std::vector<EpochStats> history;
};

// Trains on labeled positives plus the refined unlabeled set. Every batch
// mixes both sides (labeled drawn with replacement when scarce).
TrainResult train(const ClassifierParams& initial,
                  const std::vector<std::vector<double>>& labeled_x,
                  const std::vector<std::vector<double>>& unlabeled_x,
                  const TrainConfig& cfg);

struct SegmentPrediction {
    double score = 0.0;
    int label = 0;
};

// label = 1 iff f(X) > tau (strict).
std::vector<SegmentPrediction> predict_segments(
    const ClassifierParams& params, const std::vector<std::vector<double>>& embeddings,
    double tau);

void save_classifier(const std::string& path, const ClassifierParams& params,
                     std::uint64_t fingerprint);
bool load_classifier(const std::string& path, std::uint64_t expected_fingerprint,
                     ClassifierParams& out);

}  // namespace nrad
