#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nrad/dataset.hpp"
#include "nrad/matrix.hpp"

namespace nrad {

// One dilated causal convolution layer; tap k = kernel-1 reads the current
// time step, earlier taps look back by multiples of the dilation.
struct ConvLayer {
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel = 2;
    std::size_t dilation = 1;
    Matrix weights;             // out_channels x (in_channels * kernel)
    std::vector<double> bias;   // out_channels
};

struct EncoderParams {
    std::vector<ConvLayer> layers;       // dilations 1,2,4,... (powers of two)
    std::vector<double> anomaly_weight;  // w, length d
    std::size_t d = 64;                  // embedding width
};

struct EncoderConfig {
    std::size_t n_layers = 7;
    std::size_t kernel = 2;
    std::size_t hidden_channels = 64;
    std::size_t d = 64;
    std::size_t epochs = 5;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
};

EncoderParams init_encoder(const EncoderConfig& cfg, std::size_t input_dims,
                           std::uint64_t seed);

// Per-point temporal representations; returns d x L, column t = h_t. The
// receptive field is causal: h_t depends only on inputs at times <= t.
Matrix encode(const EncoderParams& params, const Matrix& segment_values);

// Global average pooling over the time axis.
std::vector<double> gap(const Matrix& h);

// S_t = sigmoid(w . h_t) for every time step.
std::vector<double> point_scores(const EncoderParams& params, const Matrix& h);

// Segment-level score sigmoid(w . GAP(h)).
double segment_score(const EncoderParams& params, const Matrix& h);

// Loss and exact parameter gradients of the pretraining objective
// (segment-level BCE of sigmoid(w . GAP(h))) on one batch. Gradients come
// back flattened in the same order as flatten_encoder.
double pretrain_batch_loss(const EncoderParams& params,
                           const std::vector<const Matrix*>& segment_values,
                           const std::vector<int>& targets);
double pretrain_batch_grads(const EncoderParams& params,
                            const std::vector<const Matrix*>& segment_values,
                            const std::vector<int>& targets,
                            std::vector<double>& grads_out);

std::vector<double> flatten_encoder(const EncoderParams& params);
void unflatten_encoder(const std::vector<double>& flat, EncoderParams& params);

struct PretrainResult {
    EncoderParams params;
    std::vector<double> loss_history;  // per-epoch mean BCE
};

// Noisy-label pretraining: labeled positives as 1, unlabeled as 0.
PretrainResult pretrain_encoder(const SegmentCollection& collection,
                                const EncoderConfig& cfg, std::uint64_t seed);

// Statistical featurizer (pluggable alternative for tests and fast runs):
// five summary features per input dimension.
std::vector<double> stats_embedding(const Matrix& segment_values);
// Point features for the statistical featurizer are the raw input columns.
std::vector<double> stats_point_scores(const Matrix& segment_values);

void save_encoder(const std::string& path, const EncoderParams& params,
                  std::uint64_t fingerprint);
bool load_encoder(const std::string& path, std::uint64_t expected_fingerprint,
                  EncoderParams& out);

}  // namespace nrad
