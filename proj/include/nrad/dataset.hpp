#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nrad/matrix.hpp"

namespace nrad {

// D-dimensional point series; values(d, t) is dimension d at time t.
struct TimeSeriesDataset {
    Matrix values;                             // D x T_total
    std::optional<std::vector<int>> point_labels;  // length T_total, values {0,1}
    std::string name;

    std::size_t dims() const { return values.rows(); }
    std::size_t length() const { return values.cols(); }
};

enum class PuLabel { LabeledPositive, Unlabeled };

enum class SelectorClass { None, ReliableNegative, PropagatedNegative, Excluded };

struct Segment {
    std::size_t index = 0;
    Matrix values;  // D x L
    std::optional<int> true_label;  // evaluation only
    PuLabel pu_label = PuLabel::Unlabeled;
    SelectorClass selector_class = SelectorClass::None;
    std::optional<std::vector<double>> embedding;
};

struct SegmentCollection {
    std::size_t segment_length = 0;  // L, identical across segments
    std::size_t dims = 0;
    std::vector<Segment> segments;
    // Point labels for the covered range, kept for evaluation; segment i
    // covers points [i*L, (i+1)*L) of the source series.
    std::optional<std::vector<int>> point_labels;
    std::string name;

    std::size_t size() const { return segments.size(); }
};

struct NoiseSpec {
    double e1 = 0.6;  // P(label withheld | positive), in [0,1)
    std::uint64_t seed = 0;
};

enum class AnomalyKind { Spike, LevelShift, FrequencyChange };

struct AnomalyInterval {
    std::size_t start = 0;
    std::size_t end = 0;  // exclusive
    AnomalyKind kind = AnomalyKind::Spike;
};

struct SynthConfig {
    std::size_t dims = 8;
    std::size_t t_total = 50000;
    std::vector<AnomalyKind> kinds = {AnomalyKind::Spike, AnomalyKind::LevelShift,
                                      AnomalyKind::FrequencyChange};
    double anomaly_rate = 0.1;  // target point-level rate, [0,1)
    double base_amplitude = 1.0;
    double noise_scale = 0.3;
    double anomaly_magnitude = 2.0;
    std::size_t min_interval = 20;
    std::size_t max_interval = 80;
    std::uint64_t seed = 0;
};

struct SynthResult {
    TimeSeriesDataset dataset;
    std::vector<AnomalyInterval> intervals;
};

enum class NormScope { Full, Train, None };

// Per-dimension z-score in place; statistics from the first
// stats_fraction of points (1.0 = whole series). Constant dimensions map
// to all zeros.
void zscore_normalize(TimeSeriesDataset& ds, double stats_fraction = 1.0);

TimeSeriesDataset load_csv(const std::string& path, bool has_labels,
                           NormScope scope = NormScope::Full,
                           double train_fraction = 0.7);

void write_csv(const TimeSeriesDataset& ds, const std::string& path);

SegmentCollection window(const TimeSeriesDataset& ds, std::size_t segment_length);

// First round(fraction*n) segments in order become the train split.
std::pair<SegmentCollection, SegmentCollection> split_segments(
    const SegmentCollection& all, double train_fraction);

// Keeps exactly round((1-e1)*N_P) positives as LabeledPositive, chosen
// uniformly at random; everything else becomes Unlabeled.
SegmentCollection inject_pu_noise(const SegmentCollection& segments, const NoiseSpec& spec);

SynthResult synth_generate(const SynthConfig& config);

}  // namespace nrad
