#pragma once

#include <cstddef>
#include <vector>

namespace nrad {

enum class ScoreSource { Classifier, Encoder };

struct RankedPoint {
    std::size_t segment_index = 0;
    std::size_t offset = 0;
    double score = 0.0;
};

struct RankedPoints {
    std::vector<RankedPoint> entries;  // score descending, ties by (segment, offset)
    ScoreSource source = ScoreSource::Classifier;
};

struct RateEstimate {
    double p_hat = 0.0;   // estimated clean positive prior
    double e0_hat = 0.0;  // estimated P(noisy 1 | clean 0)
    double e1_hat = 0.0;  // estimated P(noisy 0 | clean 1)
    double residual = 0.0;
    bool degenerate_fallback = false;
};

// Ranks every point of the predicted-positive segments by its point score.
RankedPoints rank_points(const std::vector<std::size_t>& positive_segments,
                         const std::vector<std::vector<double>>& point_scores,
                         ScoreSource source = ScoreSource::Classifier);

// Top round(k*M) ranked points become pseudo positives, k in (0,1).
std::vector<int> pseudo_labels(const RankedPoints& ranked, double k);

// Consensus fit over nearest-neighbor label tuples: empirical first, second
// and third order label statistics are matched against the counts implied
// by a clean prior p and a 2x2 flip model, by grid search over
// p in [0.01,0.99] and flip rates in [0,0.49], step 0.01.
RateEstimate estimate_clean_rate(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels);

// Final labels per ranked point: top round(p_hat*M) are positive.
std::vector<int> threshold_points(const RankedPoints& ranked, double p_hat);

}  // namespace nrad
