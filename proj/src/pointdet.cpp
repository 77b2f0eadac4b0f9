#include "nrad/pointdet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "nrad/common.hpp"
#include "nrad/errors.hpp"
#include "nrad/matrix.hpp"

namespace nrad {

RankedPoints rank_points(const std::vector<std::size_t>& positive_segments,
                         const std::vector<std::vector<double>>& point_scores,
                         ScoreSource source) {
    if (positive_segments.size() != point_scores.size()) {
        throw LengthMismatch("rank_points: segment and score counts differ");
    }
    RankedPoints out;
    out.source = source;
    for (std::size_t s = 0; s < positive_segments.size(); ++s) {
        for (std::size_t t = 0; t < point_scores[s].size(); ++t) {
            out.entries.push_back({positive_segments[s], t, point_scores[s][t]});
        }
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const RankedPoint& a, const RankedPoint& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.segment_index != b.segment_index) {
                      return a.segment_index < b.segment_index;
                  }
                  return a.offset < b.offset;
              });
    return out;
}

std::vector<int> pseudo_labels(const RankedPoints& ranked, double k) {
    if (k <= 0.0 || k >= 1.0) {
        throw InvalidK("pseudo_labels: k must be in (0,1)");
    }
    const std::size_t m = ranked.entries.size();
    const std::size_t n_pos = static_cast<std::size_t>(
        std::max<long long>(0, round_half_up(k * static_cast<double>(m))));
    std::vector<int> labels(m, 0);
    for (std::size_t i = 0; i < std::min(n_pos, m); ++i) labels[i] = 1;
    return labels;
}

namespace {

// 2x2 transition matrix for flip rates (e0, e1): T[y][noisy].
inline std::array<std::array<double, 2>, 2> transition(double e0, double e1) {
    return {{{1.0 - e0, e0}, {e1, 1.0 - e1}}};
}

}  // namespace

RateEstimate estimate_clean_rate(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels) {
    if (features.size() != labels.size()) {
        throw LengthMismatch("estimate_clean_rate: feature and label counts differ");
    }
    const std::size_t n = features.size();
    if (n < 3) {
        throw Error("estimate_clean_rate: need at least 3 points");
    }
    double base_rate = 0.0;
    for (int l : labels) base_rate += l != 0 ? 1.0 : 0.0;
    base_rate /= static_cast<double>(n);

    // degenerate geometry (all features identical) leaves the neighbor
    // structure meaningless; fall back to the empirical pseudo rate
    bool all_same = true;
    for (std::size_t i = 1; i < n && all_same; ++i) {
        for (std::size_t d = 0; d < features[0].size(); ++d) {
            if (features[i][d] != features[0][d]) {
                all_same = false;
                break;
            }
        }
    }
    if (all_same) {
        RateEstimate est;
        est.p_hat = base_rate;
        est.degenerate_fallback = true;
        return est;
    }

    // two nearest neighbors per point by cosine similarity, ties by index
    std::vector<std::size_t> nn1(n), nn2(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best1 = -2.0, best2 = -2.0;
        std::size_t idx1 = n, idx2 = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double c = cosine_similarity(features[i], features[j]);
            if (c > best1) {
                best2 = best1;
                idx2 = idx1;
                best1 = c;
                idx1 = j;
            } else if (c > best2) {
                best2 = c;
                idx2 = j;
            }
        }
        nn1[i] = idx1;
        nn2[i] = idx2;
    }

    // empirical label statistics over (point, NN1, NN2) tuples
    std::array<double, 2> c1{};
    std::array<std::array<double, 2>, 2> c2{};
    std::array<std::array<std::array<double, 2>, 2>, 2> c3{};
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int a = labels[i] != 0 ? 1 : 0;
        const int b = labels[nn1[i]] != 0 ? 1 : 0;
        const int c = labels[nn2[i]] != 0 ? 1 : 0;
        c1[a] += inv_n;
        c2[a][b] += inv_n;
        c3[a][b][c] += inv_n;
    }

    RateEstimate best;
    best.residual = std::numeric_limits<double>::infinity();
    for (int pi = 1; pi <= 99; ++pi) {
        const double p1 = static_cast<double>(pi) * 0.01;
        const double p0 = 1.0 - p1;
        for (int e0i = 0; e0i <= 49; ++e0i) {
            const double e0 = static_cast<double>(e0i) * 0.01;
            for (int e1i = 0; e1i <= 49; ++e1i) {
                const double e1 = static_cast<double>(e1i) * 0.01;
                const auto t = transition(e0, e1);
                double res = 0.0;
                for (int j = 0; j < 2; ++j) {
                    const double m1 = p0 * t[0][j] + p1 * t[1][j];
                    res += (m1 - c1[j]) * (m1 - c1[j]);
                    for (int k = 0; k < 2; ++k) {
                        const double m2 = p0 * t[0][j] * t[0][k] + p1 * t[1][j] * t[1][k];
                        res += (m2 - c2[j][k]) * (m2 - c2[j][k]);
                        for (int l = 0; l < 2; ++l) {
                            const double m3 = p0 * t[0][j] * t[0][k] * t[0][l] +
                                              p1 * t[1][j] * t[1][k] * t[1][l];
                            res += (m3 - c3[j][k][l]) * (m3 - c3[j][k][l]);
                        }
                    }
                }
                if (res < best.residual) {
                    best.residual = res;
                    best.p_hat = p1;
                    best.e0_hat = e0;
                    best.e1_hat = e1;
                }
            }
        }
    }
    return best;
}

std::vector<int> threshold_points(const RankedPoints& ranked, double p_hat) {
    if (p_hat < 0.0 || p_hat > 1.0) {
        throw Error("threshold_points: p_hat must be in [0,1]");
    }
    const std::size_t m = ranked.entries.size();
    const std::size_t n_pos = std::min<std::size_t>(
        m, static_cast<std::size_t>(
               std::max<long long>(0, round_half_up(p_hat * static_cast<double>(m)))));
    std::vector<int> labels(m, 0);
    for (std::size_t i = 0; i < n_pos; ++i) labels[i] = 1;
    return labels;
}

}  // namespace nrad
