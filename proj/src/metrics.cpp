#include "nrad/metrics.hpp"

#include <cmath>
#include <string>

#include "nrad/errors.hpp"

namespace nrad {

namespace {

void check_lengths(const std::vector<int>& a, const std::vector<int>& b,
                   const char* where) {
    if (a.size() != b.size()) {
        throw LengthMismatch(std::string(where) + ": prediction length " +
                             std::to_string(a.size()) + " vs truth length " +
                             std::to_string(b.size()));
    }
}

}  // namespace

PrfResult prf(const std::vector<int>& predictions, const std::vector<int>& truth) {
    check_lengths(predictions, truth, "prf");
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool p = predictions[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) ++tp;
        else if (p && !t) ++fp;
        else if (!p && t) ++fn;
    }
    PrfResult r;
    if (tp + fp == 0) {
        r.precision = 0.0;
        r.zero_division = true;
    } else {
        r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
        r.recall = 0.0;
        r.zero_division = true;
    } else {
        r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    if (r.precision + r.recall == 0.0) {
        r.f1 = 0.0;
        r.zero_division = true;
    } else {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    }
    return r;
}

std::vector<int> point_adjust(const std::vector<int>& predictions,
                              const std::vector<int>& truth) {
    return pa_percent_k(predictions, truth, 0.0);
}

std::vector<int> pa_percent_k(const std::vector<int>& predictions,
                              const std::vector<int>& truth, double k_percent) {
    check_lengths(predictions, truth, "pa_percent_k");
    if (k_percent < 0.0 || k_percent > 100.0) {
        throw Error("pa_percent_k: K must be in [0,100]");
    }
    std::vector<int> adjusted = predictions;
    const std::size_t n = truth.size();
    std::size_t i = 0;
    while (i < n) {
        if (truth[i] != 1) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && truth[j] == 1) ++j;  // maximal run [i, j)
        long long hits = 0;
        for (std::size_t t = i; t < j; ++t) {
            if (predictions[t] != 0) ++hits;
        }
        const double ratio =
            100.0 * static_cast<double>(hits) / static_cast<double>(j - i);
        if (ratio > k_percent) {
            for (std::size_t t = i; t < j; ++t) adjusted[t] = 1;
        }
        i = j;
    }
    return adjusted;
}

double f1_pa_k_auc(const std::vector<int>& predictions, const std::vector<int>& truth) {
    check_lengths(predictions, truth, "f1_pa_k_auc");
    double sum = 0.0;
    for (int k = 0; k <= 100; ++k) {
        sum += prf(pa_percent_k(predictions, truth, static_cast<double>(k)), truth).f1;
    }
    return sum / 101.0;
}

PrfResult segment_f1(const std::vector<int>& segment_predictions,
                     const std::vector<int>& segment_truth) {
    check_lengths(segment_predictions, segment_truth, "segment_f1");
    return prf(segment_predictions, segment_truth);
}

double generalization_bound(const BoundInputs& inputs) {
    if (inputs.delta <= 0.0 || inputs.delta >= 1.0) {
        throw InvalidDelta("generalization_bound: delta must be in (0,1)");
    }
    if (inputs.n < 1) {
        throw Error("generalization_bound: N must be >= 1");
    }
    return inputs.e1 +
           std::sqrt(2.0 * std::log(4.0 / inputs.delta) / static_cast<double>(inputs.n)) +
           inputs.bayes_mismatch;
}

}  // namespace nrad
