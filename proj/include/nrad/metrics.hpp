#pragma once

#include <vector>

namespace nrad {

struct PrfResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool zero_division = false;  // some denominator was zero and mapped to 0
};

struct BoundInputs {
    double e1 = 0.0;          // label noise rate
    long long n = 1;          // sample count
    double delta = 0.05;      // confidence parameter in (0,1)
    double bayes_mismatch = 0.0;
};

PrfResult prf(const std::vector<int>& predictions, const std::vector<int>& truth);

// Marks a whole true anomalous run detected when any prediction inside it
// fires; predictions outside runs are unchanged.
std::vector<int> point_adjust(const std::vector<int>& predictions,
                              const std::vector<int>& truth);

// A run is adjusted only when its hit ratio strictly exceeds K percent.
std::vector<int> pa_percent_k(const std::vector<int>& predictions,
                              const std::vector<int>& truth, double k_percent);

// Mean F1 of pa_percent_k over integer K = 0..100.
double f1_pa_k_auc(const std::vector<int>& predictions, const std::vector<int>& truth);

PrfResult segment_f1(const std::vector<int>& segment_predictions,
                     const std::vector<int>& segment_truth);

double generalization_bound(const BoundInputs& inputs);

}  // namespace nrad
