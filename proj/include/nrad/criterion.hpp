#pragma once

#include <vector>

namespace nrad {

enum class CriterionMode { Pu, Bce };

struct CriterionConfig {
    double pi_p = 0.25;   // class prior, in (0,1)
    double lambda = 1.0;  // weight of the time-constraint loss
    double lambda1 = 8e-5;  // smoothness
    double lambda2 = 8e-5;  // separability
    CriterionMode mode = CriterionMode::Pu;
};

// Scores of one stratified batch: segment scores split by PU side plus the
// per-point score vector of every segment in the batch.
struct BatchOutputs {
    std::vector<double> f_labeled;
    std::vector<double> f_unlabeled;
    std::vector<std::vector<double>> h_all;
};

struct LossBreakdown {
    double total = 0.0;
    double base = 0.0;    // PU risk or BCE, depending on mode
    double smooth = 0.0;
    double sep = 0.0;
};

struct CriterionGrads {
    std::vector<double> d_f_labeled;
    std::vector<double> d_f_unlabeled;
    std::vector<std::vector<double>> d_h_all;
};

double pu_loss(const std::vector<double>& f_labeled,
               const std::vector<double>& f_unlabeled, double pi_p);

double smooth_loss(const std::vector<std::vector<double>>& h_all);

double sep_loss(const std::vector<double>& f_unlabeled,
                const std::vector<double>& f_labeled);

double bce_loss(const std::vector<double>& f, const std::vector<int>& targets);

LossBreakdown total_loss(const BatchOutputs& batch, const CriterionConfig& cfg);

CriterionGrads grad_total(const BatchOutputs& batch, const CriterionConfig& cfg);

}  // namespace nrad
