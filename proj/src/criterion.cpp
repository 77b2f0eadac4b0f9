#include "nrad/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nrad/common.hpp"
#include "nrad/errors.hpp"

namespace nrad {

namespace {

constexpr double kBceClip = 1e-7;

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

void require_nonempty(const std::vector<double>& f_labeled,
                      const std::vector<double>& f_unlabeled, const char* where) {
    if (f_labeled.empty() || f_unlabeled.empty()) {
        throw EmptySide(std::string(where) +
                        ": batch must contain labeled and unlabeled segments");
    }
}

}  // namespace

double pu_loss(const std::vector<double>& f_labeled,
               const std::vector<double>& f_unlabeled, double pi_p) {
    require_nonempty(f_labeled, f_unlabeled, "pu_loss");
    return 2.0 * pi_p * std::fabs(mean(f_labeled) - 1.0) +
           std::fabs(mean(f_unlabeled) - pi_p);
}

double smooth_loss(const std::vector<std::vector<double>>& h_all) {
    if (h_all.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& h : h_all) {
        if (h.size() < 2) {
            throw Error("smooth_loss: point-score vectors need length >= 2");
        }
        for (std::size_t j = 0; j + 1 < h.size(); ++j) {
            const double d = h[j] - h[j + 1];
            sum += d * d;
        }
    }
    return sum / static_cast<double>(h_all.size());
}

double sep_loss(const std::vector<double>& f_unlabeled,
                const std::vector<double>& f_labeled) {
    require_nonempty(f_labeled, f_unlabeled, "sep_loss");
    return mean(f_unlabeled) - mean(f_labeled);
}

double bce_loss(const std::vector<double>& f, const std::vector<int>& targets) {
    if (f.size() != targets.size()) {
        throw LengthMismatch("bce_loss: score/target lengths differ");
    }
    if (f.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double p = std::clamp(f[i], kBceClip, 1.0 - kBceClip);
        sum -= targets[i] != 0 ? std::log(p) : std::log(1.0 - p);
    }
    return sum / static_cast<double>(f.size());
}

LossBreakdown total_loss(const BatchOutputs& batch, const CriterionConfig& cfg) {
    LossBreakdown out;
    if (cfg.mode == CriterionMode::Pu) {
        out.base = pu_loss(batch.f_labeled, batch.f_unlabeled, cfg.pi_p);
    } else {
        std::vector<double> f;
        std::vector<int> t;
        f.reserve(batch.f_labeled.size() + batch.f_unlabeled.size());
        for (double v : batch.f_labeled) {
            f.push_back(v);
            t.push_back(1);
        }
        for (double v : batch.f_unlabeled) {
            f.push_back(v);
            t.push_back(0);  // unlabeled treated as negative
        }
        out.base = bce_loss(f, t);
    }
    out.smooth = smooth_loss(batch.h_all);
    out.sep = sep_loss(batch.f_unlabeled, batch.f_labeled);
    out.total = out.base + cfg.lambda * (cfg.lambda1 * out.smooth + cfg.lambda2 * out.sep);
    return out;
}

CriterionGrads grad_total(const BatchOutputs& batch, const CriterionConfig& cfg) {
    require_nonempty(batch.f_labeled, batch.f_unlabeled, "grad_total");
    const std::size_t n_l = batch.f_labeled.size();
    const std::size_t n_u = batch.f_unlabeled.size();
    CriterionGrads g;
    g.d_f_labeled.assign(n_l, 0.0);
    g.d_f_unlabeled.assign(n_u, 0.0);

    if (cfg.mode == CriterionMode::Pu) {
        const double s_l = sign0(mean(batch.f_labeled) - 1.0);
        const double s_u = sign0(mean(batch.f_unlabeled) - cfg.pi_p);
        for (double& d : g.d_f_labeled) d = 2.0 * cfg.pi_p * s_l / static_cast<double>(n_l);
        for (double& d : g.d_f_unlabeled) d = s_u / static_cast<double>(n_u);
    } else {
        const double n = static_cast<double>(n_l + n_u);
        for (std::size_t i = 0; i < n_l; ++i) {
            const double v = batch.f_labeled[i];
            if (v > kBceClip && v < 1.0 - kBceClip) {
                g.d_f_labeled[i] = -1.0 / (v * n);
            }
        }
        for (std::size_t i = 0; i < n_u; ++i) {
            const double v = batch.f_unlabeled[i];
            if (v > kBceClip && v < 1.0 - kBceClip) {
                g.d_f_unlabeled[i] = 1.0 / ((1.0 - v) * n);
            }
        }
    }

    // separability: lambda*lambda2 * (mean(f_U) - mean(f_L))
    const double w_sep = cfg.lambda * cfg.lambda2;
    for (double& d : g.d_f_unlabeled) d += w_sep / static_cast<double>(n_u);
    for (double& d : g.d_f_labeled) d -= w_sep / static_cast<double>(n_l);

    // smoothness: lambda*lambda1/N * sum of squared adjacent differences
    const std::size_t n_seg = batch.h_all.size();
    g.d_h_all.resize(n_seg);
    const double w_smooth =
        n_seg == 0 ? 0.0 : cfg.lambda * cfg.lambda1 / static_cast<double>(n_seg);
    for (std::size_t i = 0; i < n_seg; ++i) {
        const auto& h = batch.h_all[i];
        auto& dh = g.d_h_all[i];
        dh.assign(h.size(), 0.0);
        for (std::size_t j = 0; j + 1 < h.size(); ++j) {
            const double diff = 2.0 * (h[j] - h[j + 1]) * w_smooth;
            dh[j] += diff;
            dh[j + 1] -= diff;
        }
    }
    return g;
}

}  // namespace nrad
