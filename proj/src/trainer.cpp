#include "nrad/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "nrad/common.hpp"
#include "nrad/errors.hpp"
#include "nrad/optim.hpp"
#include "nrad/rng.hpp"

namespace nrad {

namespace {

struct ForwardCache {
    std::vector<std::vector<double>> pre_act;   // z per layer
    std::vector<std::vector<double>> post_act;  // a per layer (a.back() pre-sigmoid)
    std::vector<double> h;
    double f = 0.0;
};

std::vector<double> affine(const AffineLayer& layer, const std::vector<double>& x) {
    std::vector<double> z(layer.bias);
    for (std::size_t o = 0; o < layer.weights.rows(); ++o) {
        const double* row = layer.weights.row(o);
        double acc = 0.0;
        for (std::size_t i = 0; i < layer.weights.cols(); ++i) acc += row[i] * x[i];
        z[o] += acc;
    }
    return z;
}

ForwardCache forward_cached(const ClassifierParams& params, const std::vector<double>& x) {
    if (x.size() != params.input_dim) {
        throw ShapeMismatch("forward: embedding width " + std::to_string(x.size()) +
                            " does not match classifier input " +
                            std::to_string(params.input_dim));
    }
    ForwardCache c;
    std::vector<double> a = x;
    const std::size_t n = params.layers.size();
    for (std::size_t l = 0; l < n; ++l) {
        std::vector<double> z = affine(params.layers[l], a);
        c.pre_act.push_back(z);
        if (l + 1 < n) {
            for (double& v : z) v = std::max(v, 0.0);
        }
        c.post_act.push_back(z);
        a = std::move(z);
    }
    c.h = c.post_act[n - 2];  // rectified T-wide output of the penultimate layer
    c.f = sigmoid(c.pre_act[n - 1][0]);
    return c;
}

std::size_t layer_params(const AffineLayer& l) {
    return l.weights.data().size() + l.bias.size();
}

// Backprop a single segment's (df, dh) into the flat gradient buffer.
void backward_one(const ClassifierParams& params, const std::vector<double>& x,
                  const ForwardCache& c, double df, const std::vector<double>& dh,
                  std::vector<double>& grads, const std::vector<std::size_t>& offsets) {
    const std::size_t n = params.layers.size();
    const double dz_last = df * c.f * (1.0 - c.f);
    // gradient flowing into the post-activation of each layer, starting at h
    std::vector<double> da(params.layers[n - 1].weights.cols(), 0.0);
    {
        const AffineLayer& last = params.layers[n - 1];
        double* gw = grads.data() + offsets[n - 1];
        double* gb = gw + last.weights.data().size();
        for (std::size_t i = 0; i < last.weights.cols(); ++i) {
            gw[i] += dz_last * c.h[i];
            da[i] = last.weights(0, i) * dz_last;
        }
        gb[0] += dz_last;
    }
    for (std::size_t i = 0; i < dh.size(); ++i) da[i] += dh[i];

    for (std::size_t l = n - 1; l-- > 0;) {
        const AffineLayer& layer = params.layers[l];
        const std::vector<double>& z = c.pre_act[l];
        std::vector<double> dz(z.size());
        for (std::size_t o = 0; o < z.size(); ++o) {
            dz[o] = z[o] > 0.0 ? da[o] : 0.0;
        }
        const std::vector<double>& input = l == 0 ? x : c.post_act[l - 1];
        double* gw = grads.data() + offsets[l];
        double* gb = gw + layer.weights.data().size();
        std::vector<double> dinput(layer.weights.cols(), 0.0);
        for (std::size_t o = 0; o < layer.weights.rows(); ++o) {
            const double g = dz[o];
            gb[o] += g;
            if (g == 0.0) continue;
            double* gwrow = gw + o * layer.weights.cols();
            const double* wrow = layer.weights.row(o);
            for (std::size_t i = 0; i < layer.weights.cols(); ++i) {
                gwrow[i] += g * input[i];
                dinput[i] += wrow[i] * g;
            }
        }
        da = std::move(dinput);
    }
}

std::vector<std::size_t> param_offsets(const ClassifierParams& params) {
    std::vector<std::size_t> offsets(params.layers.size());
    std::size_t pos = 0;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        offsets[l] = pos;
        pos += layer_params(params.layers[l]);
    }
    return offsets;
}

std::size_t total_params(const ClassifierParams& params) {
    std::size_t n = 0;
    for (const auto& l : params.layers) n += layer_params(l);
    return n;
}

}  // namespace

ClassifierParams init_classifier(std::size_t d, std::size_t t, std::uint64_t seed,
                                 const std::vector<std::size_t>& hidden_widths) {
    if (d < 1 || t < 1) {
        throw Error("init_classifier: d and T must be >= 1");
    }
    Rng rng(seed);
    std::vector<std::size_t> dims;
    dims.push_back(d);
    for (std::size_t w : hidden_widths) dims.push_back(w);
    dims.push_back(t);
    dims.push_back(1);
    ClassifierParams p;
    p.input_dim = d;
    p.point_dim = t;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        AffineLayer layer;
        layer.weights = Matrix(dims[l + 1], dims[l]);
        layer.bias.assign(dims[l + 1], 0.0);
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        for (double& w : layer.weights.data()) w = rng.uniform(-bound, bound);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

ClassifierOutput forward(const ClassifierParams& params, const std::vector<double>& x) {
    ForwardCache c = forward_cached(params, x);
    return {std::move(c.h), c.f};
}

double batch_loss(const ClassifierParams& params,
                  const std::vector<std::vector<double>>& labeled_x,
                  const std::vector<std::vector<double>>& unlabeled_x,
                  const CriterionConfig& cfg) {
    BatchOutputs batch;
    for (const auto& x : labeled_x) {
        ClassifierOutput o = forward(params, x);
        batch.f_labeled.push_back(o.f);
        batch.h_all.push_back(std::move(o.h));
    }
    for (const auto& x : unlabeled_x) {
        ClassifierOutput o = forward(params, x);
        batch.f_unlabeled.push_back(o.f);
        batch.h_all.push_back(std::move(o.h));
    }
    return total_loss(batch, cfg).total;
}

double batch_grads(const ClassifierParams& params,
                   const std::vector<std::vector<double>>& labeled_x,
                   const std::vector<std::vector<double>>& unlabeled_x,
                   const CriterionConfig& cfg, std::vector<double>& grads_out,
                   LossBreakdown* breakdown) {
    const auto offsets = param_offsets(params);
    grads_out.assign(total_params(params), 0.0);

    std::vector<ForwardCache> caches;
    caches.reserve(labeled_x.size() + unlabeled_x.size());
    BatchOutputs batch;
    for (const auto& x : labeled_x) {
        caches.push_back(forward_cached(params, x));
        batch.f_labeled.push_back(caches.back().f);
        batch.h_all.push_back(caches.back().h);
    }
    for (const auto& x : unlabeled_x) {
        caches.push_back(forward_cached(params, x));
        batch.f_unlabeled.push_back(caches.back().f);
        batch.h_all.push_back(caches.back().h);
    }
    const LossBreakdown loss = total_loss(batch, cfg);
    if (breakdown) *breakdown = loss;
    const CriterionGrads cg = grad_total(batch, cfg);

    for (std::size_t i = 0; i < labeled_x.size(); ++i) {
        backward_one(params, labeled_x[i], caches[i], cg.d_f_labeled[i], cg.d_h_all[i],
                     grads_out, offsets);
    }
    for (std::size_t i = 0; i < unlabeled_x.size(); ++i) {
        const std::size_t idx = labeled_x.size() + i;
        backward_one(params, unlabeled_x[i], caches[idx], cg.d_f_unlabeled[i],
                     cg.d_h_all[idx], grads_out, offsets);
    }
    return loss.total;
}

std::vector<double> flatten_classifier(const ClassifierParams& params) {
    std::vector<double> flat;
    flat.reserve(total_params(params));
    for (const auto& l : params.layers) {
        flat.insert(flat.end(), l.weights.data().begin(), l.weights.data().end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    return flat;
}

void unflatten_classifier(const std::vector<double>& flat, ClassifierParams& params) {
    std::size_t pos = 0;
    for (auto& l : params.layers) {
        std::copy(flat.begin() + pos, flat.begin() + pos + l.weights.data().size(),
                  l.weights.data().begin());
        pos += l.weights.data().size();
        std::copy(flat.begin() + pos, flat.begin() + pos + l.bias.size(), l.bias.begin());
        pos += l.bias.size();
    }
    if (pos != flat.size()) {
        throw ShapeMismatch("unflatten_classifier: flat size does not match params");
    }
}

TrainResult train(const ClassifierParams& initial,
                  const std::vector<std::vector<double>>& labeled_x,
                  const std::vector<std::vector<double>>& unlabeled_x,
                  const TrainConfig& cfg) {
    if (labeled_x.empty() || unlabeled_x.empty()) {
        throw EmptySide("train: need at least one labeled positive and one unlabeled");
    }
    if (cfg.batch_size < 2) {
        throw Error("train: batch size must be >= 2");
    }
    TrainResult result;
    result.params = initial;
    if (cfg.epochs == 0) {
        return result;
    }
    const std::size_t n_l = labeled_x.size();
    const std::size_t n_u = unlabeled_x.size();
    // stratified plan: every batch carries at least one labeled positive
    std::size_t b_l = static_cast<std::size_t>(std::max<long long>(
        1, round_half_up(static_cast<double>(cfg.batch_size) * static_cast<double>(n_l) /
                         static_cast<double>(n_l + n_u))));
    b_l = std::min(b_l, cfg.batch_size - 1);
    const std::size_t b_u = cfg.batch_size - b_l;

    std::vector<double> flat = flatten_classifier(result.params);
    AdamOptimizer adam(flat.size(), cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
    Rng rng(Rng::derive(cfg.seed, 3));

    std::vector<std::size_t> u_order(n_u);
    for (std::size_t i = 0; i < n_u; ++i) u_order[i] = i;
    std::vector<std::size_t> l_order(n_l);
    for (std::size_t i = 0; i < n_l; ++i) l_order[i] = i;
    std::size_t l_pos = n_l;  // forces a shuffle on first use

    std::vector<double> grads;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(u_order);
        EpochStats stats;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < n_u; start += b_u) {
            const std::size_t end = std::min(n_u, start + b_u);
            std::vector<std::vector<double>> batch_u;
            batch_u.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) batch_u.push_back(unlabeled_x[u_order[i]]);
            std::vector<std::vector<double>> batch_l;
            batch_l.reserve(b_l);
            for (std::size_t i = 0; i < b_l; ++i) {
                if (l_pos >= n_l) {  // recycle the labeled pool (with replacement overall)
                    rng.shuffle(l_order);
                    l_pos = 0;
                }
                batch_l.push_back(labeled_x[l_order[l_pos++]]);
            }
            LossBreakdown breakdown;
            const double loss = batch_grads(result.params, batch_l, batch_u,
                                            cfg.criterion, grads, &breakdown);
            if (!std::isfinite(loss)) {
                throw Divergence("train: loss became non-finite at epoch " +
                                 std::to_string(epoch) + " after " +
                                 std::to_string(result.history.size()) +
                                 " recorded epochs");
            }
            adam.step(flat, grads);
            unflatten_classifier(flat, result.params);
            stats.total += breakdown.total;
            stats.base += breakdown.base;
            stats.smooth += breakdown.smooth;
            stats.sep += breakdown.sep;
            ++n_batches;
        }
        const double inv = 1.0 / static_cast<double>(n_batches);
        stats.total *= inv;
        stats.base *= inv;
        stats.smooth *= inv;
        stats.sep *= inv;
        result.history.push_back(stats);
    }
    return result;
}

std::vector<SegmentPrediction> predict_segments(
    const ClassifierParams& params, const std::vector<std::vector<double>>& embeddings,
    double tau) {
    std::vector<SegmentPrediction> out;
    out.reserve(embeddings.size());
    for (const auto& x : embeddings) {
        const double f = forward(params, x).f;
        out.push_back({f, f > tau ? 1 : 0});
    }
    return out;
}

void save_classifier(const std::string& path, const ClassifierParams& params,
                     std::uint64_t fingerprint) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write classifier checkpoint: " + path);
    }
    char buf[64];
    out << "nrad-classifier-v1\n";
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint));
    out << "fingerprint " << buf << "\n";
    out << "input " << params.input_dim << "\n";
    out << "point " << params.point_dim << "\n";
    out << "layers " << params.layers.size() << "\n";
    auto write_vec = [&](const char* tag, const std::vector<double>& v) {
        out << tag;
        for (double x : v) {
            std::snprintf(buf, sizeof(buf), " %a", x);
            out << buf;
        }
        out << "\n";
    };
    for (const auto& l : params.layers) {
        out << "layer " << l.weights.rows() << " " << l.weights.cols() << "\n";
        write_vec("W", l.weights.data());
        write_vec("b", l.bias);
    }
}

bool load_classifier(const std::string& path, std::uint64_t expected_fingerprint,
                     ClassifierParams& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    if (!std::getline(in, line) || line != "nrad-classifier-v1") return false;
    std::string tag, hex;
    in >> tag >> hex;
    if (tag != "fingerprint") return false;
    if (std::strtoull(hex.c_str(), nullptr, 16) != expected_fingerprint) return false;
    ClassifierParams p;
    std::size_t n_layers = 0;
    in >> tag >> p.input_dim;
    if (tag != "input") return false;
    in >> tag >> p.point_dim;
    if (tag != "point") return false;
    in >> tag >> n_layers;
    if (tag != "layers") return false;
    auto read_vec = [&](const char* want, std::vector<double>& v) {
        std::string t;
        in >> t;
        if (t != want) return false;
        for (double& x : v) {
            std::string tok;
            in >> tok;
            x = std::strtod(tok.c_str(), nullptr);
        }
        return static_cast<bool>(in);
    };
    for (std::size_t l = 0; l < n_layers; ++l) {
        AffineLayer layer;
        std::size_t rows = 0, cols = 0;
        in >> tag >> rows >> cols;
        if (tag != "layer" || !in) return false;
        layer.weights = Matrix(rows, cols);
        layer.bias.assign(rows, 0.0);
        if (!read_vec("W", layer.weights.data())) return false;
        if (!read_vec("b", layer.bias)) return false;
        p.layers.push_back(std::move(layer));
    }
    out = std::move(p);
    return true;
}

}  // namespace nrad
