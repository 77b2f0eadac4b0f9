#include "nrad/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nrad/common.hpp"
#include "nrad/errors.hpp"
#include "nrad/optim.hpp"
#include "nrad/rng.hpp"

namespace nrad {

namespace {

// z(co,t) = b[co] + sum_ci sum_k W(co, ci*K+k) * x(ci, t - dil*(K-1-k));
// inputs before t=0 are zero (causal left padding).
Matrix conv_forward(const ConvLayer& layer, const Matrix& x) {
    if (x.rows() != layer.in_channels) {
        throw ShapeMismatch("conv_forward: input channels " + std::to_string(x.rows()) +
                            " do not match layer in_channels " +
                            std::to_string(layer.in_channels));
    }
    const std::size_t T = x.cols();
    const std::size_t K = layer.kernel;
    Matrix z(layer.out_channels, T);
    for (std::size_t co = 0; co < layer.out_channels; ++co) {
        double* zr = z.row(co);
        const double b = layer.bias[co];
        for (std::size_t t = 0; t < T; ++t) zr[t] = b;
        for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
            const double* xr = x.row(ci);
            for (std::size_t k = 0; k < K; ++k) {
                const double w = layer.weights(co, ci * K + k);
                const std::size_t off = layer.dilation * (K - 1 - k);
                if (off >= T) continue;
                for (std::size_t t = off; t < T; ++t) {
                    zr[t] += w * xr[t - off];
                }
            }
        }
    }
    return z;
}

void relu_inplace(Matrix& m) {
    for (double& v : m.data()) {
        if (v < 0.0) v = 0.0;
    }
}

// Accumulates dW/db into grad slices and returns dX. dZ must already be
// masked by the ReLU derivative where applicable.
Matrix conv_backward(const ConvLayer& layer, const Matrix& x, const Matrix& dz,
                     double* dw, double* db) {
    const std::size_t T = x.cols();
    const std::size_t K = layer.kernel;
    Matrix dx(layer.in_channels, T);
    for (std::size_t co = 0; co < layer.out_channels; ++co) {
        const double* dzr = dz.row(co);
        double acc_b = 0.0;
        for (std::size_t t = 0; t < T; ++t) acc_b += dzr[t];
        db[co] += acc_b;
        for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
            const double* xr = x.row(ci);
            double* dxr = dx.row(ci);
            for (std::size_t k = 0; k < K; ++k) {
                const std::size_t off = layer.dilation * (K - 1 - k);
                if (off >= T) continue;
                const double w = layer.weights(co, ci * K + k);
                double acc_w = 0.0;
                for (std::size_t t = off; t < T; ++t) {
                    acc_w += dzr[t] * xr[t - off];
                    dxr[t - off] += w * dzr[t];
                }
                dw[co * layer.in_channels * K + ci * K + k] += acc_w;
            }
        }
    }
    return dx;
}

std::size_t layer_param_count(const ConvLayer& l) {
    return l.out_channels * l.in_channels * l.kernel + l.out_channels;
}

struct ForwardTrace {
    std::vector<Matrix> pre_act;  // z per layer
    Matrix h;                     // post-ReLU output of the last layer
    std::vector<double> embedding;
    double score = 0.0;
};

ForwardTrace forward_trace(const EncoderParams& params, const Matrix& x) {
    ForwardTrace tr;
    tr.pre_act.reserve(params.layers.size());
    Matrix a = x;
    for (const auto& layer : params.layers) {
        Matrix z = conv_forward(layer, a);
        tr.pre_act.push_back(z);
        relu_inplace(z);
        a = std::move(z);
    }
    tr.h = std::move(a);
    tr.embedding = gap(tr.h);
    tr.score = sigmoid(dot(params.anomaly_weight, tr.embedding));
    return tr;
}

}  // namespace

EncoderParams init_encoder(const EncoderConfig& cfg, std::size_t input_dims,
                           std::uint64_t seed) {
    if (cfg.n_layers < 1) {
        throw Error("init_encoder: need at least one layer");
    }
    Rng rng(seed);
    EncoderParams p;
    p.d = cfg.d;
    std::size_t in_c = input_dims;
    std::size_t dilation = 1;
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
        ConvLayer layer;
        layer.in_channels = in_c;
        layer.out_channels = (l + 1 == cfg.n_layers) ? cfg.d : cfg.hidden_channels;
        layer.kernel = cfg.kernel;
        layer.dilation = dilation;
        layer.weights = Matrix(layer.out_channels, layer.in_channels * layer.kernel);
        layer.bias.assign(layer.out_channels, 0.0);
        const double bound =
            1.0 / std::sqrt(static_cast<double>(layer.in_channels * layer.kernel));
        for (double& w : layer.weights.data()) w = rng.uniform(-bound, bound);
        in_c = layer.out_channels;
        dilation *= 2;
        p.layers.push_back(std::move(layer));
    }
    p.anomaly_weight.resize(cfg.d);
    const double wb = 1.0 / std::sqrt(static_cast<double>(cfg.d));
    for (double& w : p.anomaly_weight) w = rng.uniform(-wb, wb);
    return p;
}

Matrix encode(const EncoderParams& params, const Matrix& segment_values) {
    Matrix a = segment_values;
    for (const auto& layer : params.layers) {
        a = conv_forward(layer, a);
        relu_inplace(a);
    }
    return a;
}

std::vector<double> gap(const Matrix& h) {
    if (h.cols() == 0) {
        throw Error("gap: empty sequence");
    }
    std::vector<double> out(h.rows(), 0.0);
    for (std::size_t c = 0; c < h.rows(); ++c) {
        const double* row = h.row(c);
        double acc = 0.0;
        for (std::size_t t = 0; t < h.cols(); ++t) acc += row[t];
        out[c] = acc / static_cast<double>(h.cols());
    }
    return out;
}

std::vector<double> point_scores(const EncoderParams& params, const Matrix& h) {
    if (h.rows() != params.anomaly_weight.size()) {
        throw ShapeMismatch("point_scores: representation width does not match w");
    }
    std::vector<double> s(h.cols(), 0.0);
    for (std::size_t t = 0; t < h.cols(); ++t) {
        double acc = 0.0;
        for (std::size_t c = 0; c < h.rows(); ++c) acc += params.anomaly_weight[c] * h(c, t);
        s[t] = sigmoid(acc);
    }
    return s;
}

double segment_score(const EncoderParams& params, const Matrix& h) {
    return sigmoid(dot(params.anomaly_weight, gap(h)));
}

std::vector<double> flatten_encoder(const EncoderParams& params) {
    std::vector<double> flat;
    std::size_t n = params.anomaly_weight.size();
    for (const auto& l : params.layers) n += layer_param_count(l);
    flat.reserve(n);
    for (const auto& l : params.layers) {
        flat.insert(flat.end(), l.weights.data().begin(), l.weights.data().end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    flat.insert(flat.end(), params.anomaly_weight.begin(), params.anomaly_weight.end());
    return flat;
}

void unflatten_encoder(const std::vector<double>& flat, EncoderParams& params) {
    std::size_t pos = 0;
    for (auto& l : params.layers) {
        std::copy(flat.begin() + pos, flat.begin() + pos + l.weights.data().size(),
                  l.weights.data().begin());
        pos += l.weights.data().size();
        std::copy(flat.begin() + pos, flat.begin() + pos + l.bias.size(), l.bias.begin());
        pos += l.bias.size();
    }
    std::copy(flat.begin() + pos, flat.begin() + pos + params.anomaly_weight.size(),
              params.anomaly_weight.begin());
    pos += params.anomaly_weight.size();
    if (pos != flat.size()) {
        throw ShapeMismatch("unflatten_encoder: flat size does not match params");
    }
}

double pretrain_batch_loss(const EncoderParams& params,
                           const std::vector<const Matrix*>& segment_values,
                           const std::vector<int>& targets) {
    double loss = 0.0;
    const double n = static_cast<double>(segment_values.size());
    constexpr double eps = 1e-12;
    for (std::size_t i = 0; i < segment_values.size(); ++i) {
        Matrix h = encode(params, *segment_values[i]);
        const double s = sigmoid(dot(params.anomaly_weight, gap(h)));
        loss -= targets[i] != 0 ? std::log(std::max(s, eps))
                                : std::log(std::max(1.0 - s, eps));
    }
    return loss / n;
}

double pretrain_batch_grads(const EncoderParams& params,
                            const std::vector<const Matrix*>& segment_values,
                            const std::vector<int>& targets,
                            std::vector<double>& grads_out) {
    const std::size_t n_layers = params.layers.size();
    std::vector<std::size_t> offsets(n_layers + 1, 0);
    std::size_t pos = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        offsets[l] = pos;
        pos += layer_param_count(params.layers[l]);
    }
    offsets[n_layers] = pos;  // anomaly weight
    grads_out.assign(pos + params.anomaly_weight.size(), 0.0);

    double loss = 0.0;
    const double n = static_cast<double>(segment_values.size());
    constexpr double eps = 1e-12;
    for (std::size_t i = 0; i < segment_values.size(); ++i) {
        const Matrix& x = *segment_values[i];
        ForwardTrace tr = forward_trace(params, x);
        const double y = targets[i] != 0 ? 1.0 : 0.0;
        loss -= targets[i] != 0 ? std::log(std::max(tr.score, eps))
                                : std::log(std::max(1.0 - tr.score, eps));
        // d(BCE)/d(w.X) = s - y for the sigmoid output
        const double dz = (tr.score - y) / n;
        double* gw = grads_out.data() + offsets[n_layers];
        for (std::size_t c = 0; c < params.d; ++c) {
            gw[c] += dz * tr.embedding[c];
        }
        const std::size_t T = x.cols();
        Matrix dh(params.d, T);
        for (std::size_t c = 0; c < params.d; ++c) {
            const double g = dz * params.anomaly_weight[c] / static_cast<double>(T);
            double* row = dh.row(c);
            for (std::size_t t = 0; t < T; ++t) row[t] = g;
        }
        // back through the stack; layer inputs are the previous post-ReLU maps
        Matrix dcur = std::move(dh);
        for (std::size_t l = n_layers; l-- > 0;) {
            const Matrix& z = tr.pre_act[l];
            for (std::size_t idx = 0; idx < z.data().size(); ++idx) {
                if (z.data()[idx] <= 0.0) dcur.data()[idx] = 0.0;
            }
            Matrix input;
            if (l == 0) {
                input = x;
            } else {
                input = tr.pre_act[l - 1];
                relu_inplace(input);
            }
            const auto& layer = params.layers[l];
            double* dw = grads_out.data() + offsets[l];
            double* db = dw + layer.out_channels * layer.in_channels * layer.kernel;
            dcur = conv_backward(layer, input, dcur, dw, db);
        }
    }
    return loss / n;
}

PretrainResult pretrain_encoder(const SegmentCollection& collection,
                                const EncoderConfig& cfg, std::uint64_t seed) {
    PretrainResult result;
    result.params = init_encoder(cfg, collection.dims, Rng::derive(seed, 1));
    if (cfg.epochs == 0 || collection.size() == 0) {
        return result;
    }
    std::vector<int> targets(collection.size(), 0);
    for (std::size_t i = 0; i < collection.size(); ++i) {
        targets[i] = collection.segments[i].pu_label == PuLabel::LabeledPositive ? 1 : 0;
    }
    std::vector<double> flat = flatten_encoder(result.params);
    AdamOptimizer adam(flat.size(), cfg.learning_rate);
    Rng order_rng(Rng::derive(seed, 2));
    std::vector<std::size_t> order(collection.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> grads;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        order_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            std::vector<const Matrix*> batch;
            std::vector<int> batch_targets;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back(&collection.segments[order[i]].values);
                batch_targets.push_back(targets[order[i]]);
            }
            const double loss =
                pretrain_batch_grads(result.params, batch, batch_targets, grads);
            if (!std::isfinite(loss)) {
                throw Divergence("pretrain_encoder: loss became non-finite at epoch " +
                                 std::to_string(epoch));
            }
            adam.step(flat, grads);
            unflatten_encoder(flat, result.params);
            epoch_loss += loss;
            ++n_batches;
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(n_batches));
    }
    return result;
}

std::vector<double> stats_embedding(const Matrix& segment_values) {
    const std::size_t D = segment_values.rows();
    const std::size_t T = segment_values.cols();
    std::vector<double> out;
    out.reserve(5 * D);
    for (std::size_t d = 0; d < D; ++d) {
        const double* row = segment_values.row(d);
        double mean = 0.0, lo = row[0], hi = row[0];
        for (std::size_t t = 0; t < T; ++t) {
            mean += row[t];
            lo = std::min(lo, row[t]);
            hi = std::max(hi, row[t]);
        }
        mean /= static_cast<double>(T);
        double var = 0.0, tv = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            var += (row[t] - mean) * (row[t] - mean);
            if (t > 0) tv += std::fabs(row[t] - row[t - 1]);
        }
        var /= static_cast<double>(T);
        tv /= static_cast<double>(T > 1 ? T - 1 : 1);
        out.push_back(mean);
        out.push_back(std::sqrt(var));
        out.push_back(lo);
        out.push_back(hi);
        out.push_back(tv);
    }
    return out;
}

std::vector<double> stats_point_scores(const Matrix& segment_values) {
    const std::size_t D = segment_values.rows();
    const std::size_t T = segment_values.cols();
    std::vector<double> s(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double acc = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
            acc += segment_values(d, t) * segment_values(d, t);
        }
        // inputs are z-scored, so mean square around 1 is the normal regime
        s[t] = sigmoid(acc / static_cast<double>(D) - 1.0);
    }
    return s;
}

void save_encoder(const std::string& path, const EncoderParams& params,
                  std::uint64_t fingerprint) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write encoder checkpoint: " + path);
    }
    char buf[64];
    out << "nrad-encoder-v1\n";
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint));
    out << "fingerprint " << buf << "\n";
    out << "d " << params.d << "\n";
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
        out << "layer " << l.in_channels << " " << l.out_channels << " " << l.kernel
            << " " << l.dilation << "\n";
        write_vec("W", l.weights.data());
        write_vec("b", l.bias);
    }
    write_vec("w", params.anomaly_weight);
}

bool load_encoder(const std::string& path, std::uint64_t expected_fingerprint,
                  EncoderParams& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    if (!std::getline(in, line) || line != "nrad-encoder-v1") return false;
    std::string tag;
    std::string hex;
    in >> tag >> hex;
    if (tag != "fingerprint") return false;
    if (std::strtoull(hex.c_str(), nullptr, 16) != expected_fingerprint) return false;
    EncoderParams p;
    std::size_t n_layers = 0;
    in >> tag >> p.d;
    if (tag != "d") return false;
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
        ConvLayer layer;
        in >> tag >> layer.in_channels >> layer.out_channels >> layer.kernel >>
            layer.dilation;
        if (tag != "layer" || !in) return false;
        layer.weights = Matrix(layer.out_channels, layer.in_channels * layer.kernel);
        layer.bias.assign(layer.out_channels, 0.0);
        if (!read_vec("W", layer.weights.data())) return false;
        if (!read_vec("b", layer.bias)) return false;
        p.layers.push_back(std::move(layer));
    }
    p.anomaly_weight.assign(p.d, 0.0);
    if (!read_vec("w", p.anomaly_weight)) return false;
    out = std::move(p);
    return true;
}

}  // namespace nrad
