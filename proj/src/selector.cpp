#include "nrad/selector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include "nrad/common.hpp"
#include "nrad/errors.hpp"

namespace nrad {

namespace {

std::vector<double> mean_similarity(const Matrix& katz,
                                    const std::vector<std::size_t>& nodes,
                                    const std::vector<std::size_t>& reference) {
    std::vector<double> scores(nodes.size(), 0.0);
    const double n_ref = static_cast<double>(reference.size());
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        double acc = 0.0;
        for (std::size_t j : reference) acc += katz(nodes[a], j);
        scores[a] = acc / n_ref;
    }
    return scores;
}

// Rank positions into nodes[], ordered by score with ascending-index ties.
std::vector<std::size_t> rank_nodes(const std::vector<std::size_t>& nodes,
                                    const std::vector<double>& scores,
                                    bool descending) {
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return descending ? scores[a] > scores[b] : scores[a] < scores[b];
        }
        return nodes[a] < nodes[b];
    });
    return order;
}

}  // namespace

SimilarityGraph build_knn_graph(const std::vector<std::vector<double>>& embeddings,
                                std::size_t k) {
    const std::size_t n = embeddings.size();
    if (k < 1 || n < k + 1) {
        throw Error("build_knn_graph: need at least k+1 nodes");
    }
    for (const auto& e : embeddings) {
        if (!all_finite(e)) {
            throw Error("build_knn_graph: non-finite embedding");
        }
    }
    Matrix cos(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double c = cosine_similarity(embeddings[i], embeddings[j]);
            cos(i, j) = c;
            cos(j, i) = c;
        }
    }
    SimilarityGraph g;
    g.n = n;
    g.k = k;
    g.knn_weights = Matrix(n, n);
    g.adjacency.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> sims;
        sims.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sims.push_back(cos(i, j));
        }
        std::nth_element(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         sims.end(), std::greater<double>());
        const double threshold = sims[k - 1];
        // boundary ties are all kept so equal-similarity nodes get equal treatment
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || cos(i, j) < threshold) continue;
            const double w = std::max(cos(i, j), 0.0);
            g.adjacency[i][j] = g.adjacency[j][i] = true;
            g.knn_weights(i, j) = w;
            g.knn_weights(j, i) = w;
        }
    }
    return g;
}

Matrix katz_similarity(const Matrix& adjacency_weights, double beta, std::size_t l_max,
                       bool closed_form) {
    if (adjacency_weights.rows() != adjacency_weights.cols()) {
        throw ShapeMismatch("katz_similarity: adjacency must be square");
    }
    if (beta <= 0.0) {
        throw Error("katz_similarity: beta must be positive");
    }
    const std::size_t n = adjacency_weights.rows();
    if (closed_form) {
        const double rho = spectral_radius(adjacency_weights);
        if (beta * rho >= 1.0) {
            throw SpectralRadiusViolation(
                "katz_similarity: beta * spectral radius = " + std::to_string(beta * rho) +
                " >= 1, closed form diverges");
        }
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) = (i == j ? 1.0 : 0.0) - beta * adjacency_weights(i, j);
            }
        }
        Matrix inv = inverse(m);
        for (std::size_t i = 0; i < n; ++i) inv(i, i) -= 1.0;
        return inv;
    }
    Matrix acc(n, n);
    Matrix power = adjacency_weights;
    double beta_l = beta;
    for (std::size_t l = 1; l <= l_max; ++l) {
        if (l > 1) {
            power = power * adjacency_weights;
            beta_l *= beta;
        }
        for (std::size_t idx = 0; idx < acc.data().size(); ++idx) {
            acc.data()[idx] += beta_l * power.data()[idx];
        }
    }
    return acc;
}

ExtractionResult confidence_extract(const Matrix& katz,
                                    const std::vector<std::size_t>& labeled_idx,
                                    const std::vector<std::size_t>& unlabeled_idx,
                                    std::size_t m, double lambda0) {
    if (m < 1) {
        throw Error("confidence_extract: m must be >= 1");
    }
    if (labeled_idx.empty()) {
        throw NoPositives("confidence_extract: no labeled positives");
    }
    const std::size_t n_p = labeled_idx.size();
    const std::size_t per_round = static_cast<std::size_t>(std::max<long long>(
        1, round_half_up(lambda0 / static_cast<double>(m) * static_cast<double>(n_p))));

    ExtractionResult res;
    std::vector<std::size_t> remaining = unlabeled_idx;
    std::sort(remaining.begin(), remaining.end());

    for (std::size_t round = 0; round < m && !remaining.empty(); ++round) {
        const auto scores = mean_similarity(katz, remaining, labeled_idx);
        const auto order = rank_nodes(remaining, scores, /*descending=*/true);
        const std::size_t take = std::min(per_round, remaining.size());
        std::vector<std::size_t> removed;
        removed.reserve(take);
        for (std::size_t r = 0; r < take; ++r) {
            removed.push_back(remaining[order[r]]);
        }
        for (std::size_t node : removed) {
            res.excluded.push_back(node);
            remaining.erase(std::find(remaining.begin(), remaining.end(), node));
        }
    }

    std::vector<std::size_t> reference = labeled_idx;
    reference.insert(reference.end(), res.excluded.begin(), res.excluded.end());
    const std::size_t want = n_p + res.excluded.size();
    const auto scores = mean_similarity(katz, remaining, reference);
    const auto order = rank_nodes(remaining, scores, /*descending=*/false);
    if (remaining.size() < want) {
        res.insufficient_unlabeled = true;
    }
    const std::size_t take = std::min(want, remaining.size());
    for (std::size_t r = 0; r < take; ++r) {
        res.reliable_negatives.push_back(remaining[order[r]]);
    }
    std::sort(res.reliable_negatives.begin(), res.reliable_negatives.end());
    std::sort(res.excluded.begin(), res.excluded.end());
    return res;
}

PropagatedLabels propagate_labels(const SimilarityGraph& graph,
                                  const std::vector<std::size_t>& positives,
                                  const std::vector<std::size_t>& reliable_negatives,
                                  std::size_t max_iter, double tol,
                                  bool clamp_reliable_negatives) {
    for (std::size_t p : positives) {
        if (std::find(reliable_negatives.begin(), reliable_negatives.end(), p) !=
            reliable_negatives.end()) {
            throw Error("propagate_labels: positive and reliable-negative sets overlap");
        }
    }
    const std::size_t n = graph.n;
    std::vector<double> degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) degree[i] += graph.knn_weights(i, j);
    }
    PropagatedLabels out;
    out.f = Matrix(n, 2);
    for (std::size_t p : positives) {
        out.f(p, 0) = 0.0;
        out.f(p, 1) = 1.0;
    }
    for (std::size_t r : reliable_negatives) {
        out.f(r, 0) = 1.0;
        out.f(r, 1) = 0.0;
    }
    Matrix next(n, 2);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            if (degree[i] == 0.0) {  // isolated rows keep their state
                next(i, 0) = out.f(i, 0);
                next(i, 1) = out.f(i, 1);
                continue;
            }
            double a = 0.0, b = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double w = graph.knn_weights(i, j);
                if (w == 0.0) continue;
                a += w * out.f(j, 0);
                b += w * out.f(j, 1);
            }
            next(i, 0) = a / degree[i];
            next(i, 1) = b / degree[i];
        }
        for (std::size_t p : positives) {
            next(p, 0) = 0.0;
            next(p, 1) = 1.0;
        }
        if (clamp_reliable_negatives) {
            for (std::size_t r : reliable_negatives) {
                next(r, 0) = 1.0;
                next(r, 1) = 0.0;
            }
        }
        double residual = 0.0;
        for (std::size_t idx = 0; idx < next.data().size(); ++idx) {
            residual = std::max(residual, std::fabs(next.data()[idx] - out.f.data()[idx]));
        }
        std::swap(out.f, next);
        out.residual = residual;
        out.iterations = iter + 1;
        if (residual < tol) break;
    }
    return out;
}

SelectionResult assemble_refined(const PropagatedLabels& propagated,
                                 const std::vector<std::size_t>& unlabeled_idx,
                                 const std::vector<std::size_t>& reliable_negatives,
                                 const std::vector<std::size_t>& excluded,
                                 double margin) {
    std::set<std::size_t> rn(reliable_negatives.begin(), reliable_negatives.end());
    std::set<std::size_t> out_set(excluded.begin(), excluded.end());
    SelectionResult sel;
    sel.reliable_negatives = reliable_negatives;
    sel.excluded = excluded;
    for (std::size_t i : unlabeled_idx) {
        if (rn.count(i) || out_set.count(i)) continue;
        const double neg = propagated.f(i, 0);
        const double pos = propagated.f(i, 1);
        if (neg + pos > 0.0 && neg - pos >= margin) {
            sel.propagated_negatives.push_back(i);
        }
    }
    std::sort(sel.propagated_negatives.begin(), sel.propagated_negatives.end());
    sel.refined_unlabeled = sel.reliable_negatives;
    sel.refined_unlabeled.insert(sel.refined_unlabeled.end(),
                                 sel.propagated_negatives.begin(),
                                 sel.propagated_negatives.end());
    std::sort(sel.refined_unlabeled.begin(), sel.refined_unlabeled.end());
    return sel;
}

namespace {

void write_index_set(std::ofstream& out, const char* tag,
                     const std::vector<std::size_t>& idx) {
    out << tag;
    for (std::size_t i : idx) out << " " << i;
    out << "\n";
}

bool read_index_set(std::ifstream& in, const char* want, std::vector<std::size_t>& idx) {
    std::string line;
    if (!std::getline(in, line)) return false;
    std::size_t pos = line.find(' ');
    const std::string tag = pos == std::string::npos ? line : line.substr(0, pos);
    if (tag != want) return false;
    idx.clear();
    while (pos != std::string::npos) {
        std::size_t next = line.find(' ', pos + 1);
        const std::string tok = line.substr(pos + 1, next == std::string::npos
                                                         ? std::string::npos
                                                         : next - pos - 1);
        if (!tok.empty()) idx.push_back(std::strtoull(tok.c_str(), nullptr, 10));
        pos = next;
    }
    return true;
}

}  // namespace

void save_selection(const std::string& path, const SelectionResult& sel,
                    std::uint64_t fingerprint) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write selection sidecar: " + path);
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint));
    out << "nrad-selection-v1\n";
    out << "fingerprint " << buf << "\n";
    write_index_set(out, "x_rn", sel.reliable_negatives);
    write_index_set(out, "x_lp", sel.propagated_negatives);
    write_index_set(out, "x_out", sel.excluded);
    write_index_set(out, "refined", sel.refined_unlabeled);
    out << "warning " << (sel.insufficient_unlabeled ? 1 : 0) << "\n";
}

bool load_selection(const std::string& path, std::uint64_t expected_fingerprint,
                    SelectionResult& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    if (!std::getline(in, line) || line != "nrad-selection-v1") return false;
    std::string tag, hex;
    in >> tag >> hex;
    if (tag != "fingerprint") return false;
    if (std::strtoull(hex.c_str(), nullptr, 16) != expected_fingerprint) return false;
    std::getline(in, line);  // trailing newline
    SelectionResult sel;
    if (!read_index_set(in, "x_rn", sel.reliable_negatives)) return false;
    if (!read_index_set(in, "x_lp", sel.propagated_negatives)) return false;
    if (!read_index_set(in, "x_out", sel.excluded)) return false;
    if (!read_index_set(in, "refined", sel.refined_unlabeled)) return false;
    int warn = 0;
    in >> tag >> warn;
    if (tag != "warning") return false;
    sel.insufficient_unlabeled = warn != 0;
    out = std::move(sel);
    return true;
}

}  // namespace nrad
