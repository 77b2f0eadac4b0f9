#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nrad/matrix.hpp"

namespace nrad {

struct SimilarityGraph {
    std::size_t n = 0;
    Matrix knn_weights;               // symmetric, zero diagonal, entries in [0,1]
    std::vector<std::vector<bool>> adjacency;  // structural edges (kept even at weight 0)
    Matrix katz;
    double beta = 0.05;
    std::size_t l_max = 4;
    std::size_t k = 5;
};

struct PropagatedLabels {
    Matrix f;  // n x 2: column 0 negative mass, column 1 positive mass
    std::size_t iterations = 0;
    double residual = 0.0;  // max-abs change of the final sweep
};

struct SelectionResult {
    std::vector<std::size_t> reliable_negatives;   // X_RN
    std::vector<std::size_t> propagated_negatives; // X_LP
    std::vector<std::size_t> excluded;             // X_out
    std::vector<std::size_t> refined_unlabeled;    // X_RN union X_LP
    bool insufficient_unlabeled = false;
};

// Connects every node to its k most cosine-similar others (boundary ties
// included); weights are max(cos, 0), symmetrized by union.
SimilarityGraph build_knn_graph(const std::vector<std::vector<double>>& embeddings,
                                std::size_t k);

// Truncated series sum_{l=1..l_max} beta^l A^l; closed form
// (I - beta A)^{-1} - I requires beta * rho(A) < 1.
Matrix katz_similarity(const Matrix& adjacency_weights, double beta, std::size_t l_max,
                       bool closed_form = false);

struct ExtractionResult {
    std::vector<std::size_t> reliable_negatives;
    std::vector<std::size_t> excluded;
    bool insufficient_unlabeled = false;
};

// Confidence-based extraction: m rounds move the unlabeled nodes most
// similar to the labeled positives into the excluded set, then the
// N_P + |excluded| least similar survivors become reliable negatives.
ExtractionResult confidence_extract(const Matrix& katz,
                                    const std::vector<std::size_t>& labeled_idx,
                                    const std::vector<std::size_t>& unlabeled_idx,
                                    std::size_t m, double lambda0);

// Label propagation F <- D^{-1} W F with labeled-positive rows re-clamped
// each sweep; zero-degree rows are left untouched.
PropagatedLabels propagate_labels(const SimilarityGraph& graph,
                                  const std::vector<std::size_t>& positives,
                                  const std::vector<std::size_t>& reliable_negatives,
                                  std::size_t max_iter, double tol,
                                  bool clamp_reliable_negatives = false);

// X_LP collects unlabeled nodes outside X_RN and X_out whose propagated
// negative mass beats the positive mass by at least margin (rows with no
// mass at all never qualify).
SelectionResult assemble_refined(const PropagatedLabels& propagated,
                                 const std::vector<std::size_t>& unlabeled_idx,
                                 const std::vector<std::size_t>& reliable_negatives,
                                 const std::vector<std::size_t>& excluded,
                                 double margin);

void save_selection(const std::string& path, const SelectionResult& sel,
                    std::uint64_t fingerprint);
bool load_selection(const std::string& path, std::uint64_t expected_fingerprint,
                    SelectionResult& out);

}  // namespace nrad
