#include "nrad/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nrad/common.hpp"
#include "nrad/errors.hpp"
#include "nrad/rng.hpp"

namespace nrad {

namespace {

constexpr std::size_t kEstimatorSampleCap = 4000;

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::vector<double> embed_segment(const PipelineConfig& cfg,
                                  const std::optional<EncoderParams>& enc,
                                  const Matrix& values) {
    if (cfg.encoder_mode == EncoderMode::Stats) {
        return stats_embedding(values);
    }
    return gap(encode(*enc, values));
}

struct PositiveSegmentRef {
    std::size_t original_index = 0;
    const Segment* segment = nullptr;
    const std::vector<double>* embedding = nullptr;
};

}  // namespace

std::vector<int> read_binary_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open column file: " + path);
    }
    std::vector<int> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line == "0") {
            out.push_back(0);
        } else if (line == "1") {
            out.push_back(1);
        } else {
            throw Error(path + ":" + std::to_string(line_no) +
                        ": expected 0 or 1, got '" + line + "'");
        }
    }
    return out;
}

void write_binary_column(const std::vector<int>& column, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write column file: " + path);
    }
    for (int v : column) out << (v != 0 ? "1\n" : "0\n");
}

PipelineData prepare_data(const PipelineConfig& cfg, const std::string& out_dir,
                          bool resume) {
    PipelineData data;

    TimeSeriesDataset ds = stage("ingest", [&] {
        if (cfg.source == DataSource::Synth) {
            SynthConfig sc = cfg.synth;
            sc.seed = Rng::derive(cfg.seed, 10);
            TimeSeriesDataset d = synth_generate(sc).dataset;
            if (cfg.norm_scope == NormScope::Full) {
                zscore_normalize(d, 1.0);
            } else if (cfg.norm_scope == NormScope::Train) {
                zscore_normalize(d, cfg.train_fraction);
            }
            return d;
        }
        if (cfg.csv_path.empty()) {
            throw Error("data.source is csv but data.csv_path is empty");
        }
        return load_csv(cfg.csv_path, cfg.has_labels, cfg.norm_scope, cfg.train_fraction);
    });
    data.t_total = ds.length();

    stage("window", [&] {
        SegmentCollection all = window(ds, cfg.window);
        auto split = split_segments(all, cfg.train_fraction);
        data.train = std::move(split.first);
        data.test = std::move(split.second);
        return 0;
    });

    stage("noise", [&] {
        NoiseSpec spec{cfg.e1, Rng::derive(cfg.seed, 11)};
        data.train = inject_pu_noise(data.train, spec);
        return 0;
    });

    stage("embed", [&] {
        if (cfg.encoder_mode != EncoderMode::Stats) {
            EncoderConfig ec = cfg.encoder;
            if (cfg.encoder_mode == EncoderMode::DicnnRandom) ec.epochs = 0;
            const std::uint64_t fp = config_fingerprint(cfg);
            EncoderParams params;
            if (resume && !out_dir.empty() &&
                load_encoder(out_dir + "/encoder.ckpt", fp, params)) {
                data.encoder = std::move(params);
                data.encoder_resumed = true;
            } else {
                PretrainResult pr = pretrain_encoder(data.train, ec, Rng::derive(cfg.seed, 12));
                data.encoder = std::move(pr.params);
                data.encoder_history = std::move(pr.loss_history);
                if (!out_dir.empty()) {
                    save_encoder(out_dir + "/encoder.ckpt", *data.encoder, fp);
                }
            }
        }
        data.emb_train.reserve(data.train.size());
        for (const auto& seg : data.train.segments) {
            data.emb_train.push_back(embed_segment(cfg, data.encoder, seg.values));
        }
        data.emb_test.reserve(data.test.size());
        for (const auto& seg : data.test.segments) {
            data.emb_test.push_back(embed_segment(cfg, data.encoder, seg.values));
        }
        data.d_eff = data.emb_train.empty() ? 0 : data.emb_train[0].size();
        return 0;
    });

    return data;
}

SelectionResult run_selection(const PipelineData& data, const PipelineConfig& cfg) {
    std::vector<std::size_t> labeled_idx, unlabeled_idx;
    for (std::size_t i = 0; i < data.train.size(); ++i) {
        if (data.train.segments[i].pu_label == PuLabel::LabeledPositive) {
            labeled_idx.push_back(i);
        } else {
            unlabeled_idx.push_back(i);
        }
    }
    SelectionResult sel;
    if (!cfg.selector_extraction && !cfg.selector_propagation) {
        sel.refined_unlabeled = unlabeled_idx;
        return sel;
    }
    if (labeled_idx.empty()) {
        throw Error("no labeled positive segments in the training split");
    }
    SimilarityGraph graph = build_knn_graph(data.emb_train, cfg.knn_k);
    graph.beta = cfg.katz_beta;
    graph.l_max = cfg.katz_l_max;
    graph.katz = katz_similarity(graph.knn_weights, cfg.katz_beta, cfg.katz_l_max,
                                 cfg.katz_closed_form);
    ExtractionResult ext;
    if (cfg.selector_extraction) {
        ext = confidence_extract(graph.katz, labeled_idx, unlabeled_idx, cfg.selector_m,
                                 cfg.selector_lambda0);
    }
    if (cfg.selector_propagation) {
        PropagatedLabels prop =
            propagate_labels(graph, labeled_idx, ext.reliable_negatives, cfg.prop_max_iter,
                             cfg.prop_tol, cfg.selector_clamp_rn);
        sel = assemble_refined(prop, unlabeled_idx, ext.reliable_negatives, ext.excluded,
                               cfg.selector_margin);
    } else {
        sel.reliable_negatives = ext.reliable_negatives;
        sel.excluded = ext.excluded;
        sel.refined_unlabeled = ext.reliable_negatives;
    }
    sel.insufficient_unlabeled = ext.insufficient_unlabeled;
    return sel;
}

DetectionReport run_stages(const PipelineData& data, const PipelineConfig& cfg,
                           const std::string& out_dir, bool resume,
                           bool write_artifacts) {
    DetectionReport rep;
    rep.n_train = data.train.size();
    rep.n_test = data.test.size();
    rep.n_segments = rep.n_train + rep.n_test;
    if (data.encoder_resumed) ++rep.stages_resumed;
    const std::uint64_t fp = config_fingerprint(cfg);
    const std::size_t L = data.train.segment_length;

    std::vector<std::size_t> labeled_idx, unlabeled_idx;
    for (std::size_t i = 0; i < data.train.size(); ++i) {
        if (data.train.segments[i].pu_label == PuLabel::LabeledPositive) {
            labeled_idx.push_back(i);
        } else {
            unlabeled_idx.push_back(i);
        }
    }
    rep.n_labeled = labeled_idx.size();

    stage("select", [&] {
        const bool selector_on = cfg.selector_extraction || cfg.selector_propagation;
        if (selector_on && resume && !out_dir.empty() &&
            load_selection(out_dir + "/selection.txt", fp, rep.selection)) {
            ++rep.stages_resumed;
            return 0;
        }
        rep.selection = run_selection(data, cfg);
        if (selector_on && write_artifacts && !out_dir.empty()) {
            save_selection(out_dir + "/selection.txt", rep.selection, fp);
        }
        return 0;
    });
    if (rep.selection.refined_unlabeled.empty()) {
        // selection left nothing to train on; fall back to the raw unlabeled set
        rep.selector_fallback = true;
        rep.selection.refined_unlabeled = unlabeled_idx;
    }

    ClassifierParams classifier;
    std::vector<EpochStats> history;
    stage("train", [&] {
        if (labeled_idx.empty()) {
            throw Error("no labeled positive segments in the training split");
        }
        classifier = init_classifier(data.d_eff, L, Rng::derive(cfg.seed, 13),
                                     cfg.hidden_widths);
        if (resume && !out_dir.empty() &&
            load_classifier(out_dir + "/classifier.ckpt", fp, classifier)) {
            ++rep.stages_resumed;
            return 0;
        }
        std::vector<std::vector<double>> labeled_emb, unlabeled_emb;
        for (std::size_t i : labeled_idx) labeled_emb.push_back(data.emb_train[i]);
        for (std::size_t i : rep.selection.refined_unlabeled) {
            unlabeled_emb.push_back(data.emb_train[i]);
        }
        TrainConfig tc;
        tc.learning_rate = cfg.train_lr;
        tc.batch_size = cfg.train_batch_size;
        tc.epochs = cfg.train_epochs;
        tc.seed = cfg.seed;
        tc.criterion = cfg.criterion;
        tc.segment_threshold = cfg.tau;
        tc.hidden_widths = cfg.hidden_widths;
        TrainResult tr = train(classifier, labeled_emb, unlabeled_emb, tc);
        classifier = std::move(tr.params);
        history = std::move(tr.history);
        if (write_artifacts && !out_dir.empty()) {
            save_classifier(out_dir + "/classifier.ckpt", classifier, fp);
            std::ofstream hist(out_dir + "/history.txt");
            hist << "# epoch total base smooth sep\n";
            for (std::size_t e = 0; e < history.size(); ++e) {
                hist << e << " " << fmt6(history[e].total) << " " << fmt6(history[e].base)
                     << " " << fmt6(history[e].smooth) << " " << fmt6(history[e].sep)
                     << "\n";
            }
        }
        return 0;
    });

    std::vector<SegmentPrediction> preds_train, preds_test;
    stage("predict", [&] {
        preds_train = predict_segments(classifier, data.emb_train, cfg.tau);
        preds_test = predict_segments(classifier, data.emb_test, cfg.tau);
        return 0;
    });

    // Stage 2: point detection inside predicted-positive segments.
    RankedPoints ranked;
    std::vector<int> final_column(data.t_total, 0);
    std::vector<int> no_est_column(data.t_total, 0);
    stage("pointdet", [&] {
        std::vector<PositiveSegmentRef> positives;
        for (std::size_t i = 0; i < data.train.size(); ++i) {
            if (preds_train[i].label == 1) {
                positives.push_back({data.train.segments[i].index,
                                     &data.train.segments[i], &data.emb_train[i]});
            }
        }
        for (std::size_t j = 0; j < data.test.size(); ++j) {
            if (preds_test[j].label == 1) {
                positives.push_back({data.test.segments[j].index, &data.test.segments[j],
                                     &data.emb_test[j]});
            }
        }
        if (positives.empty()) {
            rep.p_hat = 0.0;
            return 0;
        }
        std::vector<std::size_t> pos_idx;
        std::vector<std::vector<double>> scores;
        pos_idx.reserve(positives.size());
        scores.reserve(positives.size());
        for (const auto& p : positives) {
            pos_idx.push_back(p.original_index);
            if (cfg.score_source == ScoreSource::Classifier) {
                scores.push_back(forward(classifier, *p.embedding).h);
            } else if (cfg.encoder_mode == EncoderMode::Stats) {
                scores.push_back(stats_point_scores(p.segment->values));
            } else {
                scores.push_back(point_scores(*data.encoder, encode(*data.encoder,
                                                                    p.segment->values)));
            }
        }
        ranked = rank_points(pos_idx, scores, cfg.score_source);
        const std::size_t m = ranked.entries.size();

        double p_hat = cfg.pointdet_k;
        if (cfg.rate_estimator) {
            const std::size_t stride = std::max<std::size_t>(1, m / kEstimatorSampleCap);
            std::vector<std::size_t> sample;
            for (std::size_t i = 0; i < m; i += stride) sample.push_back(i);
            if (sample.size() < 3) {
                rep.estimator_fallback = true;
            } else {
                const std::vector<int> pseudo = pseudo_labels(ranked, cfg.pointdet_k);
                // per-point features from the temporal embedding model; each
                // needed segment is encoded once
                std::vector<Matrix> h_cache;
                std::vector<std::size_t> cache_keys;
                auto features_of = [&](const RankedPoint& pt) {
                    const Segment* seg = nullptr;
                    const std::vector<double>* emb = nullptr;
                    for (const auto& p : positives) {
                        if (p.original_index == pt.segment_index) {
                            seg = p.segment;
                            emb = p.embedding;
                            break;
                        }
                    }
                    (void)emb;
                    std::vector<double> feat;
                    if (cfg.encoder_mode == EncoderMode::Stats) {
                        feat.resize(seg->values.rows());
                        for (std::size_t d = 0; d < seg->values.rows(); ++d) {
                            feat[d] = seg->values(d, pt.offset);
                        }
                        return feat;
                    }
                    for (std::size_t c = 0; c < cache_keys.size(); ++c) {
                        if (cache_keys[c] == pt.segment_index) {
                            const Matrix& h = h_cache[c];
                            feat.resize(h.rows());
                            for (std::size_t r = 0; r < h.rows(); ++r) feat[r] = h(r, pt.offset);
                            return feat;
                        }
                    }
                    h_cache.push_back(encode(*data.encoder, seg->values));
                    cache_keys.push_back(pt.segment_index);
                    const Matrix& h = h_cache.back();
                    feat.resize(h.rows());
                    for (std::size_t r = 0; r < h.rows(); ++r) feat[r] = h(r, pt.offset);
                    return feat;
                };
                std::vector<std::vector<double>> feats;
                std::vector<int> sample_labels;
                feats.reserve(sample.size());
                for (std::size_t i : sample) {
                    feats.push_back(features_of(ranked.entries[i]));
                    sample_labels.push_back(pseudo[i]);
                }
                RateEstimate est = estimate_clean_rate(feats, sample_labels);
                p_hat = est.p_hat;
                rep.e0_hat = est.e0_hat;
                rep.e1_hat = est.e1_hat;
                rep.estimator_fallback = est.degenerate_fallback;
            }
        }
        rep.p_hat = p_hat;

        const std::vector<int> final_ranked = threshold_points(ranked, p_hat);
        const std::vector<int> no_est_ranked = threshold_points(ranked, cfg.pointdet_k);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& pt = ranked.entries[i];
            const std::size_t global = pt.segment_index * L + pt.offset;
            if (final_ranked[i] != 0) final_column[global] = 1;
            if (no_est_ranked[i] != 0) no_est_column[global] = 1;
        }
        return 0;
    });
    rep.point_predictions = final_column;

    stage("evaluate", [&] {
        std::vector<int> seg_truth, seg_pred;
        for (std::size_t j = 0; j < data.test.size(); ++j) {
            if (!data.test.segments[j].true_label.has_value()) {
                throw Error("test segments carry no ground-truth labels");
            }
            seg_truth.push_back(*data.test.segments[j].true_label);
            seg_pred.push_back(preds_test[j].label);
        }
        const PrfResult seg = segment_f1(seg_pred, seg_truth);
        rep.f1_segment = seg.f1;
        rep.segment_precision = seg.precision;
        rep.segment_recall = seg.recall;

        const std::size_t lo = data.train.size() * L;
        const std::size_t hi = lo + data.test.size() * L;
        std::vector<int> pred_slice(final_column.begin() + static_cast<std::ptrdiff_t>(lo),
                                    final_column.begin() + static_cast<std::ptrdiff_t>(hi));
        std::vector<int> no_est_slice(
            no_est_column.begin() + static_cast<std::ptrdiff_t>(lo),
            no_est_column.begin() + static_cast<std::ptrdiff_t>(hi));
        const std::vector<int>& truth = *data.test.point_labels;
        const PrfResult point = prf(pred_slice, truth);
        rep.f1 = point.f1;
        rep.precision = point.precision;
        rep.recall = point.recall;
        rep.f1_pa = prf(point_adjust(pred_slice, truth), truth).f1;
        rep.f1_pa_k_auc = f1_pa_k_auc(pred_slice, truth);
        rep.f1_no_estimator = prf(no_est_slice, truth).f1;
        rep.zero_division = point.zero_division || seg.zero_division;

        BoundInputs bi;
        bi.e1 = cfg.e1;
        bi.n = static_cast<long long>(data.train.size());
        bi.delta = cfg.eval_delta;
        bi.bayes_mismatch = cfg.eval_bayes_mismatch;
        rep.bound = generalization_bound(bi);
        return 0;
    });

    // report rendering; every float is fixed-format so identical runs give
    // identical bytes
    std::ostringstream out;
    out << "nrad detection report\n";
    out << "=====================\n\n";
    out << "[config]\n" << canonical_config(cfg) << "\n";
    out << "[data]\n";
    out << "t_total = " << data.t_total << "\n";
    out << "dims = " << data.train.dims << "\n";
    out << "window = " << L << "\n";
    out << "segments_total = " << rep.n_segments << "\n";
    out << "segments_train = " << rep.n_train << "\n";
    out << "segments_test = " << rep.n_test << "\n";
    std::size_t train_pos = 0;
    for (const auto& s : data.train.segments) {
        if (s.true_label && *s.true_label == 1) ++train_pos;
    }
    out << "train_positives_true = " << train_pos << "\n";
    out << "train_labeled_positives = " << rep.n_labeled << "\n";
    const std::size_t covered = rep.n_segments * L;
    out << "covered_points = " << covered << "\n";
    out << "trailing_zero_points = " << (data.t_total - covered) << "\n\n";
    out << "[selector]\n";
    out << "extraction = " << (cfg.selector_extraction ? "true" : "false") << "\n";
    out << "propagation = " << (cfg.selector_propagation ? "true" : "false") << "\n";
    out << "x_rn = " << rep.selection.reliable_negatives.size() << "\n";
    out << "x_lp = " << rep.selection.propagated_negatives.size() << "\n";
    out << "x_out = " << rep.selection.excluded.size() << "\n";
    out << "refined_unlabeled = " << rep.selection.refined_unlabeled.size() << "\n";
    out << "insufficient_warning = " << (rep.selection.insufficient_unlabeled ? 1 : 0)
        << "\n";
    out << "fallback_all_unlabeled = " << (rep.selector_fallback ? 1 : 0) << "\n\n";
    out << "[stage1]\n";
    out << "criterion = " << (cfg.criterion.mode == CriterionMode::Pu ? "pu" : "bce")
        << "\n";
    out << "epochs = " << cfg.train_epochs << "\n";
    if (!history.empty()) {
        out << "final_loss = " << fmt6(history.back().total) << "\n";
        out << "final_base = " << fmt6(history.back().base) << "\n";
        out << "final_smooth = " << fmt6(history.back().smooth) << "\n";
        out << "final_sep = " << fmt6(history.back().sep) << "\n";
    } else {
        out << "final_loss = resumed\n";
        out << "final_base = resumed\n";
        out << "final_smooth = resumed\n";
        out << "final_sep = resumed\n";
    }
    std::size_t pred_pos_train = 0, pred_pos_test = 0;
    for (const auto& p : preds_train) pred_pos_train += p.label;
    for (const auto& p : preds_test) pred_pos_test += p.label;
    out << "segment_threshold = " << fmt6(cfg.tau) << "\n";
    out << "predicted_positive_train = " << pred_pos_train << "\n";
    out << "predicted_positive_test = " << pred_pos_test << "\n\n";
    out << "[stage2]\n";
    out << "score_source = "
        << (cfg.score_source == ScoreSource::Classifier ? "classifier" : "encoder")
        << "\n";
    out << "ranked_points = " << ranked.entries.size() << "\n";
    out << "pseudo_k = " << fmt6(cfg.pointdet_k) << "\n";
    out << "estimator = " << (cfg.rate_estimator ? "true" : "false") << "\n";
    out << "p_hat = " << fmt6(rep.p_hat) << "\n";
    out << "e0_hat = " << fmt6(rep.e0_hat) << "\n";
    out << "e1_hat = " << fmt6(rep.e1_hat) << "\n";
    out << "estimator_fallback = " << (rep.estimator_fallback ? 1 : 0) << "\n\n";
    out << "[metrics]\n";
    out << "f1 = " << fmt6(rep.f1) << "\n";
    out << "precision = " << fmt6(rep.precision) << "\n";
    out << "recall = " << fmt6(rep.recall) << "\n";
    out << "f1_pa = " << fmt6(rep.f1_pa) << "\n";
    out << "f1_pa_k_auc = " << fmt6(rep.f1_pa_k_auc) << "\n";
    out << "f1_segment = " << fmt6(rep.f1_segment) << "\n";
    out << "segment_precision = " << fmt6(rep.segment_precision) << "\n";
    out << "segment_recall = " << fmt6(rep.segment_recall) << "\n";
    out << "f1_no_estimator = " << fmt6(rep.f1_no_estimator) << "\n";
    out << "bound = " << fmt6(rep.bound) << "\n";
    out << "zero_division = " << (rep.zero_division ? 1 : 0) << "\n";
    out << "aff_p =\n";
    out << "aff_r =\n";
    out << "r_a_r =\n";
    out << "r_a_p =\n";
    out << "v_roc =\n";
    out << "v_pr =\n\n";
    out << "[summary]\n";
    out << "point  F1 " << fmt6(rep.f1) << " | P " << fmt6(rep.precision) << " | R "
        << fmt6(rep.recall) << "\n";
    out << "point  F1-PA " << fmt6(rep.f1_pa) << " | PA%K-AUC " << fmt6(rep.f1_pa_k_auc)
        << "\n";
    out << "segment F1 " << fmt6(rep.f1_segment) << " | bound " << fmt6(rep.bound)
        << "\n";
    rep.text = out.str();

    if (write_artifacts && !out_dir.empty()) {
        std::ofstream rf(out_dir + "/report.txt");
        rf << rep.text;
        write_binary_column(rep.point_predictions, out_dir + "/point_predictions.txt");
    }
    return rep;
}

DetectionReport run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                             bool resume) {
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
    }
    PipelineData data = prepare_data(cfg, out_dir, resume);
    return run_stages(data, cfg, out_dir, resume, /*write_artifacts=*/true);
}

std::string run_ablation(const PipelineConfig& cfg, const std::vector<std::string>& toggles,
                         const std::string& out_dir) {
    static const std::vector<std::string> known = {"extraction", "propagation", "pu_loss",
                                                   "tc_loss", "rate_estimator"};
    for (const auto& t : toggles) {
        if (std::find(known.begin(), known.end(), t) == known.end()) {
            throw ConfigError("unknown ablation toggle '" + t + "'");
        }
    }
    // keep canonical order, drop duplicates
    std::vector<std::string> axes;
    for (const auto& k : known) {
        if (std::find(toggles.begin(), toggles.end(), k) != toggles.end()) {
            axes.push_back(k);
        }
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
    }
    PipelineData data = prepare_data(cfg, out_dir, /*resume=*/false);

    std::ostringstream out;
    out << "nrad ablation report\n";
    out << "====================\n\n";
    out << "[config]\n" << canonical_config(cfg) << "\n";
    out << "[rows]\n";
    const std::size_t n_rows = std::size_t{1} << axes.size();
    for (std::size_t mask = 0; mask < n_rows; ++mask) {
        PipelineConfig row = cfg;
        std::string label;
        for (std::size_t j = 0; j < axes.size(); ++j) {
            const bool on = (mask >> j) & 1;
            if (!label.empty()) label += " ";
            label += axes[j] + "=" + (on ? "1" : "0");
            if (axes[j] == "extraction") {
                row.selector_extraction = on;
            } else if (axes[j] == "propagation") {
                row.selector_propagation = on;
            } else if (axes[j] == "pu_loss") {
                row.criterion.mode = on ? CriterionMode::Pu : CriterionMode::Bce;
            } else if (axes[j] == "tc_loss") {
                row.criterion.lambda =
                    on ? (cfg.criterion.lambda != 0.0 ? cfg.criterion.lambda : 1.0) : 0.0;
            } else if (axes[j] == "rate_estimator") {
                row.rate_estimator = on;
            }
        }
        if (label.empty()) label = "baseline";
        DetectionReport rep = run_stages(data, row, "", /*resume=*/false,
                                         /*write_artifacts=*/false);
        out << label << " | f1_w = " << fmt6(rep.f1_segment)
            << " | f1_d_wo_est = " << fmt6(rep.f1_no_estimator)
            << " | f1_d = " << fmt6(rep.f1) << "\n";
    }
    const std::string text = out.str();
    if (!out_dir.empty()) {
        std::ofstream f(out_dir + "/ablation.txt");
        f << text;
    }
    return text;
}

EvalReport eval_only(const std::string& predictions_path, const std::string& truth_path) {
    const std::vector<int> pred = read_binary_column(predictions_path);
    const std::vector<int> truth = read_binary_column(truth_path);
    if (pred.size() != truth.size()) {
        throw LengthMismatch("eval: prediction column length " +
                             std::to_string(pred.size()) + " vs truth column length " +
                             std::to_string(truth.size()));
    }
    EvalReport rep;
    rep.point = prf(pred, truth);
    rep.f1_pa = prf(point_adjust(pred, truth), truth).f1;
    rep.f1_pa_k_auc = f1_pa_k_auc(pred, truth);
    std::ostringstream out;
    out << "nrad eval report\n";
    out << "================\n\n";
    out << "[metrics]\n";
    out << "f1 = " << fmt6(rep.point.f1) << "\n";
    out << "precision = " << fmt6(rep.point.precision) << "\n";
    out << "recall = " << fmt6(rep.point.recall) << "\n";
    out << "f1_pa = " << fmt6(rep.f1_pa) << "\n";
    out << "f1_pa_k_auc = " << fmt6(rep.f1_pa_k_auc) << "\n";
    out << "f1_segment =\n";
    out << "bound =\n";
    out << "zero_division = " << (rep.point.zero_division ? 1 : 0) << "\n";
    out << "aff_p =\n";
    out << "aff_r =\n";
    out << "r_a_r =\n";
    out << "r_a_p =\n";
    out << "v_roc =\n";
    out << "v_pr =\n";
    rep.text = out.str();
    return rep;
}

}  // namespace nrad
