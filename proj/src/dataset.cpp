#include "nrad/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nrad/common.hpp"
#include "nrad/errors.hpp"
#include "nrad/rng.hpp"

namespace nrad {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

bool looks_like_header(const std::vector<std::string>& fields) {
    double tmp;
    for (const auto& f : fields) {
        if (!parse_double(f, tmp)) return true;
    }
    return false;
}

}  // namespace

void zscore_normalize(TimeSeriesDataset& ds, double stats_fraction) {
    const std::size_t t_total = ds.length();
    std::size_t t_stats = static_cast<std::size_t>(
        round_half_up(stats_fraction * static_cast<double>(t_total)));
    t_stats = std::min(std::max<std::size_t>(t_stats, 1), t_total);
    for (std::size_t d = 0; d < ds.dims(); ++d) {
        double mean = 0.0;
        for (std::size_t t = 0; t < t_stats; ++t) mean += ds.values(d, t);
        mean /= static_cast<double>(t_stats);
        double var = 0.0;
        for (std::size_t t = 0; t < t_stats; ++t) {
            const double dv = ds.values(d, t) - mean;
            var += dv * dv;
        }
        var /= static_cast<double>(t_stats);
        const double sd = std::sqrt(var);
        if (sd == 0.0) {
            // zero-variance dimension maps to all zeros
            for (std::size_t t = 0; t < t_total; ++t) ds.values(d, t) = 0.0;
        } else {
            for (std::size_t t = 0; t < t_total; ++t) {
                ds.values(d, t) = (ds.values(d, t) - mean) / sd;
            }
        }
    }
}

TimeSeriesDataset load_csv(const std::string& path, bool has_labels,
                           NormScope scope, double train_fraction) {
    std::ifstream in(path);
    if (!in) {
        throw EmptyFile("cannot open csv file: " + path);
    }
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    std::size_t arity = 0;
    bool first_data_row = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        auto fields = split_fields(line);
        if (first_data_row && looks_like_header(fields)) {
            continue;  // optional header
        }
        if (first_data_row) {
            arity = fields.size();
            first_data_row = false;
        } else if (fields.size() != arity) {
            throw MalformedRow("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(arity) + " fields, got " +
                               std::to_string(fields.size()));
        }
        std::vector<double> vals;
        vals.reserve(fields.size());
        for (const auto& f : fields) {
            double v;
            if (!parse_double(f, v)) {
                throw MalformedRow("line " + std::to_string(line_no) +
                                   ": non-numeric field '" + f + "'");
            }
            vals.push_back(v);
        }
        if (has_labels) {
            const double lv = vals.back();
            vals.pop_back();
            if (lv != 0.0 && lv != 1.0) {
                throw MalformedRow("line " + std::to_string(line_no) +
                                   ": label must be 0 or 1");
            }
            labels.push_back(static_cast<int>(lv));
        }
        if (vals.empty()) {
            throw MalformedRow("line " + std::to_string(line_no) + ": no value fields");
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) {
        throw EmptyFile("no data rows in " + path);
    }
    const std::size_t dims = rows[0].size();
    TimeSeriesDataset ds;
    ds.values = Matrix(dims, rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t d = 0; d < dims; ++d) ds.values(d, t) = rows[t][d];
    }
    if (has_labels) ds.point_labels = std::move(labels);
    ds.name = path;
    if (scope == NormScope::Full) {
        zscore_normalize(ds, 1.0);
    } else if (scope == NormScope::Train) {
        zscore_normalize(ds, train_fraction);
    }
    return ds;
}

void write_csv(const TimeSeriesDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open csv file for writing: " + path);
    }
    char buf[64];
    for (std::size_t t = 0; t < ds.length(); ++t) {
        std::string line;
        for (std::size_t d = 0; d < ds.dims(); ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.values(d, t));
            if (d > 0) line.push_back(',');
            line += buf;
        }
        if (ds.point_labels) {
            line.push_back(',');
            line += std::to_string((*ds.point_labels)[t]);
        }
        line.push_back('\n');
        out << line;
    }
}

SegmentCollection window(const TimeSeriesDataset& ds, std::size_t segment_length) {
    if (segment_length < 2) {
        throw Error("window: segment length must be >= 2");
    }
    if (ds.length() < segment_length) {
        throw TooShort("window: series length " + std::to_string(ds.length()) +
                       " is shorter than segment length " + std::to_string(segment_length));
    }
    const std::size_t n = ds.length() / segment_length;  // trailing remainder dropped
    SegmentCollection col;
    col.segment_length = segment_length;
    col.dims = ds.dims();
    col.name = ds.name;
    col.segments.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Segment seg;
        seg.index = i;
        seg.values = Matrix(ds.dims(), segment_length);
        const std::size_t start = i * segment_length;
        for (std::size_t d = 0; d < ds.dims(); ++d) {
            for (std::size_t t = 0; t < segment_length; ++t) {
                seg.values(d, t) = ds.values(d, start + t);
            }
        }
        if (ds.point_labels) {
            int lab = 0;  // positive iff at least one contained point is anomalous
            for (std::size_t t = start; t < start + segment_length; ++t) {
                if ((*ds.point_labels)[t] == 1) {
                    lab = 1;
                    break;
                }
            }
            seg.true_label = lab;
        }
        col.segments.push_back(std::move(seg));
    }
    if (ds.point_labels) {
        col.point_labels = std::vector<int>(ds.point_labels->begin(),
                                            ds.point_labels->begin() +
                                                static_cast<std::ptrdiff_t>(n * segment_length));
    }
    return col;
}

std::pair<SegmentCollection, SegmentCollection> split_segments(
    const SegmentCollection& all, double train_fraction) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0) {
        throw Error("split_segments: fraction must be in (0,1)");
    }
    const std::size_t n = all.size();
    std::size_t n_train = static_cast<std::size_t>(
        round_half_up(train_fraction * static_cast<double>(n)));
    n_train = std::min(std::max<std::size_t>(n_train, 1), n - 1);

    SegmentCollection train, test;
    train.segment_length = test.segment_length = all.segment_length;
    train.dims = test.dims = all.dims;
    train.name = all.name + ":train";
    test.name = all.name + ":test";
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train) {
            train.segments.push_back(all.segments[i]);
        } else {
            test.segments.push_back(all.segments[i]);
        }
    }
    if (all.point_labels) {
        const std::size_t cut = n_train * all.segment_length;
        train.point_labels = std::vector<int>(all.point_labels->begin(),
                                              all.point_labels->begin() +
                                                  static_cast<std::ptrdiff_t>(cut));
        test.point_labels = std::vector<int>(all.point_labels->begin() +
                                                 static_cast<std::ptrdiff_t>(cut),
                                             all.point_labels->end());
    }
    return {std::move(train), std::move(test)};
}

SegmentCollection inject_pu_noise(const SegmentCollection& segments, const NoiseSpec& spec) {
    if (spec.e1 < 0.0 || spec.e1 >= 1.0) {
        throw InvalidRate("inject_pu_noise: e1 must be in [0,1)");
    }
    std::vector<std::size_t> positive_idx;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!segments.segments[i].true_label.has_value()) {
            throw Error("inject_pu_noise: segment " + std::to_string(i) +
                        " has no ground-truth label");
        }
        if (*segments.segments[i].true_label == 1) positive_idx.push_back(i);
    }
    if (positive_idx.empty()) {
        throw NoPositives("inject_pu_noise: collection has no positive segments");
    }
    const std::size_t n_keep = static_cast<std::size_t>(
        round_half_up((1.0 - spec.e1) * static_cast<double>(positive_idx.size())));
    Rng rng(spec.seed);
    rng.shuffle(positive_idx);

    SegmentCollection out = segments;
    for (auto& seg : out.segments) seg.pu_label = PuLabel::Unlabeled;
    for (std::size_t i = 0; i < n_keep; ++i) {
        out.segments[positive_idx[i]].pu_label = PuLabel::LabeledPositive;
    }
    return out;
}

SynthResult synth_generate(const SynthConfig& config) {
    if (config.anomaly_rate < 0.0 || config.anomaly_rate >= 1.0) {
        throw InvalidRate("synth_generate: anomaly rate must be in [0,1)");
    }
    if (config.dims < 1 || config.t_total < 1) {
        throw Error("synth_generate: dims and t_total must be >= 1");
    }
    if (config.anomaly_rate > 0.0 && config.kinds.empty()) {
        throw Error("synth_generate: anomaly kinds must be nonempty when rate > 0");
    }
    Rng rng(config.seed);
    const std::size_t D = config.dims;
    const std::size_t T = config.t_total;

    // Base: per-dimension sinusoid plus AR(1) noise.
    std::vector<double> freq(D), phase(D), amp(D), ar(D);
    for (std::size_t d = 0; d < D; ++d) {
        freq[d] = rng.uniform(0.02, 0.12);
        phase[d] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        amp[d] = config.base_amplitude * rng.uniform(0.6, 1.4);
        ar[d] = rng.uniform(0.4, 0.8);
    }
    TimeSeriesDataset ds;
    ds.values = Matrix(D, T);
    ds.name = "synth";
    for (std::size_t d = 0; d < D; ++d) {
        double noise = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            noise = ar[d] * noise + config.noise_scale * rng.normal();
            ds.values(d, t) =
                amp[d] * std::sin(freq[d] * static_cast<double>(t) + phase[d]) + noise;
        }
    }

    // Plant non-overlapping anomaly intervals until the realized point rate
    // is within 10% relative of the target.
    std::vector<int> labels(T, 0);
    std::vector<AnomalyInterval> intervals;
    const std::size_t target_points = static_cast<std::size_t>(
        round_half_up(config.anomaly_rate * static_cast<double>(T)));
    std::size_t planted = 0;
    int attempts = 0;
    const int max_attempts = static_cast<int>(T) * 4;
    while (planted < target_points && attempts < max_attempts) {
        ++attempts;
        std::size_t len = config.min_interval +
                          rng.uniform_int(config.max_interval - config.min_interval + 1);
        if (planted + len > target_points + target_points / 10) {
            const std::size_t remain = target_points - planted;
            if (remain < config.min_interval) break;
            len = remain;
        }
        if (len >= T) continue;
        const std::size_t start = rng.uniform_int(T - len);
        bool clash = false;
        // one-point gap so intervals stay maximal runs
        const std::size_t lo = start > 0 ? start - 1 : 0;
        const std::size_t hi = std::min(T, start + len + 1);
        for (std::size_t t = lo; t < hi; ++t) {
            if (labels[t] == 1) {
                clash = true;
                break;
            }
        }
        if (clash) continue;
        const AnomalyKind kind = config.kinds[rng.uniform_int(config.kinds.size())];
        // each anomaly hits a random subset of dimensions (at least one)
        std::vector<std::size_t> hit;
        for (std::size_t d = 0; d < D; ++d) {
            if (rng.uniform() < 0.5) hit.push_back(d);
        }
        if (hit.empty()) hit.push_back(rng.uniform_int(D));
        const double mag = config.anomaly_magnitude * rng.uniform(0.8, 1.6);
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        for (std::size_t d : hit) {
            switch (kind) {
                case AnomalyKind::Spike:
                    for (std::size_t t = start; t < start + len; ++t) {
                        if (rng.uniform() < 0.35) {
                            ds.values(d, t) += (rng.uniform() < 0.5 ? -1.0 : 1.0) * 2.0 * mag;
                        } else {
                            ds.values(d, t) += sign * 0.3 * mag;
                        }
                    }
                    break;
                case AnomalyKind::LevelShift:
                    for (std::size_t t = start; t < start + len; ++t) {
                        ds.values(d, t) += sign * mag;
                    }
                    break;
                case AnomalyKind::FrequencyChange:
                    for (std::size_t t = start; t < start + len; ++t) {
                        const double local = static_cast<double>(t - start);
                        ds.values(d, t) =
                            amp[d] * std::sin(freq[d] * 6.0 * local + phase[d]) +
                            sign * 0.2 * mag;
                    }
                    break;
            }
        }
        for (std::size_t t = start; t < start + len; ++t) labels[t] = 1;
        intervals.push_back({start, start + len, kind});
        planted += len;
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const AnomalyInterval& a, const AnomalyInterval& b) {
                  return a.start < b.start;
              });
    ds.point_labels = std::move(labels);
    return {std::move(ds), std::move(intervals)};
}

}  // namespace nrad
