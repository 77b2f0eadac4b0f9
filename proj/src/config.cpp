#include "nrad/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nrad/common.hpp"
#include "nrad/errors.hpp"

namespace nrad {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
    }
    return v;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v < 0 || v != std::floor(v)) {
        throw ConfigError("config key '" + key + "': not a non-negative integer: '" +
                          value + "'");
    }
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false: '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::string kind_name(AnomalyKind k) {
    switch (k) {
        case AnomalyKind::Spike: return "spike";
        case AnomalyKind::LevelShift: return "level_shift";
        case AnomalyKind::FrequencyChange: return "frequency_change";
    }
    return "spike";
}

AnomalyKind parse_kind(const std::string& key, const std::string& v) {
    if (v == "spike") return AnomalyKind::Spike;
    if (v == "level_shift") return AnomalyKind::LevelShift;
    if (v == "frequency_change") return AnomalyKind::FrequencyChange;
    throw ConfigError("config key '" + key + "': unknown anomaly kind '" + v + "'");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

PipelineConfig default_config() { return PipelineConfig{}; }

void apply_profile(PipelineConfig& cfg, const std::string& name) {
    cfg.profile = name;
    if (name == "emg") {
        cfg.criterion.pi_p = 0.25;
        cfg.pointdet_k = 0.65;
    } else if (name == "smd") {
        cfg.criterion.pi_p = 0.8;
        cfg.pointdet_k = 0.15;
    } else if (name == "psm") {
        cfg.criterion.pi_p = 0.4;
        cfg.pointdet_k = 0.6;
    } else if (name == "msl") {
        cfg.criterion.pi_p = 0.5;
        cfg.pointdet_k = 0.8;
    } else if (name == "smap") {
        cfg.criterion.pi_p = 0.5;
        cfg.pointdet_k = 0.9;
    } else if (name == "synth") {
        // bundled synthetic benchmark
        cfg.source = DataSource::Synth;
        cfg.synth = SynthConfig{};
        cfg.e1 = 0.6;
        cfg.criterion.pi_p = 0.3;
        cfg.pointdet_k = 0.5;
        cfg.encoder.epochs = 4;
        cfg.train_epochs = 60;
    } else {
        throw ConfigError("unknown profile '" + name + "'");
    }
}

void apply_kv(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(std::strtoull(value.c_str(), nullptr, 10));
    } else if (key == "profile") {
        apply_profile(cfg, value);
    } else if (key == "data.source") {
        if (value == "synth") cfg.source = DataSource::Synth;
        else if (value == "csv") cfg.source = DataSource::Csv;
        else throw ConfigError("data.source must be synth or csv");
    } else if (key == "data.csv_path") {
        cfg.csv_path = value;
    } else if (key == "data.has_labels") {
        cfg.has_labels = parse_bool(key, value);
    } else if (key == "data.norm_scope") {
        if (value == "full") cfg.norm_scope = NormScope::Full;
        else if (value == "train") cfg.norm_scope = NormScope::Train;
        else if (value == "none") cfg.norm_scope = NormScope::None;
        else throw ConfigError("data.norm_scope must be full, train or none");
    } else if (key == "data.window") {
        cfg.window = parse_size(key, value);
    } else if (key == "data.train_fraction") {
        cfg.train_fraction = parse_double(key, value);
    } else if (key == "data.e1") {
        cfg.e1 = parse_double(key, value);
    } else if (key == "synth.dims") {
        cfg.synth.dims = parse_size(key, value);
    } else if (key == "synth.t_total") {
        cfg.synth.t_total = parse_size(key, value);
    } else if (key == "synth.rate") {
        cfg.synth.anomaly_rate = parse_double(key, value);
    } else if (key == "synth.kinds") {
        cfg.synth.kinds.clear();
        for (const auto& item : split_list(value)) {
            cfg.synth.kinds.push_back(parse_kind(key, item));
        }
    } else if (key == "synth.magnitude") {
        cfg.synth.anomaly_magnitude = parse_double(key, value);
    } else if (key == "synth.noise_scale") {
        cfg.synth.noise_scale = parse_double(key, value);
    } else if (key == "synth.min_interval") {
        cfg.synth.min_interval = parse_size(key, value);
    } else if (key == "synth.max_interval") {
        cfg.synth.max_interval = parse_size(key, value);
    } else if (key == "encoder.mode") {
        if (value == "dicnn") cfg.encoder_mode = EncoderMode::Dicnn;
        else if (value == "random") cfg.encoder_mode = EncoderMode::DicnnRandom;
        else if (value == "stats") cfg.encoder_mode = EncoderMode::Stats;
        else throw ConfigError("encoder.mode must be dicnn, random or stats");
    } else if (key == "encoder.layers") {
        cfg.encoder.n_layers = parse_size(key, value);
    } else if (key == "encoder.kernel") {
        cfg.encoder.kernel = parse_size(key, value);
    } else if (key == "encoder.hidden") {
        cfg.encoder.hidden_channels = parse_size(key, value);
    } else if (key == "encoder.d") {
        cfg.encoder.d = parse_size(key, value);
    } else if (key == "encoder.epochs") {
        cfg.encoder.epochs = parse_size(key, value);
    } else if (key == "encoder.lr") {
        cfg.encoder.learning_rate = parse_double(key, value);
    } else if (key == "encoder.batch_size") {
        cfg.encoder.batch_size = parse_size(key, value);
    } else if (key == "selector.extraction") {
        cfg.selector_extraction = parse_bool(key, value);
    } else if (key == "selector.propagation") {
        cfg.selector_propagation = parse_bool(key, value);
    } else if (key == "selector.k") {
        cfg.knn_k = parse_size(key, value);
    } else if (key == "selector.beta") {
        cfg.katz_beta = parse_double(key, value);
    } else if (key == "selector.l_max") {
        cfg.katz_l_max = parse_size(key, value);
    } else if (key == "selector.closed_form") {
        cfg.katz_closed_form = parse_bool(key, value);
    } else if (key == "selector.m") {
        cfg.selector_m = parse_size(key, value);
    } else if (key == "selector.lambda0") {
        cfg.selector_lambda0 = parse_double(key, value);
    } else if (key == "selector.margin") {
        cfg.selector_margin = parse_double(key, value);
    } else if (key == "selector.clamp_rn") {
        cfg.selector_clamp_rn = parse_bool(key, value);
    } else if (key == "selector.max_iter") {
        cfg.prop_max_iter = parse_size(key, value);
    } else if (key == "selector.tol") {
        cfg.prop_tol = parse_double(key, value);
    } else if (key == "criterion.mode") {
        if (value == "pu") cfg.criterion.mode = CriterionMode::Pu;
        else if (value == "bce") cfg.criterion.mode = CriterionMode::Bce;
        else throw ConfigError("criterion.mode must be pu or bce");
    } else if (key == "criterion.pi_p") {
        cfg.criterion.pi_p = parse_double(key, value);
    } else if (key == "criterion.lambda") {
        cfg.criterion.lambda = parse_double(key, value);
    } else if (key == "criterion.lambda1") {
        cfg.criterion.lambda1 = parse_double(key, value);
    } else if (key == "criterion.lambda2") {
        cfg.criterion.lambda2 = parse_double(key, value);
    } else if (key == "train.lr") {
        cfg.train_lr = parse_double(key, value);
    } else if (key == "train.batch_size") {
        cfg.train_batch_size = parse_size(key, value);
    } else if (key == "train.epochs") {
        cfg.train_epochs = parse_size(key, value);
    } else if (key == "train.tau") {
        cfg.tau = parse_double(key, value);
    } else if (key == "train.widths") {
        cfg.hidden_widths.clear();
        for (const auto& item : split_list(value)) {
            cfg.hidden_widths.push_back(parse_size(key, item));
        }
        if (cfg.hidden_widths.size() != 4) {
            throw ConfigError("train.widths: six layers need exactly four hidden widths");
        }
    } else if (key == "pointdet.k") {
        cfg.pointdet_k = parse_double(key, value);
    } else if (key == "pointdet.score_source") {
        if (value == "classifier") cfg.score_source = ScoreSource::Classifier;
        else if (value == "encoder") cfg.score_source = ScoreSource::Encoder;
        else throw ConfigError("pointdet.score_source must be classifier or encoder");
    } else if (key == "pointdet.estimator") {
        cfg.rate_estimator = parse_bool(key, value);
    } else if (key == "eval.delta") {
        cfg.eval_delta = parse_double(key, value);
    } else if (key == "eval.bayes_mismatch") {
        cfg.eval_bayes_mismatch = parse_double(key, value);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

PipelineConfig load_config(const std::string& path, const std::string& profile_flag,
                           const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::vector<std::pair<std::string, std::string>> file_kv;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file: " + path);
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            const std::size_t eq = t.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": expected key = value");
            }
            file_kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        }
    }
    PipelineConfig cfg = default_config();
    // profile first (flag wins over file), then file keys, then flag overrides
    std::string profile = profile_flag;
    if (profile.empty()) {
        for (const auto& [k, v] : file_kv) {
            if (k == "profile") profile = v;
        }
    }
    if (!profile.empty()) apply_profile(cfg, profile);
    for (const auto& [k, v] : file_kv) {
        if (k == "profile") continue;
        apply_kv(cfg, k, v);
    }
    for (const auto& [k, v] : overrides) {
        if (k == "profile") continue;
        apply_kv(cfg, k, v);
    }
    return cfg;
}

PipelineConfig make_config(const std::string& profile_flag,
                           const std::vector<std::pair<std::string, std::string>>& overrides) {
    return load_config("", profile_flag, overrides);
}

std::string canonical_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "seed = " << cfg.seed << "\n";
    out << "profile = " << cfg.profile << "\n";
    out << "data.source = " << (cfg.source == DataSource::Synth ? "synth" : "csv") << "\n";
    out << "data.csv_path = " << cfg.csv_path << "\n";
    out << "data.has_labels = " << (cfg.has_labels ? "true" : "false") << "\n";
    out << "data.norm_scope = "
        << (cfg.norm_scope == NormScope::Full
                ? "full"
                : cfg.norm_scope == NormScope::Train ? "train" : "none")
        << "\n";
    out << "data.window = " << cfg.window << "\n";
    out << "data.train_fraction = " << fmt_double(cfg.train_fraction) << "\n";
    out << "data.e1 = " << fmt_double(cfg.e1) << "\n";
    out << "synth.dims = " << cfg.synth.dims << "\n";
    out << "synth.t_total = " << cfg.synth.t_total << "\n";
    out << "synth.rate = " << fmt_double(cfg.synth.anomaly_rate) << "\n";
    out << "synth.kinds = ";
    for (std::size_t i = 0; i < cfg.synth.kinds.size(); ++i) {
        if (i > 0) out << ",";
        out << kind_name(cfg.synth.kinds[i]);
    }
    out << "\n";
    out << "synth.magnitude = " << fmt_double(cfg.synth.anomaly_magnitude) << "\n";
    out << "synth.noise_scale = " << fmt_double(cfg.synth.noise_scale) << "\n";
    out << "synth.min_interval = " << cfg.synth.min_interval << "\n";
    out << "synth.max_interval = " << cfg.synth.max_interval << "\n";
    out << "encoder.mode = "
        << (cfg.encoder_mode == EncoderMode::Dicnn
                ? "dicnn"
                : cfg.encoder_mode == EncoderMode::DicnnRandom ? "random" : "stats")
        << "\n";
    out << "encoder.layers = " << cfg.encoder.n_layers << "\n";
    out << "encoder.kernel = " << cfg.encoder.kernel << "\n";
    out << "encoder.hidden = " << cfg.encoder.hidden_channels << "\n";
    out << "encoder.d = " << cfg.encoder.d << "\n";
    out << "encoder.epochs = " << cfg.encoder.epochs << "\n";
    out << "encoder.lr = " << fmt_double(cfg.encoder.learning_rate) << "\n";
    out << "encoder.batch_size = " << cfg.encoder.batch_size << "\n";
    out << "selector.extraction = " << (cfg.selector_extraction ? "true" : "false") << "\n";
    out << "selector.propagation = " << (cfg.selector_propagation ? "true" : "false")
        << "\n";
    out << "selector.k = " << cfg.knn_k << "\n";
    out << "selector.beta = " << fmt_double(cfg.katz_beta) << "\n";
    out << "selector.l_max = " << cfg.katz_l_max << "\n";
    out << "selector.closed_form = " << (cfg.katz_closed_form ? "true" : "false") << "\n";
    out << "selector.m = " << cfg.selector_m << "\n";
    out << "selector.lambda0 = " << fmt_double(cfg.selector_lambda0) << "\n";
    out << "selector.margin = " << fmt_double(cfg.selector_margin) << "\n";
    out << "selector.clamp_rn = " << (cfg.selector_clamp_rn ? "true" : "false") << "\n";
    out << "selector.max_iter = " << cfg.prop_max_iter << "\n";
    out << "selector.tol = " << fmt_double(cfg.prop_tol) << "\n";
    out << "criterion.mode = " << (cfg.criterion.mode == CriterionMode::Pu ? "pu" : "bce")
        << "\n";
    out << "criterion.pi_p = " << fmt_double(cfg.criterion.pi_p) << "\n";
    out << "criterion.lambda = " << fmt_double(cfg.criterion.lambda) << "\n";
    out << "criterion.lambda1 = " << fmt_double(cfg.criterion.lambda1) << "\n";
    out << "criterion.lambda2 = " << fmt_double(cfg.criterion.lambda2) << "\n";
    out << "train.lr = " << fmt_double(cfg.train_lr) << "\n";
    out << "train.batch_size = " << cfg.train_batch_size << "\n";
    out << "train.epochs = " << cfg.train_epochs << "\n";
    out << "train.tau = " << fmt_double(cfg.tau) << "\n";
    out << "train.widths = ";
    for (std::size_t i = 0; i < cfg.hidden_widths.size(); ++i) {
        if (i > 0) out << ",";
        out << cfg.hidden_widths[i];
    }
    out << "\n";
    out << "pointdet.k = " << fmt_double(cfg.pointdet_k) << "\n";
    out << "pointdet.score_source = "
        << (cfg.score_source == ScoreSource::Classifier ? "classifier" : "encoder") << "\n";
    out << "pointdet.estimator = " << (cfg.rate_estimator ? "true" : "false") << "\n";
    out << "eval.delta = " << fmt_double(cfg.eval_delta) << "\n";
    out << "eval.bayes_mismatch = " << fmt_double(cfg.eval_bayes_mismatch) << "\n";
    return out.str();
}

std::uint64_t config_fingerprint(const PipelineConfig& cfg) {
    return fnv1a(canonical_config(cfg));
}

}  // namespace nrad
