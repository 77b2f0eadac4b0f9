#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "nrad/dataset.hpp"
#include "nrad/errors.hpp"
#include "nrad/rng.hpp"

using namespace nrad;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

TimeSeriesDataset labeled_series(std::size_t t, const std::vector<int>& pos_points) {
    TimeSeriesDataset ds;
    ds.values = Matrix(2, t);
    std::vector<int> labels(t, 0);
    for (std::size_t i = 0; i < t; ++i) {
        ds.values(0, i) = std::sin(0.1 * static_cast<double>(i));
        ds.values(1, i) = static_cast<double>(i % 7);
    }
    for (int p : pos_points) labels[static_cast<std::size_t>(p)] = 1;
    ds.point_labels = labels;
    return ds;
}

}  // namespace

TEST_CASE("load_csv parses rows and labels") {
    const auto path = write_temp("nrad_t1.csv", "1.0,2.0,0\n3.0,4.0,1\n5.0,6.0,0\n");
    auto ds = load_csv(path, true, NormScope::None);
    CHECK(ds.length() == 3);
    CHECK(ds.dims() == 2);
    REQUIRE(ds.point_labels.has_value());
    CHECK(*ds.point_labels == std::vector<int>{0, 1, 0});
    CHECK(ds.values(0, 1) == 3.0);
}

TEST_CASE("load_csv z-scores per dimension, constant dims become zero") {
    const auto path = write_temp("nrad_t2.csv", "1.0,5.0\n2.0,5.0\n3.0,5.0\n");
    auto ds = load_csv(path, false, NormScope::Full);
    double mean = 0.0;
    for (std::size_t t = 0; t < 3; ++t) mean += ds.values(0, t);
    CHECK(mean == doctest::Approx(0.0));
    for (std::size_t t = 0; t < 3; ++t) CHECK(ds.values(1, t) == 0.0);
}

TEST_CASE("load_csv errors") {
    const auto bad = write_temp("nrad_t3.csv", "1.0,2.0,0\n3.0,1\n");
    CHECK_THROWS_WITH_AS(load_csv(bad, true, NormScope::None),
                         doctest::Contains("line 2"), MalformedRow);
    const auto nonnum = write_temp("nrad_t4.csv", "1.0,2.0\n3.0,oops\n");
    CHECK_THROWS_AS(load_csv(nonnum, false, NormScope::None), MalformedRow);
    const auto empty = write_temp("nrad_t5.csv", "");
    CHECK_THROWS_AS(load_csv(empty, false, NormScope::None), EmptyFile);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", false, NormScope::None), EmptyFile);
}

TEST_CASE("load_csv skips an optional header") {
    const auto path = write_temp("nrad_t6.csv", "a,b,label\n1.0,2.0,1\n");
    auto ds = load_csv(path, true, NormScope::None);
    CHECK(ds.length() == 1);
    CHECK((*ds.point_labels)[0] == 1);
}

TEST_CASE("window drops the trailing remainder") {
    auto ds = labeled_series(250, {120});
    auto col = window(ds, 100);
    CHECK(col.size() == 2);
    CHECK(col.segment_length == 100);
    CHECK(*col.segments[0].true_label == 0);
    CHECK(*col.segments[1].true_label == 1);  // at-least-one rule
    REQUIRE(col.point_labels.has_value());
    CHECK(col.point_labels->size() == 200);
}

TEST_CASE("window covers the prefix exactly") {
    auto ds = labeled_series(333, {});
    auto col = window(ds, 100);
    REQUIRE(col.size() == 3);
    for (std::size_t i = 0; i < col.size(); ++i) {
        for (std::size_t d = 0; d < 2; ++d) {
            for (std::size_t t = 0; t < 100; ++t) {
                CHECK(col.segments[i].values(d, t) == ds.values(d, i * 100 + t));
            }
        }
    }
}

TEST_CASE("window rejects bad lengths") {
    auto ds = labeled_series(50, {});
    CHECK_THROWS_AS(window(ds, 100), TooShort);
    CHECK_THROWS_AS(window(ds, 1), Error);
}

TEST_CASE("split keeps order at the 7:3 ratio") {
    auto ds = labeled_series(1000, {});
    auto col = window(ds, 100);
    auto [train, test] = split_segments(col, 0.7);
    CHECK(train.size() == 7);
    CHECK(test.size() == 3);
    CHECK(train.segments[0].index == 0);
    CHECK(test.segments[0].index == 7);
}

TEST_CASE("inject_pu_noise keeps the exact labeled count") {
    auto ds = labeled_series(1000, {5, 105, 205, 305, 405, 505, 605, 705, 805, 905});
    auto col = window(ds, 100);  // all 10 segments positive
    for (double e1 : {0.0, 0.2, 0.4, 0.6}) {
        auto noisy = inject_pu_noise(col, {e1, 42});
        std::size_t labeled = 0;
        for (const auto& s : noisy.segments) {
            labeled += s.pu_label == PuLabel::LabeledPositive ? 1 : 0;
        }
        CHECK(labeled == static_cast<std::size_t>(std::lround((1.0 - e1) * 10.0)));
    }
    auto four = inject_pu_noise(col, {0.6, 42});
    std::size_t labeled = 0;
    for (const auto& s : four.segments) labeled += s.pu_label == PuLabel::LabeledPositive;
    CHECK(labeled == 4);
}

TEST_CASE("inject_pu_noise never labels a negative and is seed-deterministic") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> pos;
        for (int p = 0; p < 800; p += 40) {
            if (rng.uniform() < 0.5) pos.push_back(p);
        }
        if (pos.empty()) pos.push_back(0);
        auto col = window(labeled_series(800, pos), 40);
        auto a = inject_pu_noise(col, {0.4, 1234});
        auto b = inject_pu_noise(col, {0.4, 1234});
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.segments[i].pu_label == b.segments[i].pu_label);
            if (a.segments[i].pu_label == PuLabel::LabeledPositive) {
                CHECK(*a.segments[i].true_label == 1);
            }
        }
    }
}

TEST_CASE("inject_pu_noise needs positives") {
    auto col = window(labeled_series(300, {}), 100);
    CHECK_THROWS_AS(inject_pu_noise(col, {0.6, 1}), NoPositives);
}

TEST_CASE("synth_generate hits the target rate") {
    SynthConfig cfg;
    cfg.dims = 3;
    cfg.t_total = 10000;
    cfg.anomaly_rate = 0.1;
    cfg.seed = 5;
    auto result = synth_generate(cfg);
    REQUIRE(result.dataset.point_labels.has_value());
    double rate = 0.0;
    for (int l : *result.dataset.point_labels) rate += l;
    rate /= 10000.0;
    CHECK(rate >= 0.09);
    CHECK(rate <= 0.11);
    CHECK_FALSE(result.intervals.empty());
    // recorded intervals match the labels exactly
    std::vector<int> from_intervals(10000, 0);
    for (const auto& iv : result.intervals) {
        for (std::size_t t = iv.start; t < iv.end; ++t) from_intervals[t] = 1;
    }
    CHECK(from_intervals == *result.dataset.point_labels);
}

TEST_CASE("synth_generate zero rate means no anomalies") {
    SynthConfig cfg;
    cfg.dims = 2;
    cfg.t_total = 500;
    cfg.anomaly_rate = 0.0;
    auto result = synth_generate(cfg);
    for (int l : *result.dataset.point_labels) CHECK(l == 0);
    CHECK(result.intervals.empty());
}

TEST_CASE("synth_generate seeds move anomalies but keep marginals") {
    SynthConfig cfg;
    cfg.dims = 2;
    cfg.t_total = 20000;
    cfg.anomaly_rate = 0.05;
    cfg.seed = 1;
    auto a = synth_generate(cfg);
    cfg.seed = 2;
    auto b = synth_generate(cfg);
    CHECK(*a.dataset.point_labels != *b.dataset.point_labels);
    for (std::size_t d = 0; d < 2; ++d) {
        double ma = 0.0, mb = 0.0, va = 0.0, vb = 0.0;
        for (std::size_t t = 0; t < 20000; ++t) {
            ma += a.dataset.values(d, t);
            mb += b.dataset.values(d, t);
        }
        ma /= 20000.0;
        mb /= 20000.0;
        for (std::size_t t = 0; t < 20000; ++t) {
            va += std::pow(a.dataset.values(d, t) - ma, 2);
            vb += std::pow(b.dataset.values(d, t) - mb, 2);
        }
        va = std::sqrt(va / 20000.0);
        vb = std::sqrt(vb / 20000.0);
        CHECK(std::fabs(ma - mb) < 0.35);
        CHECK(std::fabs(va - vb) / std::max(va, vb) < 0.5);
    }
}

TEST_CASE("synth_generate rejects invalid rates") {
    SynthConfig cfg;
    cfg.anomaly_rate = 1.2;
    CHECK_THROWS_AS(synth_generate(cfg), InvalidRate);
    cfg.anomaly_rate = -0.1;
    CHECK_THROWS_AS(synth_generate(cfg), InvalidRate);
}

TEST_CASE("csv round trip preserves values and labels") {
    SynthConfig cfg;
    cfg.dims = 2;
    cfg.t_total = 300;
    cfg.anomaly_rate = 0.1;
    cfg.seed = 3;
    auto gen = synth_generate(cfg);
    const auto path =
        (std::filesystem::temp_directory_path() / "nrad_roundtrip.csv").string();
    write_csv(gen.dataset, path);
    auto back = load_csv(path, true, NormScope::None);
    CHECK(back.length() == 300);
    CHECK(back.dims() == 2);
    CHECK(*back.point_labels == *gen.dataset.point_labels);
    for (std::size_t t = 0; t < 300; ++t) {
        CHECK(back.values(0, t) == doctest::Approx(gen.dataset.values(0, t)).epsilon(1e-15));
    }
}
