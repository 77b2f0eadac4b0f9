#include <cmath>
#include <vector>

#include "doctest.h"
#include "nrad/errors.hpp"
#include "nrad/metrics.hpp"
#include "nrad/rng.hpp"

using namespace nrad;

namespace {

// Independent oracle: direct definition, structured differently from the
// library (explicit run list first, then adjustment).
struct Run {
    std::size_t begin, end;
};

std::vector<Run> truth_runs(const std::vector<int>& truth) {
    std::vector<Run> runs;
    std::size_t i = 0;
    while (i < truth.size()) {
        if (truth[i] == 1) {
            std::size_t j = i;
            while (j < truth.size() && truth[j] == 1) ++j;
            runs.push_back({i, j});
            i = j;
        } else {
            ++i;
        }
    }
    return runs;
}

std::vector<int> oracle_pa_k(const std::vector<int>& pred, const std::vector<int>& truth,
                             double k_percent) {
    std::vector<int> adj = pred;
    for (const Run& r : truth_runs(truth)) {
        double hits = 0;
        for (std::size_t t = r.begin; t < r.end; ++t) hits += pred[t] != 0 ? 1.0 : 0.0;
        if (hits / static_cast<double>(r.end - r.begin) * 100.0 > k_percent) {
            for (std::size_t t = r.begin; t < r.end; ++t) adj[t] = 1;
        }
    }
    return adj;
}

double oracle_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] && truth[i]) ++tp;
        if (pred[i] && !truth[i]) ++fp;
        if (!pred[i] && truth[i]) ++fn;
    }
    if (tp == 0) return 0.0;
    const double p = tp / (tp + fp);
    const double r = tp / (tp + fn);
    return 2 * p * r / (p + r);
}

double oracle_auc(const std::vector<int>& pred, const std::vector<int>& truth) {
    double sum = 0.0;
    for (int k = 0; k <= 100; ++k) {
        sum += oracle_f1(oracle_pa_k(pred, truth, k), truth);
    }
    return sum / 101.0;
}

std::vector<int> random_seq(Rng& rng, std::size_t n, double p) {
    std::vector<int> v(n);
    for (auto& x : v) x = rng.uniform() < p ? 1 : 0;
    return v;
}

}  // namespace

TEST_CASE("prf basics") {
    std::vector<int> truth = {1, 1, 0, 0};
    auto same = prf(truth, truth);
    CHECK(same.precision == 1.0);
    CHECK(same.recall == 1.0);
    CHECK(same.f1 == 1.0);
    CHECK_FALSE(same.zero_division);

    auto r = prf({1, 0, 0, 0}, {1, 1, 0, 0});
    CHECK(r.precision == 1.0);
    CHECK(r.recall == doctest::Approx(0.5));
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));

    auto z = prf({0, 0, 0, 0}, {1, 1, 0, 0});
    CHECK(z.precision == 0.0);
    CHECK(z.f1 == 0.0);
    CHECK(z.zero_division);

    CHECK_THROWS_AS(prf({1}, {1, 0}), LengthMismatch);
}

TEST_CASE("point adjustment marks whole runs") {
    std::vector<int> truth = {0, 0, 1, 1, 1, 0, 0};
    std::vector<int> pred = {0, 0, 0, 1, 0, 0, 0};
    auto adj = point_adjust(pred, truth);
    CHECK(adj == std::vector<int>{0, 0, 1, 1, 1, 0, 0});

    // no hits inside a run leaves it alone
    std::vector<int> miss = {0, 1, 0, 0, 0, 0, 0};
    CHECK(point_adjust(miss, truth)[2] == 0);
    // false positives outside runs survive
    CHECK(point_adjust(miss, truth)[1] == 1);
}

TEST_CASE("pa percent k trigger is strict") {
    std::vector<int> truth = {1, 1, 1, 0};
    std::vector<int> pred = {1, 0, 0, 0};  // one of three hit: 33.3%
    CHECK(pa_percent_k(pred, truth, 50.0) == pred);
    CHECK(pa_percent_k(pred, truth, 0.0) == std::vector<int>{1, 1, 1, 0});
    // K=100 never adjusts a partially detected run
    CHECK(prf(pa_percent_k(pred, truth, 100.0), truth).f1 ==
          doctest::Approx(prf(pred, truth).f1));
}

TEST_CASE("pa percent k auc endpoints") {
    std::vector<int> truth = {0, 1, 1, 0, 0, 1};
    CHECK(f1_pa_k_auc(truth, truth) == doctest::Approx(1.0));
    CHECK(f1_pa_k_auc(std::vector<int>(truth.size(), 0), truth) == doctest::Approx(0.0));

    // toy pair against the independent oracle
    std::vector<int> pred = {0, 1, 0, 0, 0, 0};
    CHECK(f1_pa_k_auc(pred, truth) == doctest::Approx(oracle_auc(pred, truth)));
}

TEST_CASE("metrics match the brute-force oracle on random sequences") {
    Rng rng(20240501);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(49);
        const auto truth = random_seq(rng, n, 0.3);
        const auto pred = random_seq(rng, n, 0.25);
        CHECK(point_adjust(pred, truth) == oracle_pa_k(pred, truth, 0.0));
        const double plain = prf(pred, truth).f1;
        const double pa = prf(point_adjust(pred, truth), truth).f1;
        CHECK(pa >= plain);  // adjustment only adds true positives
        double prev = 2.0;
        for (int k = 0; k <= 100; k += 10) {
            const auto adj = pa_percent_k(pred, truth, k);
            CHECK(adj == oracle_pa_k(pred, truth, k));
            const double f = prf(adj, truth).f1;
            CHECK(f <= prev + 1e-12);  // non-increasing in K
            prev = f;
        }
        const double auc = f1_pa_k_auc(pred, truth);
        CHECK(auc == doctest::Approx(oracle_auc(pred, truth)));
        CHECK(auc >= plain - 1e-12);
        CHECK(auc <= pa + 1e-12);
        // idempotence
        const auto once = point_adjust(pred, truth);
        CHECK(point_adjust(once, truth) == once);
    }
}

TEST_CASE("segment f1 hand case") {
    // 4 segments: TP, FP, FN, TN
    auto r = segment_f1({1, 1, 0, 0}, {1, 0, 1, 0});
    CHECK(r.precision == doctest::Approx(0.5));
    CHECK(r.recall == doctest::Approx(0.5));
    CHECK(r.f1 == doctest::Approx(0.5));

    auto z = segment_f1({0, 0}, {0, 0});
    CHECK(z.f1 == 0.0);
    CHECK(z.zero_division);
}

TEST_CASE("generalization bound closed form") {
    CHECK(generalization_bound({0.6, 1000, 0.05, 0.0}) == doctest::Approx(0.6936).epsilon(1e-3));
    CHECK(std::fabs(generalization_bound({0.6, 1000, 0.05, 0.0}) -
                    (0.6 + std::sqrt(2.0 * std::log(80.0) / 1000.0))) < 1e-12);
    CHECK(generalization_bound({0.0, 1000000, 0.05, 0.0}) ==
          doctest::Approx(0.00296).epsilon(1e-2));
    // large N leaves only e1 + mismatch
    CHECK(generalization_bound({0.3, 4000000000LL, 0.05, 0.1}) ==
          doctest::Approx(0.4).epsilon(1e-3));
    // monotone in e1, antitone in N
    CHECK(generalization_bound({0.7, 1000, 0.05, 0.0}) >
          generalization_bound({0.6, 1000, 0.05, 0.0}));
    CHECK(generalization_bound({0.6, 2000, 0.05, 0.0}) <
          generalization_bound({0.6, 1000, 0.05, 0.0}));
    CHECK_THROWS_AS(generalization_bound({0.6, 1000, 1.5, 0.0}), InvalidDelta);
}
