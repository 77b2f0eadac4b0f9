#include <cmath>
#include <vector>

#include "doctest.h"
#include "nrad/criterion.hpp"
#include "nrad/errors.hpp"
#include "nrad/rng.hpp"

using namespace nrad;

namespace {

BatchOutputs random_batch(Rng& rng, std::size_t n_l, std::size_t n_u, std::size_t t) {
    BatchOutputs b;
    for (std::size_t i = 0; i < n_l; ++i) b.f_labeled.push_back(rng.uniform(0.05, 0.95));
    for (std::size_t i = 0; i < n_u; ++i) b.f_unlabeled.push_back(rng.uniform(0.05, 0.95));
    for (std::size_t i = 0; i < n_l + n_u; ++i) {
        std::vector<double> h(t);
        for (auto& v : h) v = rng.uniform(0.0, 2.0);
        b.h_all.push_back(std::move(h));
    }
    return b;
}

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("pu loss formula") {
    CHECK(pu_loss({1.0, 1.0}, {0.2, 0.4}, 0.5) == doctest::Approx(0.2));
    CHECK(pu_loss({1.0}, {0.25}, 0.25) == 0.0);
    CHECK_THROWS_AS(pu_loss({}, {0.5}, 0.5), EmptySide);
    CHECK_THROWS_AS(pu_loss({0.5}, {}, 0.5), EmptySide);
}

TEST_CASE("pu loss is zero exactly at the alignment optimum") {
    for (int i = 1; i <= 9; ++i) {
        const double pi_p = 0.1 * i;
        CHECK(pu_loss({1.0, 1.0, 1.0}, {pi_p, pi_p}, pi_p) == 0.0);
        BatchOutputs b;
        b.f_labeled = {1.0, 1.0, 1.0};
        b.f_unlabeled = {pi_p, pi_p};
        b.h_all.assign(5, std::vector<double>(4, 0.3));
        CriterionConfig cfg;
        cfg.pi_p = pi_p;
        auto g = grad_total(b, cfg);
        // only the separability term survives at the optimum
        for (double d : g.d_f_labeled) {
            CHECK(d == doctest::Approx(-cfg.lambda * cfg.lambda2 / 3.0));
        }
        for (double d : g.d_f_unlabeled) {
            CHECK(d == doctest::Approx(cfg.lambda * cfg.lambda2 / 2.0));
        }
    }
}

TEST_CASE("pu loss is nonnegative and zero only at the optimum") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        auto b = random_batch(rng, 1 + rng.uniform_int(4), 1 + rng.uniform_int(6), 3);
        const double pi_p = rng.uniform(0.05, 0.95);
        const double v = pu_loss(b.f_labeled, b.f_unlabeled, pi_p);
        CHECK(v >= 0.0);
        if (v == 0.0) {
            CHECK(mean_of(b.f_labeled) == doctest::Approx(1.0));
            CHECK(mean_of(b.f_unlabeled) == doctest::Approx(pi_p));
        }
    }
}

TEST_CASE("smooth loss hand cases") {
    CHECK(smooth_loss({{0.7, 0.7, 0.7}}) == 0.0);
    CHECK(smooth_loss({{0.0, 1.0, 0.0}}) == doctest::Approx(2.0));
    // quadratic homogeneity
    CHECK(smooth_loss({{0.0, 2.0, 0.0}}) == doctest::Approx(8.0));
    CHECK_THROWS_AS(smooth_loss({{1.0}}), Error);
}

TEST_CASE("sep loss hand cases") {
    CHECK(sep_loss({0.3, 0.3}, {0.3}) == 0.0);
    CHECK(sep_loss({0.2}, {0.8}) == doctest::Approx(-0.6));
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        auto b = random_batch(rng, 2, 3, 2);
        const double v = sep_loss(b.f_unlabeled, b.f_labeled);
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    CHECK_THROWS_AS(sep_loss({}, {0.1}), EmptySide);
}

TEST_CASE("bce loss hand cases") {
    CHECK(bce_loss({1.0, 0.0}, {1, 0}) <= 1e-6);
    CHECK(bce_loss({0.5, 0.5, 0.5}, {1, 0, 1}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("total loss composition") {
    Rng rng(11);
    auto b = random_batch(rng, 3, 5, 6);
    CriterionConfig cfg;
    cfg.pi_p = 0.3;
    cfg.lambda = 0.0;
    // lambda = 0 leaves the PU risk alone
    CHECK(total_loss(b, cfg).total ==
          doctest::Approx(pu_loss(b.f_labeled, b.f_unlabeled, 0.3)));
    cfg.lambda = 1.0;
    cfg.lambda1 = 8e-5;
    cfg.lambda2 = 8e-5;
    const auto lb = total_loss(b, cfg);
    CHECK(lb.total == doctest::Approx(lb.base + 8e-5 * lb.smooth + 8e-5 * lb.sep));

    // a batch sitting at every optimum scores exactly zero
    BatchOutputs zero;
    zero.f_labeled = {1.0};
    zero.f_unlabeled = {0.3, 0.3};
    zero.h_all.assign(3, std::vector<double>(4, 0.5));
    CriterionConfig zcfg;
    zcfg.pi_p = 0.3;
    zcfg.lambda2 = 0.0;
    CHECK(total_loss(zero, zcfg).total == 0.0);
}

TEST_CASE("total loss is permutation invariant within sides") {
    Rng rng(13);
    auto b = random_batch(rng, 4, 4, 5);
    CriterionConfig cfg;
    cfg.pi_p = 0.4;
    const double before = total_loss(b, cfg).total;
    std::swap(b.f_labeled[0], b.f_labeled[3]);
    std::swap(b.f_unlabeled[1], b.f_unlabeled[2]);
    std::swap(b.h_all[0], b.h_all[3]);
    CHECK(total_loss(b, cfg).total == doctest::Approx(before).epsilon(1e-15));
}

TEST_CASE("grad_total matches central finite differences off the kinks") {
    Rng rng(17);
    for (auto mode : {CriterionMode::Pu, CriterionMode::Bce}) {
        int checked = 0;
        for (int trial = 0; trial < 40; ++trial) {
            auto b = random_batch(rng, 1 + rng.uniform_int(3), 2 + rng.uniform_int(4), 4);
            CriterionConfig cfg;
            cfg.mode = mode;
            cfg.pi_p = rng.uniform(0.1, 0.9);
            cfg.lambda = 1.0;
            cfg.lambda1 = 0.05;
            cfg.lambda2 = 0.03;
            if (mode == CriterionMode::Pu) {
                // keep the batch away from the absolute-value kinks
                if (std::fabs(mean_of(b.f_labeled) - 1.0) < 1e-2) continue;
                if (std::fabs(mean_of(b.f_unlabeled) - cfg.pi_p) < 1e-2) continue;
            }
            const auto g = grad_total(b, cfg);
            const double eps = 1e-5;
            auto check_fd = [&](double* slot, double analytic) {
                const double orig = *slot;
                *slot = orig + eps;
                const double up = total_loss(b, cfg).total;
                *slot = orig - eps;
                const double dn = total_loss(b, cfg).total;
                *slot = orig;
                const double fd = (up - dn) / (2 * eps);
                const double scale = std::max({1e-8, std::fabs(fd), std::fabs(analytic)});
                CHECK(std::fabs(fd - analytic) / scale < 1e-4);
                ++checked;
            };
            check_fd(&b.f_labeled[0], g.d_f_labeled[0]);
            check_fd(&b.f_unlabeled[0], g.d_f_unlabeled[0]);
            check_fd(&b.h_all[0][0], g.d_h_all[0][0]);
            check_fd(&b.h_all[1][2], g.d_h_all[1][2]);
        }
        CHECK(checked >= 100);
    }
}

TEST_CASE("smoothness gradient vanishes on constant h") {
    BatchOutputs b;
    b.f_labeled = {0.9};
    b.f_unlabeled = {0.2};
    b.h_all.assign(2, std::vector<double>(6, 1.25));
    CriterionConfig cfg;
    auto g = grad_total(b, cfg);
    for (const auto& dh : g.d_h_all) {
        for (double v : dh) CHECK(v == 0.0);
    }
}

TEST_CASE("one separability step moves the means apart") {
    BatchOutputs b;
    b.f_labeled = {0.5, 0.6};
    b.f_unlabeled = {0.5, 0.4};
    b.h_all.assign(4, std::vector<double>(3, 0.0));
    CriterionConfig cfg;
    cfg.mode = CriterionMode::Pu;
    cfg.lambda = 1.0;
    cfg.lambda1 = 0.0;
    cfg.lambda2 = 1.0;
    auto g = grad_total(b, cfg);
    const double step = 0.01;
    BatchOutputs after = b;
    for (std::size_t i = 0; i < b.f_labeled.size(); ++i) {
        after.f_labeled[i] -= step * g.d_f_labeled[i];
    }
    for (std::size_t i = 0; i < b.f_unlabeled.size(); ++i) {
        after.f_unlabeled[i] -= step * g.d_f_unlabeled[i];
    }
    CHECK(sep_loss(after.f_unlabeled, after.f_labeled) <
          sep_loss(b.f_unlabeled, b.f_labeled));
}
