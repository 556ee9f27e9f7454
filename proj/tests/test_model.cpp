#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phaselab/model.hpp"

using namespace phaselab;

namespace {
ModelParams make(long n, long d, long l, double k, double lambda = 0.01) {
    ModelParams p;
    p.n = n;
    p.d = d;
    p.l = l;
    p.k = k;
    p.lambda = lambda;
    return p;
}
} // namespace

TEST_CASE("generate_dataset lays out class-major, weak first") {
    const Dataset ds = generate_dataset(make(8, 4, 2, 2));
    // class 0: rows 0-1 weak, 2-3 strong; class 1: rows 4-5 weak, 6-7 strong
    CHECK(ds.at(0, 0) == 1.0);
    CHECK(ds.at(0, 1) == 1.0);
    CHECK(ds.at(0, 2) == 0.0);
    CHECK(ds.at(0, 3) == 0.0);
    CHECK(ds.at(2, 0) == 2.0);
    CHECK(ds.at(2, 1) == 2.0);
    CHECK(ds.at(2, 2) == 0.0);
    CHECK(ds.at(6, 0) == 0.0);
    CHECK(ds.at(6, 2) == 2.0);
    CHECK(ds.at(6, 3) == 2.0);
    CHECK(ds.labels[0] == 0);
    CHECK(ds.labels[6] == 1);
    CHECK(ds.weak_mask[0] == 1);
    CHECK(ds.weak_mask[2] == 0);
}

TEST_CASE("generate_dataset balances weak and strong per class") {
    const Dataset ds = generate_dataset(make(4, 2, 2, 2));
    int weak[2] = {0, 0}, strong[2] = {0, 0};
    for (long i = 0; i < ds.n; ++i)
        (ds.weak_mask[i] ? weak : strong)[ds.labels[i]]++;
    for (int y = 0; y < 2; ++y) {
        CHECK(weak[y] == 1);
        CHECK(strong[y] == 1);
    }
}

TEST_CASE("generate_dataset row sums equal (d/l) * value") {
    const ModelParams p = make(12, 6, 3, 3);
    const Dataset ds = generate_dataset(p);
    for (long i = 0; i < ds.n; ++i) {
        double sum = 0;
        for (long j = 0; j < ds.d; ++j) sum += ds.at(i, j);
        const double v = ds.weak_mask[i] ? 1.0 : p.k;
        CHECK(sum == Catch::Approx(p.block() * v).epsilon(1e-15));
    }
}

TEST_CASE("params validation") {
    CHECK_THROWS_AS(generate_dataset(make(8, 5, 2, 2)), std::invalid_argument);  // d % l
    CHECK_THROWS_AS(generate_dataset(make(6, 4, 2, 2)), std::invalid_argument);  // n % 2l
    CHECK_THROWS_AS(generate_dataset(make(8, 4, 1, 2)), std::invalid_argument);  // l < 2
    CHECK_THROWS_AS(generate_dataset(make(8, 4, 2, 1.5)), std::invalid_argument); // k < 2
    CHECK_THROWS_AS(generate_dataset(make(8, 4, 2, 2, -1)), std::invalid_argument);
    CHECK_NOTHROW(generate_dataset(make(8, 4, 2, 2, 0.0))); // zero rate is allowed
}

TEST_CASE("class_probs is exactly uniform at equal sums") {
    for (long l : {2L, 10L, 100L, 1000L}) {
        ModelParams p = make(2 * l, l, l, 2);
        const SymState s{0, 1.0 / static_cast<double>(l), 1.0 / static_cast<double>(l)};
        const ClassProbs q = class_probs(s, p);
        const double inv = 1.0 / static_cast<double>(l);
        CHECK(std::abs(q.q_self_weak - inv) <= 1e-15);
        CHECK(std::abs(q.q_self_strong - inv) <= 1e-15);
        CHECK(std::abs(q.q_cross_weak - inv) <= 1e-15);
        CHECK(std::abs(q.q_cross_strong - inv) <= 1e-15);
    }
}

TEST_CASE("class_probs closed form at f=1, u=0, l=10, k=2") {
    // e/(e+9) and e^2/(e^2+9), frozen from a 30-digit evaluation
    const ModelParams p = make(20, 10, 10, 2);
    const ClassProbs q = class_probs(SymState{1, 1.0, 0.0}, p);
    CHECK(q.q_self_weak == Catch::Approx(0.23196931668407393638823496061).epsilon(1e-13));
    CHECK(q.q_self_strong == Catch::Approx(0.45085306037928382250759889609).epsilon(1e-13));
    // long-double evaluation of the same closed form as an in-test check
    const long double e1 = expl(1.0L), e2 = expl(2.0L);
    CHECK(q.q_self_weak == Catch::Approx(static_cast<double>(e1 / (e1 + 9.0L))).epsilon(1e-14));
    CHECK(q.q_self_strong == Catch::Approx(static_cast<double>(e2 / (e2 + 9.0L))).epsilon(1e-14));
}

TEST_CASE("class_probs saturates without overflow at f=700") {
    const ModelParams p = make(20, 10, 10, 2);
    const ClassProbs q = class_probs(SymState{1, 700.0, 0.0}, p);
    CHECK(q.q_self_weak == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(q.q_cross_weak < 1e-300);
    CHECK(std::isfinite(q.q_self_strong));
}

TEST_CASE("softmax normalization identity across states") {
    for (long l : {2L, 7L, 50L}) {
        ModelParams p = make(2 * l, l, l, 3);
        for (double f : {0.01, 0.3, 1.0, 5.0, 80.0}) {
            for (double u : {-0.2, 0.0, 0.009, 0.3}) {
                const ClassProbs q = class_probs(SymState{1, f, u}, p);
                CHECK(std::abs(q.q_self_weak + (l - 1) * q.q_cross_weak - 1.0) <= 1e-12);
                CHECK(std::abs(q.q_self_strong + (l - 1) * q.q_cross_strong - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("increasing f with u fixed raises the self probabilities") {
    const ModelParams p = make(20, 10, 10, 2);
    double prev_w = 0.0, prev_s = 0.0;
    for (double f = 0.1; f < 3.0; f += 0.17) {
        const ClassProbs q = class_probs(SymState{1, f, 0.05}, p);
        CHECK(q.q_self_weak > prev_w);
        CHECK(q.q_self_strong > prev_s);
        prev_w = q.q_self_weak;
        prev_s = q.q_self_strong;
    }
}
