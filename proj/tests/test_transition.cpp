#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sapsom/transition.hpp"
#include "sapsom/som.hpp"

using namespace sapsom;

namespace {

Vec one_hot(int n, int i) {
    Vec v = Vec::Zero(n);
    v[i] = 1.0;
    return v;
}

Vec random_density(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v / v.sum();
}

}  // namespace

TEST_CASE("predict_density with identity matrix returns p_t") {
    TransitionModel model(2, 5);
    model.matrix(1).setIdentity();
    std::mt19937_64 rng(5);
    const Vec p = random_density(5, rng);
    REQUIRE((model.predict_density(1, p) - p).norm() < 1e-15);
}

TEST_CASE("predict_density with zero matrix returns zero") {
    TransitionModel model(2, 4);
    const Vec p = one_hot(4, 2);
    REQUIRE(model.predict_density(0, p).norm() == 0.0);
}

TEST_CASE("one-hot density selects a matrix column") {
    TransitionModel model(1, 3);
    model.matrix(0) << 1, 2, 3,
                       4, 5, 6,
                       7, 8, 9;
    const Vec out = model.predict_density(0, one_hot(3, 1));
    REQUIRE(out[0] == 2.0);
    REQUIRE(out[1] == 5.0);
    REQUIRE(out[2] == 8.0);
}

TEST_CASE("predict_density rejects a wrong-length density") {
    TransitionModel model(1, 4);
    REQUIRE_THROWS_AS(model.predict_density(0, Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("zero residual means zero update") {
    TransitionModel model(1, 3);
    model.matrix(0).setIdentity();
    const Vec p = one_hot(3, 0);
    model.learn(0, p, p, 0.5);  // p_next == T p_t exactly
    REQUIRE(model.matrix(0).isIdentity(1e-15));
}

TEST_CASE("gamma 0 leaves the matrix unchanged") {
    TransitionModel model(1, 3);
    std::mt19937_64 rng(1);
    model.learn(0, random_density(3, rng), random_density(3, rng), 0.0);
    REQUIRE(model.matrix(0).isZero(0.0));
}

TEST_CASE("one-hot pair writes a single outer-product entry") {
    TransitionModel model(2, 4);
    model.learn(1, one_hot(4, 2), one_hot(4, 0), 0.05);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            REQUIRE(model.matrix(1)(i, j) == (i == 0 && j == 2 ? 0.05 : 0.0));
}

TEST_CASE("learning action a never touches other actions' matrices") {
    TransitionModel model(3, 4);
    std::mt19937_64 rng(2);
    model.learn(1, random_density(4, rng), random_density(4, rng), 0.1);
    REQUIRE(model.matrix(0).isZero(0.0));
    REQUIRE(model.matrix(2).isZero(0.0));
    REQUIRE(!model.matrix(1).isZero(0.0));
}

TEST_CASE("repeated updates are a descent on the residual") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        TransitionModel model(1, 6);
        const Vec p_t = random_density(6, rng);
        const Vec p_next = random_density(6, rng);
        const double gamma = 1.0 / p_t.squaredNorm();
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 400; ++k) {
            const double res = (p_next - model.predict_density(0, p_t)).squaredNorm();
            REQUIRE(res <= prev + 1e-12);
            prev = res;
            model.learn(0, p_t, p_next, gamma);
        }
        REQUIRE(prev < 1e-12);
    }
}

TEST_CASE("3-unit cyclic chain trains one-hot columns") {
    // chain 0 -> 1 -> 2 -> 0 under action 0, trained with one-hot densities
    TransitionModel model(1, 3);
    for (int k = 0; k < 500; ++k) {
        const int s = k % 3;
        model.learn(0, one_hot(3, s), one_hot(3, (s + 1) % 3), 0.1);
    }
    for (int s = 0; s < 3; ++s) {
        const Vec col = model.matrix(0).col(s);
        for (int i = 0; i < 3; ++i) {
            const double target = i == (s + 1) % 3 ? 1.0 : 0.0;
            REQUIRE(std::abs(col[i] - target) < 1e-3);
        }
        REQUIRE(model.predict_mode(0, s).unit == (s + 1) % 3);
    }
}

TEST_CASE("predict_mode returns a one-hot column target") {
    TransitionModel model(1, 5);
    model.matrix(0)(3, 1) = 1.0;
    const auto mode = model.predict_mode(0, 1);
    REQUIRE(mode.unit == 3);
    REQUIRE(!mode.unlearned);
}

TEST_CASE("predict_mode suppresses the current winner") {
    TransitionModel model(1, 4);
    model.matrix(0)(2, 2) = 5.0;  // column maximal at the winner itself
    model.matrix(0)(3, 2) = 1.0;  // second-largest at 3
    REQUIRE(model.predict_mode(0, 2).unit == 3);
}

TEST_CASE("predict_mode never returns the input winner") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        TransitionModel model(2, 9);
        for (int a = 0; a < 2; ++a)
            for (int i = 0; i < 9; ++i)
                for (int j = 0; j < 9; ++j) model.matrix(a)(i, j) = dist(rng);
        for (int w = 0; w < 9; ++w)
            for (int a = 0; a < 2; ++a) REQUIRE(model.predict_mode(a, w).unit != w);
    }
}

TEST_CASE("predict_mode matches brute-force argmax over allowed rows") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        TransitionModel model(1, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) model.matrix(0)(i, j) = dist(rng);
        const int winner = int(rng() % 8);
        int best = -1;
        for (int s = 0; s < 8; ++s) {
            if (s == winner) continue;
            if (best < 0 || model.matrix(0)(s, winner) > model.matrix(0)(best, winner))
                best = s;
        }
        REQUIRE(model.predict_mode(0, winner).unit == best);
    }
}

TEST_CASE("all-zero column falls back to the lowest non-winner index") {
    TransitionModel model(1, 4);
    auto mode = model.predict_mode(0, 0);
    REQUIRE(mode.unit == 1);
    REQUIRE(mode.unlearned);
    mode = model.predict_mode(0, 2);
    REQUIRE(mode.unit == 0);
    REQUIRE(mode.unlearned);
}
