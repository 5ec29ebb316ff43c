#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "annealcast/error.hpp"
#include "annealcast/mlp.hpp"
#include "testutil.hpp"

using namespace annealcast;

namespace {

FeatureMatrix xor_inputs() {
    FeatureMatrix X;
    X.column_names = {"a", "b"};
    X.data.resize(4, 2);
    X.data << 0, 0, 0, 1, 1, 0, 1, 1;
    return X;
}

TargetVector xor_labels() {
    TargetVector y;
    y.kind = TargetKind::trend;
    y.encoding = LabelEncoding::zero_one;
    y.values.resize(4);
    y.values << 0, 1, 1, 0;
    return y;
}

} // namespace

TEST_CASE("config validation") {
    const FeatureMatrix X = xor_inputs();
    const TargetVector y = xor_labels();
    MlpConfig cfg;
    cfg.hidden_layers = {};
    cfg.loss = MlpLoss::bce;
    CHECK_THROWS_AS(mlp_fit(X, y, cfg), ConfigError);
    cfg.hidden_layers = {10, 10, 10, 10};
    CHECK_THROWS_AS(mlp_fit(X, y, cfg), ConfigError);
    cfg.hidden_layers = {10};
    cfg.eta = -1.0;
    CHECK_THROWS_AS(mlp_fit(X, y, cfg), ConfigError);

    MlpConfig bad_labels;
    bad_labels.loss = MlpLoss::bce;
    TargetVector y_bad = y;
    y_bad.values[0] = 0.25;
    CHECK_THROWS_AS(mlp_fit(X, y_bad, bad_labels), DataError);
}

TEST_CASE("xor is learnable on most seeds") {
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        MlpConfig cfg;
        cfg.hidden_layers = {10};
        cfg.activation = Activation::tanh_act;
        cfg.optimizer = MlpOptimizer::adam;
        cfg.eta = 0.05;
        cfg.epochs = 500;
        cfg.loss = MlpLoss::bce;
        cfg.seed = seed;
        cfg.batch_size = 0;
        const MlpModel m = mlp_fit(xor_inputs(), xor_labels(), cfg);
        const Eigen::VectorXd p = mlp_predict(m, xor_inputs());
        const Eigen::VectorXd want = xor_labels().values;
        bool all = true;
        for (Eigen::Index i = 0; i < 4; ++i) {
            all = all && ((p[i] >= 0.5) == (want[i] == 1.0));
        }
        if (all) ++solved;
    }
    CHECK(solved >= 8);
}

TEST_CASE("zero-weight model outputs the neutral prediction") {
    MlpModel m;
    m.config.hidden_layers = {3};
    m.config.activation = Activation::tanh_act;
    m.feature_names = {"a", "b"};
    m.weights = {Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(3, 1)};
    m.biases = {Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(1)};

    m.config.loss = MlpLoss::bce;
    CHECK(mlp_predict(m, xor_inputs())[0] == 0.5);
    m.config.loss = MlpLoss::mse;
    CHECK(mlp_predict(m, xor_inputs())[0] == 0.0);
}

TEST_CASE("backprop matches central finite differences on every layer") {
    annealcast::SplitMix64 rng(90);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Index n = 12, d = 3;
        Eigen::MatrixXd X(n, d);
        Eigen::VectorXd y_reg(n), y_cls(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rng.next_gauss();
            y_reg[i] = rng.next_gauss();
            y_cls[i] = rng.next_double() < 0.5 ? 0.0 : 1.0;
        }

        for (MlpLoss loss : {MlpLoss::mse, MlpLoss::bce}) {
            MlpModel m;
            m.config.hidden_layers = {5, 4};
            m.config.activation = Activation::tanh_act;
            m.config.loss = loss;
            m.feature_names = {"a", "b", "c"};
            const std::vector<Eigen::Index> dims = {d, 5, 4, 1};
            for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
                Eigen::MatrixXd W(dims[l], dims[l + 1]);
                Eigen::VectorXd b(dims[l + 1]);
                for (Eigen::Index r = 0; r < W.rows(); ++r) {
                    for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = 0.5 * rng.next_gauss();
                }
                for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.3 * rng.next_gauss();
                m.weights.push_back(W);
                m.biases.push_back(b);
            }
            const Eigen::VectorXd& y = loss == MlpLoss::mse ? y_reg : y_cls;

            std::vector<Eigen::MatrixXd> gw;
            std::vector<Eigen::VectorXd> gb;
            mlp_loss_and_grads(m, X, y, &gw, &gb);

            const double h = 1e-5;
            for (std::size_t l = 0; l < m.weights.size(); ++l) {
                for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r) {
                    for (Eigen::Index c = 0; c < m.weights[l].cols(); ++c) {
                        MlpModel mp = m, mm = m;
                        mp.weights[l](r, c) += h;
                        mm.weights[l](r, c) -= h;
                        const double fd = (mlp_loss_and_grads(mp, X, y, nullptr, nullptr) -
                                           mlp_loss_and_grads(mm, X, y, nullptr, nullptr)) /
                                          (2.0 * h);
                        CHECK(std::fabs(gw[l](r, c) - fd) <=
                              1e-4 * std::max(1.0, std::fabs(fd)));
                    }
                }
                for (Eigen::Index i = 0; i < m.biases[l].size(); ++i) {
                    MlpModel mp = m, mm = m;
                    mp.biases[l][i] += h;
                    mm.biases[l][i] -= h;
                    const double fd = (mlp_loss_and_grads(mp, X, y, nullptr, nullptr) -
                                       mlp_loss_and_grads(mm, X, y, nullptr, nullptr)) /
                                      (2.0 * h);
                    CHECK(std::fabs(gb[l][i] - fd) <= 1e-4 * std::max(1.0, std::fabs(fd)));
                }
            }
        }
    }
}

TEST_CASE("fixed seed and config give a bit-identical model") {
    annealcast::SplitMix64 rng(95);
    FeatureMatrix X;
    X.data.resize(40, 3);
    for (Eigen::Index i = 0; i < 40; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) X.data(i, j) = rng.next_gauss();
    }
    X.column_names = {"a", "b", "c"};
    TargetVector y;
    y.values.resize(40);
    for (Eigen::Index i = 0; i < 40; ++i) y.values[i] = rng.next_gauss();

    MlpConfig cfg;
    cfg.hidden_layers = {8};
    cfg.optimizer = MlpOptimizer::sgd_momentum;
    cfg.eta = 0.01;
    cfg.epochs = 30;
    cfg.seed = 123;
    cfg.batch_size = 16;
    const MlpModel a = mlp_fit(X, y, cfg);
    const MlpModel b = mlp_fit(X, y, cfg);
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        for (Eigen::Index r = 0; r < a.weights[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < a.weights[l].cols(); ++c) {
                REQUIRE(a.weights[l](r, c) == b.weights[l](r, c));
            }
        }
    }
    CHECK(a.train_loss_trace == b.train_loss_trace);
}

TEST_CASE("serialization reproduces predictions bit-identically") {
    annealcast::SplitMix64 rng(97);
    FeatureMatrix X;
    X.data.resize(25, 4);
    for (Eigen::Index i = 0; i < 25; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) X.data(i, j) = rng.next_gauss();
    }
    X.column_names = {"w", "x", "y", "z"};
    TargetVector y;
    y.values.resize(25);
    for (Eigen::Index i = 0; i < 25; ++i) y.values[i] = rng.next_gauss();

    MlpConfig cfg;
    cfg.hidden_layers = {6, 5};
    cfg.epochs = 20;
    cfg.seed = 5;
    const MlpModel m = mlp_fit(X, y, cfg);
    const MlpModel back = parse_mlp(serialize_mlp(m));
    const Eigen::VectorXd p0 = mlp_predict(m, X);
    const Eigen::VectorXd p1 = mlp_predict(back, X);
    for (Eigen::Index i = 0; i < p0.size(); ++i) REQUIRE(p0[i] == p1[i]);
    CHECK(back.config.hidden_layers == m.config.hidden_layers);
}

TEST_CASE("divergence names the epoch") {
    annealcast::SplitMix64 rng(99);
    FeatureMatrix X;
    X.data.resize(20, 2);
    for (Eigen::Index i = 0; i < 20; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) X.data(i, j) = rng.next_gauss();
    }
    X.column_names = {"a", "b"};
    TargetVector y;
    y.values.resize(20);
    for (Eigen::Index i = 0; i < 20; ++i) y.values[i] = rng.next_gauss();

    MlpConfig cfg;
    cfg.hidden_layers = {4};
    cfg.optimizer = MlpOptimizer::sgd_momentum;
    cfg.eta = 1e12;
    cfg.epochs = 20;
    cfg.loss = MlpLoss::mse;
    try {
        mlp_fit(X, y, cfg);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}
