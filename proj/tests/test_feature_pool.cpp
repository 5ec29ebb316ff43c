#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "annealcast/error.hpp"
#include "annealcast/feature_pool.hpp"
#include "annealcast/indicators.hpp"
#include "testutil.hpp"

using namespace annealcast;

TEST_CASE("log returns: analytic and constant cases") {
    const std::vector<double> r = log_returns({100.0, 110.0});
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(std::log(1.1)).epsilon(1e-12));

    const std::vector<double> flat = log_returns({7.0, 7.0, 7.0});
    CHECK(flat == std::vector<double>{0.0, 0.0});

    CHECK_THROWS_AS(log_returns({1.0, -2.0}), DataError);
    CHECK_THROWS_AS(log_returns({5.0}), DataError);
}

TEST_CASE("log returns reconstruct the price path") {
    annealcast::SplitMix64 rng(3);
    std::vector<double> close{50.0};
    for (int i = 0; i < 200; ++i) close.push_back(close.back() * std::exp(0.02 * rng.next_gauss()));
    const std::vector<double> rets = log_returns(close);
    double acc = close[0];
    for (std::size_t i = 0; i < rets.size(); ++i) {
        acc *= std::exp(rets[i]);
        CHECK(std::fabs(acc - close[i + 1]) <= 1e-9 * close[i + 1]);
        acc = close[i + 1]; // avoid drift accumulation in the check itself
    }
}

TEST_CASE("trend labels follow the strict inequality") {
    const TargetVector y = trend_labels({0.10, 0.20, 0.15});
    REQUIRE(y.size() == 2);
    CHECK(y.values[0] == 1.0);
    CHECK(y.values[1] == -1.0);
    CHECK(y.kind == TargetKind::trend);
    CHECK(y.encoding == LabelEncoding::pm1);

    const TargetVector tie = trend_labels({0.1, 0.1});
    CHECK(tie.values[0] == -1.0); // ties are "else"
}

TEST_CASE("trend labels are shift invariant") {
    annealcast::SplitMix64 rng(8);
    std::vector<double> rets(100), shifted(100);
    for (std::size_t i = 0; i < rets.size(); ++i) {
        rets[i] = rng.next_gauss();
        shifted[i] = rets[i] + 3.7;
    }
    const TargetVector a = trend_labels(rets);
    const TargetVector b = trend_labels(shifted);
    for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("relabel is a bijection and idempotent") {
    TargetVector y;
    y.kind = TargetKind::trend;
    y.encoding = LabelEncoding::pm1;
    y.values.resize(4);
    y.values << -1, 1, 1, -1;

    const TargetVector z = relabel(y, LabelEncoding::zero_one);
    CHECK(z.values[0] == 0.0);
    CHECK(z.values[1] == 1.0);
    const TargetVector back = relabel(z, LabelEncoding::pm1);
    for (Eigen::Index i = 0; i < y.size(); ++i) CHECK(back.values[i] == y.values[i]);
    const TargetVector same = relabel(z, LabelEncoding::zero_one);
    for (Eigen::Index i = 0; i < z.size(); ++i) CHECK(same.values[i] == z.values[i]);

    TargetVector bad = y;
    bad.values[2] = 0.5;
    CHECK_THROWS_AS(relabel(bad, LabelEncoding::zero_one), DataError);
}

TEST_CASE("pool column arithmetic and drop bookkeeping") {
    const OhlcvSeries s = testutil::make_series(400, 21);
    const std::vector<std::size_t> periods{2, 4, 8, 16, 32, 64};
    const std::vector<std::size_t> lags{1, 2, 3, 4, 5};

    std::size_t base = 0;
    for (const IndicatorSpec& spec : catalog()) {
        base += spec.takes_period ? spec.sub_outputs.size() * periods.size()
                                  : spec.sub_outputs.size();
    }

    const FeatureMatrix pool = build_pool(s, periods, lags, 0.10);
    const std::size_t constructed = base * (1 + lags.size());
    CHECK(static_cast<std::size_t>(pool.cols()) + pool.dropped_columns.size() == constructed);
    CHECK(pool.data.allFinite());
    CHECK(pool.rows() + pool.first_bar == static_cast<Eigen::Index>(s.size()));
}

TEST_CASE("a lagged column equals its base column shifted") {
    const OhlcvSeries s = testutil::make_series(300, 4);
    const FeatureMatrix pool = build_pool(s, {2, 8}, {1, 2}, 0.25);
    const Eigen::Index base = pool.column_index("rsi_p8");
    const Eigen::Index lag2 = pool.column_index("rsi_p8_lag2");
    REQUIRE(base >= 0);
    REQUIRE(lag2 >= 0);
    for (Eigen::Index t = 2; t < pool.rows(); ++t) {
        CHECK(pool.data(t, lag2) == pool.data(t - 2, base));
    }
}

TEST_CASE("pool needs enough rows") {
    const OhlcvSeries s = testutil::make_series(80, 2);
    // period-64 indicators leave fewer than 50 finite rows on an 80-bar series
    CHECK_THROWS_AS(build_pool(s, {2, 4, 8, 16, 32, 64}, {1, 2, 3, 4, 5}, 1.0), DataError);
}

TEST_CASE("align_horizon length arithmetic") {
    FeatureMatrix X;
    X.column_names = {"a"};
    X.data.resize(10, 1);
    for (Eigen::Index i = 0; i < 10; ++i) X.data(i, 0) = static_cast<double>(i);
    TargetVector y;
    y.values.resize(10);
    for (Eigen::Index i = 0; i < 10; ++i) y.values[i] = 100.0 + static_cast<double>(i);

    const auto [X3, y3] = align_horizon(X, y, 3);
    CHECK(X3.rows() == 7);
    CHECK(y3.size() == 7);
    CHECK(X3.data(0, 0) == 0.0);
    CHECK(y3.values[0] == 103.0); // features at t-3 pair with target at t

    const auto [X1, y1] = align_horizon(X, y, 1);
    CHECK(X1.rows() == X3.rows() + 2);

    CHECK_THROWS_AS(align_horizon(X, y, 10), DataError);
}

TEST_CASE("lookahead audit: perturbing target-date features never changes aligned rows") {
    annealcast::SplitMix64 rng(31);
    FeatureMatrix X;
    X.column_names = {"a", "b", "c"};
    X.data.resize(20, 3);
    for (Eigen::Index i = 0; i < 20; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) X.data(i, j) = rng.next_gauss();
    }
    TargetVector y;
    y.values.resize(20);
    for (Eigen::Index i = 0; i < 20; ++i) y.values[i] = rng.next_gauss();

    const int h = 3;
    const auto [Xa, ya] = align_horizon(X, y, h);
    for (Eigen::Index i = 0; i < Xa.rows(); ++i) {
        FeatureMatrix Xp = X;
        Xp.data.row(i + h).setConstant(1e9); // the feature row dated at row i's target
        const auto [Xq, yq] = align_horizon(Xp, y, h);
        for (Eigen::Index j = 0; j < 3; ++j) CHECK(Xq.data(i, j) == Xa.data(i, j));
    }
}

TEST_CASE("feature CSV round trip is bit-identical") {
    const OhlcvSeries s = testutil::make_series(200, 12);
    const FeatureMatrix pool = build_pool(s, {2, 8}, {1, 3}, 0.5);
    const std::string csv = feature_matrix_to_csv(pool);
    const FeatureMatrix back = feature_matrix_from_csv(csv);
    REQUIRE(back.cols() == pool.cols());
    REQUIRE(back.rows() == pool.rows());
    CHECK(back.column_names == pool.column_names);
    for (Eigen::Index i = 0; i < pool.rows(); ++i) {
        for (Eigen::Index j = 0; j < pool.cols(); ++j) {
            REQUIRE(back.data(i, j) == pool.data(i, j));
        }
    }
}

TEST_CASE("label balance on a random walk stays near half") {
    annealcast::SplitMix64 rng(777);
    std::vector<double> rets(10000);
    for (double& r : rets) r = rng.next_gauss();
    const TargetVector y = trend_labels(rets);
    double ups = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y.values[i] > 0.0) ups += 1.0;
    }
    const double frac = ups / static_cast<double>(y.size());
    CHECK(frac >= 0.35);
    CHECK(frac <= 0.65);
}
