#include "annealcast/stats.hpp"

#include <cmath>
#include <limits>

#include "annealcast/error.hpp"

namespace annealcast {

namespace {

// Lentz continued fraction for the incomplete beta, standard form
double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DataError("incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw DataError("student t needs df > 0");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(0.5 * df, 0.5, x);
}

TTestResult paired_t_test(const Eigen::VectorXd& loss_a, const Eigen::VectorXd& loss_b) {
    if (loss_a.size() != loss_b.size()) {
        throw DataError("paired t-test needs equal lengths, got " + std::to_string(loss_a.size()) +
                        " vs " + std::to_string(loss_b.size()));
    }
    const Eigen::Index n = loss_a.size();
    if (n < 2) throw DataError("paired t-test needs at least 2 samples");

    const Eigen::VectorXd d = loss_a - loss_b;
    const double mean = d.mean();
    const double ss = (d.array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult res;
    if (sd == 0.0) {
        res.t = mean == 0.0 ? 0.0
                            : std::copysign(std::numeric_limits<double>::infinity(), mean);
        res.p = mean == 0.0 ? 1.0 : 0.0;
        return res;
    }
    res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    res.p = student_t_two_sided_p(res.t, static_cast<double>(n - 1));
    return res;
}

} // namespace annealcast
