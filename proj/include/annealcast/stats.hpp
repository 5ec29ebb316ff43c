#pragma once

#include <Eigen/Dense>

namespace annealcast {

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
};

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value of a Student-t statistic with df degrees of freedom,
// p = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

// Paired t-test on aligned per-sample losses: d = a - b,
// t = mean(d) / (sd(d)/sqrt(n)) with the n-1 denominator in sd. Degenerate
// sd == 0 maps to p = 1 when mean(d) == 0 and p = 0 otherwise.
// Throws DataError when lengths differ or n < 2.
TTestResult paired_t_test(const Eigen::VectorXd& loss_a, const Eigen::VectorXd& loss_b);

} // namespace annealcast
