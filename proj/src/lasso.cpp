#include "annealcast/lasso.hpp"

#include <cmath>

#include "annealcast/error.hpp"
#include "annealcast/numeric.hpp"

namespace annealcast {

namespace {

struct Standardized {
    Eigen::MatrixXd Xs;      // centered, unit population variance (zero cols skipped)
    Eigen::VectorXd yc;      // centered target
    Eigen::VectorXd mean;    // per-column mean
    Eigen::VectorXd scale;   // per-column population std, 0 marks a constant column
    Eigen::VectorXd colnorm; // Xs column squared norms
    double ybar = 0.0;
};

Standardized standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    Standardized s;
    s.mean.resize(p);
    s.scale.resize(p);
    s.Xs.resize(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = X.col(j).mean();
        const double var = (X.col(j).array() - mean).square().sum() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        s.mean[j] = mean;
        s.scale[j] = sd;
        if (sd > 0.0) {
            s.Xs.col(j) = (X.col(j).array() - mean) / sd;
        } else {
            s.Xs.col(j).setZero();
        }
    }
    s.ybar = y.mean();
    s.yc = y.array() - s.ybar;
    s.colnorm.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) s.colnorm[j] = s.Xs.col(j).squaredNorm();
    return s;
}

struct CdResult {
    bool converged = false;
    std::size_t sweeps = 0;
    double last_change = 0.0;
    std::vector<double> objective_trace;
};

// cyclic coordinate descent on the standardized problem with per-coordinate
// penalty lambda / scale_j; b holds standardized coefficients
CdResult cd_solve(const Standardized& s, double lambda, double tol, std::size_t max_sweeps,
                  Eigen::VectorXd& b) {
    const Eigen::Index p = s.Xs.cols();
    Eigen::VectorXd r = s.yc - s.Xs * b;
    CdResult res;
    for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (s.scale[j] == 0.0 || s.colnorm[j] == 0.0) continue;
            const double gamma = lambda / s.scale[j];
            const double z = s.Xs.col(j).dot(r) + s.colnorm[j] * b[j];
            const double bn = soft_threshold(z, gamma) / s.colnorm[j];
            const double d = bn - b[j];
            if (d != 0.0) {
                r -= d * s.Xs.col(j);
                b[j] = bn;
            }
            max_change = std::max(max_change, std::fabs(d) / s.scale[j]);
        }
        double l1 = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (s.scale[j] > 0.0) l1 += std::fabs(b[j]) / s.scale[j];
        }
        res.objective_trace.push_back(0.5 * r.squaredNorm() + lambda * l1);
        res.sweeps = sweep;
        res.last_change = max_change;
        if (max_change < tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

std::size_t support_of(const Eigen::VectorXd& b) {
    std::size_t count = 0;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
        if (b[j] != 0.0) ++count;
    }
    return count;
}

LinearModel back_transform(const FeatureMatrix& X, const Standardized& s,
                           const Eigen::VectorXd& b, std::vector<double> trace) {
    LinearModel model;
    model.loss = LossKind::squared;
    model.feature_names = X.column_names;
    model.beta.resize(b.size());
    double dot = 0.0;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
        model.beta[j] = s.scale[j] > 0.0 ? b[j] / s.scale[j] : 0.0;
        dot += model.beta[j] * s.mean[j];
    }
    model.intercept = s.ybar - dot;
    model.train_loss_trace = std::move(trace);
    return model;
}

} // namespace

double soft_threshold(double z, double gamma) {
    if (gamma < 0.0) throw ConfigError("soft_threshold needs gamma >= 0");
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

double lasso_lambda_max(const FeatureMatrix& X, const TargetVector& y) {
    const Eigen::VectorXd yc = y.values.array() - y.values.mean();
    double best = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        best = std::max(best, std::fabs(X.data.col(j).dot(yc)));
    }
    return best;
}

LinearModel lasso_fit(const FeatureMatrix& X, const TargetVector& y, const LassoConfig& cfg,
                      double* lambda_out) {
    if (cfg.lambda.has_value() == cfg.target_support.has_value()) {
        throw ConfigError("lasso config needs exactly one of lambda / target_support");
    }
    if (!(cfg.tol > 0.0)) throw ConfigError("lasso tol must be > 0");
    if (cfg.lambda && *cfg.lambda < 0.0) throw ConfigError("lasso lambda must be >= 0");
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n < 2 || p < 1) throw DataError("lasso needs at least 2 rows and 1 column");
    if (y.size() != n) throw SchemaError("lasso target length does not match matrix rows");
    if (!X.data.allFinite()) throw DataError("lasso input matrix contains non-finite values");

    const Standardized s = standardize(X.data, y.values);

    const auto solve_at = [&](double lambda, Eigen::VectorXd& b) {
        CdResult res = cd_solve(s, lambda, cfg.tol, cfg.max_sweeps, b);
        if (!res.converged) {
            throw DivergenceError("lasso did not converge in " + std::to_string(res.sweeps) +
                                  " sweeps; last max coefficient change " +
                                  format_double(res.last_change));
        }
        return res;
    };

    if (cfg.lambda) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
        CdResult res = solve_at(*cfg.lambda, b);
        if (lambda_out) *lambda_out = *cfg.lambda;
        return back_transform(X, s, b, std::move(res.objective_trace));
    }

    // target_support mode: largest lambda whose support reaches the target.
    // Walk down from lambda_max by halving until the support is big enough
    // (each solve warm-started, so every fit stays in the sparse regime),
    // then bisect between the last miss and the first hit.
    const std::size_t target = *cfg.target_support;
    if (target < 1) throw ConfigError("target_support must be >= 1");
    const double lam_max = lasso_lambda_max(X, y);
    if (lam_max == 0.0) {
        // y is constant: every lambda gives the null model
        Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
        CdResult res = solve_at(0.0, b);
        if (lambda_out) *lambda_out = 0.0;
        return back_transform(X, s, b, std::move(res.objective_trace));
    }

    double hi = lam_max;
    double lo = 0.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd b_lo;
    CdResult res_lo;
    bool reached = false;
    double lam = lam_max;
    for (int halving = 0; halving < 40; ++halving) {
        hi = lam;
        lam *= 0.5;
        CdResult res = solve_at(lam, b);
        if (support_of(b) >= target) {
            lo = lam;
            b_lo = b;
            res_lo = std::move(res);
            reached = true;
            break;
        }
    }
    if (!reached) {
        // target larger than any penalty level can deliver; report the
        // widest support found
        if (lambda_out) *lambda_out = lam;
        CdResult res = solve_at(lam, b);
        return back_transform(X, s, b, std::move(res.objective_trace));
    }
    for (int iter = 0; iter < 40; ++iter) {
        const double mid = std::sqrt(lo * hi);
        Eigen::VectorXd b_mid = b_lo;
        CdResult res = solve_at(mid, b_mid);
        if (support_of(b_mid) >= target) {
            lo = mid;
            b_lo = b_mid;
            res_lo = std::move(res);
        } else {
            hi = mid;
        }
    }
    if (lambda_out) *lambda_out = lo;
    return back_transform(X, s, b_lo, std::move(res_lo.objective_trace));
}

double lasso_kkt_residual(const FeatureMatrix& X, const TargetVector& y,
                          const LinearModel& model, double lambda) {
    if (model.feature_names != X.column_names) {
        throw SchemaError("kkt check needs the matrix the model was fit on");
    }
    Eigen::VectorXd r = y.values - Eigen::VectorXd::Constant(X.rows(), model.intercept) -
                        X.data * model.beta;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double g = X.data.col(j).dot(r);
        if (model.beta[j] == 0.0) {
            worst = std::max(worst, std::fabs(g) - lambda);
        } else {
            worst = std::max(worst, std::fabs(g - lambda * (model.beta[j] > 0.0 ? 1.0 : -1.0)));
        }
    }
    return worst;
}

} // namespace annealcast
