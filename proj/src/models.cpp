#include "annealcast/models.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "annealcast/error.hpp"
#include "annealcast/numeric.hpp"

namespace annealcast {

namespace {

double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

} // namespace

NullModel null_fit(const Eigen::VectorXd& y_train) {
    if (y_train.size() == 0) throw DataError("null model needs a nonempty target");
    return NullModel{y_train.mean()};
}

Eigen::VectorXd null_predict(const NullModel& model, Eigen::Index n) {
    return Eigen::VectorXd::Constant(n, model.mean);
}

std::string serialize_null_model(const NullModel& model) {
    return "annealcast-null-model v1\nmean " + format_double(model.mean) + "\n";
}

NullModel parse_null_model(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "annealcast-null-model v1") {
        throw SchemaError("not a null model file");
    }
    std::string key;
    NullModel model;
    if (!(in >> key >> model.mean) || key != "mean") throw SchemaError("missing mean line");
    return model;
}

LinearModel least_squares_fit(const FeatureMatrix& X, const TargetVector& y) {
    const Eigen::Index n = X.rows();
    if (y.size() != n) throw SchemaError("target length does not match matrix rows");
    if (n < 2) throw DataError("least squares needs at least 2 rows");
    if (!X.data.allFinite()) throw DataError("least squares input contains non-finite values");

    const Eigen::RowVectorXd xbar = X.data.colwise().mean();
    const double ybar = y.values.mean();
    const Eigen::MatrixXd Xc = X.data.rowwise() - xbar;
    const Eigen::VectorXd yc = y.values.array() - ybar;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(Xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    LinearModel model;
    model.loss = LossKind::squared;
    model.feature_names = X.column_names;
    model.beta = svd.solve(yc);
    model.intercept = ybar - xbar.dot(model.beta);
    return model;
}

double logreg_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y01,
                        const LogRegConfig& cfg, const Eigen::VectorXd& beta, double intercept,
                        Eigen::VectorXd* grad_beta, double* grad_intercept) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    const double nd = static_cast<double>(n);

    Eigen::VectorXd f = Eigen::VectorXd::Constant(n, intercept);
    f.noalias() += X * beta;

    // per-row nll terms, summed exactly so row order cannot matter
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        terms[static_cast<std::size_t>(i)] = log1pexp(f[i]) - y01[i] * f[i];
    }
    double obj = exact_sum(terms) / nd;
    if (cfg.l2_penalty) obj += beta.squaredNorm() / (2.0 * cfg.c * nd);

    if (grad_beta || grad_intercept) {
        Eigen::VectorXd slope(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            slope[i] = 1.0 / (1.0 + std::exp(-f[i])) - y01[i];
        }
        if (grad_beta) {
            grad_beta->resize(p);
            std::vector<double> prod(static_cast<std::size_t>(n));
            for (Eigen::Index j = 0; j < p; ++j) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    prod[static_cast<std::size_t>(i)] = X(i, j) * slope[i];
                }
                (*grad_beta)[j] = exact_sum(prod) / nd;
                if (cfg.l2_penalty) (*grad_beta)[j] += beta[j] / (cfg.c * nd);
            }
        }
        if (grad_intercept) {
            std::vector<double> terms_i(slope.data(), slope.data() + n);
            *grad_intercept = exact_sum(terms_i) / nd;
        }
    }
    return obj;
}

LinearModel logreg_fit(const FeatureMatrix& X, const TargetVector& y, const LogRegConfig& cfg) {
    if (!(cfg.c > 0.0)) throw ConfigError("logreg c must be > 0");
    if (!(cfg.tol > 0.0)) throw ConfigError("logreg tol must be > 0");
    const Eigen::Index n = X.rows();
    if (y.size() != n) throw SchemaError("target length does not match matrix rows");
    if (!X.data.allFinite()) throw DataError("logreg input contains non-finite values");

    bool saw0 = false, saw1 = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y.values[i] == 0.0) saw0 = true;
        else if (y.values[i] == 1.0) saw1 = true;
        else throw DataError("logreg labels must be {0,1}, got " + format_double(y.values[i]));
    }
    if (!saw0 || !saw1) throw DataError("logreg target has a single class");

    const Eigen::Index p = X.cols();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    double intercept = 0.0;

    LinearModel model;
    model.loss = LossKind::logistic;
    model.feature_names = X.column_names;
    model.train_loss_trace.reserve(cfg.max_iter);

    Eigen::VectorXd grad(p);
    double grad0 = 0.0;
    double step = 1.0;
    bool converged = false;
    for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
        const double obj = logreg_objective(X.data, y.values, cfg, beta, intercept, &grad, &grad0);
        model.train_loss_trace.push_back(obj);
        const double gnorm = std::max(grad.lpNorm<Eigen::Infinity>(), std::fabs(grad0));
        if (gnorm < cfg.tol) {
            converged = true;
            break;
        }
        const double gsq = grad.squaredNorm() + grad0 * grad0;
        double t = step;
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            const Eigen::VectorXd beta_try = beta - t * grad;
            const double b0_try = intercept - t * grad0;
            const double obj_try =
                logreg_objective(X.data, y.values, cfg, beta_try, b0_try, nullptr, nullptr);
            if (obj_try <= obj - 1e-4 * t * gsq) {
                beta = beta_try;
                intercept = b0_try;
                step = t * 2.0;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            throw DivergenceError("logreg backtracking stalled at iteration " +
                                  std::to_string(iter));
        }
    }
    if (!converged) {
        throw DivergenceError("logreg did not reach tolerance " + format_double(cfg.tol) +
                              " within " + std::to_string(cfg.max_iter) + " iterations");
    }
    model.beta = std::move(beta);
    model.intercept = intercept;
    return model;
}

Eigen::VectorXd logreg_predict_proba(const LinearModel& model, const FeatureMatrix& X) {
    Eigen::VectorXd score = model.decision(X);
    for (Eigen::Index i = 0; i < score.size(); ++i) {
        score[i] = 1.0 / (1.0 + std::exp(-score[i]));
    }
    return score;
}

Eigen::VectorXd predict_label(const Eigen::VectorXd& proba, double threshold) {
    Eigen::VectorXd out(proba.size());
    for (Eigen::Index i = 0; i < proba.size(); ++i) {
        out[i] = proba[i] >= threshold ? 1.0 : 0.0;
    }
    return out;
}

} // namespace annealcast
