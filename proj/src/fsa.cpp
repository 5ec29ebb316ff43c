#include "annealcast/fsa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "annealcast/error.hpp"
#include "annealcast/numeric.hpp"
#include "annealcast/rng.hpp"

namespace annealcast {

namespace {

// log(1 + e^z) without overflow
double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double eval_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const std::vector<Eigen::Index>& active, const Eigen::VectorXd& beta,
                 double intercept, LossKind loss) {
    const Eigen::Index n = X.rows();
    Eigen::VectorXd f = Eigen::VectorXd::Constant(n, intercept);
    for (Eigen::Index j : active) {
        if (beta[j] != 0.0) f += beta[j] * X.col(j);
    }
    if (loss == LossKind::squared) {
        return (f - y).squaredNorm() / static_cast<double>(n);
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += log1pexp(-y[i] * f[i]);
    return acc / static_cast<double>(n);
}

// d(loss)/d(f_i), already including the 1/n factor
void loss_slope(const Eigen::VectorXd& f, const Eigen::VectorXd& y, LossKind loss,
                Eigen::VectorXd& dldf) {
    const double n = static_cast<double>(f.size());
    if (loss == LossKind::squared) {
        dldf = 2.0 / n * (f - y);
        return;
    }
    dldf.resize(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        dldf[i] = -y[i] / ((1.0 + std::exp(y[i] * f[i])) * n);
    }
}

} // namespace

double fsa_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                const Eigen::VectorXd& beta, double intercept, Eigen::VectorXd* grad_beta,
                double* grad_intercept) {
    const Eigen::Index n = X.rows();
    Eigen::VectorXd f = Eigen::VectorXd::Constant(n, intercept);
    f.noalias() += X * beta;
    double value = 0.0;
    if (loss == LossKind::squared) {
        value = (f - y).squaredNorm() / static_cast<double>(n);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) value += log1pexp(-y[i] * f[i]);
        value /= static_cast<double>(n);
    }
    if (grad_beta || grad_intercept) {
        Eigen::VectorXd dldf;
        loss_slope(f, y, loss, dldf);
        if (grad_beta) grad_beta->noalias() = X.transpose() * dldf;
        if (grad_intercept) *grad_intercept = dldf.sum();
    }
    return value;
}

std::size_t annealing_schedule(std::size_t e, std::size_t M, std::size_t k, double mu,
                               std::size_t n_iter) {
    if (M < k) {
        throw ConfigError("annealing schedule needs M >= k, got M=" + std::to_string(M) +
                          ", k=" + std::to_string(k));
    }
    if (mu < 0.0) throw ConfigError("annealing parameter mu must be >= 0");
    if (n_iter < 1) throw ConfigError("n_iter must be >= 1");
    if (e >= n_iter) return k;
    const double ed = static_cast<double>(e);
    const double ratio = (static_cast<double>(n_iter) - 2.0 * ed) /
                         (2.0 * ed * mu + static_cast<double>(n_iter));
    const double kept = static_cast<double>(k) +
                        static_cast<double>(M - k) * std::max(0.0, ratio);
    const long long rounded = round_half_up(kept);
    const long long clamped = std::clamp<long long>(rounded, static_cast<long long>(k),
                                                    static_cast<long long>(M));
    return static_cast<std::size_t>(clamped);
}

LinearModel fsa_fit(const FeatureMatrix& X, const TargetVector& y, const FsaConfig& cfg,
                    std::vector<std::vector<Eigen::Index>>* support_trace) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (cfg.k < 1) throw ConfigError("fsa k must be >= 1");
    if (!(cfg.eta_start > 0.0) || !(cfg.eta_end > 0.0)) {
        throw ConfigError("fsa learning rate must be > 0");
    }
    if (cfg.n_iter < 1) throw ConfigError("fsa n_iter must be >= 1");
    if (n < 2) throw DataError("fsa needs at least 2 rows");
    if (y.size() != n) throw SchemaError("fsa target length does not match matrix rows");
    if (!X.data.allFinite()) throw DataError("fsa input matrix contains non-finite values");
    if (cfg.loss == LossKind::logistic) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (y.values[i] != -1.0 && y.values[i] != 1.0) {
                throw DataError("logistic loss needs {-1,+1} labels");
            }
        }
    }
    // validates M >= k up front
    annealing_schedule(0, static_cast<std::size_t>(p), cfg.k, cfg.mu, cfg.n_iter);

    const Eigen::VectorXd& yv = y.values;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    double intercept = 0.0;
    std::vector<Eigen::Index> active(static_cast<std::size_t>(p));
    std::iota(active.begin(), active.end(), 0);

    LinearModel model;
    model.loss = cfg.loss;
    model.feature_names = X.column_names;
    model.train_loss_trace.reserve(cfg.n_iter);

    Eigen::VectorXd f(n), dldf(n);
    for (std::size_t e = 1; e <= cfg.n_iter; ++e) {
        const double frac =
            cfg.n_iter > 1 ? static_cast<double>(e - 1) / static_cast<double>(cfg.n_iter - 1) : 0.0;
        const double eta = cfg.eta_start + (cfg.eta_end - cfg.eta_start) * frac;

        if (cfg.batch_size == 0) {
            f.setConstant(intercept);
            for (Eigen::Index j : active) {
                if (beta[j] != 0.0) f += beta[j] * X.data.col(j);
            }
            loss_slope(f, yv, cfg.loss, dldf);
            for (Eigen::Index j : active) beta[j] -= eta * X.data.col(j).dot(dldf);
            if (cfg.fit_intercept) intercept -= eta * dldf.sum();
        } else {
            SplitMix64 rng(cfg.seed + 0x9e3779b9ULL * e);
            std::vector<std::size_t> order = iota_indices(static_cast<std::size_t>(n));
            shuffle_indices(order, rng);
            for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
                const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
                const Eigen::Index m = static_cast<Eigen::Index>(stop - start);
                Eigen::MatrixXd Xb(m, p);
                Eigen::VectorXd yb(m);
                for (Eigen::Index i = 0; i < m; ++i) {
                    Xb.row(i) = X.data.row(static_cast<Eigen::Index>(order[start + i]));
                    yb[i] = yv[static_cast<Eigen::Index>(order[start + i])];
                }
                Eigen::VectorXd fb = Eigen::VectorXd::Constant(m, intercept);
                for (Eigen::Index j : active) {
                    if (beta[j] != 0.0) fb += beta[j] * Xb.col(j);
                }
                Eigen::VectorXd db;
                loss_slope(fb, yb, cfg.loss, db);
                for (Eigen::Index j : active) beta[j] -= eta * Xb.col(j).dot(db);
                if (cfg.fit_intercept) intercept -= eta * db.sum();
            }
        }

        // keep the M_e largest |beta_j|; ties survive by lower column index
        const std::size_t keep =
            annealing_schedule(e, static_cast<std::size_t>(p), cfg.k, cfg.mu, cfg.n_iter);
        if (keep < active.size()) {
            std::sort(active.begin(), active.end(), [&](Eigen::Index a, Eigen::Index b) {
                const double fa = std::fabs(beta[a]);
                const double fb = std::fabs(beta[b]);
                if (fa != fb) return fa > fb;
                return a < b;
            });
            for (std::size_t i = keep; i < active.size(); ++i) beta[active[i]] = 0.0;
            active.resize(keep);
            std::sort(active.begin(), active.end());
        }

        const double epoch_loss = eval_loss(X.data, yv, active, beta, intercept, cfg.loss);
        if (!std::isfinite(epoch_loss)) {
            throw DivergenceError("fsa loss became non-finite at epoch " + std::to_string(e) +
                                  " (learning rate too large?)");
        }
        model.train_loss_trace.push_back(epoch_loss);
        if (support_trace) support_trace->push_back(active);
    }

    model.beta = std::move(beta);
    model.intercept = intercept;
    return model;
}

} // namespace annealcast
