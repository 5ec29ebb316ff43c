#pragma once

#include <cstddef>
#include <cstdint>

#include "annealcast/feature_matrix.hpp"
#include "annealcast/linear_model.hpp"

namespace annealcast {

// Feature selection with annealing: full-batch gradient steps on a linear
// loss interleaved with schedule-driven removal of the smallest-magnitude
// coefficients, from all M columns down to k survivors.
struct FsaConfig {
    std::size_t k = 10;         // target feature count
    double mu = 300.0;          // annealing parameter; larger prunes earlier
    double eta_start = 0.01;    // learning rate, linearly annealed
    double eta_end = 0.01;
    std::size_t n_iter = 300;   // epoch count
    LossKind loss = LossKind::squared;
    std::uint64_t seed = 0;     // only used when batch_size > 0
    std::size_t batch_size = 0; // 0 = full batch
    bool fit_intercept = true;  // unpenalized, never pruned
    // The source experiment grids carry an "s" parameter that is never
    // defined; accepted and ignored so those grids stay expressible.
    double s = 0.0;
};

// Number of features kept alive at epoch e when annealing from M down to k:
//   M_e = k + (M - k) * max(0, (n_iter - 2e) / (2e*mu + n_iter))
// rounded half-up and clamped to [k, M]. M_0 = M, nonincreasing, and M_e = k
// for every e >= n_iter. Throws ConfigError when M < k.
std::size_t annealing_schedule(std::size_t e, std::size_t M, std::size_t k, double mu,
                               std::size_t n_iter);

// Starts from beta = 0; each epoch takes one gradient step (squared loss in
// its 1/n mean form, or logistic loss on {-1,+1} labels) and then keeps the
// M_e largest |beta_j|, zeroing the rest. Ties on |beta_j| survive by lower
// column index. Removed features are never resurrected. Deterministic:
// identical (X, y, cfg) give a bit-identical model.
// Throws DivergenceError naming the epoch if the loss goes non-finite.
// support_trace, when given, receives the surviving column indices after
// every epoch (used by the monotonicity property tests).
LinearModel fsa_fit(const FeatureMatrix& X, const TargetVector& y, const FsaConfig& cfg,
                    std::vector<std::vector<Eigen::Index>>* support_trace = nullptr);

// Loss value and gradient of the two FSA losses at (beta, intercept);
// exposed for the finite-difference gradient checks.
double fsa_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                const Eigen::VectorXd& beta, double intercept,
                Eigen::VectorXd* grad_beta = nullptr, double* grad_intercept = nullptr);

} // namespace annealcast
