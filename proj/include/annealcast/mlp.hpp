#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "annealcast/feature_matrix.hpp"

namespace annealcast {

enum class Activation { relu, tanh_act, sigmoid };
enum class MlpOptimizer { sgd_momentum, adam };
enum class MlpLoss { mse, bce };

std::string to_string(Activation a);
std::string to_string(MlpOptimizer o);
std::string to_string(MlpLoss l);
Activation activation_from_string(const std::string& s);
MlpOptimizer optimizer_from_string(const std::string& s);
MlpLoss mlp_loss_from_string(const std::string& s);

// Small feed-forward network: 1-3 hidden layers, scalar output. The output
// is linear for mse and a sigmoid for bce. ADAM runs with the canonical
// beta1=0.9, beta2=0.999, eps=1e-8.
struct MlpConfig {
    std::vector<int> hidden_layers = {20};
    Activation activation = Activation::tanh_act;
    MlpOptimizer optimizer = MlpOptimizer::adam;
    double eta = 0.01;
    double momentum = 0.9; // sgd_momentum only
    std::size_t epochs = 200;
    MlpLoss loss = MlpLoss::mse;
    std::uint64_t seed = 0;
    std::size_t batch_size = 32; // 0 = full batch
};

struct MlpModel {
    MlpConfig config;
    std::vector<std::string> feature_names;
    std::vector<Eigen::MatrixXd> weights; // weights[l] is fan_in x fan_out
    std::vector<Eigen::VectorXd> biases;
    std::vector<double> train_loss_trace;
};

// Standard backpropagation. Weights start uniform in
// (-1/sqrt(fan_in), +1/sqrt(fan_in)) drawn layer by layer, row-major, from a
// single splitmix64 stream seeded with cfg.seed; biases start at zero.
// Mini-batch order reshuffles every epoch from the same seed, so a fixed
// (X, y, cfg) gives a bit-identical model.
// Throws ConfigError for an invalid layer plan, DataError for bce labels
// outside {0,1}, DivergenceError (with the epoch) if the loss goes NaN.
MlpModel mlp_fit(const FeatureMatrix& X, const TargetVector& y, const MlpConfig& cfg);

// mse: linear output; bce: probability
Eigen::VectorXd mlp_predict(const MlpModel& model, const FeatureMatrix& X);

// Mean loss over (X, y) plus parameter gradients at the current weights,
// exposed for the finite-difference checks. X columns must already be in
// model feature order.
double mlp_loss_and_grads(const MlpModel& model, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y, std::vector<Eigen::MatrixXd>* grad_w,
                          std::vector<Eigen::VectorXd>* grad_b);

// Structured text round trip at full precision; reloaded models predict
// bit-identically.
std::string serialize_mlp(const MlpModel& model);
MlpModel parse_mlp(const std::string& text);
void save_mlp(const MlpModel& model, const std::string& path);
MlpModel load_mlp(const std::string& path);

} // namespace annealcast
