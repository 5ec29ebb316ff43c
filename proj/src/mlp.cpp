#include "annealcast/mlp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "annealcast/error.hpp"
#include "annealcast/numeric.hpp"
#include "annealcast/rng.hpp"

namespace annealcast {

namespace {

double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::ArrayXXd activate(const Eigen::ArrayXXd& z, Activation act) {
    switch (act) {
    case Activation::relu: return z.max(0.0);
    case Activation::tanh_act: return z.tanh();
    case Activation::sigmoid: return 1.0 / (1.0 + (-z).exp());
    }
    return z;
}

Eigen::ArrayXXd activate_slope(const Eigen::ArrayXXd& z, Activation act) {
    switch (act) {
    case Activation::relu: return (z > 0.0).cast<double>();
    case Activation::tanh_act: return 1.0 - z.tanh().square();
    case Activation::sigmoid: {
        const Eigen::ArrayXXd s = 1.0 / (1.0 + (-z).exp());
        return s * (1.0 - s);
    }
    }
    return Eigen::ArrayXXd::Ones(z.rows(), z.cols());
}

// forward + backward over one batch; gradients are means over the batch
double forward_backward(const std::vector<Eigen::MatrixXd>& W,
                        const std::vector<Eigen::VectorXd>& b, Activation act, MlpLoss loss,
                        const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        std::vector<Eigen::MatrixXd>* grad_w,
                        std::vector<Eigen::VectorXd>* grad_b) {
    const std::size_t layers = W.size();
    const Eigen::Index n = X.rows();
    const double nd = static_cast<double>(n);

    std::vector<Eigen::MatrixXd> a(layers + 1);
    std::vector<Eigen::MatrixXd> z(layers);
    a[0] = X;
    for (std::size_t l = 0; l < layers; ++l) {
        z[l] = (a[l] * W[l]).rowwise() + b[l].transpose();
        if (l + 1 < layers) {
            a[l + 1] = activate(z[l].array(), act).matrix();
        } else {
            a[l + 1] = z[l]; // linear output; bce applies the sigmoid in the loss
        }
    }
    const Eigen::VectorXd out = a[layers].col(0);

    double loss_value = 0.0;
    Eigen::VectorXd delta(n);
    if (loss == MlpLoss::mse) {
        const Eigen::VectorXd r = out - y;
        loss_value = r.squaredNorm() / nd;
        delta = 2.0 / nd * r;
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            loss_value += log1pexp(out[i]) - y[i] * out[i];
        }
        loss_value /= nd;
        delta.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) delta[i] = (sigmoid(out[i]) - y[i]) / nd;
    }

    if (grad_w && grad_b) {
        grad_w->resize(layers);
        grad_b->resize(layers);
        Eigen::MatrixXd d = delta;
        for (std::size_t l = layers; l-- > 0;) {
            (*grad_w)[l] = a[l].transpose() * d;
            (*grad_b)[l] = d.colwise().sum().transpose();
            if (l > 0) {
                d = (d * W[l].transpose()).array() * activate_slope(z[l - 1].array(), act);
            }
        }
    }
    return loss_value;
}

Eigen::MatrixXd gather_columns(const MlpModel& model, const FeatureMatrix& X) {
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(model.feature_names.size()));
    for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
        const Eigen::Index col = X.column_index(model.feature_names[j]);
        if (col < 0) {
            throw SchemaError("model feature '" + model.feature_names[j] +
                              "' missing from input matrix");
        }
        out.col(static_cast<Eigen::Index>(j)) = X.data.col(col);
    }
    return out;
}

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

} // namespace

std::string to_string(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh_act: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    }
    return "?";
}

std::string to_string(MlpOptimizer o) {
    return o == MlpOptimizer::sgd_momentum ? "sgd_momentum" : "adam";
}

std::string to_string(MlpLoss l) { return l == MlpLoss::mse ? "mse" : "bce"; }

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh_act;
    if (s == "sigmoid") return Activation::sigmoid;
    throw ConfigError("unknown activation '" + s + "'");
}

MlpOptimizer optimizer_from_string(const std::string& s) {
    if (s == "sgd_momentum" || s == "sgd") return MlpOptimizer::sgd_momentum;
    if (s == "adam") return MlpOptimizer::adam;
    throw ConfigError("unknown optimizer '" + s + "'");
}

MlpLoss mlp_loss_from_string(const std::string& s) {
    if (s == "mse") return MlpLoss::mse;
    if (s == "bce") return MlpLoss::bce;
    throw ConfigError("unknown mlp loss '" + s + "'");
}

MlpModel mlp_fit(const FeatureMatrix& X, const TargetVector& y, const MlpConfig& cfg) {
    if (cfg.hidden_layers.empty() || cfg.hidden_layers.size() > 3) {
        throw ConfigError("mlp needs 1 to 3 hidden layers, got " +
                          std::to_string(cfg.hidden_layers.size()));
    }
    for (int w : cfg.hidden_layers) {
        if (w < 1) throw ConfigError("mlp hidden width must be >= 1");
    }
    if (!(cfg.eta > 0.0)) throw ConfigError("mlp learning rate must be > 0");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) {
        throw ConfigError("mlp momentum must lie in [0, 1)");
    }
    if (cfg.epochs < 1) throw ConfigError("mlp epochs must be >= 1");
    const Eigen::Index n = X.rows();
    if (y.size() != n) throw SchemaError("target length does not match matrix rows");
    if (n < 1) throw DataError("mlp needs at least 1 row");
    if (!X.data.allFinite()) throw DataError("mlp input contains non-finite values");
    if (cfg.loss == MlpLoss::bce) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (y.values[i] != 0.0 && y.values[i] != 1.0) {
                throw DataError("bce labels must be {0,1}");
            }
        }
    }

    MlpModel model;
    model.config = cfg;
    model.feature_names = X.column_names;

    std::vector<Eigen::Index> dims;
    dims.push_back(X.cols());
    for (int w : cfg.hidden_layers) dims.push_back(w);
    dims.push_back(1);
    const std::size_t layers = dims.size() - 1;

    SplitMix64 init_rng(cfg.seed);
    model.weights.resize(layers);
    model.biases.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        model.weights[l].resize(dims[l], dims[l + 1]);
        for (Eigen::Index r = 0; r < dims[l]; ++r) {
            for (Eigen::Index c = 0; c < dims[l + 1]; ++c) {
                model.weights[l](r, c) = init_rng.next_uniform(-bound, bound);
            }
        }
        model.biases[l] = Eigen::VectorXd::Zero(dims[l + 1]);
    }

    std::vector<Eigen::MatrixXd> vel_w(layers), adam_m(layers), adam_v(layers);
    std::vector<Eigen::VectorXd> vel_b(layers), adam_mb(layers), adam_vb(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        vel_w[l] = Eigen::MatrixXd::Zero(dims[l], dims[l + 1]);
        adam_m[l] = adam_v[l] = vel_w[l];
        vel_b[l] = Eigen::VectorXd::Zero(dims[l + 1]);
        adam_mb[l] = adam_vb[l] = vel_b[l];
    }

    const std::size_t batch = cfg.batch_size == 0
                                  ? static_cast<std::size_t>(n)
                                  : std::min(cfg.batch_size, static_cast<std::size_t>(n));
    std::vector<Eigen::MatrixXd> gw;
    std::vector<Eigen::VectorXd> gb;
    long adam_t = 0;
    model.train_loss_trace.reserve(cfg.epochs);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<std::size_t> order = iota_indices(static_cast<std::size_t>(n));
        if (batch < static_cast<std::size_t>(n)) {
            SplitMix64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * epoch));
            shuffle_indices(order, rng);
        }
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            const Eigen::Index m = static_cast<Eigen::Index>(stop - start);
            Eigen::MatrixXd Xb(m, X.cols());
            Eigen::VectorXd yb(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                Xb.row(i) = X.data.row(static_cast<Eigen::Index>(order[start + i]));
                yb[i] = y.values[static_cast<Eigen::Index>(order[start + i])];
            }
            forward_backward(model.weights, model.biases, cfg.activation, cfg.loss, Xb, yb, &gw,
                             &gb);
            if (cfg.optimizer == MlpOptimizer::sgd_momentum) {
                for (std::size_t l = 0; l < layers; ++l) {
                    vel_w[l] = cfg.momentum * vel_w[l] - cfg.eta * gw[l];
                    vel_b[l] = cfg.momentum * vel_b[l] - cfg.eta * gb[l];
                    model.weights[l] += vel_w[l];
                    model.biases[l] += vel_b[l];
                }
            } else {
                ++adam_t;
                const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam_t));
                const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam_t));
                for (std::size_t l = 0; l < layers; ++l) {
                    adam_m[l] = kAdamBeta1 * adam_m[l] + (1.0 - kAdamBeta1) * gw[l];
                    adam_v[l] =
                        kAdamBeta2 * adam_v[l].array() + (1.0 - kAdamBeta2) * gw[l].array().square();
                    adam_mb[l] = kAdamBeta1 * adam_mb[l] + (1.0 - kAdamBeta1) * gb[l];
                    adam_vb[l] =
                        kAdamBeta2 * adam_vb[l].array() + (1.0 - kAdamBeta2) * gb[l].array().square();
                    model.weights[l].array() -=
                        cfg.eta * (adam_m[l].array() / bc1) /
                        ((adam_v[l].array() / bc2).sqrt() + kAdamEps);
                    model.biases[l].array() -= cfg.eta * (adam_mb[l].array() / bc1) /
                                               ((adam_vb[l].array() / bc2).sqrt() + kAdamEps);
                }
            }
        }
        const double epoch_loss = forward_backward(model.weights, model.biases, cfg.activation,
                                                   cfg.loss, X.data, y.values, nullptr, nullptr);
        if (!std::isfinite(epoch_loss)) {
            throw DivergenceError("mlp loss became non-finite at epoch " + std::to_string(epoch));
        }
        model.train_loss_trace.push_back(epoch_loss);
    }
    return model;
}

Eigen::VectorXd mlp_predict(const MlpModel& model, const FeatureMatrix& X) {
    Eigen::MatrixXd a = gather_columns(model, X);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        Eigen::MatrixXd z = (a * model.weights[l]).rowwise() + model.biases[l].transpose();
        if (l + 1 < model.weights.size()) {
            a = activate(z.array(), model.config.activation).matrix();
        } else {
            a = z;
        }
    }
    Eigen::VectorXd out = a.col(0);
    if (model.config.loss == MlpLoss::bce) {
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = sigmoid(out[i]);
    }
    return out;
}

double mlp_loss_and_grads(const MlpModel& model, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y, std::vector<Eigen::MatrixXd>* grad_w,
                          std::vector<Eigen::VectorXd>* grad_b) {
    return forward_backward(model.weights, model.biases, model.config.activation,
                            model.config.loss, X, y, grad_w, grad_b);
}

std::string serialize_mlp(const MlpModel& model) {
    std::string out = "annealcast-mlp v1\n";
    out += "activation " + to_string(model.config.activation) + "\n";
    out += "loss " + to_string(model.config.loss) + "\n";
    out += "optimizer " + to_string(model.config.optimizer) + "\n";
    out += "eta " + format_double(model.config.eta) + "\n";
    out += "momentum " + format_double(model.config.momentum) + "\n";
    out += "epochs " + std::to_string(model.config.epochs) + "\n";
    out += "seed " + std::to_string(model.config.seed) + "\n";
    out += "batch_size " + std::to_string(model.config.batch_size) + "\n";
    out += "features " + std::to_string(model.feature_names.size()) + "\n";
    for (const std::string& name : model.feature_names) out += name + "\n";
    out += "layers " + std::to_string(model.weights.size()) + "\n";
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const Eigen::MatrixXd& W = model.weights[l];
        out += "layer " + std::to_string(W.rows()) + " " + std::to_string(W.cols()) + "\n";
        for (Eigen::Index r = 0; r < W.rows(); ++r) {
            for (Eigen::Index c = 0; c < W.cols(); ++c) {
                if (c > 0) out += ' ';
                out += format_double(W(r, c));
            }
            out += '\n';
        }
        const Eigen::VectorXd& b = model.biases[l];
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            if (i > 0) out += ' ';
            out += format_double(b[i]);
        }
        out += '\n';
    }
    return out;
}

MlpModel parse_mlp(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "annealcast-mlp v1") {
        throw SchemaError("not an mlp model file");
    }
    MlpModel model;
    std::string key, value;
    const auto expect_kv = [&](const char* name) {
        if (!(in >> key >> value) || key != name) {
            throw SchemaError(std::string("mlp file missing '") + name + "' line");
        }
        return value;
    };
    model.config.activation = activation_from_string(expect_kv("activation"));
    model.config.loss = mlp_loss_from_string(expect_kv("loss"));
    model.config.optimizer = optimizer_from_string(expect_kv("optimizer"));
    model.config.eta = std::stod(expect_kv("eta"));
    model.config.momentum = std::stod(expect_kv("momentum"));
    model.config.epochs = std::stoull(expect_kv("epochs"));
    model.config.seed = std::stoull(expect_kv("seed"));
    model.config.batch_size = std::stoull(expect_kv("batch_size"));

    std::size_t n_features = 0;
    if (!(in >> key >> n_features) || key != "features") {
        throw SchemaError("mlp file missing 'features' line");
    }
    model.feature_names.resize(n_features);
    for (std::size_t i = 0; i < n_features; ++i) {
        if (!(in >> model.feature_names[i])) throw SchemaError("truncated mlp feature list");
    }
    std::size_t layers = 0;
    if (!(in >> key >> layers) || key != "layers") {
        throw SchemaError("mlp file missing 'layers' line");
    }
    model.weights.resize(layers);
    model.biases.resize(layers);
    model.config.hidden_layers.clear();
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::Index rows = 0, cols = 0;
        if (!(in >> key >> rows >> cols) || key != "layer") {
            throw SchemaError("mlp file missing 'layer' header " + std::to_string(l));
        }
        model.weights[l].resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!(in >> model.weights[l](r, c))) throw SchemaError("truncated mlp weights");
            }
        }
        model.biases[l].resize(cols);
        for (Eigen::Index i = 0; i < cols; ++i) {
            if (!(in >> model.biases[l][i])) throw SchemaError("truncated mlp biases");
        }
        if (l + 1 < layers) model.config.hidden_layers.push_back(static_cast<int>(cols));
    }
    return model;
}

void save_mlp(const MlpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << serialize_mlp(model);
}

MlpModel load_mlp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mlp(buf.str());
}

} // namespace annealcast
