#include "annealcast/linear_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "annealcast/error.hpp"
#include "annealcast/numeric.hpp"

namespace annealcast {

std::string to_string(LossKind loss) {
    return loss == LossKind::squared ? "squared" : "logistic";
}

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "squared") return LossKind::squared;
    if (s == "logistic") return LossKind::logistic;
    throw ConfigError("unknown loss kind '" + s + "'");
}

std::vector<std::string> LinearModel::support() const {
    std::vector<std::string> out;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) out.push_back(feature_names[static_cast<std::size_t>(j)]);
    }
    return out;
}

std::size_t LinearModel::support_size() const {
    std::size_t count = 0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) ++count;
    }
    return count;
}

Eigen::VectorXd LinearModel::decision(const FeatureMatrix& X) const {
    Eigen::VectorXd score = Eigen::VectorXd::Constant(X.rows(), intercept);
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta[j] == 0.0) continue;
        const std::string& name = feature_names[static_cast<std::size_t>(j)];
        const Eigen::Index col = X.column_index(name);
        if (col < 0) throw SchemaError("model feature '" + name + "' missing from input matrix");
        score += beta[j] * X.data.col(col);
    }
    return score;
}

Eigen::VectorXd LinearModel::predict(const FeatureMatrix& X) const {
    Eigen::VectorXd score = decision(X);
    if (loss == LossKind::logistic) {
        for (Eigen::Index i = 0; i < score.size(); ++i) {
            score[i] = 1.0 / (1.0 + std::exp(-score[i]));
        }
    }
    return score;
}

std::string serialize_linear_model(const LinearModel& model) {
    std::string out = "annealcast-linear-model v1\n";
    out += "loss " + to_string(model.loss) + "\n";
    out += "intercept " + format_double(model.intercept) + "\n";
    out += "features " + std::to_string(model.feature_names.size()) + "\n";
    for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
        out += model.feature_names[j] + " " +
               format_double(model.beta[static_cast<Eigen::Index>(j)]) + "\n";
    }
    return out;
}

LinearModel parse_linear_model(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "annealcast-linear-model v1") {
        throw SchemaError("not a linear model file");
    }
    LinearModel model;
    std::string word;
    std::string loss_name;
    std::size_t n_features = 0;
    if (!(in >> word >> loss_name) || word != "loss") throw SchemaError("missing loss line");
    model.loss = loss_kind_from_string(loss_name);
    if (!(in >> word >> model.intercept) || word != "intercept") {
        throw SchemaError("missing intercept line");
    }
    if (!(in >> word >> n_features) || word != "features") {
        throw SchemaError("missing features line");
    }
    model.feature_names.resize(n_features);
    model.beta.resize(static_cast<Eigen::Index>(n_features));
    for (std::size_t j = 0; j < n_features; ++j) {
        if (!(in >> model.feature_names[j] >> model.beta[static_cast<Eigen::Index>(j)])) {
            throw SchemaError("truncated model file at feature " + std::to_string(j));
        }
    }
    return model;
}

void save_linear_model(const LinearModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << serialize_linear_model(model);
}

LinearModel load_linear_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_linear_model(buf.str());
}

} // namespace annealcast
