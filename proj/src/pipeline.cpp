#include "annealcast/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "annealcast/error.hpp"
#include "annealcast/feature_pool.hpp"
#include "annealcast/metrics.hpp"
#include "annealcast/normalize.hpp"
#include "annealcast/numeric.hpp"

namespace annealcast {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "annealcast 0.1.0";

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

    template <typename F>
    auto run(const char* name, F&& fn) -> decltype(fn()) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto result = fn();
            record(name, t0);
            return result;
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(name) + ": " + e.what());
        }
    }

    template <typename F>
    void run_void(const char* name, F&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn();
            record(name, t0);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(name) + ": " + e.what());
        }
    }

private:
    void record(const char* name, std::chrono::steady_clock::time_point t0) {
        const auto dt = std::chrono::steady_clock::now() - t0;
        sink_.push_back({name, std::chrono::duration<double, std::milli>(dt).count()});
    }

    std::vector<StageTiming>& sink_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << content;
}

// ---- targets ---------------------------------------------------------------

struct TargetsTable {
    std::int64_t first_bar = 0;
    std::vector<double> log_ret;
    std::vector<double> trend; // {-1,+1}
};

TargetsTable targets_from_series(const OhlcvSeries& series) {
    const std::vector<double> rets = log_returns(series.closes());
    const TargetVector trend = trend_labels(rets);
    // bar b carries return[b] and trend[b]; both defined from bar 2 on
    TargetsTable t;
    t.first_bar = 2;
    const std::size_t count = static_cast<std::size_t>(trend.size());
    t.log_ret.resize(count);
    t.trend.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        t.log_ret[i] = rets[i + 1];
        t.trend[i] = trend.values[static_cast<Eigen::Index>(i)];
    }
    return t;
}

std::string targets_to_csv(const TargetsTable& t) {
    std::string out = "bar,log_return,trend\n";
    for (std::size_t i = 0; i < t.log_ret.size(); ++i) {
        out += std::to_string(t.first_bar + static_cast<std::int64_t>(i));
        out += ',';
        out += format_double(t.log_ret[i]);
        out += ',';
        out += t.trend[i] > 0.0 ? "1" : "-1";
        out += '\n';
    }
    return out;
}

TargetsTable targets_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("targets CSV is empty");
    TargetsTable t;
    bool first = true;
    std::int64_t prev_bar = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::int64_t bar = 0;
        double lr = 0.0, tr = 0.0;
        if (std::sscanf(line.c_str(), "%lld,%lf,%lf", reinterpret_cast<long long*>(&bar), &lr,
                        &tr) != 3) {
            throw SchemaError("bad targets CSV row: " + line);
        }
        if (tr != -1.0 && tr != 1.0) {
            throw DataError("trend label must be -1 or 1, got " + format_double(tr));
        }
        if (first) {
            t.first_bar = bar;
            first = false;
        } else if (bar != prev_bar + 1) {
            throw SchemaError("targets CSV bars must be consecutive");
        }
        prev_bar = bar;
        t.log_ret.push_back(lr);
        t.trend.push_back(tr);
    }
    if (t.log_ret.empty()) throw DataError("no usable rows in targets CSV");
    return t;
}

struct Artifacts {
    FeatureMatrix pool;
    TargetsTable targets;
};

json meta_to_json(const Artifacts& art, const std::string& dataset_name) {
    json dropped = json::array();
    for (const DroppedColumn& d : art.pool.dropped_columns) {
        dropped.push_back({{"name", d.name}, {"reason", d.reason}});
    }
    return json{{"dataset", dataset_name},
                {"first_bar", art.pool.first_bar},
                {"rows", art.pool.rows()},
                {"columns", art.pool.cols()},
                {"dropped", dropped}};
}

OhlcvSeries load_series(const DatasetSpec& ds) {
    if (ds.fetch) {
        return fetch_ohlcv(ds.fetch->symbol, ds.fetch->start, ds.fetch->end, ds.fetch->endpoint);
    }
    return parse_ohlcv_csv(read_file(ds.csv_path), ds.name);
}

Artifacts build_artifacts(const ExperimentConfig& cfg, StageClock& clock) {
    Artifacts art;
    if (!cfg.dataset.features_path.empty()) {
        clock.run_void("load_features", [&] {
            std::istringstream in(read_file(cfg.dataset.features_path));
            art.pool = read_feature_matrix_csv(in);
            if (!cfg.dataset.meta_path.empty()) {
                const json meta = json::parse(read_file(cfg.dataset.meta_path));
                art.pool.first_bar = meta.value("first_bar", 0);
                for (const json& d : meta.value("dropped", json::array())) {
                    art.pool.dropped_columns.push_back(
                        {d.value("name", ""), d.value("reason", "")});
                }
            }
            art.targets = targets_from_csv(read_file(cfg.dataset.targets_path));
        });
        return art;
    }

    // cache keyed on the raw bytes plus the pool parameters
    std::string cache_dir;
    std::string cache_key;
    if (const char* env = std::getenv("ANNEALCAST_CACHE"); env && *env &&
                                                           !cfg.dataset.csv_path.empty()) {
        std::string material = read_file(cfg.dataset.csv_path) + "|";
        for (std::size_t p : cfg.periods) material += std::to_string(p) + ",";
        material += "|";
        for (std::size_t l : cfg.lags) material += std::to_string(l) + ",";
        material += "|" + format_double(cfg.nan_drop_frac);
        cache_dir = env;
        cache_key = fnv1a_hex(material);
        const fs::path base = fs::path(cache_dir) / cache_key;
        if (fs::exists(base.string() + ".features.csv") &&
            fs::exists(base.string() + ".targets.csv") &&
            fs::exists(base.string() + ".meta.json")) {
            clock.run_void("load_cached_features", [&] {
                std::istringstream in(read_file(base.string() + ".features.csv"));
                art.pool = read_feature_matrix_csv(in);
                const json meta = json::parse(read_file(base.string() + ".meta.json"));
                art.pool.first_bar = meta.value("first_bar", 0);
                for (const json& d : meta.value("dropped", json::array())) {
                    art.pool.dropped_columns.push_back(
                        {d.value("name", ""), d.value("reason", "")});
                }
                art.targets = targets_from_csv(read_file(base.string() + ".targets.csv"));
            });
            return art;
        }
    }

    const OhlcvSeries series = clock.run("ingest", [&] { return load_series(cfg.dataset); });
    clock.run_void("validate", [&] { series.validate(70); });
    art.pool = clock.run("features", [&] {
        return build_pool(series, cfg.periods, cfg.lags, cfg.nan_drop_frac);
    });
    art.targets = clock.run("targets", [&] { return targets_from_series(series); });

    if (!cache_dir.empty()) {
        const fs::path base = fs::path(cache_dir) / cache_key;
        fs::create_directories(cache_dir);
        write_file(base.string() + ".features.csv", feature_matrix_to_csv(art.pool));
        write_file(base.string() + ".targets.csv", targets_to_csv(art.targets));
        write_file(base.string() + ".meta.json", meta_to_json(art, cfg.dataset.name).dump(2));
    }
    return art;
}

} // namespace

// ---- config parsing --------------------------------------------------------

Task task_from_string(const std::string& s) {
    if (s == "regression") return Task::regression;
    if (s == "classification") return Task::classification;
    throw ConfigError("unknown task '" + s + "'");
}

std::string to_string(Task task) {
    return task == Task::regression ? "regression" : "classification";
}

std::string SelectorConfig::describe() const {
    switch (kind) {
    case SelectorKind::none: return "none";
    case SelectorKind::fsa: {
        std::string s = "fsa(k=" + std::to_string(fsa.k) + ",mu=" + format_double(fsa.mu) +
                        ",eta=" + format_double(fsa.eta_start);
        if (fsa.eta_end != fsa.eta_start) s += ".." + format_double(fsa.eta_end);
        s += ",n_iter=" + std::to_string(fsa.n_iter) + ")";
        return s;
    }
    case SelectorKind::lasso:
        if (lasso.lambda) return "lasso(lambda=" + format_double(*lasso.lambda) + ")";
        return "lasso(target_support=" + std::to_string(*lasso.target_support) + ")";
    }
    return "?";
}

std::string ModelConfig::describe() const {
    switch (kind) {
    case ModelKind::null_model: return "null";
    case ModelKind::linear: return "linear";
    case ModelKind::logreg:
        return "logreg(c=" + format_double(logreg.c) +
               ",penalty=" + (logreg.l2_penalty ? "l2" : "none") + ")";
    case ModelKind::mlp: {
        std::string s = "mlp(layers=[";
        for (std::size_t i = 0; i < mlp.hidden_layers.size(); ++i) {
            if (i > 0) s += ',';
            s += std::to_string(mlp.hidden_layers[i]);
        }
        s += "],act=" + to_string(mlp.activation) + ",opt=" + to_string(mlp.optimizer) +
             ",eta=" + format_double(mlp.eta) + ",epochs=" + std::to_string(mlp.epochs) + ")";
        return s;
    }
    }
    return "?";
}

namespace {

// expands every {"grid": [...]} value into its candidates (cartesian product,
// keys in sorted order so the combo order is deterministic)
std::vector<json> expand_grids(const json& obj) {
    std::vector<json> combos{obj};
    if (!obj.is_object()) return combos;
    for (const auto& [key, value] : obj.items()) {
        if (value.is_object() && value.size() == 1 && value.contains("grid")) {
            const json& options = value.at("grid");
            if (!options.is_array() || options.empty()) {
                throw ConfigError("grid for '" + key + "' must be a nonempty array");
            }
            std::vector<json> next;
            next.reserve(combos.size() * options.size());
            for (const json& combo : combos) {
                for (const json& opt : options) {
                    json c = combo;
                    c[key] = opt;
                    next.push_back(std::move(c));
                }
            }
            combos = std::move(next);
        }
    }
    return combos;
}

SelectorConfig parse_selector(const json& j, Task task, std::uint64_t seed) {
    SelectorConfig sc;
    const std::string kind = j.value("kind", "none");
    if (kind == "none") {
        sc.kind = SelectorKind::none;
        return sc;
    }
    if (kind == "fsa") {
        sc.kind = SelectorKind::fsa;
        FsaConfig& f = sc.fsa;
        f.k = j.value("k", std::size_t{10});
        f.mu = j.value("mu", 300.0);
        if (j.contains("eta")) {
            const json& eta = j.at("eta");
            if (eta.is_number()) {
                f.eta_start = f.eta_end = eta.get<double>();
            } else if (eta.is_array() && eta.size() == 2) {
                f.eta_start = eta[0].get<double>();
                f.eta_end = eta[1].get<double>();
            } else {
                throw ConfigError("fsa eta must be a number or a [start, end] pair");
            }
        }
        f.n_iter = j.value("n_iter", std::size_t{300});
        f.batch_size = j.value("batch_size", std::size_t{0});
        f.seed = j.value("seed", seed);
        f.s = j.value("s", 0.0);
        f.loss = task == Task::regression ? LossKind::squared : LossKind::logistic;
        return sc;
    }
    if (kind == "lasso") {
        sc.kind = SelectorKind::lasso;
        LassoConfig& l = sc.lasso;
        if (j.contains("lambda") && j.contains("target_support")) {
            throw ConfigError("lasso config takes lambda or target_support, not both");
        }
        if (j.contains("lambda")) {
            l.lambda = j.at("lambda").get<double>();
        } else {
            l.target_support = j.value("target_support", std::size_t{10});
        }
        l.tol = j.value("tol", 1e-8);
        l.max_sweeps = j.value("max_sweeps", std::size_t{50000});
        return sc;
    }
    throw ConfigError("unknown selector kind '" + kind + "'");
}

ModelConfig parse_model(const json& j, Task task, std::uint64_t seed) {
    ModelConfig mc;
    const std::string kind = j.value("kind", "null");
    if (kind == "null") {
        mc.kind = ModelKind::null_model;
        return mc;
    }
    if (kind == "linear") {
        if (task != Task::regression) {
            throw ConfigError("linear model is regression-only; use logreg or mlp");
        }
        mc.kind = ModelKind::linear;
        return mc;
    }
    if (kind == "logreg") {
        if (task != Task::classification) {
            throw ConfigError("logreg is classification-only");
        }
        mc.kind = ModelKind::logreg;
        mc.logreg.c = j.value("c", 1.0);
        const std::string penalty = j.value("penalty", "l2");
        if (penalty == "l2") mc.logreg.l2_penalty = true;
        else if (penalty == "none") mc.logreg.l2_penalty = false;
        else throw ConfigError("logreg penalty must be l2 or none");
        mc.logreg.tol = j.value("tol", 1e-4);
        mc.logreg.max_iter = j.value("max_iter", std::size_t{20000});
        return mc;
    }
    if (kind == "mlp") {
        mc.kind = ModelKind::mlp;
        MlpConfig& m = mc.mlp;
        if (j.contains("hidden_layers")) {
            m.hidden_layers = j.at("hidden_layers").get<std::vector<int>>();
        }
        if (j.contains("activation")) {
            m.activation = activation_from_string(j.at("activation").get<std::string>());
        }
        if (j.contains("optimizer")) {
            m.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
        }
        m.eta = j.value("eta", 0.01);
        m.momentum = j.value("momentum", 0.9);
        m.epochs = j.value("epochs", std::size_t{200});
        m.batch_size = j.value("batch_size", std::size_t{32});
        m.seed = j.value("seed", seed);
        m.loss = task == Task::regression ? MlpLoss::mse : MlpLoss::bce;
        if (j.contains("loss") &&
            mlp_loss_from_string(j.at("loss").get<std::string>()) != m.loss) {
            throw ConfigError("mlp loss must match the task (mse for regression, bce for "
                              "classification)");
        }
        return mc;
    }
    throw ConfigError("unknown model kind '" + kind + "'");
}

DatasetSpec parse_dataset(const json& j) {
    DatasetSpec ds;
    ds.name = j.value("name", "data");
    int sources = 0;
    if (j.contains("csv")) {
        ds.csv_path = j.at("csv").get<std::string>();
        ++sources;
    }
    if (j.contains("features")) {
        ds.features_path = j.at("features").get<std::string>();
        if (!j.contains("targets")) {
            throw ConfigError("dataset with 'features' also needs 'targets'");
        }
        ds.targets_path = j.at("targets").get<std::string>();
        ds.meta_path = j.value("meta", "");
        ++sources;
    }
    if (j.contains("fetch")) {
        const json& f = j.at("fetch");
        FetchSpec spec;
        spec.symbol = f.value("symbol", "");
        spec.endpoint = f.value("endpoint", "");
        const auto start = Date::parse(f.value("start", ""));
        const auto end = Date::parse(f.value("end", ""));
        if (!start || !end) throw ConfigError("fetch needs parseable start/end dates");
        spec.start = *start;
        spec.end = *end;
        ds.fetch = spec;
        ++sources;
    }
    if (sources != 1) {
        throw ConfigError("dataset needs exactly one source: csv, features+targets, or fetch");
    }
    return ds;
}

ExperimentConfig parse_experiment_json(const json& j) {
    ExperimentConfig cfg;
    cfg.canonical = j.dump();
    cfg.name = j.value("name", "run");
    if (!j.contains("dataset")) throw ConfigError("config needs a 'dataset' block");
    cfg.dataset = parse_dataset(j.at("dataset"));
    cfg.task = task_from_string(j.value("task", "regression"));
    cfg.horizon = j.value("horizon", 3);
    if (cfg.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (j.contains("periods")) cfg.periods = j.at("periods").get<std::vector<std::size_t>>();
    if (j.contains("lags")) cfg.lags = j.at("lags").get<std::vector<std::size_t>>();
    cfg.nan_drop_frac = j.value("nan_drop_frac", 0.10);
    if (j.contains("split")) {
        const json& s = j.at("split");
        cfg.train_frac = s.value("train_frac", 0.7);
        cfg.seed = s.value("seed", std::uint64_t{17});
        cfg.split_mode = split_mode_from_string(s.value("mode", "random"));
    }
    cfg.return_scale = j.value("return_scale", 100.0);
    if (!(cfg.return_scale > 0.0)) throw ConfigError("return_scale must be > 0");

    cfg.selector_grid.clear();
    for (const json& sj : expand_grids(j.value("selector", json{{"kind", "none"}}))) {
        cfg.selector_grid.push_back(parse_selector(sj, cfg.task, cfg.seed));
    }
    cfg.model_grid.clear();
    for (const json& mj : expand_grids(j.value("model", json{{"kind", "null"}}))) {
        cfg.model_grid.push_back(parse_model(mj, cfg.task, cfg.seed));
    }
    return cfg;
}

} // namespace

ExperimentConfig parse_experiment_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return parse_experiment_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

std::string config_hash(const ExperimentConfig& cfg) { return fnv1a_hex(cfg.canonical); }

// ---- data preparation ------------------------------------------------------

PreparedData prepare_data(const ExperimentConfig& cfg) {
    PreparedData prep;
    StageClock clock(prep.timings);

    Artifacts art = build_artifacts(cfg, clock);
    prep.pool_columns = static_cast<std::size_t>(art.pool.cols());
    prep.dropped = art.pool.dropped_columns;

    // put features and targets on a common bar range
    const std::int64_t xf = art.pool.first_bar;
    const std::int64_t yf = art.targets.first_bar;
    const std::int64_t x_end = xf + art.pool.rows();
    const std::int64_t y_end = yf + static_cast<std::int64_t>(art.targets.log_ret.size());
    const std::int64_t b0 = std::max(xf, yf);
    const std::int64_t b1 = std::min(x_end, y_end);
    if (b1 - b0 < 10) throw DataError("fewer than 10 rows shared by features and targets");

    FeatureMatrix X;
    X.column_names = art.pool.column_names;
    X.dropped_columns = art.pool.dropped_columns;
    X.first_bar = b0;
    X.data = art.pool.data.middleRows(b0 - xf, b1 - b0);

    TargetVector y;
    y.first_bar = b0;
    y.values.resize(static_cast<Eigen::Index>(b1 - b0));
    if (cfg.task == Task::regression) {
        y.kind = TargetKind::log_return;
        for (std::int64_t b = b0; b < b1; ++b) {
            y.values[static_cast<Eigen::Index>(b - b0)] =
                art.targets.log_ret[static_cast<std::size_t>(b - yf)] * cfg.return_scale;
        }
    } else {
        y.kind = TargetKind::trend;
        y.encoding = LabelEncoding::pm1;
        for (std::int64_t b = b0; b < b1; ++b) {
            y.values[static_cast<Eigen::Index>(b - b0)] =
                art.targets.trend[static_cast<std::size_t>(b - yf)];
        }
    }

    auto [Xa, ya] = clock.run("align", [&] { return align_horizon(X, y, cfg.horizon); });

    if (cfg.task == Task::classification) {
        double pos = 0.0;
        for (Eigen::Index i = 0; i < ya.values.size(); ++i) {
            if (ya.values[i] > 0.0) pos += 1.0;
        }
        const double frac = pos / static_cast<double>(ya.values.size());
        prep.label_base_rate = std::max(frac, 1.0 - frac);
    }

    prep.split = clock.run("split", [&] {
        return split(static_cast<std::size_t>(Xa.rows()), cfg.train_frac, cfg.seed,
                     cfg.split_mode);
    });

    clock.run_void("normalize", [&] {
        const NormalizationParams params = fit_minmax(Xa, prep.split.train_rows);
        const FeatureMatrix Xn = apply_minmax(Xa, params);
        prep.X_train = Xn.select_rows(prep.split.train_rows);
        prep.X_test = Xn.select_rows(prep.split.test_rows);
    });

    prep.y_train = ya;
    prep.y_train.values = ya.select(prep.split.train_rows);
    prep.y_test = ya;
    prep.y_test.values = ya.select(prep.split.test_rows);
    return prep;
}

// ---- fitting ---------------------------------------------------------------

namespace {

struct FittedCombo {
    SelectorKind selector_kind = SelectorKind::none;
    ModelKind model_kind = ModelKind::null_model;
    Task task = Task::regression;
    LinearModel selector_model;
    std::vector<std::string> selected; // empty = all columns
    NullModel null_m;
    LinearModel linear_m; // linear least squares or logreg
    MlpModel mlp_m;

    Eigen::VectorXd predict(const FeatureMatrix& X) const {
        const FeatureMatrix Xm = selected.empty() ? X : X.select_columns(selected);
        switch (model_kind) {
        case ModelKind::null_model: return null_predict(null_m, X.rows());
        case ModelKind::linear: return linear_m.predict(Xm);
        case ModelKind::logreg: return logreg_predict_proba(linear_m, Xm);
        case ModelKind::mlp: return mlp_predict(mlp_m, Xm);
        }
        return Eigen::VectorXd();
    }
};

FittedCombo fit_combo(const FeatureMatrix& X_train, const TargetVector& y_train,
                      const SelectorConfig& sc, const ModelConfig& mc, Task task) {
    FittedCombo fit;
    fit.selector_kind = sc.kind;
    fit.model_kind = mc.kind;
    fit.task = task;

    if (sc.kind == SelectorKind::fsa) {
        fit.selector_model = fsa_fit(X_train, y_train, sc.fsa);
        fit.selected = fit.selector_model.support();
    } else if (sc.kind == SelectorKind::lasso) {
        fit.selector_model = lasso_fit(X_train, y_train, sc.lasso);
        fit.selected = fit.selector_model.support();
    }
    if (sc.kind != SelectorKind::none && fit.selected.empty()) {
        throw DataError("selector kept no features; loosen k / lambda");
    }

    const FeatureMatrix Xm = fit.selected.empty() ? X_train : X_train.select_columns(fit.selected);
    switch (mc.kind) {
    case ModelKind::null_model: {
        if (task == Task::classification) {
            const TargetVector y01 = relabel(y_train, LabelEncoding::zero_one);
            fit.null_m = null_fit(y01.values);
        } else {
            fit.null_m = null_fit(y_train.values);
        }
        break;
    }
    case ModelKind::linear:
        fit.linear_m = least_squares_fit(Xm, y_train);
        break;
    case ModelKind::logreg: {
        const TargetVector y01 = relabel(y_train, LabelEncoding::zero_one);
        fit.linear_m = logreg_fit(Xm, y01, mc.logreg);
        break;
    }
    case ModelKind::mlp: {
        if (task == Task::classification) {
            const TargetVector y01 = relabel(y_train, LabelEncoding::zero_one);
            fit.mlp_m = mlp_fit(Xm, y01, mc.mlp);
        } else {
            fit.mlp_m = mlp_fit(Xm, y_train, mc.mlp);
        }
        break;
    }
    }
    return fit;
}

struct EvalOut {
    Eigen::VectorXd per_sample;
    std::map<std::string, double> metrics;
};

EvalOut evaluate_predictions(Task task, const TargetVector& y_test,
                             const Eigen::VectorXd& predictions) {
    EvalOut out;
    if (task == Task::regression) {
        out.per_sample = (predictions - y_test.values).array().square();
        out.metrics["mse"] = mse(y_test.values, predictions);
        return out;
    }
    const TargetVector y01 = relabel(y_test, LabelEncoding::zero_one);
    const Eigen::VectorXd labels = predict_label(predictions);
    out.per_sample.resize(labels.size());
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        out.per_sample[i] = labels[i] == y01.values[i] ? 1.0 : 0.0;
    }
    const ConfusionMatrix cm = confusion(y01.values, labels);
    out.metrics["accuracy"] = accuracy(cm);
    out.metrics["recall"] = recall(cm);
    bool has_both = false, saw0 = false, saw1 = false;
    for (Eigen::Index i = 0; i < y01.values.size(); ++i) {
        (y01.values[i] == 1.0 ? saw1 : saw0) = true;
    }
    has_both = saw0 && saw1;
    if (has_both) out.metrics["auc"] = roc_auc(y01.values, predictions);
    return out;
}

std::string serialize_fitted_model(const FittedCombo& fit) {
    switch (fit.model_kind) {
    case ModelKind::null_model: return serialize_null_model(fit.null_m);
    case ModelKind::linear:
    case ModelKind::logreg: return serialize_linear_model(fit.linear_m);
    case ModelKind::mlp: return serialize_mlp(fit.mlp_m);
    }
    return "";
}

} // namespace

FitOutcome fit_and_eval(const PreparedData& prep, const ExperimentConfig& cfg) {
    if (cfg.selector_grid.empty() || cfg.model_grid.empty()) {
        throw ConfigError("config needs at least one selector and one model candidate");
    }

    std::size_t best_s = 0, best_m = 0;
    const std::size_t combos = cfg.selector_grid.size() * cfg.model_grid.size();
    if (combos > 1) {
        // validation fold carved from the training rows (last 20% by the same
        // seeded splitter); best combo refits on the full training set
        const SplitIndex vsplit = split(static_cast<std::size_t>(prep.X_train.rows()), 0.8,
                                        cfg.seed + 1, cfg.split_mode);
        const FeatureMatrix X_sub = prep.X_train.select_rows(vsplit.train_rows);
        const FeatureMatrix X_val = prep.X_train.select_rows(vsplit.test_rows);
        TargetVector y_sub = prep.y_train;
        y_sub.values = prep.y_train.select(vsplit.train_rows);
        TargetVector y_val = prep.y_train;
        y_val.values = prep.y_train.select(vsplit.test_rows);

        double best_score = 0.0;
        bool have_best = false;
        for (std::size_t si = 0; si < cfg.selector_grid.size(); ++si) {
            for (std::size_t mi = 0; mi < cfg.model_grid.size(); ++mi) {
                const FittedCombo fit =
                    fit_combo(X_sub, y_sub, cfg.selector_grid[si], cfg.model_grid[mi], cfg.task);
                const EvalOut val = evaluate_predictions(cfg.task, y_val, fit.predict(X_val));
                const double score = cfg.task == Task::regression ? val.metrics.at("mse")
                                                                  : val.metrics.at("accuracy");
                const bool better = !have_best ||
                                    (cfg.task == Task::regression ? score < best_score
                                                                  : score > best_score);
                if (better) {
                    best_score = score;
                    best_s = si;
                    best_m = mi;
                    have_best = true;
                }
            }
        }
    }

    const SelectorConfig& sc = cfg.selector_grid[best_s];
    const ModelConfig& mc = cfg.model_grid[best_m];
    const FittedCombo fit = fit_combo(prep.X_train, prep.y_train, sc, mc, cfg.task);
    const EvalOut eval = evaluate_predictions(cfg.task, prep.y_test, fit.predict(prep.X_test));

    FitOutcome outcome;
    outcome.selector_desc = sc.describe();
    outcome.model_desc = mc.describe();
    outcome.selected = fit.selected;
    outcome.predictions = fit.predict(prep.X_test);
    outcome.per_sample = eval.per_sample;
    outcome.metrics = eval.metrics;
    if (sc.kind != SelectorKind::none) {
        outcome.selector_model_text = serialize_linear_model(fit.selector_model);
    }
    outcome.model_text = serialize_fitted_model(fit);
    return outcome;
}

// ---- run records -----------------------------------------------------------

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) out[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return out;
}

} // namespace

std::string serialize_run_record(const RunRecord& record) {
    json j;
    j["name"] = record.name;
    j["config_hash"] = record.config_hash;
    j["version"] = record.version;
    j["dataset"] = record.dataset_name;
    j["task"] = record.task;
    j["selector"] = record.selector_desc;
    j["model"] = record.model_desc;
    j["selected_features"] = record.selected_features;
    j["pool_columns"] = record.pool_columns;
    json timings = json::array();
    for (const StageTiming& t : record.timings) {
        timings.push_back({{"stage", t.stage}, {"ms", t.ms}});
    }
    j["timings"] = timings;
    j["metrics"] = record.metrics;
    j["per_sample"] = vector_to_json(record.per_sample);
    j["null_per_sample"] = vector_to_json(record.null_per_sample);
    return j.dump(2) + "\n";
}

RunRecord parse_run_record(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("run record is not valid JSON: ") + e.what());
    }
    RunRecord r;
    r.name = j.value("name", "");
    r.config_hash = j.value("config_hash", "");
    r.version = j.value("version", "");
    r.dataset_name = j.value("dataset", "");
    r.task = j.value("task", "regression");
    r.selector_desc = j.value("selector", "");
    r.model_desc = j.value("model", "");
    if (j.contains("selected_features")) {
        r.selected_features = j.at("selected_features").get<std::vector<std::string>>();
    }
    r.pool_columns = j.value("pool_columns", std::size_t{0});
    for (const json& t : j.value("timings", json::array())) {
        r.timings.push_back({t.value("stage", ""), t.value("ms", 0.0)});
    }
    if (j.contains("metrics")) {
        for (const auto& [key, value] : j.at("metrics").items()) {
            r.metrics[key] = value.get<double>();
        }
    }
    r.per_sample = vector_from_json(j.value("per_sample", json::array()));
    r.null_per_sample = vector_from_json(j.value("null_per_sample", json::array()));
    return r;
}

// ---- single experiment -----------------------------------------------------

namespace {

RunRecord make_record(const ExperimentConfig& cfg, const PreparedData& prep,
                      const FitOutcome& outcome, const FitOutcome& null_outcome) {
    RunRecord record;
    record.name = cfg.name;
    record.config_hash = config_hash(cfg);
    record.version = kVersion;
    record.dataset_name = cfg.dataset.name;
    record.task = to_string(cfg.task);
    record.timings = prep.timings;
    record.selector_desc = outcome.selector_desc;
    record.model_desc = outcome.model_desc;
    record.selected_features = outcome.selected;
    record.pool_columns = prep.pool_columns;
    record.metrics = outcome.metrics;
    for (const auto& [key, value] : null_outcome.metrics) {
        record.metrics["null_" + key] = value;
    }
    if (cfg.task == Task::classification) {
        record.metrics["label_base_rate"] = prep.label_base_rate;
    }
    record.per_sample = outcome.per_sample;
    record.null_per_sample = null_outcome.per_sample;
    return record;
}

ExperimentConfig null_variant(const ExperimentConfig& cfg) {
    ExperimentConfig null_cfg = cfg;
    null_cfg.name = "null";
    null_cfg.selector_grid = {SelectorConfig{}};
    ModelConfig nm;
    nm.kind = ModelKind::null_model;
    null_cfg.model_grid = {nm};
    return null_cfg;
}

Direction task_direction(const std::string& task) {
    return task == "regression" ? Direction::minimize : Direction::maximize;
}

std::string headline_metric(const std::string& task) {
    return task == "regression" ? "mse" : "accuracy";
}

// tables from records that share a dataset column; AUC gets a star on the
// best value but no significance flags (no per-sample decomposition)
SuiteResult assemble_tables(const std::vector<RunRecord>& records, double alpha) {
    SuiteResult result;
    result.records = records;
    if (records.empty()) return result;

    std::vector<std::string> datasets;
    std::vector<std::string> variants;
    for (const RunRecord& r : records) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset_name) == datasets.end()) {
            datasets.push_back(r.dataset_name);
        }
        if (std::find(variants.begin(), variants.end(), r.name) == variants.end()) {
            variants.push_back(r.name);
        }
    }
    const std::string task = records.front().task;
    const std::string metric = headline_metric(task);

    ComparisonTable main_table;
    main_table.title = metric;
    main_table.model_names = variants;
    main_table.dataset_names = datasets;
    main_table.cells.assign(variants.size(), std::vector<EvalCell>(datasets.size()));
    for (auto& row : main_table.cells) {
        for (EvalCell& cell : row) cell.present = false;
    }

    ComparisonTable auc_table = main_table;
    auc_table.title = "auc";

    for (std::size_t d = 0; d < datasets.size(); ++d) {
        std::vector<std::size_t> variant_rows;   // index into `variants`
        std::vector<const RunRecord*> column;
        for (const RunRecord& r : records) {
            if (r.dataset_name != datasets[d]) continue;
            if (r.task != task) throw ConfigError("all runs in a report must share the task");
            column.push_back(&r);
            variant_rows.push_back(static_cast<std::size_t>(
                std::find(variants.begin(), variants.end(), r.name) - variants.begin()));
        }
        if (column.size() < 2) {
            // a single run still renders, without flags
            for (std::size_t i = 0; i < column.size(); ++i) {
                EvalCell& cell = main_table.cells[variant_rows[i]][d];
                cell.present = true;
                cell.value = column[i]->metrics.at(metric);
                cell.best = true;
            }
            continue;
        }
        std::vector<Eigen::VectorXd> losses;
        for (const RunRecord* r : column) {
            if (r->per_sample.size() != column.front()->per_sample.size()) {
                throw ConfigError("comparisons must share test rows; dataset '" + datasets[d] +
                                  "' has mismatched per-sample lengths");
            }
            losses.push_back(r->per_sample);
        }
        const TopGroupFlags flags = top_group(losses, alpha, task_direction(task));
        for (std::size_t i = 0; i < column.size(); ++i) {
            EvalCell& cell = main_table.cells[variant_rows[i]][d];
            cell.present = true;
            cell.value = column[i]->metrics.at(metric);
            cell.best = i == flags.best_index;
            cell.top_group = flags.top_group[i];
            cell.t_vs_best = flags.vs_best[i].t;
            cell.p_vs_best = flags.vs_best[i].p;
        }
        if (task == "classification") {
            std::size_t best_auc = 0;
            bool any = false;
            for (std::size_t i = 0; i < column.size(); ++i) {
                if (!column[i]->metrics.count("auc")) continue;
                if (!any || column[i]->metrics.at("auc") >
                                column[best_auc]->metrics.at("auc")) {
                    best_auc = i;
                }
                any = true;
            }
            for (std::size_t i = 0; i < column.size(); ++i) {
                if (!column[i]->metrics.count("auc")) continue;
                EvalCell& cell = auc_table.cells[variant_rows[i]][d];
                cell.present = true;
                cell.value = column[i]->metrics.at("auc");
                cell.best = any && i == best_auc;
                cell.has_test = false;
            }
        }
    }

    result.tables.push_back(std::move(main_table));
    if (task == "classification") result.tables.push_back(std::move(auc_table));
    return result;
}

class OutputTracker {
public:
    explicit OutputTracker(const std::string& dir) : dir_(dir) {
        if (!dir_.empty()) fs::create_directories(dir_);
    }

    std::string write(const std::string& filename, const std::string& content) {
        const std::string path = (fs::path(dir_) / filename).string();
        write_file(path, content);
        written_.push_back(path);
        return path;
    }

    // removes everything written so far (error path)
    void rollback() noexcept {
        for (const std::string& path : written_) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        written_.clear();
    }

    bool enabled() const { return !dir_.empty(); }

private:
    std::string dir_;
    std::vector<std::string> written_;
};

json metrics_to_json(const std::map<std::string, double>& metrics) {
    json j;
    for (const auto& [key, value] : metrics) j[key] = value;
    return j;
}

} // namespace

RunRecord run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    OutputTracker out(out_dir);
    try {
        PreparedData prep = prepare_data(cfg);
        StageClock clock(prep.timings);
        const FitOutcome outcome = clock.run("fit", [&] { return fit_and_eval(prep, cfg); });
        const FitOutcome null_outcome =
            clock.run("baseline", [&] { return fit_and_eval(prep, null_variant(cfg)); });

        RunRecord record = make_record(cfg, prep, outcome, null_outcome);
        if (out.enabled()) {
            out.write("runrecord.json", serialize_run_record(record));
            out.write("metrics.json", metrics_to_json(record.metrics).dump(2) + "\n");
            if (!outcome.selector_model_text.empty()) {
                out.write("selector_model.txt", outcome.selector_model_text);
            }
            out.write("model.txt", outcome.model_text);

            RunRecord null_record = make_record(null_variant(cfg), prep, null_outcome,
                                                null_outcome);
            if (null_record.name == record.name) null_record.name = "null_baseline";
            const SuiteResult report = assemble_tables({record, null_record}, 0.05);
            std::string text;
            for (const ComparisonTable& table : report.tables) {
                text += render_table_text(table) + "\n";
            }
            out.write("report.txt", text);
            out.write("report.csv", render_table_csv(report.tables.front()));
        }
        return record;
    } catch (...) {
        out.rollback();
        throw;
    }
}

// ---- suites ----------------------------------------------------------------

SuiteConfig parse_suite_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("suite config is not valid JSON: ") + e.what());
    }
    SuiteConfig suite;
    suite.alpha = j.value("alpha", 0.05);
    suite.jobs = j.value("jobs", std::size_t{1});
    suite.format = j.value("format", "both");
    if (!j.contains("datasets") || !j.contains("variants")) {
        throw ConfigError("suite config needs 'datasets' and 'variants' arrays");
    }
    // shared experiment skeleton: everything except dataset/selector/model
    json base = j;
    base.erase("datasets");
    base.erase("variants");
    base.erase("alpha");
    base.erase("jobs");
    if (base.contains("format")) base.erase("format");

    for (const json& ds : j.at("datasets")) {
        for (const json& variant : j.at("variants")) {
            json run = base;
            run["dataset"] = ds;
            run["name"] = variant.value("name", "variant");
            if (variant.contains("selector")) run["selector"] = variant.at("selector");
            if (variant.contains("model")) run["model"] = variant.at("model");
            suite.runs.push_back(parse_experiment_json(run));
        }
    }
    if (suite.runs.empty()) throw ConfigError("suite config expands to zero runs");
    return suite;
}

namespace {

void check_shared_protocol(const std::vector<const ExperimentConfig*>& group) {
    const ExperimentConfig& a = *group.front();
    for (const ExperimentConfig* bp : group) {
        const ExperimentConfig& b = *bp;
        const bool same = a.dataset.csv_path == b.dataset.csv_path &&
                          a.dataset.features_path == b.dataset.features_path &&
                          a.dataset.targets_path == b.dataset.targets_path &&
                          a.task == b.task && a.horizon == b.horizon && a.periods == b.periods &&
                          a.lags == b.lags && a.nan_drop_frac == b.nan_drop_frac &&
                          a.train_frac == b.train_frac && a.seed == b.seed &&
                          a.split_mode == b.split_mode && a.return_scale == b.return_scale;
        if (!same) {
            throw ConfigError("suite runs for dataset '" + a.dataset.name +
                              "' do not share the dataset/split/task protocol");
        }
    }
}

} // namespace

SuiteResult run_suite(const SuiteConfig& cfg, const std::string& out_dir) {
    if (cfg.runs.empty()) throw ConfigError("suite has no runs");

    // group runs by dataset, preserving first-appearance order
    std::vector<std::string> dataset_order;
    for (const ExperimentConfig& run : cfg.runs) {
        if (std::find(dataset_order.begin(), dataset_order.end(), run.dataset.name) ==
            dataset_order.end()) {
            dataset_order.push_back(run.dataset.name);
        }
    }

    std::vector<RunRecord> records(cfg.runs.size());

    for (const std::string& ds : dataset_order) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
            if (cfg.runs[i].dataset.name == ds) members.push_back(i);
        }
        std::vector<const ExperimentConfig*> group;
        for (std::size_t i : members) group.push_back(&cfg.runs[i]);
        check_shared_protocol(group);

        // shared preparation, then an embarrassingly parallel variant sweep
        const PreparedData prep = prepare_data(cfg.runs[members.front()]);
        const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.jobs, members.size()));
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(members.size());
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= members.size()) return;
                try {
                    const ExperimentConfig& run = cfg.runs[members[i]];
                    const FitOutcome outcome = fit_and_eval(prep, run);
                    const FitOutcome null_outcome = fit_and_eval(prep, null_variant(run));
                    records[members[i]] = make_record(run, prep, outcome, null_outcome);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        if (workers == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (std::thread& th : pool) th.join();
        }
        for (const std::exception_ptr& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    SuiteResult result = assemble_tables(records, cfg.alpha);

    if (!out_dir.empty()) {
        OutputTracker out(out_dir);
        try {
            const bool want_txt = cfg.format == "txt" || cfg.format == "both";
            const bool want_csv = cfg.format == "csv" || cfg.format == "both";
            if (want_txt) {
                std::string text;
                for (const ComparisonTable& table : result.tables) {
                    text += render_table_text(table) + "\n";
                }
                out.write("suite_report.txt", text);
            }
            if (want_csv) {
                for (const ComparisonTable& table : result.tables) {
                    out.write("report_" + table.title + ".csv", render_table_csv(table));
                }
            }
            fs::create_directories(fs::path(out_dir) / "records");
            for (const RunRecord& record : result.records) {
                out.write("records/" + record.dataset_name + "_" + record.name +
                              ".runrecord.json",
                          serialize_run_record(record));
            }
        } catch (...) {
            out.rollback();
            throw;
        }
    }
    return result;
}

SuiteResult rebuild_report(const std::vector<RunRecord>& records, double alpha) {
    if (records.empty()) throw ConfigError("report needs at least one run record");
    return assemble_tables(records, alpha);
}

// ---- staged subcommands ----------------------------------------------------

namespace {

void require_single_candidates(const ExperimentConfig& cfg) {
    if (cfg.selector_grid.size() != 1 || cfg.model_grid.size() != 1) {
        throw ConfigError("stage commands take a single selector/model candidate; "
                          "grids are only searched by `run` and `suite`");
    }
}

} // namespace

void run_features_stage(const ExperimentConfig& cfg, const std::string& features_path,
                        const std::string& targets_path, const std::string& meta_path) {
    std::vector<StageTiming> timings;
    StageClock clock(timings);
    const Artifacts art = build_artifacts(cfg, clock);
    write_file(features_path, feature_matrix_to_csv(art.pool));
    write_file(targets_path, targets_to_csv(art.targets));
    if (!meta_path.empty()) {
        write_file(meta_path, meta_to_json(art, cfg.dataset.name).dump(2) + "\n");
    }
}

void run_select_stage(const ExperimentConfig& cfg, const std::string& out_dir) {
    require_single_candidates(cfg);
    const SelectorConfig& sc = cfg.selector_grid.front();
    if (sc.kind == SelectorKind::none) {
        throw ConfigError("select stage needs selector kind fsa or lasso");
    }
    const PreparedData prep = prepare_data(cfg);
    LinearModel model;
    if (sc.kind == SelectorKind::fsa) {
        model = fsa_fit(prep.X_train, prep.y_train, sc.fsa);
    } else {
        model = lasso_fit(prep.X_train, prep.y_train, sc.lasso);
    }
    OutputTracker out(out_dir);
    try {
        out.write("selector_model.txt", serialize_linear_model(model));
        std::string names;
        for (const std::string& name : model.support()) names += name + "\n";
        out.write("selected.txt", names);
    } catch (...) {
        out.rollback();
        throw;
    }
}

void run_train_stage(const ExperimentConfig& cfg, const std::string& out_dir,
                     const std::string& selector_model_path) {
    require_single_candidates(cfg);
    ExperimentConfig local = cfg;
    if (!selector_model_path.empty()) {
        // reuse the cached selector's support instead of refitting one
        const LinearModel selector = load_linear_model(selector_model_path);
        const std::vector<std::string> support = selector.support();
        if (support.empty()) throw DataError("cached selector model has an empty support");
        SelectorConfig none;
        local.selector_grid = {none};
        const PreparedData prep = prepare_data(local);
        PreparedData restricted = prep;
        restricted.X_train = prep.X_train.select_columns(support);
        restricted.X_test = prep.X_test.select_columns(support);
        const FitOutcome outcome = fit_and_eval(restricted, local);
        OutputTracker out(out_dir);
        try {
            out.write("model.txt", outcome.model_text);
        } catch (...) {
            out.rollback();
            throw;
        }
        return;
    }
    const PreparedData prep = prepare_data(local);
    const FitOutcome outcome = fit_and_eval(prep, local);
    OutputTracker out(out_dir);
    try {
        if (!outcome.selector_model_text.empty()) {
            out.write("selector_model.txt", outcome.selector_model_text);
        }
        out.write("model.txt", outcome.model_text);
    } catch (...) {
        out.rollback();
        throw;
    }
}

std::map<std::string, double> run_evaluate_stage(const ExperimentConfig& cfg,
                                                 const std::string& model_path,
                                                 const std::string& out_dir) {
    const PreparedData prep = prepare_data(cfg);
    const std::string text = read_file(model_path);
    Eigen::VectorXd predictions;
    const std::string header = text.substr(0, text.find('\n'));
    if (header == "annealcast-null-model v1") {
        predictions = null_predict(parse_null_model(text), prep.X_test.rows());
    } else if (header == "annealcast-linear-model v1") {
        predictions = parse_linear_model(text).predict(prep.X_test);
    } else if (header == "annealcast-mlp v1") {
        predictions = mlp_predict(parse_mlp(text), prep.X_test);
    } else {
        throw SchemaError("unrecognized model file header: " + header);
    }
    const EvalOut eval = evaluate_predictions(cfg.task, prep.y_test, predictions);
    if (!out_dir.empty()) {
        OutputTracker out(out_dir);
        try {
            out.write("metrics.json", metrics_to_json(eval.metrics).dump(2) + "\n");
        } catch (...) {
            out.rollback();
            throw;
        }
    }
    return eval.metrics;
}

} // namespace annealcast
