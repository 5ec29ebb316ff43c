#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annealcast/feature_matrix.hpp"
#include "annealcast/fsa.hpp"
#include "annealcast/lasso.hpp"
#include "annealcast/mlp.hpp"
#include "annealcast/models.hpp"
#include "annealcast/ohlcv.hpp"
#include "annealcast/report.hpp"
#include "annealcast/split.hpp"

namespace annealcast {

enum class Task { regression, classification };
Task task_from_string(const std::string& s);
std::string to_string(Task task);

enum class SelectorKind { none, fsa, lasso };
enum class ModelKind { null_model, linear, logreg, mlp };

struct SelectorConfig {
    SelectorKind kind = SelectorKind::none;
    FsaConfig fsa;
    LassoConfig lasso;
    std::string describe() const;
};

struct ModelConfig {
    ModelKind kind = ModelKind::null_model;
    LogRegConfig logreg;
    MlpConfig mlp;
    std::string describe() const;
};

struct FetchSpec {
    std::string symbol;
    Date start;
    Date end;
    std::string endpoint;
};

// Exactly one source: an OHLCV CSV on disk, a cached feature-matrix /
// targets pair from a previous `features` stage, or an HTTP fetch.
struct DatasetSpec {
    std::string name = "data";
    std::string csv_path;
    std::string features_path;
    std::string targets_path;
    std::string meta_path; // optional sidecar for cached features
    std::optional<FetchSpec> fetch;
};

struct ExperimentConfig {
    std::string name = "run";
    DatasetSpec dataset;
    Task task = Task::regression;
    int horizon = 3;
    std::vector<std::size_t> periods = {2, 4, 8, 16, 32, 64};
    std::vector<std::size_t> lags = {1, 2, 3, 4, 5};
    double nan_drop_frac = 0.10;
    double train_frac = 0.7;
    std::uint64_t seed = 17;
    SplitMode split_mode = SplitMode::random;
    double return_scale = 100.0; // regression targets are log returns times this
    // candidate lists; more than one combination triggers grid search with
    // selection on a validation fold carved from the training rows (20%)
    std::vector<SelectorConfig> selector_grid = {SelectorConfig{}};
    std::vector<ModelConfig> model_grid = {ModelConfig{}};
    std::string canonical; // canonical JSON text, hashed into config_hash
};

// Parses the JSON config document. Any tunable given as {"grid": [...]}
// expands into candidates for grid search.
ExperimentConfig parse_experiment_config_text(const std::string& json_text);

// FNV-1a of the canonical config text
std::string config_hash(const ExperimentConfig& cfg);

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

// The experiment data after ingest -> features -> targets -> horizon
// alignment -> split -> train-fitted normalization. Selectors and models
// only ever see the train half.
struct PreparedData {
    FeatureMatrix X_train;
    FeatureMatrix X_test;
    TargetVector y_train; // regression: scaled log returns; classification: {-1,+1}
    TargetVector y_test;
    SplitIndex split;
    std::size_t pool_columns = 0;
    std::vector<DroppedColumn> dropped;
    double label_base_rate = 0.0; // classification: majority share of aligned labels
    std::vector<StageTiming> timings;
};

PreparedData prepare_data(const ExperimentConfig& cfg);

struct FitOutcome {
    std::string selector_desc;
    std::string model_desc;
    std::vector<std::string> selected; // empty when no selector ran
    Eigen::VectorXd predictions;       // regression values / class-1 probabilities
    Eigen::VectorXd per_sample;        // squared errors / 0-1 correctness
    std::map<std::string, double> metrics;
    std::string selector_model_text;
    std::string model_text;
};

// Runs the (possibly grid-searched) selector+model on prepared data and
// evaluates on the test rows.
FitOutcome fit_and_eval(const PreparedData& prep, const ExperimentConfig& cfg);

struct RunRecord {
    std::string name;
    std::string config_hash;
    std::string version;
    std::vector<StageTiming> timings;
    std::string selector_desc;
    std::string model_desc;
    std::vector<std::string> selected_features;
    std::size_t pool_columns = 0;
    std::map<std::string, double> metrics; // model metrics plus null_* baseline
    Eigen::VectorXd per_sample;
    Eigen::VectorXd null_per_sample;
    std::string dataset_name;
    std::string task;
};

std::string serialize_run_record(const RunRecord& record);
RunRecord parse_run_record(const std::string& text);

// Full pipeline: prepare, fit, evaluate, and (when out_dir is nonempty)
// persist runrecord.json, metrics.json, the serialized models and the
// report files. Partial outputs are removed when a stage fails.
RunRecord run_experiment(const ExperimentConfig& cfg, const std::string& out_dir = "");

struct SuiteConfig {
    double alpha = 0.05;
    std::size_t jobs = 1;
    std::string format = "both"; // csv | txt | both
    std::vector<ExperimentConfig> runs; // dataset-major x variant grid
};

SuiteConfig parse_suite_config_text(const std::string& json_text);

struct SuiteResult {
    std::vector<ComparisonTable> tables;
    std::vector<RunRecord> records;
};

// One row per model variant, one column per dataset, star/top-group flags
// from the paired t-tests. All runs in a column must share the dataset,
// split, and task; mismatches raise ConfigError.
SuiteResult run_suite(const SuiteConfig& cfg, const std::string& out_dir = "");

// Re-renders comparison tables from persisted run records (the `report`
// subcommand); records group into columns by dataset name.
SuiteResult rebuild_report(const std::vector<RunRecord>& records, double alpha);

// Staged pipeline entry points backing the CLI subcommands. Stages consume
// the previous stage's cached artifacts, so long pipelines are resumable.
// They require a single selector/model candidate (no grids; use `run` for
// grid search).

// ingest + pool + targets, before any split; writes the cache-format CSVs
void run_features_stage(const ExperimentConfig& cfg, const std::string& features_path,
                        const std::string& targets_path, const std::string& meta_path);

// fits the configured selector on the training rows; writes
// selector_model.txt and selected.txt under out_dir
void run_select_stage(const ExperimentConfig& cfg, const std::string& out_dir);

// fits the configured model, optionally on the support of a previously
// saved selector model; writes model.txt under out_dir
void run_train_stage(const ExperimentConfig& cfg, const std::string& out_dir,
                     const std::string& selector_model_path = "");

// loads a trained model file (null / linear / mlp formats are sniffed from
// the header line), scores the test rows, writes metrics.json under out_dir
std::map<std::string, double> run_evaluate_stage(const ExperimentConfig& cfg,
                                                 const std::string& model_path,
                                                 const std::string& out_dir);

} // namespace annealcast
