#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "annealcast/error.hpp"
#include "annealcast/indicators.hpp"
#include "annealcast/ohlcv.hpp"
#include "annealcast/pipeline.hpp"

namespace {

using annealcast::ExperimentConfig;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw annealcast::DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// loads the config and applies the --seed override before parsing
ExperimentConfig load_config(const std::string& path, bool seed_set, std::uint64_t seed) {
    std::string text = read_file(path);
    if (seed_set) {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded()) throw annealcast::ConfigError("config is not valid JSON: " + path);
        j["split"]["seed"] = seed;
        text = j.dump();
    }
    return annealcast::parse_experiment_config_text(text);
}

void print_metrics(const std::map<std::string, double>& metrics) {
    for (const auto& [key, value] : metrics) {
        std::printf("%s %.6g\n", key.c_str(), value);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"annealcast: indicator feature pools, annealed feature selection, and "
                 "return/trend forecasting"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    std::size_t jobs = 1;
    std::string format = "both";

    // fetch
    auto* fetch_cmd = app.add_subcommand("fetch", "download an OHLCV CSV over HTTP");
    std::string fetch_symbol, fetch_start, fetch_end, fetch_endpoint, fetch_out;
    fetch_cmd->add_option("--symbol", fetch_symbol)->required();
    fetch_cmd->add_option("--start", fetch_start)->required();
    fetch_cmd->add_option("--end", fetch_end)->required();
    fetch_cmd->add_option("--endpoint", fetch_endpoint)->required();
    fetch_cmd->add_option("--out", fetch_out)->required();

    // features
    auto* features_cmd =
        app.add_subcommand("features", "build the indicator/lag feature pool and targets");
    features_cmd->add_option("--config", config_path)->required();
    features_cmd->add_option("--out", out_dir);

    // select
    auto* select_cmd = app.add_subcommand("select", "fit the configured feature selector");
    select_cmd->add_option("--config", config_path)->required();
    select_cmd->add_option("--out", out_dir);

    // train
    auto* train_cmd = app.add_subcommand("train", "fit the configured forecasting model");
    std::string selector_model_path;
    train_cmd->add_option("--config", config_path)->required();
    train_cmd->add_option("--out", out_dir);
    train_cmd->add_option("--selector-model", selector_model_path,
                          "reuse a cached selector support instead of refitting");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "score a trained model on the test rows");
    std::string model_path;
    eval_cmd->add_option("--config", config_path)->required();
    eval_cmd->add_option("--model", model_path)->required();
    eval_cmd->add_option("--out", out_dir);

    // run
    auto* run_cmd = app.add_subcommand("run", "full pipeline: ingest through report");
    run_cmd->add_option("--config", config_path)->required();
    run_cmd->add_option("--out", out_dir);
    run_cmd->add_option("--seed", seed_override)->each([&](const std::string&) { seed_set = true; });

    // suite
    auto* suite_cmd = app.add_subcommand("suite", "run a dataset x variant comparison suite");
    suite_cmd->add_option("--config", config_path)->required();
    suite_cmd->add_option("--out", out_dir);
    suite_cmd->add_option("--jobs", jobs);
    suite_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "txt", "both"}));

    // report
    auto* report_cmd =
        app.add_subcommand("report", "re-render comparison tables from run records");
    std::vector<std::string> record_paths;
    double report_alpha = 0.05;
    report_cmd->add_option("--records", record_paths)->required()->expected(-1);
    report_cmd->add_option("--alpha", report_alpha);
    report_cmd->add_option("--out", out_dir);

    // catalog
    auto* catalog_cmd = app.add_subcommand("catalog", "list the indicator catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fetch_cmd) {
            const auto start = annealcast::Date::parse(fetch_start);
            const auto end = annealcast::Date::parse(fetch_end);
            if (!start || !end) throw annealcast::ConfigError("unparseable --start/--end date");
            const annealcast::OhlcvSeries series =
                annealcast::fetch_ohlcv(fetch_symbol, *start, *end, fetch_endpoint);
            std::ofstream out(fetch_out, std::ios::binary);
            if (!out) throw annealcast::DataError("cannot open '" + fetch_out + "' for writing");
            out << annealcast::serialize_ohlcv_csv(series);
            std::printf("fetched %zu bars for %s\n", series.size(), fetch_symbol.c_str());
        } else if (*features_cmd) {
            const ExperimentConfig cfg = load_config(config_path, seed_set, seed_override);
            fs::create_directories(out_dir);
            const fs::path base(out_dir);
            annealcast::run_features_stage(cfg, (base / "features.csv").string(),
                                           (base / "targets.csv").string(),
                                           (base / "meta.json").string());
            std::printf("wrote %s/{features.csv,targets.csv,meta.json}\n", out_dir.c_str());
        } else if (*select_cmd) {
            const ExperimentConfig cfg = load_config(config_path, seed_set, seed_override);
            annealcast::run_select_stage(cfg, out_dir);
            std::printf("wrote %s/{selector_model.txt,selected.txt}\n", out_dir.c_str());
        } else if (*train_cmd) {
            const ExperimentConfig cfg = load_config(config_path, seed_set, seed_override);
            annealcast::run_train_stage(cfg, out_dir, selector_model_path);
            std::printf("wrote %s/model.txt\n", out_dir.c_str());
        } else if (*eval_cmd) {
            const ExperimentConfig cfg = load_config(config_path, seed_set, seed_override);
            print_metrics(annealcast::run_evaluate_stage(cfg, model_path, out_dir));
        } else if (*run_cmd) {
            const ExperimentConfig cfg = load_config(config_path, seed_set, seed_override);
            const annealcast::RunRecord record = annealcast::run_experiment(cfg, out_dir);
            std::printf("run %s (config %s)\n", record.name.c_str(), record.config_hash.c_str());
            print_metrics(record.metrics);
        } else if (*suite_cmd) {
            annealcast::SuiteConfig suite =
                annealcast::parse_suite_config_text(read_file(config_path));
            if (jobs > 0) suite.jobs = jobs;
            suite.format = format;
            const annealcast::SuiteResult result = annealcast::run_suite(suite, out_dir);
            for (const annealcast::ComparisonTable& table : result.tables) {
                std::fputs(annealcast::render_table_text(table).c_str(), stdout);
                std::fputs("\n", stdout);
            }
        } else if (*report_cmd) {
            std::vector<annealcast::RunRecord> records;
            for (const std::string& path : record_paths) {
                records.push_back(annealcast::parse_run_record(read_file(path)));
            }
            const annealcast::SuiteResult result =
                annealcast::rebuild_report(records, report_alpha);
            fs::create_directories(out_dir);
            std::string text;
            for (const annealcast::ComparisonTable& table : result.tables) {
                text += annealcast::render_table_text(table) + "\n";
                std::ofstream csv(fs::path(out_dir) / ("report_" + table.title + ".csv"));
                csv << annealcast::render_table_csv(table);
            }
            std::ofstream txt(fs::path(out_dir) / "suite_report.txt");
            txt << text;
            std::fputs(text.c_str(), stdout);
        } else if (*catalog_cmd) {
            std::fputs(annealcast::catalog_listing().c_str(), stdout);
        }
    } catch (const annealcast::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
