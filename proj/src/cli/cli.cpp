#include "coincast/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coincast/config.hpp"
#include "coincast/correlation.hpp"
#include "coincast/error.hpp"
#include "coincast/fetch.hpp"
#include "coincast/fileio.hpp"
#include "coincast/gbtree.hpp"
#include "coincast/metrics.hpp"
#include "coincast/numtext.hpp"
#include "coincast/ohlc.hpp"
#include "coincast/price_matrix.hpp"
#include "coincast/rnn.hpp"
#include "coincast/smoothing.hpp"

namespace coincast::cli {
namespace {

namespace fs = std::filesystem;

fs::path prepare_outdir(const std::string& outdir) {
    const fs::path dir = outdir.empty() ? fs::path(".") : fs::path(outdir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string());
    return dir;
}

Date parse_cli_date(const std::string& text, const std::string& flag) {
    try {
        return Date::parse(text);
    } catch (const Error& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

// Flag-value parsing failures are usage errors, not data errors.
template <class F>
auto as_usage(F&& parse) -> decltype(parse()) {
    try {
        return parse();
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

void warn_dropped(const std::vector<Date>& dropped) {
    if (dropped.empty()) return;
    std::cerr << "warning: dropped " << dropped.size()
              << " date(s) missing for at least one coin:";
    for (const auto& d : dropped) std::cerr << ' ' << d.to_string();
    std::cerr << "\n";
}

struct PullArgs {
    std::string outdir = ".";
    std::string filename;
    std::string coins_path;
    std::string start;
    std::string end;
    std::string source;
};

void run_data_pull(const PullArgs& args) {
    const Date start = parse_cli_date(args.start, "--start");
    const Date end = parse_cli_date(args.end, "--end");
    if (end < start) {
        throw UsageError("--start " + start.to_string() + " is after --end " +
                         end.to_string());
    }
    std::string source_text = args.source;
    if (source_text.empty()) {
        if (const char* env = std::getenv("COINCAST_SOURCE")) source_text = env;
    }
    if (source_text.empty()) {
        throw UsageError("no data source: pass --source or set COINCAST_SOURCE "
                         "(fixture:<dir> or http://host[:port])");
    }
    const SourceDescriptor source = as_usage([&] { return parse_source(source_text); });
    const auto coins = read_ticker_list(args.coins_path);

    const auto records = fetch_ohlc(coins, start, end, source);
    const fs::path out = prepare_outdir(args.outdir) / (args.filename + ".csv");
    std::ostringstream echo;
    echo << "coincast data-pull --filename " << args.filename << " --coins "
         << args.coins_path << " --start " << start.to_string() << " --end "
         << end.to_string() << " --source " << source_text;
    write_dataset(records, out, echo.str());
    std::cout << "wrote " << out.string() << " (" << records.size() << " rows, "
              << coins.size() << " coins)\n";
}

struct SplitArgs {
    std::string outdir = ".";
    std::vector<std::string> filenames;
    std::string data;
    std::string variable = "avg_ohlc";
    double train_ratio = 0.0;
    double valid_ratio = 0.0;
};

void run_data_split(const SplitArgs& args) {
    if (!(args.train_ratio > 0.0) || !(args.valid_ratio > 0.0) ||
        std::fabs(args.train_ratio + args.valid_ratio - 1.0) > 1e-9) {
        throw UsageError("--train and --valid must be positive and sum to 1 (got " +
                         format_double(args.train_ratio) + " and " +
                         format_double(args.valid_ratio) + ")");
    }
    const PriceVariable variable =
        as_usage([&] { return parse_price_variable(args.variable); });
    const auto records = read_dataset(args.data);
    auto built = to_price_matrix(records, variable);
    warn_dropped(built.dropped_dates);
    const SplitPair split =
        chronological_split(built.matrix, args.train_ratio, args.valid_ratio);

    const fs::path dir = prepare_outdir(args.outdir);
    const fs::path train_path = dir / (args.filenames[0] + ".csv");
    const fs::path valid_path = dir / (args.filenames[1] + ".csv");
    std::ostringstream echo;
    echo << "coincast data-split --filenames " << args.filenames[0] << ' '
         << args.filenames[1] << " --data " << args.data << " --variable "
         << args.variable << " --train " << format_double(args.train_ratio)
         << " --valid " << format_double(args.valid_ratio);
    write_matrix_csv(split.train, train_path, echo.str());
    write_matrix_csv(split.valid, valid_path, echo.str());
    std::cout << "wrote " << train_path.string() << " (" << split.train.rows()
              << " rows, " << split.train.dates.front().to_string() << " .. "
              << split.train.dates.back().to_string() << ")\n";
    std::cout << "wrote " << valid_path.string() << " (" << split.valid.rows()
              << " rows, " << split.valid.dates.front().to_string() << " .. "
              << split.valid.dates.back().to_string() << ")\n";
}

struct CorrArgs {
    std::string outdir = ".";
    std::string filename;
    std::string data;
    std::string variable = "avg_ohlc";
    std::string window = "daily";
    std::string method = "pearson";
};

void run_correlation_analysis(const CorrArgs& args) {
    const PriceVariable variable =
        as_usage([&] { return parse_price_variable(args.variable); });
    const CorrWindow window = as_usage([&] { return parse_corr_window(args.window); });
    const CorrMethod method = as_usage([&] { return parse_corr_method(args.method); });
    const auto records = read_dataset(args.data);
    auto built = to_price_matrix(records, variable);
    warn_dropped(built.dropped_dates);
    const CorrelationMatrix matrix = correlation_matrix(built.matrix, method, window);

    const fs::path out = prepare_outdir(args.outdir) / (args.filename + ".csv");
    std::ostringstream echo;
    echo << "coincast correlation-analysis --filename " << args.filename << " --data "
         << args.data << " --variable " << args.variable << " --window " << args.window
         << " --method " << args.method;
    write_correlations_csv(matrix, out, echo.str());
    std::cout << "wrote " << out.string() << " (" << matrix.coins.size() << "x"
              << matrix.coins.size() << " " << args.method << " cross-table)\n";
}

struct PretrainArgs {
    std::string outdir = ".";
    std::string filename;
    std::string train;
    std::string valid;
    std::string target;
    std::string features_path;
    std::string model;
    std::string config_path;
};

void check_target_features(const std::string& target,
                           const std::vector<std::string>& features) {
    for (const auto& f : features) {
        if (f == target) {
            throw UsageError("target '" + target + "' also appears in --features");
        }
    }
}

void run_model_pretrain(const PretrainArgs& args) {
    const ModelChoice choice = as_usage([&] { return parse_model_name(args.model); });
    const ModelConfig config = parse_config_file(args.config_path, choice);
    const std::string target = to_lower(args.target);
    const auto features = read_ticker_list(args.features_path);
    check_target_features(target, features);

    const PriceMatrix train = read_matrix_csv(args.train);
    const PriceMatrix valid = read_matrix_csv(args.valid);

    std::ostringstream echo;
    echo << "coincast model-pretrain --filename " << args.filename << " --train "
         << args.train << " --valid " << args.valid << " --target " << target
         << " --features " << args.features_path << " --model " << choice.name
         << " --config " << args.config_path;

    const fs::path dir = prepare_outdir(args.outdir);
    if (choice.family == ModelChoice::Family::rnn) {
        double best_mse = 0.0;
        RnnModel model =
            rnn_train(train, valid, target, features, config.rnn, &best_mse);
        model.args_echo = echo.str();
        const fs::path out = dir / (args.filename + ".pth");
        rnn_save(model, out);
        std::cout << "wrote " << out.string() << " (" << choice.name
                  << ", best validation mse " << format_double(best_mse, 6)
                  << " standardized)\n";
    } else {
        GbmModel model =
            gbm_train(train, valid, target, features, config.gbm, choice.name);
        model.args_echo = echo.str();
        const fs::path out = dir / (args.filename + ".txt");
        gbm_save(model, out);
        const auto valid_pred = gbm_predict(model, valid);
        const double valid_rmse = rmse(valid_pred, valid.column(target));
        std::cout << "wrote " << out.string() << " (" << choice.name << ", "
                  << model.best_round << " trees, validation rmse "
                  << format_double(valid_rmse, 6) << ")\n";
    }
}

struct ForecastArgs {
    std::string outdir = ".";
    std::string filename;
    std::string valid;
    int horizon = 0;
    std::string pretrained;
    std::string target;
    std::string features_path;
    std::string model;
    std::string actuals;
};

std::vector<double> read_actuals(const fs::path& path, std::size_t expected) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open actuals file: " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        values.push_back(
            parse_double(line, path.string() + " line " + std::to_string(line_no)));
    }
    if (values.size() != expected) {
        throw Error(path.string() + ": expected " + std::to_string(expected) +
                    " actual values (one per horizon day), got " +
                    std::to_string(values.size()));
    }
    return values;
}

/// Feature rows the recurrent model slides over: the last window-1
/// validation rows followed by the smoothed horizon rows.
PriceMatrix feature_runway(const PriceMatrix& valid, const PriceMatrix& horizon_rows,
                           const std::vector<std::string>& features, int window) {
    const std::size_t tail = static_cast<std::size_t>(window - 1);
    if (valid.rows() < tail) {
        throw Error("validation set has fewer rows than window-1 = " +
                    std::to_string(tail));
    }
    PriceMatrix runway;
    runway.variable = valid.variable;
    runway.coins = features;
    std::vector<std::size_t> cols;
    cols.reserve(features.size());
    for (const auto& f : features) cols.push_back(valid.coin_index(f));
    for (std::size_t r = valid.rows() - tail; r < valid.rows(); ++r) {
        runway.dates.push_back(valid.dates[r]);
        for (const std::size_t c : cols) runway.values.push_back(valid.at(r, c));
    }
    for (std::size_t r = 0; r < horizon_rows.rows(); ++r) {
        runway.dates.push_back(horizon_rows.dates[r]);
        for (std::size_t c = 0; c < horizon_rows.cols(); ++c) {
            runway.values.push_back(horizon_rows.at(r, c));
        }
    }
    runway.validate();
    return runway;
}

PriceMatrix window_slice(const PriceMatrix& runway, std::size_t first, int window) {
    PriceMatrix slice;
    slice.variable = runway.variable;
    slice.coins = runway.coins;
    const auto w = static_cast<std::size_t>(window);
    slice.dates.assign(runway.dates.begin() + static_cast<std::ptrdiff_t>(first),
                       runway.dates.begin() + static_cast<std::ptrdiff_t>(first + w));
    slice.values.assign(
        runway.values.begin() + static_cast<std::ptrdiff_t>(first * runway.cols()),
        runway.values.begin() +
            static_cast<std::ptrdiff_t>((first + w) * runway.cols()));
    return slice;
}

void run_model_forecast(const ForecastArgs& args) {
    if (args.horizon < 1) throw UsageError("--horizon must be >= 1");
    const ModelChoice choice = as_usage([&] { return parse_model_name(args.model); });
    const std::string target = to_lower(args.target);
    const auto features = read_ticker_list(args.features_path);
    check_target_features(target, features);

    const PriceMatrix valid = read_matrix_csv(args.valid);

    const auto mismatch = [](const std::string& what, const std::string& got,
                             const std::string& recorded) {
        throw Error("--" + what + " '" + got + "' does not match the pretrained model ('" +
                    recorded + "'); forecast arguments must be the same used for "
                    "the pretraining process");
    };

    // Feature-coin runway over the horizon, from smoothing on the validation set.
    const PriceMatrix horizon_features = forecast_features(valid, features, args.horizon);

    std::vector<double> predictions;
    if (choice.family == ModelChoice::Family::rnn) {
        const RnnModel model = rnn_load(args.pretrained);
        if (cell_kind_name(model.cell) != choice.name) {
            mismatch("model", choice.name, cell_kind_name(model.cell));
        }
        if (model.target != target) mismatch("target", target, model.target);
        if (model.features != features) {
            mismatch("features", "list from " + args.features_path,
                     "feature list recorded at pretraining");
        }
        const PriceMatrix runway =
            feature_runway(valid, horizon_features, features, model.window);
        for (int k = 0; k < args.horizon; ++k) {
            const PriceMatrix slice =
                window_slice(runway, static_cast<std::size_t>(k), model.window);
            predictions.push_back(rnn_predict(model, slice));
        }
    } else {
        const GbmModel model = gbm_load(args.pretrained);
        if (model.kind != choice.name) mismatch("model", choice.name, model.kind);
        if (model.target != target) mismatch("target", target, model.target);
        if (model.features != features) {
            mismatch("features", "list from " + args.features_path,
                     "feature list recorded at pretraining");
        }
        predictions = gbm_predict(model, horizon_features);
    }

    std::optional<std::vector<double>> actuals;
    if (!args.actuals.empty()) {
        actuals = read_actuals(args.actuals, predictions.size());
    }

    const fs::path out = prepare_outdir(args.outdir) / (args.filename + ".txt");
    atomic_write(out, [&](std::ostream& os) {
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            os << "Predicted: " << format_double(predictions[i]);
            if (actuals) os << ", Real: " << format_double((*actuals)[i]);
            os << "\n";
        }
    });

    std::cout << "forecast dates: " << horizon_features.dates.front().to_string()
              << " .. " << horizon_features.dates.back().to_string() << "\n";
    std::cout << "wrote " << out.string() << " (" << predictions.size()
              << " lines)\n";
    if (actuals) {
        const MetricReport report = evaluate_forecast(predictions, *actuals);
        std::cout << "MAPE: " << format_double(report.mape, 6)
                  << "%  RMSE: " << format_double(report.rmse, 8) << "\n";
    }
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"coincast: correlated-coin price forecasting pipeline"};
    app.require_subcommand(1);

    PullArgs pull;
    auto* cmd_pull = app.add_subcommand("data-pull", "fetch OHLC history to a dataset CSV");
    cmd_pull->add_option("--filename", pull.filename, "output file name (without .csv)")
        ->required();
    cmd_pull->add_option("--coins", pull.coins_path, "JSON array of tickers")->required();
    cmd_pull->add_option("--start", pull.start, "first day, day-month-year")->required();
    cmd_pull->add_option("--end", pull.end, "last day, day-month-year")->required();
    cmd_pull->add_option("--source", pull.source,
                         "fixture:<dir> or http endpoint (default $COINCAST_SOURCE)");
    cmd_pull->add_option("--outdir", pull.outdir, "destination directory");
    cmd_pull->callback([&] { run_data_pull(pull); });

    SplitArgs split;
    auto* cmd_split =
        app.add_subcommand("data-split", "split a dataset into train/validation CSVs");
    cmd_split->add_option("--filenames", split.filenames, "train and valid file names")
        ->expected(2)
        ->required();
    cmd_split->add_option("--data", split.data, "dataset CSV path")->required();
    cmd_split->add_option("--variable", split.variable, "avg_ohlc or close");
    cmd_split->add_option("--train", split.train_ratio, "train ratio")->required();
    cmd_split->add_option("--valid", split.valid_ratio, "validation ratio")->required();
    cmd_split->add_option("--outdir", split.outdir, "destination directory");
    cmd_split->callback([&] { run_data_split(split); });

    CorrArgs corr;
    auto* cmd_corr = app.add_subcommand("correlation-analysis",
                                        "write the coin-by-coin correlation cross-table");
    cmd_corr->add_option("--filename", corr.filename, "output file name (without .csv)")
        ->required();
    cmd_corr->add_option("--data", corr.data, "dataset CSV path")->required();
    cmd_corr->add_option("--variable", corr.variable, "avg_ohlc or close");
    cmd_corr->add_option("--window", corr.window, "daily, weekly or monthly");
    cmd_corr->add_option("--method", corr.method, "pearson, kendall or spearman");
    cmd_corr->add_option("--outdir", corr.outdir, "destination directory");
    cmd_corr->callback([&] { run_correlation_analysis(corr); });

    PretrainArgs pretrain;
    auto* cmd_pretrain =
        app.add_subcommand("model-pretrain", "train a forecasting model");
    cmd_pretrain->add_option("--filename", pretrain.filename, "model file name (no ext)")
        ->required();
    cmd_pretrain->add_option("--train", pretrain.train, "train CSV path")->required();
    cmd_pretrain->add_option("--valid", pretrain.valid, "validation CSV path")->required();
    cmd_pretrain->add_option("--target", pretrain.target, "coin to predict")->required();
    cmd_pretrain->add_option("--features", pretrain.features_path,
                             "JSON array of feature coins")
        ->required();
    cmd_pretrain
        ->add_option("--model", pretrain.model, "lstm, gru, xgboost, lightgbm or catboost")
        ->required();
    cmd_pretrain->add_option("--config", pretrain.config_path, "config JSON path")
        ->required();
    cmd_pretrain->add_option("--outdir", pretrain.outdir, "destination directory");
    cmd_pretrain->callback([&] { run_model_pretrain(pretrain); });

    ForecastArgs forecast;
    auto* cmd_forecast = app.add_subcommand(
        "model-forecast", "forecast the target coin over a daily horizon");
    cmd_forecast
        ->add_option("--filename", forecast.filename, "predictions file name (no ext)")
        ->required();
    cmd_forecast->add_option("--valid", forecast.valid, "validation CSV path")->required();
    cmd_forecast->add_option("--horizon", forecast.horizon, "days to predict")->required();
    cmd_forecast->add_option("--pretrained", forecast.pretrained, "model file path")
        ->required();
    cmd_forecast->add_option("--target", forecast.target, "coin to predict")->required();
    cmd_forecast
        ->add_option("--features", forecast.features_path, "JSON array of feature coins")
        ->required();
    cmd_forecast
        ->add_option("--model", forecast.model, "model name used at pretraining")
        ->required();
    cmd_forecast->add_option("--actuals", forecast.actuals,
                             "optional file of observed prices, one per horizon day");
    cmd_forecast->add_option("--outdir", forecast.outdir, "destination directory");
    cmd_forecast->callback([&] { run_model_forecast(forecast); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace coincast::cli
