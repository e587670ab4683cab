#include "coincast/config.hpp"

#include <set>

#include "coincast/error.hpp"
#include "coincast/fileio.hpp"
#include "coincast/ohlc.hpp"

namespace coincast {
namespace {

using nlohmann::json;

long require_int(const json& doc, const std::string& field, long min_value) {
    if (!doc.contains(field)) {
        throw Error("config missing required field '" + field + "'");
    }
    const auto& node = doc.at(field);
    if (!node.is_number_integer()) {
        throw Error("config field '" + field + "' must be an integer");
    }
    const long v = node.get<long>();
    if (v < min_value) {
        throw Error("config field '" + field + "' out of range: " + std::to_string(v) +
                    " (minimum " + std::to_string(min_value) + ")");
    }
    return v;
}

long optional_int(const json& doc, const std::string& field, long min_value,
                  long fallback) {
    if (!doc.contains(field)) return fallback;
    return require_int(doc, field, min_value);
}

double require_number(const json& doc, const std::string& field) {
    if (!doc.contains(field)) {
        throw Error("config missing required field '" + field + "'");
    }
    const auto& node = doc.at(field);
    if (!node.is_number()) {
        throw Error("config field '" + field + "' must be a number");
    }
    return node.get<double>();
}

void reject_unknown(const json& doc, const std::set<std::string>& allowed) {
    std::string unexpected;
    for (const auto& [key, value] : doc.items()) {
        if (!allowed.contains(key)) {
            if (!unexpected.empty()) unexpected += ", ";
            unexpected += key;
        }
    }
    if (!unexpected.empty()) {
        throw Error("config has unexpected fields: " + unexpected);
    }
}

} // namespace

ModelChoice parse_model_name(const std::string& name) {
    ModelChoice choice;
    choice.name = to_lower(name);
    if (choice.name == "lstm" || choice.name == "gru") {
        choice.family = ModelChoice::Family::rnn;
        choice.cell = parse_cell_kind(choice.name);
        return choice;
    }
    if (choice.name == "xgboost" || choice.name == "lightgbm" ||
        choice.name == "catboost") {
        choice.family = ModelChoice::Family::gbm;
        return choice;
    }
    throw Error("unknown model '" + name +
                "' (expected lstm, gru, xgboost, lightgbm or catboost)");
}

ModelConfig parse_config_json(const json& doc, const ModelChoice& choice) {
    if (!doc.is_object()) throw Error("config must be a JSON object");

    ModelConfig config;
    if (choice.family == ModelChoice::Family::rnn) {
        reject_unknown(doc, {"layers", "hidden", "epochs", "batch_size", "window",
                             "seed", "learning_rate", "patience"});
        config.is_rnn = true;
        config.rnn.cell = choice.cell;
        config.rnn.layers = static_cast<int>(require_int(doc, "layers", 1));
        config.rnn.hidden = static_cast<int>(require_int(doc, "hidden", 1));
        config.rnn.epochs = static_cast<int>(require_int(doc, "epochs", 1));
        config.rnn.batch_size = static_cast<int>(require_int(doc, "batch_size", 1));
        config.rnn.window = static_cast<int>(optional_int(doc, "window", 1, 7));
        config.rnn.seed = static_cast<std::uint64_t>(require_int(doc, "seed", 0));
        config.rnn.learning_rate = require_number(doc, "learning_rate");
        config.rnn.patience = static_cast<int>(require_int(doc, "patience", 1));
        if (config.rnn.learning_rate < 0.0) {
            throw Error("config field 'learning_rate' out of range: must be >= 0");
        }
        config.rnn.validate();
    } else {
        reject_unknown(doc, {"rounds", "max_depth", "min_samples_leaf", "lambda",
                             "seed", "learning_rate", "patience"});
        config.is_rnn = false;
        config.gbm.rounds = static_cast<int>(require_int(doc, "rounds", 1));
        config.gbm.max_depth = static_cast<int>(optional_int(doc, "max_depth", 1, 3));
        config.gbm.min_samples_leaf =
            static_cast<int>(optional_int(doc, "min_samples_leaf", 1, 2));
        config.gbm.seed = static_cast<std::uint64_t>(require_int(doc, "seed", 0));
        config.gbm.learning_rate = require_number(doc, "learning_rate");
        config.gbm.patience = static_cast<int>(require_int(doc, "patience", 1));
        if (doc.contains("lambda")) {
            config.gbm.lambda = require_number(doc, "lambda");
        }
        if (!(config.gbm.learning_rate > 0.0) || config.gbm.learning_rate > 1.0) {
            throw Error("config field 'learning_rate' out of range: must be in (0, 1]");
        }
        if (config.gbm.lambda < 0.0) {
            throw Error("config field 'lambda' out of range: must be >= 0");
        }
        config.gbm.validate();
    }
    return config;
}

ModelConfig parse_config_file(const std::filesystem::path& path,
                              const ModelChoice& choice) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error("malformed config " + path.string() + ": " + e.what());
    }
    try {
        return parse_config_json(doc, choice);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

json config_to_json(const ModelConfig& config) {
    json doc;
    if (config.is_rnn) {
        doc["layers"] = config.rnn.layers;
        doc["hidden"] = config.rnn.hidden;
        doc["epochs"] = config.rnn.epochs;
        doc["batch_size"] = config.rnn.batch_size;
        doc["window"] = config.rnn.window;
        doc["seed"] = config.rnn.seed;
        doc["learning_rate"] = config.rnn.learning_rate;
        doc["patience"] = config.rnn.patience;
    } else {
        doc["rounds"] = config.gbm.rounds;
        doc["max_depth"] = config.gbm.max_depth;
        doc["min_samples_leaf"] = config.gbm.min_samples_leaf;
        doc["lambda"] = config.gbm.lambda;
        doc["seed"] = config.gbm.seed;
        doc["learning_rate"] = config.gbm.learning_rate;
        doc["patience"] = config.gbm.patience;
    }
    return doc;
}

std::vector<std::string> read_ticker_list(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error("malformed ticker list " + path.string() + ": " + e.what());
    }
    if (!doc.is_array() || doc.empty()) {
        throw Error(path.string() + ": expected a non-empty JSON array of tickers");
    }
    std::vector<std::string> coins;
    std::set<std::string> seen;
    for (const auto& item : doc) {
        if (!item.is_string()) {
            throw Error(path.string() + ": ticker entries must be strings");
        }
        std::string coin = to_lower(item.get<std::string>());
        if (coin.empty()) throw Error(path.string() + ": empty ticker");
        if (!seen.insert(coin).second) {
            throw Error(path.string() + ": duplicate ticker '" + coin + "'");
        }
        coins.push_back(std::move(coin));
    }
    return coins;
}

} // namespace coincast
