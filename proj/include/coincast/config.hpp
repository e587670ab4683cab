#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "coincast/gbtree.hpp"
#include "coincast/rnn.hpp"

namespace coincast {

/// Which trainer a CLI model name selects. All three GBM names share one
/// boosting core; the name is still recorded and enforced at forecast time.
struct ModelChoice {
    enum class Family { rnn, gbm };
    Family family = Family::rnn;
    std::string name; // lstm | gru | xgboost | lightgbm | catboost
    CellKind cell = CellKind::lstm; // meaningful for rnn family
};

ModelChoice parse_model_name(const std::string& name);

struct ModelConfig {
    bool is_rnn = false;
    RnnConfig rnn;
    GbmConfig gbm;
};

/// Validates the config JSON for the chosen model family.
/// Common required fields: seed, learning_rate, patience.
/// RNN adds required layers/hidden/epochs/batch_size and optional window
/// (default 7); GBM adds required rounds and optional max_depth (3),
/// min_samples_leaf (2), lambda (1.0). Unknown fields are an error.
ModelConfig parse_config_json(const nlohmann::json& doc, const ModelChoice& choice);
ModelConfig parse_config_file(const std::filesystem::path& path,
                              const ModelChoice& choice);

/// Canonical JSON form (defaults filled in); parse(config_to_json(c)) == c.
nlohmann::json config_to_json(const ModelConfig& config);

/// Coins/features JSON: a single array of ticker strings, lowercased.
std::vector<std::string> read_ticker_list(const std::filesystem::path& path);

} // namespace coincast
