#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "coincast/price_matrix.hpp"

namespace coincast {

struct GbmConfig {
    int rounds = 100;          // boosting-round budget
    double learning_rate = 0.1;
    int patience = 10;         // tolerated non-improving rounds
    std::uint64_t seed = 0;    // recorded for reproducibility bookkeeping
    int max_depth = 3;
    int min_samples_leaf = 2;
    double lambda = 1.0;       // L2 leaf regularizer

    void validate() const;
};

/// Binary regression tree stored as a flat node array. Internal nodes route
/// x[feature] < threshold to `left`, otherwise `right`; leaves carry weights.
struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double weight = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict_row(const double* x) const {
        int idx = 0;
        while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
            const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
            idx = x[node.feature] < node.threshold ? node.left : node.right;
        }
        return nodes[static_cast<std::size_t>(idx)].weight;
    }
};

/// Second-order boosted ensemble for squared error. Prediction:
/// base_score + learning_rate * sum of the kept trees.
struct GbmModel {
    std::string kind = "xgboost"; // model name the user trained under
    std::string target;
    std::vector<std::string> features; // column order enforced at predict time
    double base_score = 0.0;
    double learning_rate = 0.1;
    int best_round = 0; // == trees.size(); kept explicit in the file format
    std::vector<RegressionTree> trees;
    GbmConfig config;
    std::string args_echo; // command line that produced the model, if any

    double predict_row(const double* x) const;
};

/// When non-null, `valid_rmse_history` receives the validation RMSE after
/// each evaluated round (index 0 = base score only), before truncation to
/// best_round.
GbmModel gbm_train(const PriceMatrix& train, const PriceMatrix& valid,
                   const std::string& target, const std::vector<std::string>& features,
                   const GbmConfig& config, const std::string& kind = "xgboost",
                   std::vector<double>* valid_rmse_history = nullptr);

/// Predictions for each row of `data`, columns selected by model feature order.
std::vector<double> gbm_predict(const GbmModel& model, const PriceMatrix& data);

/// Line-oriented text format, full-precision decimal floats.
void gbm_save(const GbmModel& model, const std::filesystem::path& path);
GbmModel gbm_load(const std::filesystem::path& path);

} // namespace coincast
