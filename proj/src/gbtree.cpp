#include "coincast/gbtree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "coincast/error.hpp"
#include "coincast/fileio.hpp"
#include "coincast/kernels.hpp"
#include "coincast/numtext.hpp"

namespace coincast {
namespace {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Greedy exact split search. Gain follows the second-order formula
//   1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)]
// with unit hessians, candidates at midpoints of consecutive distinct sorted
// values. Ties keep the first candidate in (feature asc, threshold asc) order.
class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& columns,
                const std::vector<double>& gradients, const GbmConfig& config)
        : columns_(columns), gradients_(gradients), config_(config) {}

    RegressionTree build(std::vector<std::size_t> rows) {
        tree_.nodes.clear();
        grow(std::move(rows), 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t> rows, int depth) {
        const int node_index = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        double grad_sum = 0.0;
        for (const std::size_t r : rows) grad_sum += gradients_[r];
        const double hess_sum = static_cast<double>(rows.size());

        SplitChoice split;
        if (depth < config_.max_depth &&
            rows.size() >= 2 * static_cast<std::size_t>(config_.min_samples_leaf)) {
            split = best_split(rows, grad_sum, hess_sum);
        }
        if (!split.found) {
            tree_.nodes[static_cast<std::size_t>(node_index)].weight =
                -grad_sum / (hess_sum + config_.lambda);
            return node_index;
        }

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (const std::size_t r : rows) {
            if (columns_[static_cast<std::size_t>(split.feature)][r] < split.threshold) {
                left_rows.push_back(r);
            } else {
                right_rows.push_back(r);
            }
        }
        rows.clear();
        rows.shrink_to_fit();

        const int left = grow(std::move(left_rows), depth + 1);
        const int right = grow(std::move(right_rows), depth + 1);
        TreeNode& node = tree_.nodes[static_cast<std::size_t>(node_index)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }

    SplitChoice best_split(const std::vector<std::size_t>& rows, double grad_sum,
                           double hess_sum) const {
        const double lambda = config_.lambda;
        const double parent_score = grad_sum * grad_sum / (hess_sum + lambda);
        const auto min_leaf = static_cast<std::size_t>(config_.min_samples_leaf);

        SplitChoice best;
        std::vector<std::pair<double, double>> ordered(rows.size()); // (value, grad)
        for (std::size_t f = 0; f < columns_.size(); ++f) {
            const auto& column = columns_[f];
            for (std::size_t i = 0; i < rows.size(); ++i) {
                ordered[i] = {column[rows[i]], gradients_[rows[i]]};
            }
            std::sort(ordered.begin(), ordered.end());

            double left_grad = 0.0;
            double left_count = 0.0;
            for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
                left_grad += ordered[i].second;
                left_count += 1.0;
                if (ordered[i].first == ordered[i + 1].first) continue;
                const auto n_left = i + 1;
                const auto n_right = ordered.size() - n_left;
                if (n_left < min_leaf || n_right < min_leaf) continue;

                const double threshold = (ordered[i].first + ordered[i + 1].first) / 2.0;
                // Adjacent doubles can round the midpoint onto an endpoint,
                // in which case this candidate cannot separate the rows.
                if (!(ordered[i].first < threshold) ||
                    !(threshold <= ordered[i + 1].first)) {
                    continue;
                }
                const double right_grad = grad_sum - left_grad;
                const double right_count = hess_sum - left_count;
                const double gain =
                    0.5 * (left_grad * left_grad / (left_count + lambda) +
                           right_grad * right_grad / (right_count + lambda) -
                           parent_score);
                if (gain > 0.0 && (!best.found || gain > best.gain)) {
                    best.found = true;
                    best.feature = static_cast<int>(f);
                    best.threshold = threshold;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    const std::vector<std::vector<double>>& columns_;
    const std::vector<double>& gradients_;
    const GbmConfig& config_;
    RegressionTree tree_;
};

double rmse_of(const std::vector<double>& predicted, const std::vector<double>& actual) {
    const double ss =
        kernels::sq_diff_sum(predicted.data(), actual.data(), predicted.size());
    return std::sqrt(ss / static_cast<double>(predicted.size()));
}

std::vector<std::vector<double>> feature_columns(const PriceMatrix& data,
                                                 const std::vector<std::string>& features) {
    std::vector<std::vector<double>> columns;
    columns.reserve(features.size());
    for (const auto& name : features) columns.push_back(data.column(name));
    return columns;
}

} // namespace

void GbmConfig::validate() const {
    if (rounds < 1) throw Error("gbm config: rounds must be >= 1");
    if (patience < 1) throw Error("gbm config: patience must be >= 1");
    if (max_depth < 1) throw Error("gbm config: max_depth must be >= 1");
    if (min_samples_leaf < 1) throw Error("gbm config: min_samples_leaf must be >= 1");
    if (!(learning_rate > 0.0) || learning_rate > 1.0) {
        throw Error("gbm config: learning_rate must be in (0, 1]");
    }
    if (lambda < 0.0) throw Error("gbm config: lambda must be >= 0");
}

double GbmModel::predict_row(const double* x) const {
    double acc = base_score;
    for (int t = 0; t < best_round; ++t) {
        acc += learning_rate * trees[static_cast<std::size_t>(t)].predict_row(x);
    }
    return acc;
}

GbmModel gbm_train(const PriceMatrix& train, const PriceMatrix& valid,
                   const std::string& target, const std::vector<std::string>& features,
                   const GbmConfig& config, const std::string& kind,
                   std::vector<double>* valid_rmse_history) {
    config.validate();
    if (features.empty()) throw Error("gbm training needs at least one feature");
    for (const auto& f : features) {
        if (f == target) throw Error("target '" + target + "' cannot also be a feature");
    }
    const std::vector<double> train_y = train.column(target);
    const std::vector<double> valid_y = valid.column(target);
    const auto train_cols = feature_columns(train, features);
    const auto valid_cols = feature_columns(valid, features);
    const std::size_t n_train = train_y.size();
    if (n_train < 2 * static_cast<std::size_t>(config.min_samples_leaf)) {
        throw Error("too few training rows (" + std::to_string(n_train) + ")");
    }

    GbmModel model;
    model.kind = kind;
    model.target = target;
    model.features = features;
    model.learning_rate = config.learning_rate;
    model.config = config;
    model.base_score = kernels::sum(train_y.data(), n_train) /
                       static_cast<double>(n_train);

    const bool constant_target =
        std::all_of(train_y.begin(), train_y.end(),
                    [&](double v) { return v == train_y.front(); });
    if (constant_target) {
        model.best_round = 0;
        if (valid_rmse_history) {
            valid_rmse_history->assign(
                1, rmse_of(std::vector<double>(valid_y.size(), model.base_score),
                           valid_y));
        }
        return model;
    }

    std::vector<double> train_pred(n_train, model.base_score);
    std::vector<double> valid_pred(valid_y.size(), model.base_score);
    std::vector<double> gradients(n_train);
    std::vector<std::size_t> all_rows(n_train);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

    // Candidate trees are kept until early stopping settles best_round, then
    // the ensemble is truncated to exactly the selected prefix.
    std::vector<RegressionTree> trees;
    double best_rmse = rmse_of(valid_pred, valid_y);
    int best_round = 0;
    int since_improvement = 0;
    if (valid_rmse_history) valid_rmse_history->assign(1, best_rmse);

    std::vector<double> row(features.size());
    std::vector<double> tree_train(n_train);
    for (int round = 0; round < config.rounds; ++round) {
        for (std::size_t i = 0; i < n_train; ++i) {
            gradients[i] = train_pred[i] - train_y[i];
        }
        TreeBuilder builder(train_cols, gradients, config);
        RegressionTree tree = builder.build(all_rows);

        for (std::size_t i = 0; i < n_train; ++i) {
            for (std::size_t f = 0; f < features.size(); ++f) row[f] = train_cols[f][i];
            tree_train[i] = tree.predict_row(row.data());
        }
        const bool dead_tree =
            tree.nodes.size() == 1 && tree.nodes.front().weight == 0.0;

        trees.push_back(std::move(tree));
        kernels::axpy(config.learning_rate, tree_train.data(), train_pred.data(),
                      n_train);
        for (std::size_t i = 0; i < valid_y.size(); ++i) {
            for (std::size_t f = 0; f < features.size(); ++f) row[f] = valid_cols[f][i];
            valid_pred[i] += config.learning_rate * trees.back().predict_row(row.data());
        }

        const double round_rmse = rmse_of(valid_pred, valid_y);
        if (valid_rmse_history) valid_rmse_history->push_back(round_rmse);
        if (best_rmse - round_rmse > 1e-10) {
            best_rmse = round_rmse;
            best_round = round + 1;
            since_improvement = 0;
        } else {
            ++since_improvement;
            if (since_improvement >= config.patience) break;
        }
        // A gainless single-leaf zero tree cannot change anything downstream.
        if (dead_tree) break;
    }

    trees.resize(static_cast<std::size_t>(best_round));
    model.trees = std::move(trees);
    model.best_round = best_round;
    return model;
}

std::vector<double> gbm_predict(const GbmModel& model, const PriceMatrix& data) {
    std::vector<std::size_t> column_index;
    column_index.reserve(model.features.size());
    for (const auto& name : model.features) {
        column_index.push_back(data.coin_index(name)); // throws when missing
    }
    std::vector<double> out(data.rows());
    std::vector<double> row(model.features.size());
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t f = 0; f < column_index.size(); ++f) {
            row[f] = data.at(r, column_index[f]);
        }
        out[r] = model.predict_row(row.data());
    }
    return out;
}

void gbm_save(const GbmModel& model, const std::filesystem::path& path) {
    atomic_write(path, [&](std::ostream& out) {
        out << "coincast-gbm 1\n";
        out << "args " << (model.args_echo.empty() ? "-" : model.args_echo) << "\n";
        out << "kind " << model.kind << "\n";
        out << "target " << model.target << "\n";
        out << "features";
        for (const auto& f : model.features) out << ' ' << f;
        out << "\n";
        out << "base_score " << format_double(model.base_score) << "\n";
        out << "learning_rate " << format_double(model.learning_rate) << "\n";
        out << "best_round " << model.best_round << "\n";
        out << "rounds " << model.config.rounds << "\n";
        out << "patience " << model.config.patience << "\n";
        out << "max_depth " << model.config.max_depth << "\n";
        out << "min_samples_leaf " << model.config.min_samples_leaf << "\n";
        out << "lambda " << format_double(model.config.lambda) << "\n";
        out << "seed " << model.config.seed << "\n";
        out << "trees " << model.trees.size() << "\n";
        for (const auto& tree : model.trees) {
            out << "tree " << tree.nodes.size() << "\n";
            for (const auto& node : tree.nodes) {
                if (node.is_leaf()) {
                    out << "node leaf " << format_double(node.weight) << "\n";
                } else {
                    out << "node split " << node.feature << ' '
                        << format_double(node.threshold) << ' ' << node.left << ' '
                        << node.right << "\n";
                }
            }
        }
        out << "end\n";
    });
}

namespace {

class LineReader {
public:
    LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

    std::vector<std::string> next(const std::string& expect_key) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::vector<std::string> tokens;
            std::stringstream ss(line);
            std::string tok;
            while (ss >> tok) tokens.push_back(tok);
            if (tokens.empty()) continue;
            if (tokens[0] != expect_key) {
                throw Error(name_ + " line " + std::to_string(line_no_) +
                            ": expected '" + expect_key + "', got '" + tokens[0] + "'");
            }
            return tokens;
        }
        throw Error(name_ + ": truncated file, missing '" + expect_key + "'");
    }

    std::string where() const { return name_ + " line " + std::to_string(line_no_); }

private:
    std::istream& in_;
    std::string name_;
    std::size_t line_no_ = 0;
};

} // namespace

GbmModel gbm_load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path.string());
    LineReader reader(in, path.string());

    const auto magic = reader.next("coincast-gbm");
    if (magic.size() != 2 || magic[1] != "1") {
        throw Error(path.string() + ": unsupported gbm schema version");
    }

    const auto field = [&](const std::string& key) {
        auto tokens = reader.next(key);
        if (tokens.size() != 2) {
            throw Error(reader.where() + ": '" + key + "' expects one value");
        }
        return tokens[1];
    };

    GbmModel model;
    {
        const auto tokens = reader.next("args");
        std::string echo;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            if (i > 1) echo += ' ';
            echo += tokens[i];
        }
        if (echo != "-") model.args_echo = echo;
    }
    model.kind = field("kind");
    model.target = field("target");
    const auto feat_tokens = reader.next("features");
    model.features.assign(feat_tokens.begin() + 1, feat_tokens.end());
    model.base_score = parse_double(field("base_score"), reader.where());
    model.learning_rate = parse_double(field("learning_rate"), reader.where());
    model.best_round = static_cast<int>(parse_long(field("best_round"), reader.where()));
    model.config.rounds = static_cast<int>(parse_long(field("rounds"), reader.where()));
    model.config.patience =
        static_cast<int>(parse_long(field("patience"), reader.where()));
    model.config.max_depth =
        static_cast<int>(parse_long(field("max_depth"), reader.where()));
    model.config.min_samples_leaf =
        static_cast<int>(parse_long(field("min_samples_leaf"), reader.where()));
    model.config.lambda = parse_double(field("lambda"), reader.where());
    model.config.seed =
        static_cast<std::uint64_t>(parse_long(field("seed"), reader.where()));
    model.config.learning_rate = model.learning_rate;

    const auto n_trees = parse_long(field("trees"), reader.where());
    if (n_trees < 0 || model.best_round < 0 || model.best_round > n_trees) {
        throw Error(path.string() + ": inconsistent tree count vs best_round");
    }
    for (long t = 0; t < n_trees; ++t) {
        const auto n_nodes = parse_long(field("tree"), reader.where());
        if (n_nodes < 1) throw Error(reader.where() + ": tree must have nodes");
        RegressionTree tree;
        for (long nidx = 0; nidx < n_nodes; ++nidx) {
            const auto tokens = reader.next("node");
            TreeNode node;
            if (tokens.size() >= 2 && tokens[1] == "leaf") {
                if (tokens.size() != 3) {
                    throw Error(reader.where() + ": leaf node expects a weight");
                }
                node.weight = parse_double(tokens[2], reader.where());
            } else if (tokens.size() >= 2 && tokens[1] == "split") {
                if (tokens.size() != 6) {
                    throw Error(reader.where() +
                                ": split node expects feature threshold left right");
                }
                node.feature = static_cast<int>(parse_long(tokens[2], reader.where()));
                node.threshold = parse_double(tokens[3], reader.where());
                node.left = static_cast<int>(parse_long(tokens[4], reader.where()));
                node.right = static_cast<int>(parse_long(tokens[5], reader.where()));
                if (node.feature < 0 ||
                    node.feature >= static_cast<int>(model.features.size()) ||
                    node.left < 0 || node.left >= n_nodes || node.right < 0 ||
                    node.right >= n_nodes) {
                    throw Error(reader.where() + ": node references out of range");
                }
            } else {
                throw Error(reader.where() + ": node must be 'leaf' or 'split'");
            }
            tree.nodes.push_back(node);
        }
        model.trees.push_back(std::move(tree));
    }
    reader.next("end");
    return model;
}

} // namespace coincast
