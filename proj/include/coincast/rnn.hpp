#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coincast/price_matrix.hpp"

namespace coincast {

enum class CellKind { lstm, gru };

CellKind parse_cell_kind(const std::string& name);
const char* cell_kind_name(CellKind kind);

struct RnnConfig {
    CellKind cell = CellKind::lstm;
    int layers = 1;
    int hidden = 16;
    int epochs = 100;
    int batch_size = 8;
    int window = 7; // input sequence length in days
    double learning_rate = 0.01;
    int patience = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// z-score parameters, computed on the training split only.
struct Scalers {
    std::vector<double> feature_mean;
    std::vector<double> feature_std;
    double target_mean = 0.0;
    double target_std = 1.0;
};

Scalers compute_scalers(const PriceMatrix& train, const std::string& target,
                        const std::vector<std::string>& features);

/// One training sample: `window` consecutive standardized feature rows and
/// the standardized target price at the window's final day.
struct WindowSample {
    std::vector<double> inputs; // window x n_features, row-major
    double target = 0.0;
};

/// Sliding windows over consecutive rows of one split (windows never cross
/// split boundaries because each split is windowed separately).
std::vector<WindowSample> make_windows(const PriceMatrix& matrix,
                                       const std::string& target,
                                       const std::vector<std::string>& features,
                                       int window, const Scalers& scalers);

/// Stacked gated recurrent regressor with a linear head on the final hidden
/// state. All weights live in one flat parameter vector:
/// per layer [W (G*H x in), U (G*H x H), b (G*H)], then [out_w (H), out_b].
/// Gate row blocks: LSTM = input, forget, output, candidate; GRU = update,
/// reset, candidate.
struct RnnModel {
    CellKind cell = CellKind::lstm;
    int layers = 1;
    int hidden = 1;
    int window = 1;
    int n_features = 1;
    std::string target;
    std::vector<std::string> features;
    std::vector<double> params;
    Scalers scalers;
    RnnConfig config;
    std::string args_echo; // command line that produced the model, if any

    int gates() const { return cell == CellKind::lstm ? 4 : 3; }
    std::size_t layer_input(int layer) const {
        return layer == 0 ? static_cast<std::size_t>(n_features)
                          : static_cast<std::size_t>(hidden);
    }
    std::size_t layer_offset(int layer) const;
    std::size_t w_offset(int layer) const { return layer_offset(layer); }
    std::size_t u_offset(int layer) const;
    std::size_t b_offset(int layer) const;
    std::size_t out_w_offset() const { return layer_offset(layers); }
    std::size_t out_b_offset() const;
    std::size_t param_count() const { return out_b_offset() + 1; }

    void validate_shapes() const;
};

/// One recurrent step of `layer`. h_prev/c_prev and h_out/c_out have
/// `hidden` entries; c is ignored for GRU. Exposed as the verification
/// surface for the gate equations.
void cell_forward(const RnnModel& model, int layer, const double* x,
                  const double* h_prev, const double* c_prev, double* h_out,
                  double* c_out);

/// Standardized-scale prediction for one sample.
double rnn_forward(const RnnModel& model, const WindowSample& sample);

/// Mean squared error of the model over a batch (standardized scale).
double batch_mse(const RnnModel& model, const std::vector<WindowSample>& batch);

/// Analytic gradients of batch_mse with respect to every parameter, via
/// backpropagation through time. Exposed for gradient verification.
std::vector<double> bptt_gradients(const RnnModel& model,
                                   const std::vector<WindowSample>& batch);

/// Trains with Adam on mean squared error over standardized targets, global
/// gradient-norm clipping at 5.0, and patience-based early stopping; the
/// returned weights are the best-validation snapshot. When non-null,
/// `best_valid_mse` receives that best validation MSE (standardized scale)
/// and `valid_mse_history` the MSE of every evaluated epoch (index 0 = the
/// initial weights).
RnnModel rnn_train(const PriceMatrix& train, const PriceMatrix& valid,
                   const std::string& target, const std::vector<std::string>& features,
                   const RnnConfig& config, double* best_valid_mse = nullptr,
                   std::vector<double>* valid_mse_history = nullptr);

/// Price-scale prediction from exactly `window` rows covering the model's
/// feature columns.
double rnn_predict(const RnnModel& model, const PriceMatrix& recent);

/// Self-describing little-endian binary format.
void rnn_save(const RnnModel& model, const std::filesystem::path& path);
RnnModel rnn_load(const std::filesystem::path& path);

} // namespace coincast
