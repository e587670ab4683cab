#include "coincast/rnn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "coincast/error.hpp"
#include "coincast/fileio.hpp"
#include "coincast/kernels.hpp"
#include "coincast/rng.hpp"

namespace coincast {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kClipNorm = 5.0;
constexpr double kImprovementEps = 1e-10;

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Per-sample activation caches for backpropagation through time.
// Indexing helpers treat [layer][t] blocks of `hidden` (or gates*hidden).
struct ForwardTrace {
    std::vector<double> gates; // activated gate values per layer per t
    std::vector<double> h;     // hidden states per layer per t
    std::vector<double> c;     // lstm cell states per layer per t
    std::vector<double> rh;    // gru r .* h_prev per layer per t
};

class Net {
public:
    explicit Net(const RnnModel& model) : m_(model) {
        m_.validate_shapes();
    }

    std::size_t T() const { return static_cast<std::size_t>(m_.window); }
    std::size_t H() const { return static_cast<std::size_t>(m_.hidden); }
    std::size_t L() const { return static_cast<std::size_t>(m_.layers); }
    std::size_t G() const { return static_cast<std::size_t>(m_.gates()); }

    // Runs the stack over one sample; fills `trace` when non-null.
    double forward(const WindowSample& sample, ForwardTrace* trace) const {
        const std::size_t T_ = T(), H_ = H(), L_ = L(), G_ = G();
        if (sample.inputs.size() != T_ * static_cast<std::size_t>(m_.n_features)) {
            throw Error("window sample has wrong input shape");
        }
        if (trace) {
            trace->gates.assign(L_ * T_ * G_ * H_, 0.0);
            trace->h.assign(L_ * T_ * H_, 0.0);
            trace->c.assign(L_ * T_ * H_, 0.0);
            trace->rh.assign(m_.cell == CellKind::gru ? L_ * T_ * H_ : 0, 0.0);
        }

        std::vector<double> h_prev(H_), c_prev(H_), h_cur(H_), c_cur(H_);
        std::vector<double> layer_in(T_ * std::max<std::size_t>(
                                               static_cast<std::size_t>(m_.n_features), H_));
        std::vector<double> layer_out(T_ * H_);

        std::size_t in_dim = static_cast<std::size_t>(m_.n_features);
        std::copy(sample.inputs.begin(), sample.inputs.end(), layer_in.begin());

        for (std::size_t l = 0; l < L_; ++l) {
            std::fill(h_prev.begin(), h_prev.end(), 0.0);
            std::fill(c_prev.begin(), c_prev.end(), 0.0);
            for (std::size_t t = 0; t < T_; ++t) {
                const double* x = layer_in.data() + t * in_dim;
                step(static_cast<int>(l), x, h_prev.data(), c_prev.data(),
                     h_cur.data(), c_cur.data(),
                     trace ? trace->gates.data() + ((l * T_ + t) * G_ * H_) : nullptr,
                     trace && m_.cell == CellKind::gru
                         ? trace->rh.data() + ((l * T_ + t) * H_)
                         : nullptr);
                if (trace) {
                    std::copy(h_cur.begin(), h_cur.end(),
                              trace->h.begin() + static_cast<std::ptrdiff_t>((l * T_ + t) * H_));
                    std::copy(c_cur.begin(), c_cur.end(),
                              trace->c.begin() + static_cast<std::ptrdiff_t>((l * T_ + t) * H_));
                }
                std::copy(h_cur.begin(), h_cur.end(),
                          layer_out.begin() + static_cast<std::ptrdiff_t>(t * H_));
                std::swap(h_prev, h_cur);
                std::swap(c_prev, c_cur);
            }
            std::copy(layer_out.begin(), layer_out.end(), layer_in.begin());
            in_dim = H_;
        }

        const double* out_w = m_.params.data() + m_.out_w_offset();
        const double out_b = m_.params[m_.out_b_offset()];
        const double* h_last = layer_in.data() + (T_ - 1) * H_;
        return kernels::dot(out_w, h_last, H_) + out_b;
    }

    // One cell step; gate activations and (for GRU) r.*h_prev go to the
    // optional cache pointers.
    void step(int layer, const double* x, const double* h_prev, const double* c_prev,
              double* h_out, double* c_out, double* pre_cache, double* rh_cache) const {
        const std::size_t H_ = H();
        const std::size_t in_dim = m_.layer_input(layer);
        const double* W = m_.params.data() + m_.w_offset(layer);
        const double* U = m_.params.data() + m_.u_offset(layer);
        const double* b = m_.params.data() + m_.b_offset(layer);

        if (m_.cell == CellKind::lstm) {
            // Row blocks: input, forget, output, candidate.
            std::vector<double> a(4 * H_);
            for (std::size_t row = 0; row < 4 * H_; ++row) {
                a[row] = kernels::dot(W + row * in_dim, x, in_dim) +
                         kernels::dot(U + row * H_, h_prev, H_) + b[row];
            }
            for (std::size_t j = 0; j < H_; ++j) {
                const double i_g = logistic(a[j]);
                const double f_g = logistic(a[H_ + j]);
                const double o_g = logistic(a[2 * H_ + j]);
                const double cand = std::tanh(a[3 * H_ + j]);
                const double c_new = f_g * c_prev[j] + i_g * cand;
                c_out[j] = c_new;
                h_out[j] = o_g * std::tanh(c_new);
                if (pre_cache) {
                    pre_cache[j] = i_g;
                    pre_cache[H_ + j] = f_g;
                    pre_cache[2 * H_ + j] = o_g;
                    pre_cache[3 * H_ + j] = cand;
                }
            }
        } else {
            // Row blocks: update, reset, candidate. Candidate uses U*(r.*h).
            std::vector<double> a(2 * H_);
            for (std::size_t row = 0; row < 2 * H_; ++row) {
                a[row] = kernels::dot(W + row * in_dim, x, in_dim) +
                         kernels::dot(U + row * H_, h_prev, H_) + b[row];
            }
            std::vector<double> z(H_), r(H_), rh(H_);
            for (std::size_t j = 0; j < H_; ++j) {
                z[j] = logistic(a[j]);
                r[j] = logistic(a[H_ + j]);
                rh[j] = r[j] * h_prev[j];
            }
            for (std::size_t j = 0; j < H_; ++j) {
                const std::size_t row = 2 * H_ + j;
                const double pre = kernels::dot(W + row * in_dim, x, in_dim) +
                                   kernels::dot(U + row * H_, rh.data(), H_) + b[row];
                const double cand = std::tanh(pre);
                h_out[j] = (1.0 - z[j]) * h_prev[j] + z[j] * cand;
                if (pre_cache) {
                    pre_cache[j] = z[j];
                    pre_cache[H_ + j] = r[j];
                    pre_cache[2 * H_ + j] = cand;
                }
                if (rh_cache) rh_cache[j] = rh[j];
            }
            if (c_out) std::fill(c_out, c_out + H_, 0.0);
        }
    }

    // Accumulates gradients for one sample, already scaled by dLoss/dPred.
    void backward(const WindowSample& sample, const ForwardTrace& trace,
                  double d_pred, std::vector<double>& grad) const {
        const std::size_t T_ = T(), H_ = H(), L_ = L(), G_ = G();
        const std::size_t F = static_cast<std::size_t>(m_.n_features);

        // dh arriving from the layer above (or the output head for the top).
        std::vector<double> dh_above(T_ * H_, 0.0);
        const double* out_w = m_.params.data() + m_.out_w_offset();
        const double* h_top_last = trace.h.data() + (((L_ - 1) * T_ + (T_ - 1)) * H_);
        kernels::axpy(d_pred, out_w, dh_above.data() + (T_ - 1) * H_, H_);
        kernels::axpy(d_pred, h_top_last, grad.data() + m_.out_w_offset(), H_);
        grad[m_.out_b_offset()] += d_pred;

        std::vector<double> dh_below(T_ * H_);
        std::vector<double> dh(H_), dc(H_), dh_carry(H_), dc_carry(H_);
        std::vector<double> da(G_ * H_);

        for (std::size_t l = L_; l-- > 0;) {
            const std::size_t in_dim = m_.layer_input(static_cast<int>(l));
            const double* W = m_.params.data() + m_.w_offset(static_cast<int>(l));
            const double* U = m_.params.data() + m_.u_offset(static_cast<int>(l));
            double* gW = grad.data() + m_.w_offset(static_cast<int>(l));
            double* gU = grad.data() + m_.u_offset(static_cast<int>(l));
            double* gb = grad.data() + m_.b_offset(static_cast<int>(l));

            std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
            std::fill(dc_carry.begin(), dc_carry.end(), 0.0);
            std::fill(dh_below.begin(), dh_below.end(), 0.0);

            for (std::size_t t = T_; t-- > 0;) {
                const double* x =
                    l == 0 ? sample.inputs.data() + t * F
                           : trace.h.data() + (((l - 1) * T_ + t) * H_);
                const double* h_prev =
                    t == 0 ? nullptr : trace.h.data() + ((l * T_ + t - 1) * H_);
                const double* c_prev =
                    t == 0 ? nullptr : trace.c.data() + ((l * T_ + t - 1) * H_);
                const double* gate = trace.gates.data() + ((l * T_ + t) * G_ * H_);

                for (std::size_t j = 0; j < H_; ++j) {
                    dh[j] = dh_above[t * H_ + j] + dh_carry[j];
                }

                if (m_.cell == CellKind::lstm) {
                    const double* c_now = trace.c.data() + ((l * T_ + t) * H_);
                    for (std::size_t j = 0; j < H_; ++j) {
                        const double i_g = gate[j];
                        const double f_g = gate[H_ + j];
                        const double o_g = gate[2 * H_ + j];
                        const double cand = gate[3 * H_ + j];
                        const double tc = std::tanh(c_now[j]);
                        const double do_ = dh[j] * tc;
                        dc[j] = dh[j] * o_g * (1.0 - tc * tc) + dc_carry[j];
                        const double di = dc[j] * cand;
                        const double df = dc[j] * (t == 0 ? 0.0 : c_prev[j]);
                        const double dg = dc[j] * i_g;
                        da[j] = di * i_g * (1.0 - i_g);
                        da[H_ + j] = df * f_g * (1.0 - f_g);
                        da[2 * H_ + j] = do_ * o_g * (1.0 - o_g);
                        da[3 * H_ + j] = dg * (1.0 - cand * cand);
                        dc_carry[j] = dc[j] * f_g;
                    }
                    std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
                    for (std::size_t row = 0; row < 4 * H_; ++row) {
                        const double grad_row = da[row];
                        if (grad_row == 0.0) continue;
                        kernels::axpy(grad_row, x, gW + row * in_dim, in_dim);
                        if (t > 0) {
                            kernels::axpy(grad_row, h_prev, gU + row * H_, H_);
                            kernels::axpy(grad_row, U + row * H_, dh_carry.data(), H_);
                        }
                        gb[row] += grad_row;
                        if (l > 0) {
                            kernels::axpy(grad_row, W + row * in_dim,
                                          dh_below.data() + t * in_dim, in_dim);
                        }
                    }
                } else {
                    const double* rh = trace.rh.data() + ((l * T_ + t) * H_);
                    std::vector<double> da_c(H_);
                    for (std::size_t j = 0; j < H_; ++j) {
                        const double z = gate[j];
                        const double cand = gate[2 * H_ + j];
                        const double hp = t == 0 ? 0.0 : h_prev[j];
                        const double dz = dh[j] * (cand - hp);
                        const double dcand = dh[j] * z;
                        da[j] = dz * z * (1.0 - z);
                        da_c[j] = dcand * (1.0 - cand * cand);
                        da[2 * H_ + j] = da_c[j];
                    }
                    // d(r.*h_prev) = U_c^T da_c
                    std::vector<double> d_rh(H_, 0.0);
                    for (std::size_t j = 0; j < H_; ++j) {
                        if (da_c[j] == 0.0) continue;
                        kernels::axpy(da_c[j], U + (2 * H_ + j) * H_, d_rh.data(), H_);
                    }
                    for (std::size_t j = 0; j < H_; ++j) {
                        const double r = gate[H_ + j];
                        const double hp = t == 0 ? 0.0 : h_prev[j];
                        const double dr = d_rh[j] * hp;
                        da[H_ + j] = dr * r * (1.0 - r);
                    }
                    // dh_prev = dh .* (1-z) + U_z^T da_z + U_r^T da_r + d_rh .* r
                    for (std::size_t j = 0; j < H_; ++j) {
                        dh_carry[j] = dh[j] * (1.0 - gate[j]) + d_rh[j] * gate[H_ + j];
                    }
                    for (std::size_t row = 0; row < 2 * H_; ++row) {
                        if (da[row] == 0.0) continue;
                        kernels::axpy(da[row], U + row * H_, dh_carry.data(), H_);
                    }
                    for (std::size_t row = 0; row < 3 * H_; ++row) {
                        const double grad_row = da[row];
                        if (grad_row == 0.0) continue;
                        kernels::axpy(grad_row, x, gW + row * in_dim, in_dim);
                        if (t > 0) {
                            const double* u_src = row < 2 * H_ ? h_prev : rh;
                            kernels::axpy(grad_row, u_src, gU + row * H_, H_);
                        }
                        gb[row] += grad_row;
                        if (l > 0) {
                            kernels::axpy(grad_row, W + row * in_dim,
                                          dh_below.data() + t * in_dim, in_dim);
                        }
                    }
                }
            }
            std::swap(dh_above, dh_below);
        }
    }

private:
    const RnnModel& m_;
};

std::vector<std::size_t> resolve_columns(const PriceMatrix& matrix,
                                         const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) idx.push_back(matrix.coin_index(n));
    return idx;
}

} // namespace

CellKind parse_cell_kind(const std::string& name) {
    if (name == "lstm") return CellKind::lstm;
    if (name == "gru") return CellKind::gru;
    throw Error("unknown cell kind '" + name + "' (expected lstm or gru)");
}

const char* cell_kind_name(CellKind kind) {
    return kind == CellKind::lstm ? "lstm" : "gru";
}

void RnnConfig::validate() const {
    if (layers < 1) throw Error("rnn config: layers must be >= 1");
    if (hidden < 1) throw Error("rnn config: hidden must be >= 1");
    if (epochs < 1) throw Error("rnn config: epochs must be >= 1");
    if (batch_size < 1) throw Error("rnn config: batch_size must be >= 1");
    if (window < 1) throw Error("rnn config: window must be >= 1");
    if (patience < 1) throw Error("rnn config: patience must be >= 1");
    if (learning_rate < 0.0) throw Error("rnn config: learning_rate must be >= 0");
}

std::size_t RnnModel::layer_offset(int layer) const {
    const auto H = static_cast<std::size_t>(hidden);
    const auto G = static_cast<std::size_t>(gates());
    std::size_t off = 0;
    for (int l = 0; l < layer; ++l) {
        off += G * H * layer_input(l) + G * H * H + G * H;
    }
    return off;
}

std::size_t RnnModel::u_offset(int layer) const {
    const auto H = static_cast<std::size_t>(hidden);
    const auto G = static_cast<std::size_t>(gates());
    return w_offset(layer) + G * H * layer_input(layer);
}

std::size_t RnnModel::b_offset(int layer) const {
    const auto H = static_cast<std::size_t>(hidden);
    const auto G = static_cast<std::size_t>(gates());
    return u_offset(layer) + G * H * H;
}

std::size_t RnnModel::out_b_offset() const {
    return out_w_offset() + static_cast<std::size_t>(hidden);
}

void RnnModel::validate_shapes() const {
    if (layers < 1 || hidden < 1 || window < 1 || n_features < 1) {
        throw Error("rnn model has degenerate shape");
    }
    if (params.size() != param_count()) {
        throw Error("rnn model parameter vector has wrong size");
    }
    if (scalers.feature_mean.size() != static_cast<std::size_t>(n_features) ||
        scalers.feature_std.size() != static_cast<std::size_t>(n_features)) {
        throw Error("rnn model scaler shape mismatch");
    }
}

Scalers compute_scalers(const PriceMatrix& train, const std::string& target,
                        const std::vector<std::string>& features) {
    const auto stats = [&](const std::vector<double>& xs) {
        const double mean = kernels::sum(xs.data(), xs.size()) /
                            static_cast<double>(xs.size());
        double acc = 0.0;
        for (const double x : xs) acc += (x - mean) * (x - mean);
        const double sd = std::sqrt(acc / static_cast<double>(xs.size()));
        if (!(sd > 0.0)) {
            throw Error("cannot standardize a constant series (std = 0)");
        }
        return std::pair{mean, sd};
    };
    Scalers s;
    for (const auto& f : features) {
        const auto [mean, sd] = stats(train.column(f));
        s.feature_mean.push_back(mean);
        s.feature_std.push_back(sd);
    }
    const auto [tm, ts] = stats(train.column(target));
    s.target_mean = tm;
    s.target_std = ts;
    return s;
}

std::vector<WindowSample> make_windows(const PriceMatrix& matrix,
                                       const std::string& target,
                                       const std::vector<std::string>& features,
                                       int window, const Scalers& scalers) {
    if (window < 1) throw Error("window must be >= 1");
    for (const auto& f : features) {
        if (f == target) throw Error("target '" + target + "' cannot also be a feature");
    }
    if (matrix.rows() < static_cast<std::size_t>(window)) {
        throw Error("not enough rows (" + std::to_string(matrix.rows()) +
                    ") for window " + std::to_string(window));
    }
    if (scalers.feature_mean.size() != features.size()) {
        throw Error("scaler shape does not match feature count");
    }
    for (const double sd : scalers.feature_std) {
        if (!(sd > 0.0)) throw Error("cannot standardize a constant series (std = 0)");
    }
    if (!(scalers.target_std > 0.0)) {
        throw Error("cannot standardize a constant series (std = 0)");
    }

    const auto cols = resolve_columns(matrix, features);
    const std::size_t target_col = matrix.coin_index(target);
    const std::size_t W = static_cast<std::size_t>(window);
    const std::size_t F = features.size();

    std::vector<WindowSample> samples;
    samples.reserve(matrix.rows() - W + 1);
    for (std::size_t end = W - 1; end < matrix.rows(); ++end) {
        WindowSample s;
        s.inputs.resize(W * F);
        for (std::size_t t = 0; t < W; ++t) {
            const std::size_t row = end - W + 1 + t;
            for (std::size_t f = 0; f < F; ++f) {
                s.inputs[t * F + f] = (matrix.at(row, cols[f]) - scalers.feature_mean[f]) /
                                      scalers.feature_std[f];
            }
        }
        s.target = (matrix.at(end, target_col) - scalers.target_mean) /
                   scalers.target_std;
        samples.push_back(std::move(s));
    }
    return samples;
}

void cell_forward(const RnnModel& model, int layer, const double* x,
                  const double* h_prev, const double* c_prev, double* h_out,
                  double* c_out) {
    if (layer < 0 || layer >= model.layers) throw Error("layer index out of range");
    Net net(model);
    net.step(layer, x, h_prev, c_prev, h_out, c_out, nullptr, nullptr);
}

double rnn_forward(const RnnModel& model, const WindowSample& sample) {
    Net net(model);
    return net.forward(sample, nullptr);
}

double batch_mse(const RnnModel& model, const std::vector<WindowSample>& batch) {
    if (batch.empty()) throw Error("batch must be non-empty");
    Net net(model);
    double acc = 0.0;
    for (const auto& sample : batch) {
        const double err = net.forward(sample, nullptr) - sample.target;
        acc += err * err;
    }
    return acc / static_cast<double>(batch.size());
}

std::vector<double> bptt_gradients(const RnnModel& model,
                                   const std::vector<WindowSample>& batch) {
    if (batch.empty()) throw Error("batch must be non-empty");
    Net net(model);
    std::vector<double> grad(model.param_count(), 0.0);
    std::vector<double> sample_grad(model.param_count());
    ForwardTrace trace;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (const auto& sample : batch) {
        const double pred = net.forward(sample, &trace);
        const double d_pred = 2.0 * (pred - sample.target) * inv_b;
        std::fill(sample_grad.begin(), sample_grad.end(), 0.0);
        net.backward(sample, trace, d_pred, sample_grad);
        kernels::axpy(1.0, sample_grad.data(), grad.data(), grad.size());
    }
    return grad;
}

RnnModel rnn_train(const PriceMatrix& train, const PriceMatrix& valid,
                   const std::string& target, const std::vector<std::string>& features,
                   const RnnConfig& config, double* best_valid_mse,
                   std::vector<double>* valid_mse_history) {
    config.validate();
    if (features.empty()) throw Error("rnn training needs at least one feature");

    RnnModel model;
    model.cell = config.cell;
    model.layers = config.layers;
    model.hidden = config.hidden;
    model.window = config.window;
    model.n_features = static_cast<int>(features.size());
    model.target = target;
    model.features = features;
    model.config = config;
    model.scalers = compute_scalers(train, target, features);

    const auto train_samples =
        make_windows(train, target, features, config.window, model.scalers);
    const auto valid_samples =
        make_windows(valid, target, features, config.window, model.scalers);
    if (train_samples.empty() || valid_samples.empty()) {
        throw Error("training or validation split yields no window samples");
    }

    Rng rng(config.seed);
    const double init_range = 1.0 / std::sqrt(static_cast<double>(config.hidden));
    model.params.resize(model.param_count());
    for (auto& p : model.params) p = rng.uniform(-init_range, init_range);

    const std::size_t n_params = model.params.size();
    std::vector<double> adam_m(n_params, 0.0), adam_v(n_params, 0.0);
    double beta1_pow = 1.0, beta2_pow = 1.0;

    double best_mse = batch_mse(model, valid_samples);
    std::vector<double> best_params = model.params;
    int since_improvement = 0;
    if (valid_mse_history) valid_mse_history->assign(1, best_mse);

    std::vector<std::size_t> order(train_samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<WindowSample> batch;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        const auto bs = static_cast<std::size_t>(config.batch_size);
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t stop = std::min(order.size(), start + bs);
            batch.clear();
            for (std::size_t k = start; k < stop; ++k) {
                batch.push_back(train_samples[order[k]]);
            }
            auto grad = bptt_gradients(model, batch);

            const double norm_sq = kernels::dot(grad.data(), grad.data(), n_params);
            if (!std::isfinite(norm_sq)) {
                throw Error("non-finite gradient at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(start / bs + 1));
            }
            const double norm = std::sqrt(norm_sq);
            if (norm > kClipNorm) {
                kernels::scale(kClipNorm / norm, grad.data(), n_params);
            }

            beta1_pow *= kAdamBeta1;
            beta2_pow *= kAdamBeta2;
            kernels::adam_step(model.params.data(), adam_m.data(), adam_v.data(),
                               grad.data(), n_params, config.learning_rate, kAdamBeta1,
                               kAdamBeta2, kAdamEps, 1.0 - beta1_pow, 1.0 - beta2_pow);
        }

        const double epoch_mse = batch_mse(model, valid_samples);
        if (valid_mse_history) valid_mse_history->push_back(epoch_mse);
        if (!std::isfinite(epoch_mse)) {
            throw Error("non-finite validation loss at epoch " + std::to_string(epoch));
        }
        if (best_mse - epoch_mse > kImprovementEps) {
            best_mse = epoch_mse;
            best_params = model.params;
            since_improvement = 0;
        } else {
            ++since_improvement;
            if (since_improvement >= config.patience) break;
        }
    }

    model.params = std::move(best_params);
    if (best_valid_mse) *best_valid_mse = best_mse;
    return model;
}

double rnn_predict(const RnnModel& model, const PriceMatrix& recent) {
    if (recent.rows() != static_cast<std::size_t>(model.window)) {
        throw Error("prediction needs exactly " + std::to_string(model.window) +
                    " rows, got " + std::to_string(recent.rows()));
    }
    const auto cols = resolve_columns(recent, model.features);
    WindowSample sample;
    const std::size_t W = static_cast<std::size_t>(model.window);
    const std::size_t F = model.features.size();
    sample.inputs.resize(W * F);
    for (std::size_t t = 0; t < W; ++t) {
        for (std::size_t f = 0; f < F; ++f) {
            sample.inputs[t * F + f] =
                (recent.at(t, cols[f]) - model.scalers.feature_mean[f]) /
                model.scalers.feature_std[f];
        }
    }
    const double std_pred = rnn_forward(model, sample);
    return std_pred * model.scalers.target_std + model.scalers.target_mean;
}

namespace {

constexpr char kMagic[8] = {'C', 'C', 'R', 'N', 'N', 'v', '0', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class BinReader {
public:
    BinReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

    std::uint32_t u32() {
        unsigned char buf[4];
        read(buf, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        unsigned char buf[8];
        read(buf, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string str() {
        const std::uint32_t n = u32();
        if (n > (1u << 20)) throw Error(name_ + ": implausible string length");
        std::string s(n, '\0');
        read(s.data(), n);
        return s;
    }

    void read(void* dst, std::size_t n) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n)) {
            throw Error(name_ + ": truncated model file");
        }
    }

private:
    std::istream& in_;
    std::string name_;
};

} // namespace

void rnn_save(const RnnModel& model, const std::filesystem::path& path) {
    model.validate_shapes();
    atomic_write(path, [&](std::ostream& out) {
        out.write(kMagic, sizeof kMagic);
        put_u32(out, model.cell == CellKind::lstm ? 0u : 1u);
        put_u32(out, static_cast<std::uint32_t>(model.layers));
        put_u32(out, static_cast<std::uint32_t>(model.hidden));
        put_u32(out, static_cast<std::uint32_t>(model.window));
        put_u32(out, static_cast<std::uint32_t>(model.n_features));
        put_u32(out, static_cast<std::uint32_t>(model.config.epochs));
        put_u32(out, static_cast<std::uint32_t>(model.config.batch_size));
        put_u32(out, static_cast<std::uint32_t>(model.config.patience));
        put_u64(out, model.config.seed);
        put_f64(out, model.config.learning_rate);
        put_str(out, model.args_echo);
        put_str(out, model.target);
        put_u32(out, static_cast<std::uint32_t>(model.features.size()));
        for (const auto& f : model.features) put_str(out, f);
        for (const double v : model.scalers.feature_mean) put_f64(out, v);
        for (const double v : model.scalers.feature_std) put_f64(out, v);
        put_f64(out, model.scalers.target_mean);
        put_f64(out, model.scalers.target_std);
        put_u64(out, model.params.size());
        for (const double v : model.params) put_f64(out, v);
    });
}

RnnModel rnn_load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path.string());
    BinReader reader(in, path.string());

    char magic[8];
    reader.read(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw Error(path.string() + ": not a coincast rnn model (bad magic/version)");
    }

    RnnModel model;
    const std::uint32_t cell = reader.u32();
    if (cell > 1) throw Error(path.string() + ": unknown cell kind in model file");
    model.cell = cell == 0 ? CellKind::lstm : CellKind::gru;
    model.layers = static_cast<int>(reader.u32());
    model.hidden = static_cast<int>(reader.u32());
    model.window = static_cast<int>(reader.u32());
    model.n_features = static_cast<int>(reader.u32());
    model.config.cell = model.cell;
    model.config.layers = model.layers;
    model.config.hidden = model.hidden;
    model.config.window = model.window;
    model.config.epochs = static_cast<int>(reader.u32());
    model.config.batch_size = static_cast<int>(reader.u32());
    model.config.patience = static_cast<int>(reader.u32());
    model.config.seed = reader.u64();
    model.config.learning_rate = reader.f64();
    model.args_echo = reader.str();
    model.target = reader.str();
    const std::uint32_t n_feat = reader.u32();
    if (n_feat != static_cast<std::uint32_t>(model.n_features)) {
        throw Error(path.string() + ": feature list does not match shape header");
    }
    for (std::uint32_t i = 0; i < n_feat; ++i) model.features.push_back(reader.str());
    model.scalers.feature_mean.resize(n_feat);
    model.scalers.feature_std.resize(n_feat);
    for (auto& v : model.scalers.feature_mean) v = reader.f64();
    for (auto& v : model.scalers.feature_std) v = reader.f64();
    model.scalers.target_mean = reader.f64();
    model.scalers.target_std = reader.f64();
    const std::uint64_t n_params = reader.u64();
    model.params.resize(n_params);
    for (auto& v : model.params) v = reader.f64();
    model.validate_shapes();
    return model;
}

} // namespace coincast
