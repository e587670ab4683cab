// Regenerates the committed fixtures: per-coin payload files for the
// fixture data source, the demo coins/features/config JSONs, and the golden
// models with their frozen prediction vectors. Run from the repo root:
//   coincast-fixturegen [fixtures-dir]

#include <filesystem>
#include <iostream>
#include <map>
#include <vector>

#include <json.hpp>

#include "coincast/date.hpp"
#include "coincast/fileio.hpp"
#include "coincast/gbtree.hpp"
#include "coincast/numtext.hpp"
#include "coincast/ohlc.hpp"
#include "coincast/price_matrix.hpp"
#include "coincast/rng.hpp"
#include "coincast/rnn.hpp"
#include "coincast/synthetic.hpp"

namespace fs = std::filesystem;
using namespace coincast;
using nlohmann::json;

namespace {

void write_payloads(const fs::path& dir, const std::vector<OhlcRecord>& records) {
    fs::create_directories(dir);
    std::map<std::string, json> candles;
    std::vector<std::string> order;
    for (const auto& rec : records) {
        if (!candles.contains(rec.coin)) order.push_back(rec.coin);
        json item;
        item["date"] = rec.date.to_string();
        item["open"] = rec.open;
        item["high"] = rec.high;
        item["low"] = rec.low;
        item["close"] = rec.close;
        candles[rec.coin].push_back(item);
    }
    for (const auto& coin : order) {
        json doc;
        doc["coin"] = coin;
        doc["candles"] = candles[coin];
        atomic_write(dir / (coin + ".json"),
                     [&](std::ostream& out) { out << doc.dump(1) << "\n"; });
    }
}

void write_json(const fs::path& path, const json& doc) {
    atomic_write(path, [&](std::ostream& out) { out << doc.dump(1) << "\n"; });
}

// Small deterministic regression setup shared by both golden models.
struct GoldenData {
    PriceMatrix train;
    PriceMatrix valid;
    std::vector<std::string> features{"eth", "xrp", "doge", "ada"};
    std::string target{"btc"};
};

GoldenData make_golden_data() {
    SyntheticSpec spec;
    spec.seed = 777;
    spec.days = 60;
    spec.coins = default_universe();
    const auto records = make_synthetic_market(spec);
    const auto built = to_price_matrix(records, PriceVariable::avg_ohlc);
    const auto split = chronological_split(built.matrix, 0.8, 0.2);
    return {split.train, split.valid, {"eth", "xrp", "doge", "ada"}, "btc"};
}

void append_predictions_csv(std::ostream& out, const std::vector<double>& values) {
    for (const double v : values) out << format_double(v) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    const fs::path fixtures = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures");
    fs::create_directories(fixtures);
    fs::create_directories(fixtures / "golden");

    // Market payloads: the demo 8-coin universe over 93 days.
    SyntheticSpec spec;
    spec.coins = default_universe();
    const auto records = make_synthetic_market(spec);
    write_payloads(fixtures / "cmc", records);
    std::cout << "wrote " << (fixtures / "cmc").string() << " (" << spec.coins.size()
              << " payloads, " << spec.days << " days)\n";

    json coins = json::array();
    for (const auto& c : spec.coins) coins.push_back(c.name);
    write_json(fixtures / "coins.json", coins);
    write_json(fixtures / "features.json", json::array({"eth", "xrp", "doge", "ada"}));

    json config_nn;
    config_nn["layers"] = 1;
    config_nn["hidden"] = 16;
    config_nn["epochs"] = 50;
    config_nn["batch_size"] = 8;
    config_nn["window"] = 7;
    config_nn["learning_rate"] = 0.01;
    config_nn["patience"] = 10;
    config_nn["seed"] = 42;
    write_json(fixtures / "config_nn.json", config_nn);

    json config_gbm;
    config_gbm["rounds"] = 200;
    config_gbm["learning_rate"] = 0.1;
    config_gbm["patience"] = 20;
    config_gbm["seed"] = 42;
    config_gbm["max_depth"] = 3;
    config_gbm["min_samples_leaf"] = 2;
    config_gbm["lambda"] = 1.0;
    write_json(fixtures / "config_gbm.json", config_gbm);

    // Golden models: train once here, then tests must reproduce the frozen
    // prediction vectors from the committed files bit-for-bit (gbm) or to
    // tight tolerance (rnn, which goes through libm).
    const GoldenData data = make_golden_data();

    GbmConfig gbm_config;
    gbm_config.rounds = 40;
    gbm_config.learning_rate = 0.2;
    gbm_config.patience = 10;
    gbm_config.max_depth = 3;
    const GbmModel gbm = gbm_train(data.train, data.valid, data.target, data.features,
                                   gbm_config, "xgboost");
    gbm_save(gbm, fixtures / "golden" / "gbm_btc.txt");
    atomic_write(fixtures / "golden" / "gbm_btc_predictions.csv", [&](std::ostream& out) {
        append_predictions_csv(out, gbm_predict(gbm, data.valid));
    });

    RnnConfig rnn_config;
    rnn_config.cell = CellKind::gru;
    rnn_config.layers = 1;
    rnn_config.hidden = 8;
    rnn_config.epochs = 15;
    rnn_config.batch_size = 8;
    rnn_config.window = 5;
    rnn_config.learning_rate = 0.01;
    rnn_config.patience = 5;
    rnn_config.seed = 1234;
    const RnnModel rnn =
        rnn_train(data.train, data.valid, data.target, data.features, rnn_config);
    rnn_save(rnn, fixtures / "golden" / "gru_btc.pth");
    const auto valid_windows = make_windows(data.valid, data.target, data.features,
                                            rnn_config.window, rnn.scalers);
    atomic_write(fixtures / "golden" / "gru_btc_predictions.csv", [&](std::ostream& out) {
        std::vector<double> preds;
        for (const auto& w : valid_windows) {
            preds.push_back(rnn_forward(rnn, w) * rnn.scalers.target_std +
                            rnn.scalers.target_mean);
        }
        append_predictions_csv(out, preds);
    });

    std::cout << "wrote " << (fixtures / "golden").string() << " models\n";
    return 0;
}
