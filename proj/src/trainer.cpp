#include "segline/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "segline/checkpoint.hpp"
#include "segline/config.hpp"
#include "segline/error.hpp"
#include "segline/log.hpp"
#include "segline/rng.hpp"
#include "segline/segmenter.hpp"

namespace segline {

using nlohmann::json;

std::vector<double> default_tau_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) grid.push_back(static_cast<double>(i) * 0.05);
    return grid;
}

void TrainConfig::validate() const {
    if (alpha < 0.0 || alpha > 1.0) throw NumericError("AlphaOutOfRange: " + std::to_string(alpha));
    if (hidden == 0 || word_hidden == 0 || word_dim == 0)
        throw DataError("model dimensions must be positive");
    if (lr <= 0.0) throw DataError("learning rate must be positive");
    if (batch_size == 0 || epochs == 0) throw DataError("batch_size and epochs must be positive");
    if (threads == 0) throw DataError("threads must be positive");
    if (tau_grid.empty()) throw DataError("tau grid must be non-empty");
    for (double t : tau_grid) {
        if (t <= 0.0 || t >= 1.0)
            throw DataError("tau grid values must lie in (0,1), got " + std::to_string(t));
    }
    if (enable_rsa && rsa_window == 0) throw DataError("rsa_window must be >= 1");
}

ModelConfig TrainConfig::model_config() const {
    ModelConfig mc;
    mc.word_dim = word_dim;
    mc.word_hidden = word_hidden;
    mc.sent_hidden = hidden;
    mc.aux_dim = aux_dim;
    mc.ext_dim = ext_dim;
    mc.rsa_window = rsa_window;
    mc.enable_aux = enable_aux;
    mc.enable_rsa = enable_rsa;
    mc.enable_external = enable_external_embeddings;
    mc.pooling = pooling;
    mc.alpha = alpha;
    mc.clamp_eps = clamp_eps;
    return mc;
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::vector<double> parse_tau_grid(const std::string& text) {
    std::vector<double> grid;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            grid.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw DataError("bad tau_grid entry: " + item);
        }
    }
    return grid;
}

std::string tau_grid_to_string(const std::vector<double>& grid) {
    std::ostringstream os;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (i) os << ",";
        os << format_double(grid[i]);
    }
    return os.str();
}

const std::map<std::string, int> kTrainKeys = {
    {"alpha", 0},      {"rsa_window", 0}, {"hidden", 0},     {"word_hidden", 0},
    {"lr", 0},         {"batch_size", 0}, {"epochs", 0},     {"tau_grid", 0},
    {"seed", 0},       {"enable_aux", 0}, {"enable_rsa", 0}, {"enable_external_embeddings", 0},
    {"pooling", 0},    {"word_dim", 0},   {"ext_dim", 0},    {"aux_dim", 0},
    {"clamp_eps", 0},  {"grad_clip", 0},  {"threads", 0},
};

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw DataError("bad number for config key " + key + ": " + it->second);
    }
}

int64_t kv_int(const std::map<std::string, std::string>& kv, const std::string& key,
               int64_t fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        size_t pos = 0;
        const int64_t v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw DataError("bad integer for config key " + key + ": " + it->second);
    }
}

bool kv_bool(const std::map<std::string, std::string>& kv, const std::string& key, bool fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    return parse_bool(it->second, key);
}

}  // namespace

TrainConfig TrainConfig::from_kv(const std::map<std::string, std::string>& kv) {
    return from_kv(kv, TrainConfig{});
}

TrainConfig TrainConfig::from_kv(const std::map<std::string, std::string>& kv,
                                 const TrainConfig& base) {
    for (const auto& [key, value] : kv) {
        if (!kTrainKeys.count(key)) throw DataError("unknown train config key: " + key);
    }
    TrainConfig cfg = base;
    cfg.alpha = kv_double(kv, "alpha", cfg.alpha);
    cfg.rsa_window = static_cast<size_t>(kv_int(kv, "rsa_window", static_cast<int64_t>(cfg.rsa_window)));
    cfg.hidden = static_cast<size_t>(kv_int(kv, "hidden", static_cast<int64_t>(cfg.hidden)));
    cfg.word_hidden =
        static_cast<size_t>(kv_int(kv, "word_hidden", static_cast<int64_t>(cfg.word_hidden)));
    cfg.lr = kv_double(kv, "lr", cfg.lr);
    cfg.batch_size =
        static_cast<size_t>(kv_int(kv, "batch_size", static_cast<int64_t>(cfg.batch_size)));
    cfg.epochs = static_cast<size_t>(kv_int(kv, "epochs", static_cast<int64_t>(cfg.epochs)));
    if (kv.count("tau_grid")) cfg.tau_grid = parse_tau_grid(kv.at("tau_grid"));
    cfg.seed = static_cast<uint64_t>(kv_int(kv, "seed", static_cast<int64_t>(cfg.seed)));
    cfg.enable_aux = kv_bool(kv, "enable_aux", cfg.enable_aux);
    cfg.enable_rsa = kv_bool(kv, "enable_rsa", cfg.enable_rsa);
    cfg.enable_external_embeddings =
        kv_bool(kv, "enable_external_embeddings", cfg.enable_external_embeddings);
    if (kv.count("pooling")) cfg.pooling = pooling_from_string(kv.at("pooling"));
    cfg.word_dim = static_cast<size_t>(kv_int(kv, "word_dim", static_cast<int64_t>(cfg.word_dim)));
    cfg.ext_dim = static_cast<size_t>(kv_int(kv, "ext_dim", static_cast<int64_t>(cfg.ext_dim)));
    cfg.aux_dim = static_cast<size_t>(kv_int(kv, "aux_dim", static_cast<int64_t>(cfg.aux_dim)));
    cfg.clamp_eps = kv_double(kv, "clamp_eps", cfg.clamp_eps);
    cfg.grad_clip = kv_double(kv, "grad_clip", cfg.grad_clip);
    cfg.threads = static_cast<size_t>(kv_int(kv, "threads", static_cast<int64_t>(cfg.threads)));
    cfg.validate();
    return cfg;
}

std::map<std::string, std::string> TrainConfig::to_kv() const {
    return {
        {"alpha", format_double(alpha)},
        {"rsa_window", std::to_string(rsa_window)},
        {"hidden", std::to_string(hidden)},
        {"word_hidden", std::to_string(word_hidden)},
        {"lr", format_double(lr)},
        {"batch_size", std::to_string(batch_size)},
        {"epochs", std::to_string(epochs)},
        {"tau_grid", tau_grid_to_string(tau_grid)},
        {"seed", std::to_string(seed)},
        {"enable_aux", enable_aux ? "true" : "false"},
        {"enable_rsa", enable_rsa ? "true" : "false"},
        {"enable_external_embeddings", enable_external_embeddings ? "true" : "false"},
        {"pooling", pooling_to_string(pooling)},
        {"word_dim", std::to_string(word_dim)},
        {"ext_dim", std::to_string(ext_dim)},
        {"aux_dim", std::to_string(aux_dim)},
        {"clamp_eps", format_double(clamp_eps)},
        {"grad_clip", format_double(grad_clip)},
        {"threads", std::to_string(threads)},
    };
}

std::string TrainConfig::to_json() const {
    json j;
    j["alpha"] = alpha;
    j["rsa_window"] = rsa_window;
    j["hidden"] = hidden;
    j["word_hidden"] = word_hidden;
    j["lr"] = lr;
    j["batch_size"] = batch_size;
    j["epochs"] = epochs;
    j["tau_grid"] = tau_grid;
    j["seed"] = seed;
    j["enable_aux"] = enable_aux;
    j["enable_rsa"] = enable_rsa;
    j["enable_external_embeddings"] = enable_external_embeddings;
    j["pooling"] = pooling_to_string(pooling);
    j["word_dim"] = word_dim;
    j["ext_dim"] = ext_dim;
    j["aux_dim"] = aux_dim;
    j["clamp_eps"] = clamp_eps;
    j["grad_clip"] = grad_clip;
    j["threads"] = threads;
    return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("bad train config json: ") + e.what());
    }
    TrainConfig cfg;
    try {
        cfg.alpha = j.at("alpha").get<double>();
        cfg.rsa_window = j.at("rsa_window").get<size_t>();
        cfg.hidden = j.at("hidden").get<size_t>();
        cfg.word_hidden = j.at("word_hidden").get<size_t>();
        cfg.lr = j.at("lr").get<double>();
        cfg.batch_size = j.at("batch_size").get<size_t>();
        cfg.epochs = j.at("epochs").get<size_t>();
        cfg.tau_grid = j.at("tau_grid").get<std::vector<double>>();
        cfg.seed = j.at("seed").get<uint64_t>();
        cfg.enable_aux = j.at("enable_aux").get<bool>();
        cfg.enable_rsa = j.at("enable_rsa").get<bool>();
        cfg.enable_external_embeddings = j.at("enable_external_embeddings").get<bool>();
        cfg.pooling = pooling_from_string(j.at("pooling").get<std::string>());
        cfg.word_dim = j.at("word_dim").get<size_t>();
        cfg.ext_dim = j.at("ext_dim").get<size_t>();
        cfg.aux_dim = j.at("aux_dim").get<size_t>();
        cfg.clamp_eps = j.at("clamp_eps").get<double>();
        cfg.grad_clip = j.at("grad_clip").get<double>();
        cfg.threads = j.at("threads").get<size_t>();
    } catch (const json::exception& e) {
        throw DataError(std::string("bad train config json: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    json meta;
    meta["config"] = json::parse(ckpt.config.to_json());
    meta["tau"] = ckpt.tau;
    meta["best_epoch"] = ckpt.best_epoch;
    meta["best_val_pk"] = ckpt.best_val_pk;
    json hist = json::array();
    for (const auto& e : ckpt.history) {
        hist.push_back({{"epoch", e.epoch},
                        {"l1", e.l1},
                        {"l2", e.l2},
                        {"total", e.total},
                        {"val_pk", e.val_pk},
                        {"tau", e.tau},
                        {"best_so_far", e.best_so_far}});
    }
    meta["history"] = std::move(hist);
    save_named_tensors(path, ckpt.params, meta.dump());
}

Checkpoint load_checkpoint(const std::string& path) {
    NamedTensorFile file = load_named_tensors(path);
    Checkpoint ckpt;
    try {
        json meta = json::parse(file.meta_json);
        ckpt.config = TrainConfig::from_json(meta.at("config").dump());
        ckpt.tau = meta.at("tau").get<double>();
        ckpt.best_epoch = meta.at("best_epoch").get<size_t>();
        ckpt.best_val_pk = meta.at("best_val_pk").get<double>();
        for (const auto& e : meta.at("history")) {
            EpochStats s;
            s.epoch = e.at("epoch").get<size_t>();
            s.l1 = e.at("l1").get<double>();
            s.l2 = e.at("l2").get<double>();
            s.total = e.at("total").get<double>();
            s.val_pk = e.at("val_pk").get<double>();
            s.tau = e.at("tau").get<double>();
            s.best_so_far = e.at("best_so_far").get<bool>();
            ckpt.history.push_back(s);
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("bad checkpoint metadata: ") + e.what());
    }
    ckpt.params = std::move(file.tensors);
    return ckpt;
}

std::unique_ptr<SegmenterModel> model_from_checkpoint(const Checkpoint& ckpt,
                                                      const WordTable& words,
                                                      const SentenceEmbeddingProvider* provider) {
    auto model = std::make_unique<SegmenterModel>(ckpt.config.model_config(), ckpt.config.seed,
                                                  &words, provider);
    model->params().load_values(ckpt.params);
    return model;
}

double tune_threshold(const std::vector<std::vector<double>>& probs, const Corpus& val,
                      const std::vector<double>& grid) {
    if (grid.empty()) throw DataError("tau grid must be non-empty");
    for (double t : grid) {
        if (t <= 0.0 || t >= 1.0)
            throw DataError("tau grid values must lie in (0,1), got " + std::to_string(t));
    }
    if (probs.size() != val.size()) throw ShapeError("LengthMismatch: probs vs val corpus");

    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    double best_tau = sorted.front();
    double best_pk = std::numeric_limits<double>::infinity();
    for (double tau : sorted) {
        double sum = 0.0;
        size_t scored = 0;
        for (size_t d = 0; d < val.size(); ++d) {
            const auto& doc = val.documents[d];
            const auto hyp = decode(probs[d], tau);
            const size_t k = window_k(doc.boundary_labels, doc.num_sentences());
            sum += pk_score(doc.boundary_labels, hyp, k);
            ++scored;
        }
        const double pk = scored ? sum / static_cast<double>(scored) : 0.0;
        if (pk < best_pk) {  // strict: ties keep the smallest tau
            best_pk = pk;
            best_tau = tau;
        }
    }
    return best_tau;
}

double tune_threshold(const SegmenterModel& model, const Corpus& val,
                      const std::vector<double>& grid) {
    std::vector<std::vector<double>> probs;
    probs.reserve(val.size());
    for (const auto& doc : val.documents) probs.push_back(model.predict(doc));
    return tune_threshold(probs, val, grid);
}

PkReport evaluate_model(const SegmenterModel& model, const Corpus& corpus, double tau) {
    return evaluate_corpus(corpus, [&](const Document& doc) {
        return decode(model.predict(doc), tau);
    });
}

namespace {

struct DocResult {
    LossBreakdown loss;
    GradMap grads;
};

// Per-document passes run on worker threads; merging stays in document
// order on the caller's thread, so results are identical at any thread
// count (single-writer contract).
std::vector<DocResult> batch_forward_backward(const SegmenterModel& model, const Corpus& corpus,
                                              const std::vector<size_t>& doc_ids, size_t begin,
                                              size_t end, size_t threads) {
    const size_t count = end - begin;
    std::vector<DocResult> results(count);
    auto run_range = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
            const Document& doc = corpus.documents[doc_ids[begin + i]];
            results[i].loss = model.forward_backward(doc, results[i].grads);
        }
    };
    if (threads <= 1 || count <= 1) {
        run_range(0, count);
        return results;
    }
    const size_t workers = std::min(threads, count);
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    const size_t chunk = (count + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
        const size_t lo = w * chunk;
        const size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        futures.push_back(std::async(std::launch::async, run_range, lo, hi));
    }
    for (auto& f : futures) f.get();
    return results;
}

json epoch_log_line(const EpochStats& s) {
    return json{{"epoch", s.epoch},   {"l1", s.l1},   {"l2", s.l2},
                {"l_total", s.total}, {"val_pk", s.val_pk}, {"tau", s.tau},
                {"best", s.best_so_far}};
}

}  // namespace

Checkpoint train(const TrainConfig& cfg, const Corpus& train_set, const Corpus& val_set,
                 const WordTable& words, const SentenceEmbeddingProvider* provider,
                 std::ostream* log_lines) {
    cfg.validate();
    if (train_set.documents.empty() || val_set.documents.empty())
        throw DataError("TooFewDocuments: train and validation corpora must be non-empty");
    train_set.validate();
    val_set.validate();

    SegmenterModel model(cfg.model_config(), cfg.seed, &words, provider);
    AdamConfig adam;
    adam.lr = cfg.lr;

    Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));
    std::vector<size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    Checkpoint best;
    best.config = cfg;
    best.best_val_pk = std::numeric_limits<double>::infinity();

    for (size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double sum_l1 = 0.0, sum_l2 = 0.0, sum_total = 0.0;
        for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const size_t end = std::min(order.size(), begin + cfg.batch_size);
            const auto results =
                batch_forward_backward(model, train_set, order, begin, end, cfg.threads);
            model.params().zero_grads();
            const double inv = 1.0 / static_cast<double>(end - begin);
            for (size_t i = 0; i < results.size(); ++i) {
                const auto& r = results[i];
                if (!std::isfinite(r.loss.total))
                    throw NumericError(
                        "DivergenceDetected: non-finite loss at epoch " + std::to_string(epoch) +
                        ", document " + train_set.documents[order[begin + i]].id);
                sum_l1 += r.loss.l1;
                sum_l2 += r.loss.l2;
                sum_total += r.loss.total;
                model.params().accumulate(r.grads, inv);
            }
            if (cfg.grad_clip > 0.0) model.params().clip_grads(cfg.grad_clip);
            model.params().adam_step(adam);
        }

        EpochStats stats;
        stats.epoch = epoch;
        const double n_docs = static_cast<double>(train_set.size());
        stats.l1 = sum_l1 / n_docs;
        stats.l2 = sum_l2 / n_docs;
        stats.total = sum_total / n_docs;

        std::vector<std::vector<double>> val_probs;
        val_probs.reserve(val_set.size());
        for (const auto& doc : val_set.documents) val_probs.push_back(model.predict(doc));
        stats.tau = tune_threshold(val_probs, val_set, cfg.tau_grid);
        double sum_pk = 0.0;
        for (size_t d = 0; d < val_set.size(); ++d) {
            const auto& doc = val_set.documents[d];
            const auto hyp = decode(val_probs[d], stats.tau);
            sum_pk += pk_score(doc.boundary_labels, hyp,
                               window_k(doc.boundary_labels, doc.num_sentences()));
        }
        stats.val_pk = sum_pk / static_cast<double>(val_set.size());

        if (stats.val_pk < best.best_val_pk) {
            stats.best_so_far = true;
            best.best_val_pk = stats.val_pk;
            best.best_epoch = epoch;
            best.tau = stats.tau;
            best.params = model.params().snapshot_values();
        }
        best.history.push_back(stats);
        if (log_lines != nullptr) *log_lines << epoch_log_line(stats).dump() << "\n";
        log_debug("epoch " + std::to_string(epoch) + " total=" + std::to_string(stats.total) +
                  " val_pk=" + std::to_string(stats.val_pk));
    }
    return best;
}

std::vector<AblationRow> run_ablation(const TrainConfig& cfg, const Corpus& train_set,
                                      const Corpus& val_set, const Corpus& test_set,
                                      const std::vector<uint64_t>& seeds, const WordTable& words,
                                      const SentenceEmbeddingProvider* provider,
                                      std::ostream* log_lines) {
    if (seeds.empty()) throw DataError("ablation needs at least one seed");
    struct Variant {
        const char* name;
        bool aux, rsa;
    };
    const Variant variants[4] = {
        {"Basic", false, false}, {"+AUX", true, false}, {"+RSA", false, true},
        {"+AUX+RSA", true, true}};

    std::vector<AblationRow> rows(4);
    for (size_t v = 0; v < 4; ++v) rows[v].name = variants[v].name;

    for (uint64_t seed : seeds) {
        for (size_t v = 0; v < 4; ++v) {
            TrainConfig run_cfg = cfg;
            run_cfg.seed = seed;
            run_cfg.enable_aux = variants[v].aux;
            run_cfg.enable_rsa = variants[v].rsa;
            Checkpoint ckpt = train(run_cfg, train_set, val_set, words, provider, nullptr);
            auto model = model_from_checkpoint(ckpt, words, provider);
            const PkReport report = evaluate_model(*model, test_set, ckpt.tau);
            rows[v].pks.push_back(report.macro_pk);
            if (log_lines != nullptr) {
                *log_lines << json{{"seed", seed},
                                   {"variant", variants[v].name},
                                   {"tau", ckpt.tau},
                                   {"test_pk", report.macro_pk}}
                                  .dump()
                           << "\n";
            }
        }
    }
    for (auto& row : rows) {
        const double n = static_cast<double>(row.pks.size());
        row.mean = std::accumulate(row.pks.begin(), row.pks.end(), 0.0) / n;
        double sq = 0.0;
        for (double p : row.pks) sq += (p - row.mean) * (p - row.mean);
        row.stddev = n > 1 ? std::sqrt(sq / (n - 1)) : 0.0;
    }
    return rows;
}

std::string ablation_to_text(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    out << "configuration\tmean_pk\tstddev\truns\n";
    for (const auto& row : rows) {
        out << row.name << "\t" << row.mean << "\t" << row.stddev << "\t" << row.pks.size()
            << "\n";
    }
    return out.str();
}

std::string ablation_to_json(const std::vector<AblationRow>& rows) {
    json j = json::array();
    for (const auto& row : rows) {
        j.push_back(
            {{"name", row.name}, {"mean", row.mean}, {"stddev", row.stddev}, {"pks", row.pks}});
    }
    return j.dump();
}

}  // namespace segline
