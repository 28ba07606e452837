#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "segline/corpus.hpp"
#include "segline/metrics.hpp"
#include "segline/model.hpp"

namespace segline {

std::vector<double> default_tau_grid();  // 0.05, 0.10, ..., 0.95

struct TrainConfig {
    double alpha = 0.8;
    size_t rsa_window = 3;
    size_t hidden = 256;       // sentence-level BiLSTM size
    size_t word_hidden = 256;  // word-level BiLSTM size
    double lr = 0.001;
    size_t batch_size = 8;
    size_t epochs = 10;
    std::vector<double> tau_grid = default_tau_grid();
    uint64_t seed = 1;
    bool enable_aux = true;
    bool enable_rsa = true;
    bool enable_external_embeddings = true;
    PoolingMode pooling = PoolingMode::attention;
    size_t word_dim = 300;
    size_t ext_dim = 768;
    size_t aux_dim = 128;
    double clamp_eps = 1e-12;
    double grad_clip = 0.0;  // 0 disables; the CLI switch enables at 5.0
    size_t threads = 1;

    void validate() const;
    ModelConfig model_config() const;

    // Flat key=value round-trip (config files and the resolved-config echo).
    static TrainConfig from_kv(const std::map<std::string, std::string>& kv);
    static TrainConfig from_kv(const std::map<std::string, std::string>& kv,
                               const TrainConfig& base);
    std::map<std::string, std::string> to_kv() const;

    std::string to_json() const;
    static TrainConfig from_json(const std::string& text);
};

struct EpochStats {
    size_t epoch = 0;
    double l1 = 0.0;       // mean per document
    double l2 = 0.0;
    double total = 0.0;
    double val_pk = 0.0;
    double tau = 0.5;
    bool best_so_far = false;
};

struct Checkpoint {
    TrainConfig config;
    double tau = 0.5;
    size_t best_epoch = 0;
    double best_val_pk = 0.0;
    std::vector<EpochStats> history;
    std::map<std::string, Tensor> params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Rebuilds the model described by a checkpoint and loads its weights.
std::unique_ptr<SegmenterModel> model_from_checkpoint(const Checkpoint& ckpt,
                                                      const WordTable& words,
                                                      const SentenceEmbeddingProvider* provider);

// Smallest tau in the grid minimizing macro validation Pk.
double tune_threshold(const SegmenterModel& model, const Corpus& val,
                      const std::vector<double>& grid);
// Overload on precomputed per-document probabilities (same documents order).
double tune_threshold(const std::vector<std::vector<double>>& probs, const Corpus& val,
                      const std::vector<double>& grid);

PkReport evaluate_model(const SegmenterModel& model, const Corpus& corpus, double tau);

// Mini-batch Adam on L_total (L1 alone when enable_aux is off). After each
// epoch the threshold is tuned on `val` and validation Pk recorded; the
// returned checkpoint is the epoch with the lowest validation Pk.
// `log_lines` (optional) receives one JSON object per epoch.
// Throws NumericError("DivergenceDetected ...") when a loss goes non-finite.
Checkpoint train(const TrainConfig& cfg, const Corpus& train_set, const Corpus& val_set,
                 const WordTable& words, const SentenceEmbeddingProvider* provider,
                 std::ostream* log_lines = nullptr);

struct AblationRow {
    std::string name;  // Basic, +AUX, +RSA, +AUX+RSA
    std::vector<double> pks;  // test Pk per seed
    double mean = 0.0;
    double stddev = 0.0;
};

// Trains the four flag configurations per seed from identical starting seeds
// and reports test Pk mean/stddev per configuration.
std::vector<AblationRow> run_ablation(const TrainConfig& cfg, const Corpus& train_set,
                                      const Corpus& val_set, const Corpus& test_set,
                                      const std::vector<uint64_t>& seeds, const WordTable& words,
                                      const SentenceEmbeddingProvider* provider,
                                      std::ostream* log_lines = nullptr);

std::string ablation_to_text(const std::vector<AblationRow>& rows);
std::string ablation_to_json(const std::vector<AblationRow>& rows);

}  // namespace segline
