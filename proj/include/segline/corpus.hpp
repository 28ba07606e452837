#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace segline {

// A document is a sequence of pre-tokenized sentences plus segment-end
// labels: boundary_labels[i] == 1 means sentence i ends a segment. The last
// sentence carries no label (it always ends the final segment).
struct Document {
    std::string id;
    std::vector<std::vector<std::string>> sentences;
    std::vector<uint8_t> boundary_labels;  // length = sentences.size() - 1

    size_t num_sentences() const { return sentences.size(); }
    size_t num_segments() const;
    // Segment index of each sentence (0-based).
    std::vector<size_t> segment_ids() const;
    // Throws DataError when any invariant is violated.
    void validate() const;

    bool operator==(const Document&) const = default;
};

struct Corpus {
    std::string name;
    std::vector<Document> documents;

    size_t size() const { return documents.size(); }
    // Fraction of boundary positions labeled 1 across all documents.
    double boundary_rate() const;
    void validate() const;  // also checks id uniqueness
};

// Choi layout: segments separated by lines of exactly ten '=' characters,
// one sentence per line, whitespace tokenization. Throws DataError with
// "EmptySegment" / "FewerThanTwoSentences" on the degenerate cases.
Document parse_choi(const std::string& text, const std::string& id = "doc");
std::string write_choi(const Document& doc);

// JSONL record: {"id": ..., "sentences": [[tok,...],...], "boundary_labels": [...]}
// Throws DataError with "LengthMismatch" / "MalformedRecord".
Document parse_jsonl_record(const std::string& line);
std::string write_jsonl_record(const Document& doc);

// skipped == nullptr: strict (throw on any bad line).
// skipped != nullptr: lenient, bad lines are counted and dropped.
Corpus load_jsonl_corpus(const std::string& path, const std::string& name = "",
                         size_t* skipped = nullptr);
void save_jsonl_corpus(const Corpus& corpus, const std::string& path);

// Loads a corpus from a path: *.jsonl files use the JSONL layout, anything
// else is parsed as a single Choi-format document.
Corpus load_corpus(const std::string& path, size_t* skipped = nullptr);

// Coherence labels for the auxiliary task: pair <s_i, s_i+1> is same-segment
// iff s_i is not a segment end, so aux[i] = 1 - boundary_labels[i].
std::vector<uint8_t> aux_labels(const Document& doc);

struct IntRange {
    int64_t lo = 1;
    int64_t hi = 1;
};

struct SynthConfig {
    size_t num_docs = 20;
    size_t topics = 4;
    size_t vocab_per_topic = 25;
    size_t shared_vocab = 0;
    IntRange segments_per_doc{3, 5};
    IntRange sentences_per_segment{2, 4};
    IntRange tokens_per_sentence{4, 8};
    uint64_t seed = 1;

    void validate() const;  // throws DataError("ConfigInfeasible ...")
    static SynthConfig from_kv(const std::map<std::string, std::string>& kv);
    std::map<std::string, std::string> to_kv() const;
};

// Token pools used by the generator; exposed for inspection and tests.
std::vector<std::vector<std::string>> synth_topic_pools(const SynthConfig& cfg);
std::vector<std::string> synth_shared_pool(const SynthConfig& cfg);

// Deterministic in cfg.seed. Adjacent segments always use different topics;
// when shared_vocab > 0 each token comes from the shared pool with
// probability 0.3, otherwise from the segment's topic pool.
Corpus synth_corpus(const SynthConfig& cfg);

struct SplitResult {
    Corpus train, val, test;
};

// Floor allocation per ratio with the remainder going to train; shuffle is
// deterministic in seed. Throws DataError("TooFewDocuments") if a part
// would be empty.
SplitResult split(const Corpus& corpus, double train_ratio, double val_ratio, double test_ratio,
                  uint64_t seed);

}  // namespace segline
