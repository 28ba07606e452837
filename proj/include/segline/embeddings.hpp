#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "segline/tensor.hpp"

namespace segline {

// Deterministic unit-norm vector for out-of-vocabulary tokens, seeded by a
// hash of the token text.
Vec oov_vector(const std::string& token, size_t dim);

// Word-vector table in the standard text format: "token v1 v2 ... vd" per
// line, optional "count dim" header. Vectors are frozen (never trained).
class WordTable {
public:
    // Empty table: every lookup falls back to the OOV hash vector. This is
    // how synthetic-corpus runs operate.
    explicit WordTable(size_t dim);

    static WordTable load(const std::string& path);

    size_t dim() const { return dim_; }
    size_t size() const { return entries_.size(); }
    bool contains(const std::string& token) const { return entries_.count(token) != 0; }

    // Stored vector when present, OOV hash vector otherwise.
    Vec embed(const std::string& token) const;

private:
    size_t dim_;
    std::unordered_map<std::string, Vec> entries_;
};

// Stand-in for an external sentence encoder service: returns one fixed
// vector per sentence, keyed either by (doc id, sentence index) from a
// precomputed file or derived from the sentence content.
class SentenceEmbeddingProvider {
public:
    virtual ~SentenceEmbeddingProvider() = default;
    virtual size_t dim() const = 0;
    virtual Vec embed(const std::string& doc_id, size_t sentence_index,
                      const std::vector<std::string>& tokens) const = 0;
};

// JSONL file, one record per sentence:
//   {"doc_id": ..., "sentence_index": ..., "vector": [...]}
// Throws DataError("MissingSentenceKey ...") for absent keys.
class FileSentenceProvider : public SentenceEmbeddingProvider {
public:
    static std::unique_ptr<FileSentenceProvider> load(const std::string& path);

    size_t dim() const override { return dim_; }
    Vec embed(const std::string& doc_id, size_t sentence_index,
              const std::vector<std::string>& tokens) const override;

private:
    size_t dim_ = 0;
    std::unordered_map<std::string, Vec> entries_;
};

// Content-hash fallback: tanh of the mean of the tokens' OOV-style hash
// vectors at the provider dimension. Depends only on sentence content.
class HashSentenceProvider : public SentenceEmbeddingProvider {
public:
    explicit HashSentenceProvider(size_t dim) : dim_(dim) {}

    size_t dim() const override { return dim_; }
    Vec embed(const std::string& doc_id, size_t sentence_index,
              const std::vector<std::string>& tokens) const override;

private:
    size_t dim_;
};

}  // namespace segline
