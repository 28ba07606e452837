#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "segline/corpus.hpp"

namespace segline {

// Window size for Pk: round-half-to-even of (sentence count / reference
// segment count), clamped into [1, n-1].
size_t window_k(const std::vector<uint8_t>& ref, size_t n);

// Probability that ref and hyp disagree on whether sentences i and i+k lie
// in the same segment, over the n-k sliding windows. Normalized by window
// count so the result is a probability in [0, 1].
double pk_score(const std::vector<uint8_t>& ref, const std::vector<uint8_t>& hyp, size_t k);

// Each of the n-1 positions is labeled 1 independently with probability
// p_boundary; deterministic in seed.
std::vector<uint8_t> random_segmenter(const Document& doc, double p_boundary, uint64_t seed);

struct PkDocEntry {
    std::string id;
    double pk = 0.0;
    size_t k = 0;
    size_t windows = 0;
};

struct PkReport {
    double macro_pk = 0.0;  // unweighted mean over documents (headline number)
    double micro_pk = 0.0;  // window-count-weighted mean
    std::vector<PkDocEntry> per_document;
    size_t skipped = 0;     // documents dropped due to per-document errors

    double pk() const { return macro_pk; }
};

// Scores every document with hyp_fn; per-document failures are counted in
// `skipped` and the document is dropped.
PkReport evaluate_corpus(const Corpus& corpus,
                         const std::function<std::vector<uint8_t>(const Document&)>& hyp_fn);

std::string report_to_json(const PkReport& report);
std::string report_to_text(const PkReport& report);

}  // namespace segline
