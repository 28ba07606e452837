#include "segline/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "segline/error.hpp"
#include "segline/rng.hpp"

namespace segline {

using nlohmann::json;

size_t Document::num_segments() const {
    size_t segs = 1;
    for (uint8_t l : boundary_labels) segs += (l != 0);
    return segs;
}

std::vector<size_t> Document::segment_ids() const {
    std::vector<size_t> ids(sentences.size(), 0);
    size_t cur = 0;
    for (size_t i = 0; i + 1 < sentences.size(); ++i) {
        ids[i] = cur;
        if (boundary_labels[i] != 0) ++cur;
    }
    if (!sentences.empty()) ids[sentences.size() - 1] = cur;
    return ids;
}

void Document::validate() const {
    if (sentences.size() < 2)
        throw DataError("FewerThanTwoSentences: document " + id + " has " +
                        std::to_string(sentences.size()) + " sentence(s)");
    if (boundary_labels.size() != sentences.size() - 1)
        throw DataError("LengthMismatch: document " + id + " has " +
                        std::to_string(boundary_labels.size()) + " labels for " +
                        std::to_string(sentences.size()) + " sentences");
    for (size_t i = 0; i < sentences.size(); ++i) {
        if (sentences[i].empty())
            throw DataError("MalformedRecord: empty sentence " + std::to_string(i) +
                            " in document " + id);
        for (const auto& tok : sentences[i]) {
            if (tok.empty())
                throw DataError("MalformedRecord: empty token in document " + id);
        }
    }
    for (uint8_t l : boundary_labels) {
        if (l > 1) throw DataError("MalformedRecord: non-binary label in document " + id);
    }
}

double Corpus::boundary_rate() const {
    size_t ones = 0, total = 0;
    for (const auto& doc : documents) {
        total += doc.boundary_labels.size();
        for (uint8_t l : doc.boundary_labels) ones += (l != 0);
    }
    return total == 0 ? 0.0 : static_cast<double>(ones) / static_cast<double>(total);
}

void Corpus::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& doc : documents) {
        doc.validate();
        if (!seen.insert(doc.id).second)
            throw DataError("duplicate document id in corpus: " + doc.id);
    }
}

namespace {

constexpr const char* kChoiDelim = "==========";

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> tokenize_ws(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

}  // namespace

Document parse_choi(const std::string& text, const std::string& id) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::vector<std::string>>> segments;
    std::vector<std::vector<std::string>> pending;
    bool seen_delim = false;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t == kChoiDelim) {
            if (!pending.empty()) {
                segments.push_back(std::move(pending));
                pending.clear();
            } else if (seen_delim) {
                throw DataError("EmptySegment: consecutive delimiters in " + id);
            }
            seen_delim = true;
        } else {
            pending.push_back(tokenize_ws(t));
        }
    }
    if (!pending.empty()) segments.push_back(std::move(pending));

    Document doc;
    doc.id = id;
    for (const auto& seg : segments) {
        for (const auto& sent : seg) doc.sentences.push_back(sent);
    }
    if (doc.sentences.size() < 2)
        throw DataError("FewerThanTwoSentences: " + id + " has " +
                        std::to_string(doc.sentences.size()) + " sentence(s)");
    doc.boundary_labels.assign(doc.sentences.size() - 1, 0);
    size_t pos = 0;
    for (size_t s = 0; s + 1 < segments.size(); ++s) {
        pos += segments[s].size();
        doc.boundary_labels[pos - 1] = 1;
    }
    doc.validate();
    return doc;
}

std::string write_choi(const Document& doc) {
    std::ostringstream out;
    out << kChoiDelim << "\n";
    for (size_t i = 0; i < doc.sentences.size(); ++i) {
        for (size_t t = 0; t < doc.sentences[i].size(); ++t) {
            if (t) out << ' ';
            out << doc.sentences[i][t];
        }
        out << "\n";
        const bool end_of_segment =
            (i + 1 == doc.sentences.size()) || doc.boundary_labels[i] != 0;
        if (end_of_segment) out << kChoiDelim << "\n";
    }
    return out.str();
}

Document parse_jsonl_record(const std::string& line) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::exception& e) {
        throw DataError(std::string("MalformedRecord: ") + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("sentences") ||
        !rec.contains("boundary_labels"))
        throw DataError("MalformedRecord: missing id/sentences/boundary_labels");
    Document doc;
    try {
        doc.id = rec.at("id").get<std::string>();
        doc.sentences = rec.at("sentences").get<std::vector<std::vector<std::string>>>();
        for (const auto& v : rec.at("boundary_labels")) {
            const auto l = v.get<int64_t>();
            if (l != 0 && l != 1) throw DataError("MalformedRecord: label must be 0 or 1");
            doc.boundary_labels.push_back(static_cast<uint8_t>(l));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("MalformedRecord: ") + e.what());
    }
    if (doc.boundary_labels.size() != doc.sentences.size() - (doc.sentences.empty() ? 0 : 1))
        throw DataError("LengthMismatch: " + std::to_string(doc.boundary_labels.size()) +
                        " labels for " + std::to_string(doc.sentences.size()) + " sentences");
    doc.validate();
    return doc;
}

std::string write_jsonl_record(const Document& doc) {
    json rec;
    rec["id"] = doc.id;
    rec["sentences"] = doc.sentences;
    rec["boundary_labels"] = std::vector<int>(doc.boundary_labels.begin(),
                                              doc.boundary_labels.end());
    return rec.dump();
}

Corpus load_jsonl_corpus(const std::string& path, const std::string& name, size_t* skipped) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);
    Corpus corpus;
    corpus.name = name.empty() ? path : name;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            corpus.documents.push_back(parse_jsonl_record(line));
        } catch (const DataError& e) {
            if (skipped == nullptr)
                throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
            ++*skipped;
        }
    }
    corpus.validate();
    return corpus;
}

void save_jsonl_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open corpus file for writing: " + path);
    for (const auto& doc : corpus.documents) out << write_jsonl_record(doc) << "\n";
    if (!out) throw Error("corpus write failed: " + path);
}

Corpus load_corpus(const std::string& path, size_t* skipped) {
    if (path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl")
        return load_jsonl_corpus(path, "", skipped);
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    Corpus corpus;
    corpus.name = path;
    corpus.documents.push_back(parse_choi(buf.str(), path));
    return corpus;
}

std::vector<uint8_t> aux_labels(const Document& doc) {
    std::vector<uint8_t> aux(doc.boundary_labels.size());
    for (size_t i = 0; i < aux.size(); ++i) aux[i] = doc.boundary_labels[i] ? 0 : 1;
    return aux;
}

void SynthConfig::validate() const {
    auto bad_range = [](const IntRange& r) { return r.lo < 1 || r.hi < r.lo; };
    if (num_docs == 0) throw DataError("ConfigInfeasible: num_docs must be positive");
    if (vocab_per_topic == 0)
        throw DataError("ConfigInfeasible: vocab_per_topic must be positive");
    if (bad_range(segments_per_doc) || bad_range(sentences_per_segment) ||
        bad_range(tokens_per_sentence))
        throw DataError("ConfigInfeasible: ranges must be non-empty with min >= 1");
    if (topics < 2)
        throw DataError("ConfigInfeasible: at least 2 topics required so adjacent segments "
                        "can differ");
    if (segments_per_doc.lo * sentences_per_segment.lo < 2)
        throw DataError("ConfigInfeasible: a document could end up with a single sentence");
}

namespace {

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

const std::unordered_set<std::string> kSynthKeys = {
    "num_docs",      "topics",        "vocab_per_topic", "shared_vocab",
    "segments_min",  "segments_max",  "sentences_min",   "sentences_max",
    "tokens_min",    "tokens_max",    "seed"};

}  // namespace

SynthConfig SynthConfig::from_kv(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (!kSynthKeys.count(key)) throw DataError("unknown synth config key: " + key);
    }
    SynthConfig cfg;
    cfg.num_docs = static_cast<size_t>(kv_int(kv, "num_docs", cfg.num_docs));
    cfg.topics = static_cast<size_t>(kv_int(kv, "topics", cfg.topics));
    cfg.vocab_per_topic = static_cast<size_t>(kv_int(kv, "vocab_per_topic", cfg.vocab_per_topic));
    cfg.shared_vocab = static_cast<size_t>(kv_int(kv, "shared_vocab", cfg.shared_vocab));
    cfg.segments_per_doc.lo = kv_int(kv, "segments_min", cfg.segments_per_doc.lo);
    cfg.segments_per_doc.hi = kv_int(kv, "segments_max", cfg.segments_per_doc.hi);
    cfg.sentences_per_segment.lo = kv_int(kv, "sentences_min", cfg.sentences_per_segment.lo);
    cfg.sentences_per_segment.hi = kv_int(kv, "sentences_max", cfg.sentences_per_segment.hi);
    cfg.tokens_per_sentence.lo = kv_int(kv, "tokens_min", cfg.tokens_per_sentence.lo);
    cfg.tokens_per_sentence.hi = kv_int(kv, "tokens_max", cfg.tokens_per_sentence.hi);
    cfg.seed = static_cast<uint64_t>(kv_int(kv, "seed", static_cast<int64_t>(cfg.seed)));
    cfg.validate();
    return cfg;
}

std::map<std::string, std::string> SynthConfig::to_kv() const {
    return {
        {"num_docs", std::to_string(num_docs)},
        {"topics", std::to_string(topics)},
        {"vocab_per_topic", std::to_string(vocab_per_topic)},
        {"shared_vocab", std::to_string(shared_vocab)},
        {"segments_min", std::to_string(segments_per_doc.lo)},
        {"segments_max", std::to_string(segments_per_doc.hi)},
        {"sentences_min", std::to_string(sentences_per_segment.lo)},
        {"sentences_max", std::to_string(sentences_per_segment.hi)},
        {"tokens_min", std::to_string(tokens_per_sentence.lo)},
        {"tokens_max", std::to_string(tokens_per_sentence.hi)},
        {"seed", std::to_string(seed)},
    };
}

std::vector<std::vector<std::string>> synth_topic_pools(const SynthConfig& cfg) {
    std::vector<std::vector<std::string>> pools(cfg.topics);
    for (size_t t = 0; t < cfg.topics; ++t) {
        pools[t].reserve(cfg.vocab_per_topic);
        for (size_t w = 0; w < cfg.vocab_per_topic; ++w) {
            pools[t].push_back("t" + std::to_string(t) + "_w" + std::to_string(w));
        }
    }
    return pools;
}

std::vector<std::string> synth_shared_pool(const SynthConfig& cfg) {
    std::vector<std::string> pool;
    pool.reserve(cfg.shared_vocab);
    for (size_t w = 0; w < cfg.shared_vocab; ++w) pool.push_back("shared_w" + std::to_string(w));
    return pool;
}

Corpus synth_corpus(const SynthConfig& cfg) {
    cfg.validate();
    const auto pools = synth_topic_pools(cfg);
    const auto shared = synth_shared_pool(cfg);
    constexpr double kSharedProb = 0.3;

    Rng rng(cfg.seed);
    Corpus corpus;
    corpus.name = "synth";
    for (size_t d = 0; d < cfg.num_docs; ++d) {
        Document doc;
        doc.id = "synth-" + std::to_string(d);
        const int64_t n_segs = rng.range(cfg.segments_per_doc.lo, cfg.segments_per_doc.hi);
        size_t prev_topic = cfg.topics;  // sentinel: no previous topic
        for (int64_t s = 0; s < n_segs; ++s) {
            size_t topic = static_cast<size_t>(rng.below(prev_topic < cfg.topics
                                                             ? cfg.topics - 1
                                                             : cfg.topics));
            if (prev_topic < cfg.topics && topic >= prev_topic) ++topic;
            prev_topic = topic;
            const int64_t n_sents =
                rng.range(cfg.sentences_per_segment.lo, cfg.sentences_per_segment.hi);
            for (int64_t sent = 0; sent < n_sents; ++sent) {
                const int64_t n_toks =
                    rng.range(cfg.tokens_per_sentence.lo, cfg.tokens_per_sentence.hi);
                std::vector<std::string> tokens;
                tokens.reserve(static_cast<size_t>(n_toks));
                for (int64_t tk = 0; tk < n_toks; ++tk) {
                    if (!shared.empty() && rng.bernoulli(kSharedProb)) {
                        tokens.push_back(shared[rng.below(shared.size())]);
                    } else {
                        tokens.push_back(pools[topic][rng.below(pools[topic].size())]);
                    }
                }
                doc.sentences.push_back(std::move(tokens));
            }
            if (s + 1 < n_segs) {
                // boundary on the last sentence of this segment
                doc.boundary_labels.resize(doc.sentences.size(), 0);
                doc.boundary_labels[doc.sentences.size() - 1] = 1;
            }
        }
        doc.boundary_labels.resize(doc.sentences.size() - 1, 0);
        doc.validate();
        corpus.documents.push_back(std::move(doc));
    }
    corpus.validate();
    return corpus;
}

SplitResult split(const Corpus& corpus, double train_ratio, double val_ratio, double test_ratio,
                  uint64_t seed) {
    if (train_ratio <= 0.0 || val_ratio <= 0.0 || test_ratio <= 0.0)
        throw DataError("split ratios must be positive");
    if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
        throw DataError("split ratios must sum to 1");

    const size_t n = corpus.size();
    // The 1e-9 nudge keeps ratios like 0.7 from flooring to one below the
    // intended count when n*ratio lands a hair under an integer.
    const size_t n_train = static_cast<size_t>(std::floor(static_cast<double>(n) * train_ratio + 1e-9));
    const size_t n_val = static_cast<size_t>(std::floor(static_cast<double>(n) * val_ratio + 1e-9));
    const size_t n_test = static_cast<size_t>(std::floor(static_cast<double>(n) * test_ratio + 1e-9));
    if (n_train + n_val + n_test > n) throw DataError("split ratio rounding exceeded corpus size");
    const size_t remainder = n - (n_train + n_val + n_test);

    if (n_train == 0 || n_val == 0 || n_test == 0)
        throw DataError("TooFewDocuments: split of " + std::to_string(n) +
                        " documents leaves an empty part");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    SplitResult out;
    out.train.name = corpus.name + ".train";
    out.val.name = corpus.name + ".val";
    out.test.name = corpus.name + ".test";
    size_t pos = 0;
    for (size_t i = 0; i < n_train + remainder; ++i)
        out.train.documents.push_back(corpus.documents[order[pos++]]);
    for (size_t i = 0; i < n_val; ++i) out.val.documents.push_back(corpus.documents[order[pos++]]);
    for (size_t i = 0; i < n_test; ++i)
        out.test.documents.push_back(corpus.documents[order[pos++]]);
    return out;
}

}  // namespace segline
