#include "segline/embeddings.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "segline/error.hpp"
#include "segline/kernels.hpp"
#include "segline/rng.hpp"

namespace segline {

Vec oov_vector(const std::string& token, size_t dim) {
    if (dim == 0) throw ShapeError("oov_vector: dim must be positive");
    Rng rng(derive_seed(0x6f6f76ull /* "oov" */, token));
    Vec v(dim);
    for (size_t i = 0; i < dim; ++i) v[i] = rng.uniform(-1.0, 1.0);
    double norm = std::sqrt(kernels::ops().dot(v.data(), v.data(), dim));
    if (norm < 1e-12) {
        v.assign(dim, 0.0);
        v[0] = 1.0;
        norm = 1.0;
    }
    kernels::ops().scale(1.0 / norm, v.data(), dim);
    return v;
}

WordTable::WordTable(size_t dim) : dim_(dim) {
    if (dim == 0) throw ShapeError("WordTable: dim must be positive");
}

namespace {

bool is_count_header(const std::string& line) {
    std::istringstream in(line);
    std::string a, b, extra;
    if (!(in >> a >> b)) return false;
    if (in >> extra) return false;
    auto all_digits = [](const std::string& s) {
        if (s.empty()) return false;
        for (char c : s) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        }
        return true;
    };
    return all_digits(a) && all_digits(b);
}

}  // namespace

WordTable WordTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open word vector file: " + path);
    std::string line;
    size_t lineno = 0;
    bool first_content = true;
    size_t dim = 0;
    std::unordered_map<std::string, Vec> entries;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (first_content && is_count_header(line)) {
            first_content = false;
            continue;  // word2vec-style "count dim" header
        }
        first_content = false;
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        Vec v;
        double x;
        while (ls >> x) v.push_back(x);
        if (v.empty())
            throw DataError(path + ":" + std::to_string(lineno) + ": no values for token " +
                            token);
        if (!all_finite(v))
            throw DataError(path + ":" + std::to_string(lineno) + ": non-finite value");
        if (dim == 0) {
            dim = v.size();
        } else if (v.size() != dim) {
            throw DataError("InconsistentDimension: " + path + ":" + std::to_string(lineno) +
                            " has " + std::to_string(v.size()) + " values, expected " +
                            std::to_string(dim));
        }
        entries[token] = std::move(v);  // duplicate tokens: last occurrence wins
    }
    if (entries.empty()) throw DataError("EmptyFile: no word vectors in " + path);
    WordTable table(dim);
    table.entries_ = std::move(entries);
    return table;
}

Vec WordTable::embed(const std::string& token) const {
    auto it = entries_.find(token);
    if (it != entries_.end()) return it->second;
    return oov_vector(token, dim_);
}

namespace {

std::string sentence_key(const std::string& doc_id, size_t index) {
    return doc_id + "\x1f" + std::to_string(index);
}

}  // namespace

std::unique_ptr<FileSentenceProvider> FileSentenceProvider::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open sentence embedding file: " + path);
    auto provider = std::make_unique<FileSentenceProvider>();
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
            const auto doc_id = rec.at("doc_id").get<std::string>();
            const auto index = rec.at("sentence_index").get<size_t>();
            auto vec = rec.at("vector").get<Vec>();
            if (vec.empty() || !all_finite(vec))
                throw DataError("empty or non-finite vector");
            if (provider->dim_ == 0) {
                provider->dim_ = vec.size();
            } else if (vec.size() != provider->dim_) {
                throw DataError("InconsistentDimension: sentence vectors disagree");
            }
            provider->entries_[sentence_key(doc_id, index)] = std::move(vec);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (provider->entries_.empty())
        throw DataError("EmptyFile: no sentence embeddings in " + path);
    return provider;
}

Vec FileSentenceProvider::embed(const std::string& doc_id, size_t sentence_index,
                                const std::vector<std::string>& tokens) const {
    (void)tokens;
    auto it = entries_.find(sentence_key(doc_id, sentence_index));
    if (it == entries_.end())
        throw DataError("MissingSentenceKey: no embedding for (" + doc_id + ", " +
                        std::to_string(sentence_index) + ")");
    return it->second;
}

Vec HashSentenceProvider::embed(const std::string& doc_id, size_t sentence_index,
                                const std::vector<std::string>& tokens) const {
    (void)doc_id;
    (void)sentence_index;
    if (tokens.empty()) throw ShapeError("EmptySentence: cannot embed zero tokens");
    Vec mean(dim_, 0.0);
    for (const auto& tok : tokens) {
        const Vec v = oov_vector(tok, dim_);
        kernels::ops().axpy(1.0, v.data(), mean.data(), dim_);
    }
    kernels::ops().scale(1.0 / static_cast<double>(tokens.size()), mean.data(), dim_);
    for (double& x : mean) x = std::tanh(x);
    return mean;
}

}  // namespace segline
