#include "segline/metrics.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "segline/error.hpp"
#include "segline/log.hpp"
#include "segline/rng.hpp"

namespace segline {

namespace {

// round-half-to-even without touching the fenv rounding mode
double round_half_even(double x) {
    const double fl = std::floor(x);
    const double frac = x - fl;
    if (frac > 0.5) return fl + 1.0;
    if (frac < 0.5) return fl;
    return std::fmod(fl, 2.0) == 0.0 ? fl : fl + 1.0;
}

std::vector<size_t> segment_ids_from_labels(const std::vector<uint8_t>& labels, size_t n) {
    std::vector<size_t> ids(n, 0);
    size_t cur = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
        ids[i] = cur;
        if (labels[i] != 0) ++cur;
    }
    ids[n - 1] = cur;
    return ids;
}

}  // namespace

size_t window_k(const std::vector<uint8_t>& ref, size_t n) {
    if (n < 2 || ref.size() != n - 1)
        throw ShapeError("LengthMismatch: ref labels " + std::to_string(ref.size()) +
                         " for n=" + std::to_string(n));
    size_t segments = 1;
    for (uint8_t l : ref) segments += (l != 0);
    const double avg = static_cast<double>(n) / static_cast<double>(segments);
    auto k = static_cast<size_t>(round_half_even(avg));
    if (k < 1) k = 1;
    if (k > n - 1) k = n - 1;
    return k;
}

double pk_score(const std::vector<uint8_t>& ref, const std::vector<uint8_t>& hyp, size_t k) {
    if (ref.size() != hyp.size())
        throw ShapeError("LengthMismatch: ref has " + std::to_string(ref.size()) +
                         " labels, hyp has " + std::to_string(hyp.size()));
    const size_t n = ref.size() + 1;
    if (k < 1 || k > n - 1)
        throw ShapeError("WindowTooLarge: k=" + std::to_string(k) + " for n=" +
                         std::to_string(n));
    const auto ref_ids = segment_ids_from_labels(ref, n);
    const auto hyp_ids = segment_ids_from_labels(hyp, n);
    size_t mismatches = 0;
    const size_t windows = n - k;
    for (size_t i = 0; i + k < n; ++i) {
        const bool same_ref = ref_ids[i] == ref_ids[i + k];
        const bool same_hyp = hyp_ids[i] == hyp_ids[i + k];
        if (same_ref != same_hyp) ++mismatches;
    }
    return static_cast<double>(mismatches) / static_cast<double>(windows);
}

std::vector<uint8_t> random_segmenter(const Document& doc, double p_boundary, uint64_t seed) {
    if (p_boundary < 0.0 || p_boundary > 1.0)
        throw NumericError("p_boundary must lie in [0,1], got " + std::to_string(p_boundary));
    // Seed keyed by document id so results do not depend on corpus order.
    Rng rng(derive_seed(seed, doc.id));
    std::vector<uint8_t> labels(doc.num_sentences() - 1);
    for (auto& l : labels) l = rng.bernoulli(p_boundary) ? 1 : 0;
    return labels;
}

PkReport evaluate_corpus(const Corpus& corpus,
                         const std::function<std::vector<uint8_t>(const Document&)>& hyp_fn) {
    PkReport report;
    double macro_sum = 0.0;
    double micro_sum = 0.0;
    size_t micro_windows = 0;
    for (const auto& doc : corpus.documents) {
        try {
            doc.validate();
            const auto hyp = hyp_fn(doc);
            if (hyp.size() != doc.boundary_labels.size())
                throw ShapeError("LengthMismatch: hypothesis labels for " + doc.id);
            const size_t n = doc.num_sentences();
            const size_t k = window_k(doc.boundary_labels, n);
            PkDocEntry entry;
            entry.id = doc.id;
            entry.k = k;
            entry.windows = n - k;
            entry.pk = pk_score(doc.boundary_labels, hyp, k);
            macro_sum += entry.pk;
            micro_sum += entry.pk * static_cast<double>(entry.windows);
            micro_windows += entry.windows;
            report.per_document.push_back(std::move(entry));
        } catch (const Error& e) {
            log_debug("skipping document " + doc.id + ": " + e.what());
            ++report.skipped;
        }
    }
    const size_t scored = report.per_document.size();
    report.macro_pk = scored ? macro_sum / static_cast<double>(scored) : 0.0;
    report.micro_pk = micro_windows ? micro_sum / static_cast<double>(micro_windows) : 0.0;
    return report;
}

std::string report_to_json(const PkReport& report) {
    nlohmann::json j;
    j["pk"] = report.macro_pk;
    j["aggregate"] = "macro";
    j["macro_pk"] = report.macro_pk;
    j["micro_pk"] = report.micro_pk;
    j["documents"] = report.per_document.size();
    j["skipped"] = report.skipped;
    nlohmann::json per = nlohmann::json::array();
    for (const auto& e : report.per_document) {
        per.push_back({{"id", e.id}, {"pk", e.pk}, {"k", e.k}, {"windows", e.windows}});
    }
    j["per_document"] = std::move(per);
    return j.dump();
}

std::string report_to_text(const PkReport& report) {
    std::ostringstream out;
    out << "Pk report (" << report.per_document.size() << " documents";
    if (report.skipped) out << ", " << report.skipped << " skipped";
    out << ")\n";
    out << "  macro Pk: " << report.macro_pk << "\n";
    out << "  micro Pk: " << report.micro_pk << "\n";
    for (const auto& e : report.per_document) {
        out << "  " << e.id << "\tpk=" << e.pk << "\tk=" << e.k << "\twindows=" << e.windows
            << "\n";
    }
    return out.str();
}

}  // namespace segline
