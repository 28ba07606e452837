#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "segline/checkpoint.hpp"
#include "segline/config.hpp"
#include "segline/corpus.hpp"
#include "segline/embeddings.hpp"
#include "segline/error.hpp"
#include "segline/gradcheck.hpp"
#include "segline/kernels.hpp"
#include "segline/log.hpp"
#include "segline/metrics.hpp"
#include "segline/model.hpp"
#include "segline/trainer.hpp"

namespace {

using namespace segline;

// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

void echo_config(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) std::cerr << "config " << key << "=" << value << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

struct CommonModelFlags {
    std::string word_vectors;
    std::string sentence_embeddings;
};

struct LoadedInputs {
    std::unique_ptr<WordTable> words;
    std::unique_ptr<SentenceEmbeddingProvider> provider;
};

LoadedInputs load_model_inputs(const TrainConfig& cfg, const CommonModelFlags& flags) {
    LoadedInputs in;
    if (!flags.word_vectors.empty()) {
        in.words = std::make_unique<WordTable>(WordTable::load(flags.word_vectors));
        if (in.words->dim() != cfg.word_dim)
            throw DataError("word vector file dim " + std::to_string(in.words->dim()) +
                            " does not match word_dim " + std::to_string(cfg.word_dim) +
                            " (set word_dim accordingly)");
    } else {
        in.words = std::make_unique<WordTable>(cfg.word_dim);
    }
    if (cfg.enable_external_embeddings) {
        if (!flags.sentence_embeddings.empty()) {
            auto fp = FileSentenceProvider::load(flags.sentence_embeddings);
            if (fp->dim() != cfg.ext_dim)
                throw DataError("sentence embedding file dim " + std::to_string(fp->dim()) +
                                " does not match ext_dim " + std::to_string(cfg.ext_dim));
            in.provider = std::move(fp);
        } else {
            in.provider = std::make_unique<HashSentenceProvider>(cfg.ext_dim);
        }
    }
    return in;
}

// ----- synth -----

struct SynthArgs {
    std::string config_path;
    std::string out_path;
    std::optional<uint64_t> seed;
};

int cmd_synth(const SynthArgs& args) {
    std::map<std::string, std::string> kv;
    if (!args.config_path.empty()) kv = load_kv_file(args.config_path);
    if (args.seed) kv["seed"] = std::to_string(*args.seed);
    const SynthConfig cfg = SynthConfig::from_kv(kv);
    echo_config(cfg.to_kv());
    const Corpus corpus = synth_corpus(cfg);
    save_jsonl_corpus(corpus, args.out_path);
    std::cout << "wrote " << corpus.size() << " documents to " << args.out_path << "\n";
    return kExitOk;
}

// ----- split -----

struct SplitArgs {
    std::string in_path;
    std::string out_prefix;
    double train_ratio = 0.8;
    double val_ratio = 0.1;
    double test_ratio = 0.1;
    uint64_t seed = 1;
};

int cmd_split(const SplitArgs& args) {
    echo_config({{"in", args.in_path},
                 {"out_prefix", args.out_prefix},
                 {"train_ratio", std::to_string(args.train_ratio)},
                 {"val_ratio", std::to_string(args.val_ratio)},
                 {"test_ratio", std::to_string(args.test_ratio)},
                 {"seed", std::to_string(args.seed)}});
    const Corpus corpus = load_corpus(args.in_path);
    const SplitResult parts =
        split(corpus, args.train_ratio, args.val_ratio, args.test_ratio, args.seed);
    save_jsonl_corpus(parts.train, args.out_prefix + ".train.jsonl");
    save_jsonl_corpus(parts.val, args.out_prefix + ".val.jsonl");
    save_jsonl_corpus(parts.test, args.out_prefix + ".test.jsonl");
    std::cout << "split " << corpus.size() << " documents into " << parts.train.size() << "/"
              << parts.val.size() << "/" << parts.test.size() << "\n";
    return kExitOk;
}

// ----- shared train-config CLI plumbing -----

struct TrainFlagOverrides {
    std::string config_path;
    std::map<std::string, std::string> kv;  // only keys given on the command line
    bool no_aux = false;
    bool no_rsa = false;
    bool no_external = false;
    bool clip = false;
};

TrainConfig resolve_train_config(const TrainFlagOverrides& o) {
    TrainConfig cfg;
    if (!o.config_path.empty()) cfg = TrainConfig::from_kv(load_kv_file(o.config_path));
    std::map<std::string, std::string> kv = o.kv;
    if (o.no_aux) kv["enable_aux"] = "false";
    if (o.no_rsa) kv["enable_rsa"] = "false";
    if (o.no_external) kv["enable_external_embeddings"] = "false";
    if (o.clip && !kv.count("grad_clip")) kv["grad_clip"] = "5.0";
    return TrainConfig::from_kv(kv, cfg);
}

void add_train_config_flags(CLI::App* cmd, TrainFlagOverrides& o) {
    cmd->add_option("--config", o.config_path, "flat key=value train config file");
    auto kv_opt = [&o, cmd](const std::string& flag, const std::string& key,
                            const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [&o, key](const std::string& v) { o.kv[key] = v; }, help);
    };
    kv_opt("--seed", "seed", "master seed for init, shuffling and sampling");
    kv_opt("--alpha", "alpha", "main/auxiliary loss trade-off (default 0.8)");
    kv_opt("--window", "rsa_window", "restricted self-attention window (default 3)");
    kv_opt("--epochs", "epochs", "training epochs (default 10)");
    kv_opt("--batch-size", "batch_size", "documents per batch (default 8)");
    kv_opt("--lr", "lr", "Adam learning rate (default 0.001)");
    kv_opt("--hidden", "hidden", "sentence-level BiLSTM hidden size (default 256)");
    kv_opt("--word-hidden", "word_hidden", "word-level BiLSTM hidden size (default 256)");
    kv_opt("--word-dim", "word_dim", "word embedding dimension (default 300)");
    kv_opt("--ext-dim", "ext_dim", "external sentence embedding dimension (default 768)");
    kv_opt("--aux-dim", "aux_dim", "coherence head projection width (default 128)");
    kv_opt("--pooling", "pooling", "sentence pooling: attention|max");
    kv_opt("--threads", "threads", "worker threads for per-document passes");
    kv_opt("--tau-grid", "tau_grid", "comma-separated decode thresholds");
    kv_opt("--grad-clip", "grad_clip", "global gradient-norm clip (0 = off)");
    cmd->add_flag("--no-aux", o.no_aux, "disable the coherence auxiliary task");
    cmd->add_flag("--no-rsa", o.no_rsa, "disable restricted self-attention");
    cmd->add_flag("--no-external", o.no_external, "disable external sentence embeddings");
    cmd->add_flag("--clip", o.clip, "enable gradient clipping at norm 5.0");
}

// ----- train -----

struct TrainArgs {
    TrainFlagOverrides overrides;
    CommonModelFlags model_flags;
    std::string train_path;
    std::string val_path;
    std::string checkpoint_path;
    std::string log_path;
};

int cmd_train(const TrainArgs& args) {
    const TrainConfig cfg = resolve_train_config(args.overrides);
    echo_config(cfg.to_kv());
    const Corpus train_set = load_corpus(args.train_path);
    const Corpus val_set = load_corpus(args.val_path);
    const LoadedInputs inputs = load_model_inputs(cfg, args.model_flags);

    std::unique_ptr<std::ofstream> log_file;
    std::ostream* log_stream = nullptr;
    if (!args.log_path.empty()) {
        log_file = std::make_unique<std::ofstream>(args.log_path);
        if (!*log_file) throw Error("cannot open log file for writing: " + args.log_path);
        log_stream = log_file.get();
    }

    const Checkpoint ckpt =
        train(cfg, train_set, val_set, *inputs.words, inputs.provider.get(), log_stream);
    save_checkpoint(args.checkpoint_path, ckpt);
    std::cout << "best epoch " << ckpt.best_epoch << " val_pk " << ckpt.best_val_pk << " tau "
              << ckpt.tau << "\n";
    std::cout << "checkpoint written to " << args.checkpoint_path << "\n";
    return kExitOk;
}

// ----- eval -----

struct EvalArgs {
    std::string checkpoint_path;
    std::string corpus_path;
    CommonModelFlags model_flags;
    std::optional<double> tau;
    bool random_baseline = false;
    uint64_t seed = 1;
    std::string format = "text";
    std::string out_path;
};

int cmd_eval(const EvalArgs& args) {
    const Checkpoint ckpt = load_checkpoint(args.checkpoint_path);
    const double tau = args.tau.value_or(ckpt.tau);
    auto kv = ckpt.config.to_kv();
    kv["tau"] = std::to_string(tau);
    kv["corpus"] = args.corpus_path;
    echo_config(kv);

    size_t parse_skipped = 0;
    const Corpus corpus = load_corpus(args.corpus_path, &parse_skipped);
    const LoadedInputs inputs = load_model_inputs(ckpt.config, args.model_flags);
    const auto model = model_from_checkpoint(ckpt, *inputs.words, inputs.provider.get());

    PkReport report = evaluate_model(*model, corpus, tau);
    report.skipped += parse_skipped;

    std::optional<PkReport> random_report;
    if (args.random_baseline) {
        const double rate = corpus.boundary_rate();
        random_report = evaluate_corpus(corpus, [&](const Document& doc) {
            return random_segmenter(doc, rate, args.seed);
        });
        random_report->skipped += parse_skipped;
    }

    nlohmann::json j;
    j["model"] = nlohmann::json::parse(report_to_json(report));
    j["tau"] = tau;
    std::ostringstream text;
    text << report_to_text(report);
    if (random_report) {
        j["random_baseline"] = nlohmann::json::parse(report_to_json(*random_report));
        text << "random baseline macro Pk: " << random_report->macro_pk << "\n";
    }

    if (args.format == "json") {
        std::cout << j.dump() << "\n";
    } else {
        std::cout << text.str();
    }
    if (!args.out_path.empty()) {
        write_file(args.out_path + ".json", j.dump() + "\n");
        write_file(args.out_path + ".txt", text.str());
    }
    return kExitOk;
}

// ----- segment -----

struct SegmentArgs {
    std::string checkpoint_path;
    std::string in_path;
    std::string out_path;
    CommonModelFlags model_flags;
    std::optional<double> tau;
    std::string format = "text";
};

// Accepts a JSONL record, a Choi file, or a plain one-sentence-per-line file.
Document parse_segment_input(const std::string& path) {
    const std::string content = read_file(path);
    const size_t first = content.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw DataError("empty input file: " + path);
    if (path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl") {
        std::istringstream in(content);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r\n") != std::string::npos)
                return parse_jsonl_record(line);
        }
        throw DataError("no record found in " + path);
    }
    if (content.compare(first, 10, "==========") == 0) return parse_choi(content, path);
    // plain sentence list: unlabeled input
    Document doc;
    doc.id = path;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (!toks.empty()) doc.sentences.push_back(std::move(toks));
    }
    if (doc.sentences.size() < 2)
        throw DataError("FewerThanTwoSentences: " + path + " has " +
                        std::to_string(doc.sentences.size()) + " sentence(s)");
    doc.boundary_labels.assign(doc.sentences.size() - 1, 0);
    return doc;
}

int cmd_segment(const SegmentArgs& args) {
    const Checkpoint ckpt = load_checkpoint(args.checkpoint_path);
    const double tau = args.tau.value_or(ckpt.tau);
    auto kv = ckpt.config.to_kv();
    kv["tau"] = std::to_string(tau);
    kv["input"] = args.in_path;
    echo_config(kv);

    const Document doc = parse_segment_input(args.in_path);
    const LoadedInputs inputs = load_model_inputs(ckpt.config, args.model_flags);
    const auto model = model_from_checkpoint(ckpt, *inputs.words, inputs.provider.get());

    const std::vector<double> probs = model->predict(doc.sentences, doc.id);
    const std::vector<uint8_t> labels = decode(probs, tau);

    std::ostringstream out;
    if (args.format == "json") {
        nlohmann::json j;
        j["id"] = doc.id;
        j["tau"] = tau;
        j["probs"] = probs;
        j["labels"] = std::vector<int>(labels.begin(), labels.end());
        out << j.dump() << "\n";
    } else {
        // one line per predicted position: index, probability, label
        for (size_t i = 0; i < probs.size(); ++i) {
            out << i << "\t" << probs[i] << "\t" << static_cast<int>(labels[i]) << "\n";
        }
    }
    if (!args.out_path.empty()) {
        write_file(args.out_path, out.str());
    } else {
        std::cout << out.str();
    }
    return kExitOk;
}

// ----- ablate -----

struct AblateArgs {
    TrainFlagOverrides overrides;
    CommonModelFlags model_flags;
    std::string train_path;
    std::string val_path;
    std::string test_path;
    size_t n_seeds = 5;
    std::string format = "text";
    std::string out_path;
};

int cmd_ablate(const AblateArgs& args) {
    const TrainConfig cfg = resolve_train_config(args.overrides);
    auto kv = cfg.to_kv();
    kv["ablation_seeds"] = std::to_string(args.n_seeds);
    echo_config(kv);

    const Corpus train_set = load_corpus(args.train_path);
    const Corpus val_set = load_corpus(args.val_path);
    const Corpus test_set = load_corpus(args.test_path);
    const LoadedInputs inputs = load_model_inputs(cfg, args.model_flags);

    std::vector<uint64_t> seeds;
    for (size_t i = 0; i < args.n_seeds; ++i) seeds.push_back(cfg.seed + i);

    const auto rows = run_ablation(cfg, train_set, val_set, test_set, seeds, *inputs.words,
                                   inputs.provider.get(), nullptr);
    const std::string text = ablation_to_text(rows);
    const std::string json_text = ablation_to_json(rows);
    std::cout << (args.format == "json" ? json_text + "\n" : text);
    if (!args.out_path.empty()) {
        write_file(args.out_path + ".txt", text);
        write_file(args.out_path + ".json", json_text + "\n");
    }
    return kExitOk;
}

// ----- gradcheck -----

struct GradcheckArgs {
    uint64_t seed = 7;
    double eps = 1e-5;
    double tol = 1e-4;
    bool corrupt_backward = false;
};

int cmd_gradcheck(const GradcheckArgs& args) {
    echo_config({{"seed", std::to_string(args.seed)},
                 {"eps", std::to_string(args.eps)},
                 {"tol", std::to_string(args.tol)},
                 {"corrupt_backward", args.corrupt_backward ? "true" : "false"},
                 {"kernels", kernels::backend_name()}});

    // Toy dimensions keep the finite-difference sweep fast while exercising
    // every component: AUX on, RSA on, external embeddings via the hash
    // provider, attention pooling.
    ModelConfig mc;
    mc.word_dim = 7;
    mc.word_hidden = 5;
    mc.sent_hidden = 6;
    mc.aux_dim = 4;
    mc.ext_dim = 6;
    mc.rsa_window = 2;
    mc.enable_aux = true;
    mc.enable_rsa = true;
    mc.enable_external = true;
    mc.alpha = 0.7;

    SynthConfig sc;
    sc.num_docs = 3;
    sc.topics = 3;
    sc.vocab_per_topic = 10;
    sc.shared_vocab = 4;
    sc.segments_per_doc = {2, 3};
    sc.sentences_per_segment = {2, 3};
    sc.tokens_per_sentence = {2, 4};
    sc.seed = args.seed;
    const Corpus batch = synth_corpus(sc);

    WordTable words(mc.word_dim);
    HashSentenceProvider provider(mc.ext_dim);
    SegmenterModel model(mc, args.seed, &words, &provider);

    auto loss_fn = [&]() {
        double total = 0.0;
        DocCache cache;
        for (const auto& doc : batch.documents) {
            model.forward(doc, cache);
            total += cache.loss.total;
        }
        return total;
    };
    auto grad_fn = [&]() {
        model.params().zero_grads();
        GradMap grads;
        for (const auto& doc : batch.documents) model.forward_backward(doc, grads);
        model.params().accumulate(grads, 1.0);
        if (args.corrupt_backward) {
            // negative-control hook: break one gradient entry on purpose
            model.params().grad("head.w")[0] += 0.5;
        }
    };

    const GradCheckReport report = grad_check(model.params(), loss_fn, grad_fn, args.eps);

    std::map<std::string, double> group_worst;
    for (const auto& entry : report.entries) {
        const std::string group = entry.name.substr(0, entry.name.find('.'));
        auto [it, inserted] = group_worst.emplace(group, entry.max_rel_err);
        if (!inserted) it->second = std::max(it->second, entry.max_rel_err);
        log_debug("param " + entry.name + " max_rel_err=" + std::to_string(entry.max_rel_err));
    }
    for (const auto& [group, err] : group_worst) {
        std::cout << "group " << group << ": max_rel_err=" << err << "\n";
    }
    std::cout << "overall max_rel_err=" << report.max_rel_err << " over "
              << model.params().total_elements() << " parameters\n";
    if (!report.all_within(args.tol)) {
        std::cout << "FAIL: gradient check exceeded tol " << args.tol << "\n";
        return kExitRuntime;
    }
    std::cout << "PASS: all parameter groups within tol " << args.tol << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"segline: context-enhanced neural topic segmentation"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    synth_cmd->add_option("--config", synth_args.config_path, "flat key=value synth config");
    synth_cmd->add_option("--out", synth_args.out_path, "output corpus (JSONL)")->required();
    uint64_t synth_seed = 0;
    auto* synth_seed_opt = synth_cmd->add_option("--seed", synth_seed, "override config seed");

    SplitArgs split_args;
    auto* split_cmd = app.add_subcommand("split", "deterministic train/val/test split");
    split_cmd->add_option("--in", split_args.in_path, "input corpus (JSONL)")->required();
    split_cmd->add_option("--out-prefix", split_args.out_prefix, "output file prefix")
        ->required();
    split_cmd->add_option("--train", split_args.train_ratio, "train ratio (default 0.8)");
    split_cmd->add_option("--val", split_args.val_ratio, "validation ratio (default 0.1)");
    split_cmd->add_option("--test", split_args.test_ratio, "test ratio (default 0.1)");
    split_cmd->add_option("--seed", split_args.seed, "shuffle seed");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train a segmenter");
    add_train_config_flags(train_cmd, train_args.overrides);
    train_cmd->add_option("--train", train_args.train_path, "training corpus")->required();
    train_cmd->add_option("--val", train_args.val_path, "validation corpus")->required();
    train_cmd->add_option("--checkpoint", train_args.checkpoint_path, "output checkpoint")
        ->required();
    train_cmd->add_option("--log", train_args.log_path, "JSON-lines training log file");
    train_cmd->add_option("--word-vectors", train_args.model_flags.word_vectors,
                          "word2vec-format text file (default: hash fallback)");
    train_cmd->add_option("--sentence-embeddings", train_args.model_flags.sentence_embeddings,
                          "precomputed sentence embedding JSONL (default: hash fallback)");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint with Pk");
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint_path, "model checkpoint")
        ->required();
    eval_cmd->add_option("--corpus", eval_args.corpus_path, "corpus to score")->required();
    double eval_tau = 0.0;
    auto* eval_tau_opt = eval_cmd->add_option("--tau", eval_tau, "decode threshold override");
    eval_cmd->add_flag("--random-baseline", eval_args.random_baseline,
                       "also score a random segmenter at the corpus boundary rate");
    eval_cmd->add_option("--seed", eval_args.seed, "random baseline seed");
    eval_cmd->add_option("--format", eval_args.format, "stdout format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    eval_cmd->add_option("--out", eval_args.out_path, "write <out>.json and <out>.txt");
    eval_cmd->add_option("--word-vectors", eval_args.model_flags.word_vectors,
                         "word vector file used at train time");
    eval_cmd->add_option("--sentence-embeddings", eval_args.model_flags.sentence_embeddings,
                         "sentence embedding file used at train time");

    SegmentArgs segment_args;
    auto* segment_cmd = app.add_subcommand("segment", "segment one document");
    segment_cmd->add_option("--checkpoint", segment_args.checkpoint_path, "model checkpoint")
        ->required();
    segment_cmd->add_option("--in", segment_args.in_path, "input document")->required();
    segment_cmd->add_option("--out", segment_args.out_path, "output file (default stdout)");
    double segment_tau = 0.0;
    auto* segment_tau_opt =
        segment_cmd->add_option("--tau", segment_tau, "decode threshold override");
    segment_cmd->add_option("--format", segment_args.format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    segment_cmd->add_option("--word-vectors", segment_args.model_flags.word_vectors,
                            "word vector file used at train time");
    segment_cmd->add_option("--sentence-embeddings",
                            segment_args.model_flags.sentence_embeddings,
                            "sentence embedding file used at train time");

    AblateArgs ablate_args;
    auto* ablate_cmd = app.add_subcommand("ablate", "Basic/+AUX/+RSA/+AUX+RSA comparison");
    add_train_config_flags(ablate_cmd, ablate_args.overrides);
    ablate_cmd->add_option("--train", ablate_args.train_path, "training corpus")->required();
    ablate_cmd->add_option("--val", ablate_args.val_path, "validation corpus")->required();
    ablate_cmd->add_option("--test", ablate_args.test_path, "test corpus")->required();
    ablate_cmd->add_option("--seeds", ablate_args.n_seeds, "number of seeds (default 5)");
    ablate_cmd->add_option("--format", ablate_args.format, "stdout format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    ablate_cmd->add_option("--out", ablate_args.out_path, "write <out>.txt and <out>.json");
    ablate_cmd->add_option("--word-vectors", ablate_args.model_flags.word_vectors,
                           "word2vec-format text file");
    ablate_cmd->add_option("--sentence-embeddings",
                           ablate_args.model_flags.sentence_embeddings,
                           "precomputed sentence embedding JSONL");

    GradcheckArgs gradcheck_args;
    auto* gradcheck_cmd =
        app.add_subcommand("gradcheck", "finite-difference check of every parameter group");
    gradcheck_cmd->add_option("--seed", gradcheck_args.seed, "toy model/batch seed");
    gradcheck_cmd->add_option("--eps", gradcheck_args.eps, "central difference step");
    gradcheck_cmd->add_option("--tol", gradcheck_args.tol, "max relative error to pass");
    gradcheck_cmd->add_flag("--corrupt-backward", gradcheck_args.corrupt_backward,
                            "test hook: corrupt one gradient entry (must fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth_cmd->parsed()) {
            if (synth_seed_opt->count() > 0) synth_args.seed = synth_seed;
            return cmd_synth(synth_args);
        }
        if (split_cmd->parsed()) return cmd_split(split_args);
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (eval_cmd->parsed()) {
            if (eval_tau_opt->count() > 0) eval_args.tau = eval_tau;
            return cmd_eval(eval_args);
        }
        if (segment_cmd->parsed()) {
            if (segment_tau_opt->count() > 0) segment_args.tau = segment_tau;
            return cmd_segment(segment_args);
        }
        if (ablate_cmd->parsed()) return cmd_ablate(ablate_args);
        if (gradcheck_cmd->parsed()) return cmd_gradcheck(gradcheck_args);
        std::cerr << "no subcommand given\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        log_error(e.what());
        return kExitUsage;
    } catch (const DataError& e) {
        log_error(e.what());
        return kExitData;
    } catch (const std::exception& e) {
        log_error(e.what());
        return kExitRuntime;
    }
}
