// selftrain command-line front end. Talks to the engine exclusively through
// the C API in selftrain.h; progress goes to stderr, machine-readable output
// to stdout and files.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "selftrain.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1; // numeric abort, internal errors
constexpr int kExitInput = 2;   // config/corpus/usage problems
constexpr int kExitBackend = 3;
constexpr int kExitUserAbort = 4;

int exit_for(st_status status) {
    switch (status) {
        case ST_OK: return kExitOk;
        case ST_ERR_INVALID:
        case ST_ERR_PARSE:
        case ST_ERR_CONFIG:
        case ST_ERR_IO: return kExitInput;
        case ST_ERR_BACKEND: return kExitBackend;
        case ST_ERR_ABORTED: return kExitUserAbort;
        case ST_ERR_NUMERIC:
        case ST_ERR_INTERNAL: break;
    }
    return kExitFailure;
}

int report_error(st_status status) {
    std::cerr << "error: " << st_last_error() << "\n";
    return exit_for(status);
}

std::optional<int64_t> env_seed_override() {
    const char* env = std::getenv("SELFTRAIN_SEED");
    if (!env || !*env) return std::nullopt;
    char* end = nullptr;
    const long long value = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0') {
        std::cerr << "warning: ignoring non-numeric SELFTRAIN_SEED=\"" << env
                  << "\"\n";
        return std::nullopt;
    }
    return value;
}

struct CorpusHandle {
    st_corpus* ptr = nullptr;
    ~CorpusHandle() { st_corpus_free(ptr); }
};

struct OwnedString {
    char* ptr = nullptr;
    ~OwnedString() { st_string_free(ptr); }
};

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

int run_command(const std::string& config_path, const std::string& corpus_path,
                const std::string& out_dir, const std::string& test_path) {
    std::string config_json;
    if (!read_file(config_path, config_json)) {
        std::cerr << "error: cannot read config file: " << config_path << "\n";
        return kExitInput;
    }
    CorpusHandle corpus;
    if (auto s = st_corpus_read(corpus_path.c_str(), &corpus.ptr); s != ST_OK) {
        return report_error(s);
    }
    CorpusHandle heldout;
    if (!test_path.empty()) {
        if (auto s = st_corpus_read(test_path.c_str(), &heldout.ptr); s != ST_OK) {
            return report_error(s);
        }
    }
    const auto seed = env_seed_override();
    int stop_reason = ST_STOP_EXHAUSTED;
    OwnedString report;
    const auto status = st_run(config_json.c_str(), corpus.ptr, heldout.ptr,
                               seed.has_value(), seed.value_or(0), out_dir.c_str(),
                               /*progress_to_stderr=*/1, &stop_reason, &report.ptr);
    if (status != ST_OK) return report_error(status);
    if (report.ptr) std::cout << report.ptr;
    switch (stop_reason) {
        case ST_STOP_NUMERIC_ABORT:
            std::cerr << "run aborted: non-finite model weights\n";
            return kExitFailure;
        case ST_STOP_BACKEND_LOST:
            std::cerr << "run aborted: backend lost\n";
            return kExitBackend;
        default: return kExitOk;
    }
}

// Interactive p/n/q prompt on stderr, answers from stdin.
int prompt_annotator(void*, const char* text, size_t index, size_t total) {
    while (true) {
        std::cerr << "[" << index << "/" << total << "] " << text << "\n"
                  << "label (p=positive, n=negative, q=quit): " << std::flush;
        std::string answer;
        if (!std::getline(std::cin, answer)) return -1;
        if (answer == "p" || answer == "P") return 1;
        if (answer == "n" || answer == "N") return 0;
        if (answer == "q" || answer == "Q") return -1;
        std::cerr << "unrecognized answer \"" << answer << "\"\n";
    }
}

int estimate_command(const std::string& corpus_path, size_t k, uint64_t seed,
                     bool oracle, const std::string& out_path) {
    CorpusHandle corpus;
    if (auto s = st_corpus_read(corpus_path.c_str(), &corpus.ptr); s != ST_OK) {
        return report_error(s);
    }
    OwnedString estimate;
    const auto status = st_estimate_ratio(corpus.ptr, k, seed,
                                          oracle ? nullptr : prompt_annotator,
                                          nullptr, &estimate.ptr);
    if (status != ST_OK) return report_error(status);
    std::cout << estimate.ptr;
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return kExitInput;
        }
        out << estimate.ptr;
        std::cerr << "estimate written to " << out_path << "\n";
    }
    return kExitOk;
}

int evaluate_command(const std::string& labels_path, const std::string& corpus_path,
                     const std::string& curve_path) {
    CorpusHandle corpus;
    if (auto s = st_corpus_read(corpus_path.c_str(), &corpus.ptr); s != ST_OK) {
        return report_error(s);
    }
    OwnedString report;
    const auto status =
        st_evaluate(labels_path.c_str(), corpus.ptr,
                    curve_path.empty() ? nullptr : curve_path.c_str(), &report.ptr);
    if (status != ST_OK) return report_error(status);
    std::cout << report.ptr;
    return kExitOk;
}

int analyze_command(const std::string& corpus_path, const std::string& labels_path,
                    const std::string& out_dir) {
    CorpusHandle corpus;
    if (auto s = st_corpus_read(corpus_path.c_str(), &corpus.ptr); s != ST_OK) {
        return report_error(s);
    }
    OwnedString summary;
    const auto status =
        st_analyze(corpus.ptr, labels_path.empty() ? nullptr : labels_path.c_str(),
                   out_dir.c_str(), &summary.ptr);
    if (status != ST_OK) return report_error(status);
    std::cout << summary.ptr;
    return kExitOk;
}

int synth_command(const std::string& spec_path, const std::string& out_dir) {
    std::string spec_json;
    if (!read_file(spec_path, spec_json)) {
        std::cerr << "error: cannot read spec file: " << spec_path << "\n";
        return kExitInput;
    }
    const auto seed = env_seed_override();
    OwnedString summary;
    const auto status = st_synth_generate(spec_json.c_str(), seed.has_value(),
                                          seed.value_or(0), out_dir.c_str(),
                                          &summary.ptr);
    if (status != ST_OK) return report_error(status);
    std::cout << summary.ptr;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised self-training for code-switched sentiment analysis"};
    app.require_subcommand(1);

    std::string config_path, corpus_path, out_dir, test_path;
    auto* run = app.add_subcommand("run", "Run the self-training loop");
    run->add_option("--config", config_path, "Run config JSON")->required();
    run->add_option("--corpus", corpus_path, "Corpus file (JSONL or token-tagged)")
        ->required();
    run->add_option("--out", out_dir, "Output directory for run artifacts")
        ->required();
    run->add_option("--test-corpus", test_path,
                    "Gold-labeled held-out corpus for per-iteration metrics");

    std::string est_corpus, est_out = "ratio_estimate.json";
    size_t est_k = 50;
    uint64_t est_seed = 42;
    bool est_oracle = false;
    auto* estimate =
        app.add_subcommand("estimate-ratio", "Estimate the class ratio by "
                                             "annotating a small sample");
    estimate->add_option("--corpus", est_corpus, "Corpus file")->required();
    estimate->add_option("-k", est_k, "Sample size (default 50)");
    estimate->add_option("--seed", est_seed, "Sampling seed");
    estimate->add_flag("--oracle", est_oracle,
                       "Use the corpus gold labels instead of prompting");
    estimate->add_option("--out", est_out,
                         "Where to save the estimate JSON (default "
                         "ratio_estimate.json)");

    std::string eval_labels, eval_corpus, eval_curve;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Score a pseudo-label export against gold labels");
    evaluate->add_option("--labels", eval_labels, "Pseudo-label JSONL")->required();
    evaluate->add_option("--corpus", eval_corpus, "Gold-labeled corpus")->required();
    evaluate->add_option("--curve", eval_curve,
                         "Write the per-iteration curve CSV here");

    std::string ana_corpus, ana_labels, ana_out;
    auto* analyze =
        app.add_subcommand("analyze", "Token-ratio bucket and distribution analysis");
    analyze->add_option("--corpus", ana_corpus, "Corpus file")->required();
    analyze->add_option("--labels", ana_labels, "Pseudo-label JSONL (optional)");
    analyze->add_option("--out", ana_out, "Output directory for CSVs")->required();

    std::string synth_spec, synth_out;
    auto* synth = app.add_subcommand("synth", "Generate synthetic corpora");
    synth->add_option("--spec", synth_spec, "Synthetic spec JSON file")->required();
    synth->add_option("--out", synth_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    if (run->parsed()) return run_command(config_path, corpus_path, out_dir, test_path);
    if (estimate->parsed()) {
        return estimate_command(est_corpus, est_k, est_seed, est_oracle, est_out);
    }
    if (evaluate->parsed()) {
        return evaluate_command(eval_labels, eval_corpus, eval_curve);
    }
    if (analyze->parsed()) return analyze_command(ana_corpus, ana_labels, ana_out);
    if (synth->parsed()) return synth_command(synth_spec, synth_out);
    return kExitInput;
}
