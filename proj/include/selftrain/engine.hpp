#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "selftrain/backend.hpp"
#include "selftrain/corpus.hpp"
#include "selftrain/selection.hpp"

namespace selftrain {

// The engine's unsupervised annotation of one utterance. Iteration 0 is the
// zero-shot round; labels are never revised once assigned.
struct PseudoLabel {
    std::string utterance_id;
    SentimentLabel label = SentimentLabel::Positive;
    double confidence = 0.5;
    size_t iteration = 0;
};

struct BackendSpec {
    enum class Kind { Builtin, External };
    Kind kind = Kind::Builtin;
    BackendConfig config;
    std::vector<std::string> command; // external only
    std::string pretrain_corpus;      // builtin: path to labeled source data
    size_t pretrain_epochs = 3;
};

struct RunConfig {
    SelectionPolicy strategy;
    double selection_percent = 0.05; // n_total = round(percent * corpus size)
    size_t epochs_per_iteration = 1;
    std::optional<size_t> max_iterations;
    std::optional<RatioEstimate> ratio_estimate;
    uint64_t seed = 42;
    bool cumulative_retrain = false; // retrain on the whole pool each iteration
    BackendSpec backend;

    void validate() const;
};

// Parses the run-config JSON described in the README. seed_override (the
// SELFTRAIN_SEED hook) replaces the config seed before derived seeds are
// computed.
RunConfig parse_run_config(const std::string& json_text,
                           std::optional<uint64_t> seed_override = {});

// Instantiates the configured backend; builtin backends are pre-trained on
// their source corpus here.
std::unique_ptr<ClassifierBackend> make_backend(const BackendSpec& spec);

struct HeldoutScore {
    double weighted_f1 = 0.0;
    double accuracy = 0.0;
};

// One record per engine step that did work (a selection, or the final
// train-only step before exhaustion).
struct IterationRecord {
    size_t iteration = 0;
    size_t trained_examples = 0;
    size_t selected_positive = 0;
    size_t selected_negative = 0;
    size_t shortfall_positive = 0;
    size_t shortfall_negative = 0;
    size_t truncated_positive = 0; // dropped to stay inside the ratio quota
    size_t truncated_negative = 0;
    size_t labeled_total = 0;
    size_t unlabeled_total = 0;
    std::optional<HeldoutScore> heldout;
};

// The loop's single source of truth. labeled and unlabeled ids partition the
// corpus at all times.
struct RunState {
    size_t iteration = 0;
    std::map<std::string, PseudoLabel> labeled;
    std::vector<size_t> unlabeled; // corpus indices, original order
    size_t cumulative_positive = 0;
    size_t cumulative_negative = 0;
    std::vector<SelectedItem> pending_train; // newest selection, not yet trained
    std::vector<IterationRecord> history;
    std::optional<StopReason> stopped;
};

struct RunHooks {
    std::function<void(const RunState&, const IterationRecord&)> on_iteration;
    std::function<void(const std::string&)> warn;
};

// Zero-shot round: predict the whole corpus, select once, no fine-tuning yet
// (the first fine-tune happens at the start of the first iterate_once).
// The corpus must be preprocessed and two-class filtered.
RunState zero_shot_init(ClassifierBackend& backend, const Corpus& corpus,
                        const RunConfig& config);

// One loop turn: fine-tune on the newest selection, predict the remaining
// pool, select, commit. Returns false when the state was left unchanged
// (stop flag aside).
bool iterate_once(RunState& state, ClassifierBackend& backend,
                  const Corpus& corpus, const RunConfig& config);

struct RunResult {
    RunState state;
    StopReason stop_reason = StopReason::Exhausted;
    std::string stop_detail; // error text for numeric-abort / backend-lost
    std::optional<HeldoutScore> final_heldout;
    std::vector<PseudoLabel> exported; // labeled pool sorted by (iteration, id)
};

// Runs init + iterations until a stop fires: ratio quota, exhaustion,
// max_iterations, or an abort. Deterministic given (corpus, config, seed).
// heldout, when given, is scored after every recorded step.
RunResult run_to_completion(ClassifierBackend& backend, const Corpus& corpus,
                            const RunConfig& config,
                            const Corpus* heldout = nullptr,
                            const RunHooks& hooks = {});

// Sorted JSONL export {"id","label","confidence","iteration"}, written
// atomically (temp file + rename).
std::vector<PseudoLabel> sorted_pseudo_labels(const RunState& state);
void export_pseudo_labels(const RunState& state, const std::string& path);

// Reads an export back; used by evaluate/analyze.
std::vector<PseudoLabel> read_pseudo_labels(const std::string& path);

// Run report JSON (stop reason, history, pool sizes, artifact paths).
// No timestamps: identical runs serialize identically.
std::string run_report_json(const RunResult& result, const RunConfig& config,
                            const std::string& labels_path,
                            const std::string& metrics_path);

void write_metrics_csv(const std::vector<IterationRecord>& history,
                       const std::string& path);

} // namespace selftrain
