#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selftrain/backend.hpp"
#include "selftrain/corpus.hpp"

namespace selftrain {

// Which predictions become pseudo-labels each iteration.
//   vanilla      - floor(n_total/2) top-confidence picks per class
//   ratio        - round(n_total * positive_fraction) positives, rest negative
//   scheduled    - per-iteration totals from `schedule` (last entry repeats),
//                  applied through the inner vanilla/ratio shape
//   htr-filtered - candidate pool restricted to token_ratio >= min_l2_ratio
//                  before the inner strategy runs
struct SelectionPolicy {
    enum class Kind { Vanilla, Ratio, Scheduled, HtrFiltered };

    Kind kind = Kind::Vanilla;
    size_t n_total = 0;
    double positive_fraction = 0.5;
    std::vector<size_t> schedule;
    double min_l2_ratio = 0.0;
    std::shared_ptr<const SelectionPolicy> inner;

    void validate() const; // throws ConfigError

    // Replaces every zero n_total in the tree with the given default
    // (the engine derives it from selection_percent x dataset size).
    SelectionPolicy with_default_n_total(size_t n_total_default) const;
};

struct SelectedItem {
    std::string utterance_id;
    SentimentLabel label = SentimentLabel::Positive;
    double confidence = 0.5;
};

struct SelectionOutcome {
    std::vector<SelectedItem> selected; // positives first, confidence-descending
    size_t shortfall_positive = 0;
    size_t shortfall_negative = 0;

    size_t count(SentimentLabel label) const;
};

// Top-confidence per-class selection; ties break by ascending utterance id.
// `iteration` indexes into scheduled policies (0 = the zero-shot round).
// The corpus supplies token ratios for HTR-filtered policies.
SelectionOutcome select(const SelectionPolicy& policy,
                        std::span<const Prediction> predictions,
                        const Corpus& corpus, size_t iteration);

// The human-or-oracle estimate of the corpus class balance, obtained by
// annotating k sampled utterances.
struct RatioEstimate {
    double p_positive_hat = 0.5;
    size_t sample_size = 0;
    size_t dataset_size = 0;
    size_t expected_positive = 0;
    size_t expected_negative = 0;
};

// Returns Positive/Negative for a shown utterance, nullopt to abort.
// Arguments: utterance, 1-based prompt index, total prompts.
using Annotator =
    std::function<std::optional<SentimentLabel>(const Utterance&, size_t, size_t)>;

// Draws k utterances uniformly without replacement (seeded), annotates them,
// and extrapolates expected per-class totals over the whole corpus.
RatioEstimate estimate_ratio(const Corpus& corpus, size_t k, uint64_t seed,
                             const Annotator& annotate);

// Gold-label oracle annotator for tests and the --oracle CLI path.
Annotator gold_annotator();

enum class StopReason : uint8_t {
    Exhausted,
    RatioStopPositive,
    RatioStopNegative,
    MaxIterations,
    NumericAbort,
    BackendLost,
};

const char* to_string(StopReason reason);

struct StopDecision {
    bool stop = false;
    StopReason reason = StopReason::Exhausted;
};

// Stop when the unlabeled pool is empty, or when a class's cumulative
// selections reach its estimated total.
StopDecision should_stop(size_t cumulative_positive, size_t cumulative_negative,
                         const RatioEstimate& estimate, size_t unlabeled_remaining);

} // namespace selftrain
