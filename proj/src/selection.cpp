#include "selftrain/selection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "selftrain/analysis.hpp"
#include "selftrain/errors.hpp"

namespace selftrain {

void SelectionPolicy::validate() const {
    switch (kind) {
        case Kind::Vanilla:
            if (n_total < 2) throw ConfigError("vanilla selection needs n_total >= 2");
            break;
        case Kind::Ratio:
            if (n_total < 2) throw ConfigError("ratio selection needs n_total >= 2");
            if (positive_fraction <= 0.0 || positive_fraction >= 1.0) {
                throw ConfigError("positive_fraction must be in (0,1)");
            }
            break;
        case Kind::Scheduled:
            if (schedule.empty()) {
                throw ConfigError("scheduled selection needs a nonempty schedule");
            }
            if (!inner || (inner->kind != Kind::Vanilla && inner->kind != Kind::Ratio)) {
                throw ConfigError("scheduled selection needs a vanilla or ratio inner");
            }
            for (const size_t n : schedule) {
                if (n != 0 && n < 2) {
                    throw ConfigError("schedule entries must be 0 or >= 2");
                }
            }
            if (inner->kind == Kind::Ratio &&
                (inner->positive_fraction <= 0.0 || inner->positive_fraction >= 1.0)) {
                throw ConfigError("positive_fraction must be in (0,1)");
            }
            break;
        case Kind::HtrFiltered:
            if (min_l2_ratio < 0.0) throw ConfigError("min_l2_ratio must be >= 0");
            if (!inner) throw ConfigError("htr-filtered selection needs an inner strategy");
            inner->validate();
            break;
    }
}

SelectionPolicy SelectionPolicy::with_default_n_total(size_t n_total_default) const {
    SelectionPolicy out = *this;
    if (out.n_total == 0) out.n_total = n_total_default;
    if (out.inner) {
        out.inner = std::make_shared<const SelectionPolicy>(
            out.inner->with_default_n_total(n_total_default));
    }
    return out;
}

size_t SelectionOutcome::count(SentimentLabel label) const {
    size_t n = 0;
    for (const auto& s : selected) {
        if (s.label == label) ++n;
    }
    return n;
}

namespace {

// (confidence desc, id asc) per class, then take the per-class request.
SelectionOutcome select_per_class(std::span<const Prediction> predictions,
                                  size_t want_positive, size_t want_negative) {
    std::vector<const Prediction*> pos, neg;
    for (const auto& p : predictions) {
        (p.predicted == SentimentLabel::Positive ? pos : neg).push_back(&p);
    }
    auto by_rank = [](const Prediction* a, const Prediction* b) {
        if (a->confidence != b->confidence) return a->confidence > b->confidence;
        return a->utterance_id < b->utterance_id;
    };
    std::sort(pos.begin(), pos.end(), by_rank);
    std::sort(neg.begin(), neg.end(), by_rank);

    SelectionOutcome outcome;
    const size_t take_pos = std::min(want_positive, pos.size());
    const size_t take_neg = std::min(want_negative, neg.size());
    outcome.selected.reserve(take_pos + take_neg);
    for (size_t i = 0; i < take_pos; ++i) {
        outcome.selected.push_back(
            {pos[i]->utterance_id, SentimentLabel::Positive, pos[i]->confidence});
    }
    for (size_t i = 0; i < take_neg; ++i) {
        outcome.selected.push_back(
            {neg[i]->utterance_id, SentimentLabel::Negative, neg[i]->confidence});
    }
    outcome.shortfall_positive = want_positive - take_pos;
    outcome.shortfall_negative = want_negative - take_neg;
    return outcome;
}

size_t round_half_away(double x) {
    return static_cast<size_t>(std::floor(x + 0.5));
}

size_t schedule_entry(const std::vector<size_t>& schedule, size_t iteration) {
    return iteration < schedule.size() ? schedule[iteration] : schedule.back();
}

} // namespace

SelectionOutcome select(const SelectionPolicy& policy,
                        std::span<const Prediction> predictions,
                        const Corpus& corpus, size_t iteration) {
    policy.validate();
    switch (policy.kind) {
        case SelectionPolicy::Kind::Vanilla: {
            const size_t half = policy.n_total / 2;
            return select_per_class(predictions, half, half);
        }
        case SelectionPolicy::Kind::Ratio: {
            const size_t n_pos = round_half_away(
                static_cast<double>(policy.n_total) * policy.positive_fraction);
            return select_per_class(predictions, n_pos, policy.n_total - n_pos);
        }
        case SelectionPolicy::Kind::Scheduled: {
            SelectionPolicy effective = *policy.inner;
            effective.n_total = schedule_entry(policy.schedule, iteration);
            if (effective.n_total == 0) {
                return SelectionOutcome{}; // skip-this-iteration entry
            }
            return select(effective, predictions, corpus, iteration);
        }
        case SelectionPolicy::Kind::HtrFiltered: {
            std::vector<Prediction> eligible;
            eligible.reserve(predictions.size());
            for (const auto& p : predictions) {
                const Utterance* u = corpus.find(p.utterance_id);
                if (!u) {
                    throw ConfigError("prediction for unknown utterance " +
                                      p.utterance_id);
                }
                const auto ratio = token_ratio(*u);
                if (ratio && *ratio >= policy.min_l2_ratio) {
                    eligible.push_back(p);
                }
            }
            return select(*policy.inner, eligible, corpus, iteration);
        }
    }
    throw ConfigError("unknown selection policy");
}

RatioEstimate estimate_ratio(const Corpus& corpus, size_t k, uint64_t seed,
                             const Annotator& annotate) {
    if (k == 0) throw ConfigError("ratio estimation needs k >= 1");
    if (k > corpus.size()) {
        throw ConfigError("sample size " + std::to_string(k) +
                          " exceeds corpus size " + std::to_string(corpus.size()));
    }
    // Partial Fisher-Yates: the first k entries are a uniform sample
    // without replacement.
    std::vector<size_t> indices(corpus.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < k; ++i) {
        const size_t j = i + rng() % (indices.size() - i);
        std::swap(indices[i], indices[j]);
    }

    size_t positives = 0;
    for (size_t i = 0; i < k; ++i) {
        const auto answer = annotate(corpus.at(indices[i]), i + 1, k);
        if (!answer) throw AbortedError("ratio estimation aborted");
        if (*answer == SentimentLabel::Neutral) {
            throw ConfigError("ratio annotation must be positive or negative");
        }
        if (*answer == SentimentLabel::Positive) ++positives;
    }

    RatioEstimate est;
    est.sample_size = k;
    est.dataset_size = corpus.size();
    est.p_positive_hat = static_cast<double>(positives) / static_cast<double>(k);
    est.expected_positive = round_half_away(
        est.p_positive_hat * static_cast<double>(corpus.size()));
    est.expected_negative = corpus.size() - est.expected_positive;
    return est;
}

Annotator gold_annotator() {
    return [](const Utterance& u, size_t, size_t) -> std::optional<SentimentLabel> {
        if (!u.gold) {
            throw ConfigError("gold oracle asked about unlabeled utterance " + u.id);
        }
        return *u.gold;
    };
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::Exhausted: return "exhausted";
        case StopReason::RatioStopPositive: return "ratio-stop(positive)";
        case StopReason::RatioStopNegative: return "ratio-stop(negative)";
        case StopReason::MaxIterations: return "max-iterations";
        case StopReason::NumericAbort: return "numeric-abort";
        case StopReason::BackendLost: return "backend-lost";
    }
    return "?";
}

StopDecision should_stop(size_t cumulative_positive, size_t cumulative_negative,
                         const RatioEstimate& estimate,
                         size_t unlabeled_remaining) {
    if (unlabeled_remaining == 0) return {true, StopReason::Exhausted};
    if (cumulative_positive >= estimate.expected_positive) {
        return {true, StopReason::RatioStopPositive};
    }
    if (cumulative_negative >= estimate.expected_negative) {
        return {true, StopReason::RatioStopNegative};
    }
    return {false, StopReason::Exhausted};
}

} // namespace selftrain
