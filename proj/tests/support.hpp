// Shared test fixtures: independent brute-force oracles (kept deliberately
// separate from the library code paths they check) and a scriptable backend.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "selftrain/backend.hpp"
#include "selftrain/corpus.hpp"
#include "selftrain/selection.hpp"

namespace testsupport {

using namespace selftrain;

// ----------------------------------------------------------------------
// Brute-force scorer: per-class formulas evaluated directly from the label
// vectors, no confusion-matrix type involved.
struct BruteReport {
    double precision_pos = 0, recall_pos = 0, f1_pos = 0;
    double precision_neg = 0, recall_neg = 0, f1_neg = 0;
    size_t support_pos = 0, support_neg = 0;
    double weighted_f1 = 0, accuracy = 0;
};

inline BruteReport brute_score(const std::vector<SentimentLabel>& gold,
                               const std::vector<SentimentLabel>& pred) {
    BruteReport r;
    size_t correct = 0;
    double tp_p = 0, predicted_p = 0, actual_p = 0;
    double tp_n = 0, predicted_n = 0, actual_n = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == pred[i]) ++correct;
        if (pred[i] == SentimentLabel::Positive) ++predicted_p;
        if (pred[i] == SentimentLabel::Negative) ++predicted_n;
        if (gold[i] == SentimentLabel::Positive) {
            ++actual_p;
            if (pred[i] == SentimentLabel::Positive) ++tp_p;
        }
        if (gold[i] == SentimentLabel::Negative) {
            ++actual_n;
            if (pred[i] == SentimentLabel::Negative) ++tp_n;
        }
    }
    auto div = [](double a, double b) { return b == 0 ? 0.0 : a / b; };
    r.precision_pos = div(tp_p, predicted_p);
    r.recall_pos = div(tp_p, actual_p);
    r.f1_pos = div(2 * r.precision_pos * r.recall_pos, r.precision_pos + r.recall_pos);
    r.precision_neg = div(tp_n, predicted_n);
    r.recall_neg = div(tp_n, actual_n);
    r.f1_neg = div(2 * r.precision_neg * r.recall_neg, r.precision_neg + r.recall_neg);
    r.support_pos = static_cast<size_t>(actual_p);
    r.support_neg = static_cast<size_t>(actual_n);
    r.weighted_f1 = div(actual_p * r.f1_pos + actual_n * r.f1_neg, actual_p + actual_n);
    r.accuracy = div(static_cast<double>(correct), static_cast<double>(gold.size()));
    return r;
}

// ----------------------------------------------------------------------
// Brute-force selection oracle: copy, full sort, prefix.
struct BruteSelected {
    std::vector<SelectedItem> items;
    size_t shortfall_pos = 0, shortfall_neg = 0;
};

inline BruteSelected brute_take(std::vector<Prediction> preds, size_t want_pos,
                                size_t want_neg) {
    std::stable_sort(preds.begin(), preds.end(),
                     [](const Prediction& a, const Prediction& b) {
                         if (a.confidence != b.confidence) {
                             return a.confidence > b.confidence;
                         }
                         return a.utterance_id < b.utterance_id;
                     });
    BruteSelected out;
    size_t take_pos = 0, take_neg = 0;
    for (const auto& p : preds) {
        if (p.predicted == SentimentLabel::Positive && take_pos < want_pos) {
            ++take_pos;
        } else if (p.predicted == SentimentLabel::Negative && take_neg < want_neg) {
            ++take_neg;
        }
    }
    // Emit positives first, then negatives, each confidence-descending.
    for (const auto& p : preds) {
        if (p.predicted == SentimentLabel::Positive && out.items.size() < take_pos) {
            out.items.push_back({p.utterance_id, p.predicted, p.confidence});
        }
    }
    size_t neg_taken = 0;
    for (const auto& p : preds) {
        if (p.predicted == SentimentLabel::Negative && neg_taken < take_neg) {
            out.items.push_back({p.utterance_id, p.predicted, p.confidence});
            ++neg_taken;
        }
    }
    out.shortfall_pos = want_pos - take_pos;
    out.shortfall_neg = want_neg - take_neg;
    return out;
}

inline size_t brute_round_half_away(double x) {
    return static_cast<size_t>(std::floor(x + 0.5));
}

// Replays the full strategy semantics: schedule lookup, ratio rounding and
// the token-ratio filter, all reimplemented from scratch.
inline BruteSelected brute_select(const SelectionPolicy& policy,
                                  std::vector<Prediction> preds,
                                  const Corpus& corpus, size_t iteration) {
    switch (policy.kind) {
        case SelectionPolicy::Kind::Vanilla:
            return brute_take(std::move(preds), policy.n_total / 2, policy.n_total / 2);
        case SelectionPolicy::Kind::Ratio: {
            const size_t n_pos =
                brute_round_half_away(policy.positive_fraction *
                                      static_cast<double>(policy.n_total));
            return brute_take(std::move(preds), n_pos, policy.n_total - n_pos);
        }
        case SelectionPolicy::Kind::Scheduled: {
            SelectionPolicy inner = *policy.inner;
            inner.n_total = iteration < policy.schedule.size()
                                ? policy.schedule[iteration]
                                : policy.schedule.back();
            if (inner.n_total == 0) return {};
            return brute_select(inner, std::move(preds), corpus, iteration);
        }
        case SelectionPolicy::Kind::HtrFiltered: {
            std::vector<Prediction> kept;
            for (const auto& p : preds) {
                const Utterance* u = corpus.find(p.utterance_id);
                size_t l1 = 0, l2 = 0;
                for (const auto& t : u->tokens) {
                    if (t.tag == LangTag::L1) ++l1;
                    if (t.tag == LangTag::L2) ++l2;
                }
                if (l1 + l2 == 0) continue;
                const double ratio =
                    static_cast<double>(l2) / static_cast<double>(l1 + l2);
                if (ratio >= policy.min_l2_ratio) kept.push_back(p);
            }
            return brute_select(*policy.inner, std::move(kept), corpus, iteration);
        }
    }
    return {};
}

// ----------------------------------------------------------------------
// Scriptable backend: probabilities from a callback, train calls recorded.
class ScriptedBackend final : public ClassifierBackend {
public:
    using ProbFn = std::function<ProbVector(const Utterance&)>;

    explicit ScriptedBackend(ProbFn fn) : fn_(std::move(fn)) {}

    std::vector<Prediction> predict_batch(
        std::span<const Utterance> utterances) override {
        std::vector<Prediction> out;
        out.reserve(utterances.size());
        for (const auto& u : utterances) out.push_back(make_prediction(u.id, fn_(u)));
        return out;
    }

    void train(std::span<const TrainExample> examples, size_t epochs) override {
        std::vector<std::string> ids;
        ids.reserve(examples.size());
        for (const auto& ex : examples) ids.push_back(ex.utterance_id);
        train_batches.push_back(std::move(ids));
        epochs_seen.push_back(epochs);
    }

    std::string name() const override { return "scripted"; }

    std::vector<std::vector<std::string>> train_batches;
    std::vector<size_t> epochs_seen;

private:
    ProbFn fn_;
};

// Wraps a real backend, recording every trained utterance id.
class RecordingBackend final : public ClassifierBackend {
public:
    explicit RecordingBackend(ClassifierBackend& inner) : inner_(inner) {}

    std::vector<Prediction> predict_batch(
        std::span<const Utterance> utterances) override {
        return inner_.predict_batch(utterances);
    }

    void train(std::span<const TrainExample> examples, size_t epochs) override {
        std::vector<std::string> ids;
        for (const auto& ex : examples) ids.push_back(ex.utterance_id);
        train_batches.push_back(std::move(ids));
        inner_.train(examples, epochs);
    }

    std::string name() const override { return inner_.name(); }

    std::vector<std::vector<std::string>> train_batches;

private:
    ClassifierBackend& inner_;
};

// Small corpus of bare labeled utterances, handy for scoring fixtures.
inline Corpus label_only_corpus(const std::vector<SentimentLabel>& gold) {
    std::vector<Utterance> utts;
    for (size_t i = 0; i < gold.size(); ++i) {
        Utterance u;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "u%04zu", i);
        u.id = buf;
        u.text = "w" + std::to_string(i);
        u.tokens = {{u.text, LangTag::L1}};
        u.gold = gold[i];
        utts.push_back(std::move(u));
    }
    return Corpus("fixture", std::move(utts));
}

} // namespace testsupport
