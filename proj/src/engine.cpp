#include "selftrain/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "selftrain/errors.hpp"
#include "selftrain/external_backend.hpp"
#include "selftrain/metrics.hpp"

namespace selftrain {

using ordered_json = nlohmann::ordered_json;

void RunConfig::validate() const {
    if (selection_percent <= 0.0 || selection_percent > 1.0) {
        throw ConfigError("selection_percent must be in (0,1]");
    }
    if (epochs_per_iteration < 1) {
        throw ConfigError("epochs_per_iteration must be >= 1");
    }
    backend.config.validate();
    if (backend.kind == BackendSpec::Kind::External && backend.command.empty()) {
        throw ConfigError("external backend needs a nonempty cmd");
    }
}

namespace {

size_t round_half_away(double x) {
    return static_cast<size_t>(std::floor(x + 0.5));
}

SelectionPolicy resolve_policy(const RunConfig& config, size_t corpus_size) {
    const size_t n_default = round_half_away(
        config.selection_percent * static_cast<double>(corpus_size));
    auto policy = config.strategy.with_default_n_total(n_default);
    policy.validate();
    return policy;
}

std::vector<TrainExample> examples_for(const std::vector<SelectedItem>& items,
                                       const Corpus& corpus) {
    std::vector<TrainExample> examples;
    examples.reserve(items.size());
    for (const auto& item : items) {
        const Utterance* u = corpus.find(item.utterance_id);
        if (!u) throw ConfigError("selected id not in corpus: " + item.utterance_id);
        examples.push_back(to_train_example(*u, item.label));
    }
    return examples;
}

// Commits a selection into the labeled pool: truncates to any remaining
// ratio quota, moves ids out of the unlabeled list, updates tallies.
IterationRecord commit_selection(RunState& state, const Corpus& corpus,
                                 const RunConfig& config,
                                 SelectionOutcome&& outcome, size_t iteration) {
    IterationRecord rec;
    rec.iteration = iteration;
    rec.shortfall_positive = outcome.shortfall_positive;
    rec.shortfall_negative = outcome.shortfall_negative;

    std::vector<SelectedItem> kept;
    kept.reserve(outcome.selected.size());
    if (config.ratio_estimate) {
        const auto& est = *config.ratio_estimate;
        size_t quota_pos = est.expected_positive > state.cumulative_positive
                               ? est.expected_positive - state.cumulative_positive
                               : 0;
        size_t quota_neg = est.expected_negative > state.cumulative_negative
                               ? est.expected_negative - state.cumulative_negative
                               : 0;
        // selected is confidence-descending per class, so dropping the tail
        // keeps the most confident items.
        for (const auto& item : outcome.selected) {
            auto& quota = item.label == SentimentLabel::Positive ? quota_pos : quota_neg;
            if (quota > 0) {
                --quota;
                kept.push_back(item);
            } else if (item.label == SentimentLabel::Positive) {
                ++rec.truncated_positive;
            } else {
                ++rec.truncated_negative;
            }
        }
    } else {
        kept = std::move(outcome.selected);
    }

    for (const auto& item : kept) {
        PseudoLabel pl{item.utterance_id, item.label, item.confidence, iteration};
        if (!state.labeled.emplace(item.utterance_id, pl).second) {
            throw ConfigError("pseudo-label revision attempted for " +
                              item.utterance_id);
        }
        if (item.label == SentimentLabel::Positive) {
            ++state.cumulative_positive;
            ++rec.selected_positive;
        } else {
            ++state.cumulative_negative;
            ++rec.selected_negative;
        }
    }
    std::erase_if(state.unlabeled, [&](size_t idx) {
        return state.labeled.count(corpus.at(idx).id) != 0;
    });

    state.pending_train = std::move(kept);
    rec.labeled_total = state.labeled.size();
    rec.unlabeled_total = state.unlabeled.size();
    return rec;
}

std::vector<const Utterance*> unlabeled_view(const RunState& state,
                                             const Corpus& corpus) {
    std::vector<const Utterance*> out;
    out.reserve(state.unlabeled.size());
    for (const size_t idx : state.unlabeled) out.push_back(&corpus.at(idx));
    return out;
}

std::vector<Prediction> predict_pointers(ClassifierBackend& backend,
                                         const std::vector<const Utterance*>& ptrs) {
    // Backends take contiguous utterances; materialize the view.
    std::vector<Utterance> batch;
    batch.reserve(ptrs.size());
    for (const auto* u : ptrs) batch.push_back(*u);
    return backend.predict_batch(batch);
}

} // namespace

RunState zero_shot_init(ClassifierBackend& backend, const Corpus& corpus,
                        const RunConfig& config) {
    config.validate();
    if (corpus.empty()) throw ConfigError("empty-dataset: nothing to label");
    const auto policy = resolve_policy(config, corpus.size());

    RunState state;
    state.unlabeled.resize(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) state.unlabeled[i] = i;

    const auto predictions = backend.predict_batch(corpus.utterances());
    auto outcome = select(policy, predictions, corpus, 0);
    auto rec = commit_selection(state, corpus, config, std::move(outcome), 0);
    state.history.push_back(rec);
    return state;
}

bool iterate_once(RunState& state, ClassifierBackend& backend,
                  const Corpus& corpus, const RunConfig& config) {
    const auto policy = resolve_policy(config, corpus.size());

    bool trained = false;
    size_t trained_count = 0;
    if (config.cumulative_retrain) {
        std::vector<SelectedItem> pool;
        pool.reserve(state.labeled.size());
        for (const auto& [id, pl] : state.labeled) {
            pool.push_back({id, pl.label, pl.confidence});
        }
        if (!pool.empty()) {
            const auto examples = examples_for(pool, corpus);
            backend.train(examples, config.epochs_per_iteration);
            trained = true;
            trained_count = examples.size();
        }
        state.pending_train.clear();
    } else if (!state.pending_train.empty()) {
        const auto examples = examples_for(state.pending_train, corpus);
        backend.train(examples, config.epochs_per_iteration);
        trained = true;
        trained_count = examples.size();
        state.pending_train.clear();
    }

    if (state.unlabeled.empty()) {
        state.stopped = StopReason::Exhausted;
        if (!trained) return false; // true identity case
        ++state.iteration;
        IterationRecord rec;
        rec.iteration = state.iteration;
        rec.trained_examples = trained_count;
        rec.labeled_total = state.labeled.size();
        rec.unlabeled_total = 0;
        state.history.push_back(rec);
        return true;
    }

    const auto view = unlabeled_view(state, corpus);
    const auto predictions = predict_pointers(backend, view);

    ++state.iteration;
    auto outcome = select(policy, predictions, corpus, state.iteration);
    const size_t requested = outcome.selected.size() + outcome.shortfall_positive +
                             outcome.shortfall_negative;
    auto rec = commit_selection(state, corpus, config, std::move(outcome),
                                state.iteration);
    rec.trained_examples = trained_count;
    if (rec.selected_positive + rec.selected_negative == 0 && requested > 0) {
        // Nothing selectable although work remains; do not spin.
        state.stopped = StopReason::Exhausted;
    }
    state.history.push_back(rec);
    return true;
}

namespace {

std::optional<HeldoutScore> score_heldout(ClassifierBackend& backend,
                                          const Corpus* heldout) {
    if (!heldout || heldout->empty()) return std::nullopt;
    std::vector<const Utterance*> scored;
    for (const auto& u : heldout->utterances()) {
        if (u.gold && *u.gold != SentimentLabel::Neutral) scored.push_back(&u);
    }
    if (scored.empty()) return std::nullopt;
    const auto predictions = predict_pointers(backend, scored);
    std::vector<SentimentLabel> gold, pred;
    gold.reserve(scored.size());
    for (size_t i = 0; i < scored.size(); ++i) {
        gold.push_back(*scored[i]->gold);
        pred.push_back(predictions[i].predicted);
    }
    const auto rep = score(gold, pred);
    return HeldoutScore{rep.weighted_f1, rep.accuracy};
}

} // namespace

RunResult run_to_completion(ClassifierBackend& backend, const Corpus& corpus,
                            const RunConfig& config, const Corpus* heldout,
                            const RunHooks& hooks) {
    config.validate();
    if (config.epochs_per_iteration > 1 && hooks.warn) {
        hooks.warn("epochs_per_iteration > 1: repeated passes over each "
                   "selection overfit and degrade the loop");
    }

    RunResult result;
    auto finish = [&](RunState&& state, StopReason reason, std::string detail) {
        result.state = std::move(state);
        result.stop_reason = reason;
        result.stop_detail = std::move(detail);
        try {
            result.final_heldout = score_heldout(backend, heldout);
        } catch (const Error&) {
            // A lost backend cannot score; the partial result still stands.
        }
        result.exported = sorted_pseudo_labels(result.state);
        return result;
    };

    RunState state;
    try {
        state = zero_shot_init(backend, corpus, config);
        state.history.back().heldout = score_heldout(backend, heldout);
        if (hooks.on_iteration) hooks.on_iteration(state, state.history.back());

        while (true) {
            if (config.ratio_estimate) {
                const auto decision =
                    should_stop(state.cumulative_positive, state.cumulative_negative,
                                *config.ratio_estimate, state.unlabeled.size());
                // Exhaustion defers to iterate_once so the newest selection
                // still gets its fine-tune pass.
                if (decision.stop && decision.reason != StopReason::Exhausted) {
                    return finish(std::move(state), decision.reason, "");
                }
            }
            if (config.max_iterations && state.iteration >= *config.max_iterations) {
                return finish(std::move(state), StopReason::MaxIterations, "");
            }
            if (!iterate_once(state, backend, corpus, config)) {
                return finish(std::move(state),
                              state.stopped.value_or(StopReason::Exhausted), "");
            }
            state.history.back().heldout = score_heldout(backend, heldout);
            if (hooks.on_iteration) hooks.on_iteration(state, state.history.back());
            if (state.stopped) {
                return finish(std::move(state), *state.stopped, "");
            }
        }
    } catch (const NumericError& e) {
        return finish(std::move(state), StopReason::NumericAbort, e.what());
    } catch (const BackendLostError& e) {
        return finish(std::move(state), StopReason::BackendLost, e.what());
    } catch (const ProtocolError& e) {
        return finish(std::move(state), StopReason::BackendLost, e.what());
    }
}

std::vector<PseudoLabel> sorted_pseudo_labels(const RunState& state) {
    std::vector<PseudoLabel> out;
    out.reserve(state.labeled.size());
    for (const auto& [id, pl] : state.labeled) out.push_back(pl);
    std::sort(out.begin(), out.end(), [](const PseudoLabel& a, const PseudoLabel& b) {
        if (a.iteration != b.iteration) return a.iteration < b.iteration;
        return a.utterance_id < b.utterance_id;
    });
    return out;
}

void export_pseudo_labels(const RunState& state, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot write pseudo-label file: " + tmp);
        for (const auto& pl : sorted_pseudo_labels(state)) {
            ordered_json rec;
            rec["id"] = pl.utterance_id;
            rec["label"] = to_string(pl.label);
            rec["confidence"] = pl.confidence;
            rec["iteration"] = pl.iteration;
            out << rec.dump() << '\n';
        }
        if (!out.good()) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw IoError("cannot move " + tmp + " into place at " + path);
    }
}

std::vector<PseudoLabel> read_pseudo_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pseudo-label file: " + path);
    std::vector<PseudoLabel> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
        }
        PseudoLabel pl;
        try {
            pl.utterance_id = rec.at("id").get<std::string>();
            const auto label = rec.at("label").get<std::string>();
            if (label == "positive") {
                pl.label = SentimentLabel::Positive;
            } else if (label == "negative") {
                pl.label = SentimentLabel::Negative;
            } else {
                throw ParseError(line_no, "unknown pseudo-label \"" + label + "\"");
            }
            pl.confidence = rec.at("confidence").get<double>();
            pl.iteration = rec.at("iteration").get<size_t>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("bad record: ") + e.what());
        }
        out.push_back(std::move(pl));
    }
    return out;
}

namespace {

ordered_json strategy_json(const SelectionPolicy& policy) {
    ordered_json j;
    switch (policy.kind) {
        case SelectionPolicy::Kind::Vanilla:
            j["kind"] = "vanilla";
            j["n_total"] = policy.n_total;
            break;
        case SelectionPolicy::Kind::Ratio:
            j["kind"] = "ratio";
            j["n_total"] = policy.n_total;
            j["positive_fraction"] = policy.positive_fraction;
            break;
        case SelectionPolicy::Kind::Scheduled:
            j["kind"] = "scheduled";
            j["schedule"] = policy.schedule;
            j["inner"] = strategy_json(*policy.inner);
            break;
        case SelectionPolicy::Kind::HtrFiltered:
            j["kind"] = "htr-filtered";
            j["min_l2_ratio"] = policy.min_l2_ratio;
            j["inner"] = strategy_json(*policy.inner);
            break;
    }
    return j;
}

} // namespace

std::string run_report_json(const RunResult& result, const RunConfig& config,
                            const std::string& labels_path,
                            const std::string& metrics_path) {
    ordered_json j;
    j["stop_reason"] = to_string(result.stop_reason);
    if (!result.stop_detail.empty()) j["stop_detail"] = result.stop_detail;
    j["iterations"] = result.state.iteration;
    j["labeled"] = result.state.labeled.size();
    j["unlabeled"] = result.state.unlabeled.size();
    j["cumulative_positive"] = result.state.cumulative_positive;
    j["cumulative_negative"] = result.state.cumulative_negative;
    j["seed"] = config.seed;
    j["strategy"] = strategy_json(config.strategy);
    j["selection_percent"] = config.selection_percent;
    j["backend"] =
        config.backend.kind == BackendSpec::Kind::Builtin ? "builtin" : "external";
    if (result.final_heldout) {
        j["final_heldout"] = {{"weighted_f1", result.final_heldout->weighted_f1},
                              {"accuracy", result.final_heldout->accuracy}};
    }
    ordered_json history = ordered_json::array();
    for (const auto& rec : result.state.history) {
        ordered_json r;
        r["iteration"] = rec.iteration;
        r["trained_examples"] = rec.trained_examples;
        r["selected_positive"] = rec.selected_positive;
        r["selected_negative"] = rec.selected_negative;
        r["shortfall_positive"] = rec.shortfall_positive;
        r["shortfall_negative"] = rec.shortfall_negative;
        r["truncated_positive"] = rec.truncated_positive;
        r["truncated_negative"] = rec.truncated_negative;
        r["labeled_total"] = rec.labeled_total;
        r["unlabeled_total"] = rec.unlabeled_total;
        if (rec.heldout) {
            r["heldout"] = {{"weighted_f1", rec.heldout->weighted_f1},
                            {"accuracy", rec.heldout->accuracy}};
        }
        history.push_back(std::move(r));
    }
    j["history"] = std::move(history);
    j["artifacts"] = {{"pseudo_labels", labels_path}, {"metrics_csv", metrics_path}};
    return j.dump(2) + "\n";
}

void write_metrics_csv(const std::vector<IterationRecord>& history,
                       const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write metrics file: " + path);
    out << "iteration,trained_examples,selected_positive,selected_negative,"
           "shortfall_positive,shortfall_negative,labeled_total,unlabeled_total,"
           "heldout_weighted_f1,heldout_accuracy\n";
    char buf[64];
    for (const auto& rec : history) {
        out << rec.iteration << ',' << rec.trained_examples << ','
            << rec.selected_positive << ',' << rec.selected_negative << ','
            << rec.shortfall_positive << ',' << rec.shortfall_negative << ','
            << rec.labeled_total << ',' << rec.unlabeled_total << ',';
        if (rec.heldout) {
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f", rec.heldout->weighted_f1,
                          rec.heldout->accuracy);
            out << buf;
        } else {
            out << ',';
        }
        out << '\n';
    }
    if (!out.good()) throw IoError("write failed: " + path);
}

} // namespace selftrain
