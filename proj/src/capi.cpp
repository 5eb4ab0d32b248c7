#include "selftrain.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include "json.hpp"

#include "selftrain/analysis.hpp"
#include "selftrain/backend.hpp"
#include "selftrain/corpus.hpp"
#include "selftrain/engine.hpp"
#include "selftrain/errors.hpp"
#include "selftrain/metrics.hpp"
#include "selftrain/selection.hpp"
#include "selftrain/synthetic.hpp"

using namespace selftrain;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct st_corpus {
    Corpus corpus;
};

namespace {

thread_local std::string g_last_error;

st_status fail(st_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Runs fn, translating the C++ error hierarchy into status codes.
template <typename Fn>
st_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        return fail(ST_ERR_PARSE, e.what());
    } catch (const ConfigError& e) {
        return fail(ST_ERR_CONFIG, e.what());
    } catch (const IoError& e) {
        return fail(ST_ERR_IO, e.what());
    } catch (const BackendLostError& e) {
        return fail(ST_ERR_BACKEND, e.what());
    } catch (const ProtocolError& e) {
        return fail(ST_ERR_BACKEND, e.what());
    } catch (const NumericError& e) {
        return fail(ST_ERR_NUMERIC, e.what());
    } catch (const AbortedError& e) {
        return fail(ST_ERR_ABORTED, e.what());
    } catch (const std::exception& e) {
        return fail(ST_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(ST_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::optional<uint64_t> seed_override_of(int use_override, int64_t value) {
    if (!use_override) return std::nullopt;
    return static_cast<uint64_t>(value);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

TagMapping tag_mapping_from_json(const char* tag_map_json) {
    TagMapping mapping;
    if (!tag_map_json) return mapping;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(tag_map_json);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid tag map JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("tag map must be a JSON object");
    mapping.map.clear();
    for (const auto& [key, value] : j.items()) {
        const auto tag = value.get<std::string>();
        if (tag == "L1") {
            mapping.map[key] = LangTag::L1;
        } else if (tag == "L2") {
            mapping.map[key] = LangTag::L2;
        } else if (tag == "O") {
            mapping.map[key] = LangTag::Other;
        } else {
            throw ConfigError("tag map value must be L1, L2 or O, got \"" + tag + "\"");
        }
    }
    return mapping;
}

// Pseudo-label export matched against corpus gold; shared by evaluate and
// analyze. Throws listing the first offending ids when resolution fails.
struct MatchedLabels {
    std::vector<PseudoLabel> labels;
    std::unordered_map<std::string, SentimentLabel> by_id;
    std::vector<SentimentLabel> gold;
    std::vector<SentimentLabel> pred;
};

MatchedLabels match_labels(const std::string& labels_path, const Corpus& corpus) {
    MatchedLabels m;
    m.labels = read_pseudo_labels(labels_path);
    if (m.labels.empty()) {
        throw ConfigError("pseudo-label file is empty: " + labels_path);
    }
    std::vector<std::string> unresolved;
    for (const auto& pl : m.labels) {
        const Utterance* u = corpus.find(pl.utterance_id);
        if (!u || !u->gold) {
            if (unresolved.size() < 10) unresolved.push_back(pl.utterance_id);
            continue;
        }
        m.by_id[pl.utterance_id] = pl.label;
        m.gold.push_back(*u->gold);
        m.pred.push_back(pl.label);
    }
    if (!unresolved.empty()) {
        std::string msg = "ids without gold labels in the corpus:";
        for (const auto& id : unresolved) msg += " " + id;
        throw ConfigError(msg);
    }
    return m;
}

ordered_json report_to_json(const ClassificationReport& rep) {
    auto class_json = [](const ClassScores& s) {
        return ordered_json{{"precision", s.precision},
                            {"recall", s.recall},
                            {"f1", s.f1},
                            {"support", s.support}};
    };
    ordered_json j;
    j["weighted_f1"] = rep.weighted_f1;
    j["accuracy"] = rep.accuracy;
    j["positive"] = class_json(rep.positive);
    j["negative"] = class_json(rep.negative);
    return j;
}

} // namespace

extern "C" {

const char* st_last_error(void) { return g_last_error.c_str(); }

void st_string_free(char* s) { std::free(s); }

uint32_t st_version(void) { return 10000; } // 1.0.0

st_status st_corpus_read(const char* path, st_corpus** out) {
    if (!path || !out) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        *out = new st_corpus{read_corpus_file(path)};
        return ST_OK;
    });
}

st_status st_corpus_read_jsonl(const char* path, st_corpus** out) {
    if (!path || !out) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        *out = new st_corpus{read_jsonl_file(path)};
        return ST_OK;
    });
}

st_status st_corpus_read_token_tagged(const char* path, const char* tag_map_json,
                                      st_corpus** out) {
    if (!path || !out) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        *out = new st_corpus{
            read_token_tagged_file(path, tag_mapping_from_json(tag_map_json))};
        return ST_OK;
    });
}

st_status st_corpus_write_jsonl(const st_corpus* corpus, const char* path) {
    if (!corpus || !path) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        write_jsonl_file(corpus->corpus, path);
        return ST_OK;
    });
}

st_status st_corpus_preprocess(const st_corpus* corpus, st_corpus** out,
                               size_t* url_tokens_removed, size_t* emptied_count) {
    if (!corpus || !out) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        auto result = preprocess(corpus->corpus);
        if (url_tokens_removed) *url_tokens_removed = result.stats.url_tokens_removed;
        if (emptied_count) *emptied_count = result.stats.emptied_ids.size();
        *out = new st_corpus{std::move(result.corpus)};
        return ST_OK;
    });
}

st_status st_corpus_filter_two_class(const st_corpus* corpus, st_corpus** out,
                                     size_t* removed_neutral) {
    if (!corpus || !out) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        auto result = filter_two_class(corpus->corpus);
        if (removed_neutral) *removed_neutral = result.removed_neutral;
        *out = new st_corpus{std::move(result.corpus)};
        return ST_OK;
    });
}

size_t st_corpus_size(const st_corpus* corpus) {
    return corpus ? corpus->corpus.size() : 0;
}

const char* st_corpus_id(const st_corpus* corpus, size_t index) {
    if (!corpus || index >= corpus->corpus.size()) return nullptr;
    return corpus->corpus.at(index).id.c_str();
}

const char* st_corpus_text(const st_corpus* corpus, size_t index) {
    if (!corpus || index >= corpus->corpus.size()) return nullptr;
    return corpus->corpus.at(index).text.c_str();
}

int st_corpus_gold(const st_corpus* corpus, size_t index) {
    if (!corpus || index >= corpus->corpus.size()) return -2;
    const auto& gold = corpus->corpus.at(index).gold;
    if (!gold) return -1;
    switch (*gold) {
        case SentimentLabel::Positive: return 0;
        case SentimentLabel::Negative: return 1;
        case SentimentLabel::Neutral: return 2;
    }
    return -2;
}

void st_corpus_free(st_corpus* corpus) { delete corpus; }

st_status st_synth_generate(const char* spec_json, int use_seed_override,
                            int64_t seed_override, const char* out_dir,
                            char** summary_json_out) {
    if (!spec_json || !out_dir) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        auto spec = parse_synthetic_spec(spec_json);
        if (const auto seed = seed_override_of(use_seed_override, seed_override)) {
            spec.seed = *seed;
        }
        const auto corpora = generate_synthetic(spec);
        ensure_dir(out_dir);
        const auto train_path = (fs::path(out_dir) / "train.jsonl").string();
        const auto test_path = (fs::path(out_dir) / "test.jsonl").string();
        const auto source_path = (fs::path(out_dir) / "source.jsonl").string();
        write_jsonl_file(corpora.train, train_path);
        write_jsonl_file(corpora.test, test_path);
        write_jsonl_file(corpora.source, source_path);
        if (summary_json_out) {
            ordered_json j;
            j["train"] = {{"path", train_path}, {"size", corpora.train.size()}};
            j["test"] = {{"path", test_path}, {"size", corpora.test.size()}};
            j["source"] = {{"path", source_path}, {"size", corpora.source.size()}};
            j["seed"] = spec.seed;
            *summary_json_out = dup_string(j.dump(2) + "\n");
        }
        return ST_OK;
    });
}

st_status st_run(const char* config_json, const st_corpus* corpus,
                 const st_corpus* heldout, int use_seed_override,
                 int64_t seed_override, const char* out_dir,
                 int progress_to_stderr, int* stop_reason_out,
                 char** report_json_out) {
    if (!config_json || !corpus || !out_dir) {
        return fail(ST_ERR_INVALID, "null argument");
    }
    return guarded([&] {
        const auto config = parse_run_config(
            config_json, seed_override_of(use_seed_override, seed_override));
        const auto prepared =
            filter_two_class(preprocess(corpus->corpus).corpus).corpus;
        std::optional<Corpus> heldout_prepared;
        if (heldout) {
            heldout_prepared =
                filter_two_class(preprocess(heldout->corpus).corpus).corpus;
        }

        auto backend = make_backend(config.backend);

        RunHooks hooks;
        hooks.warn = [](const std::string& msg) {
            std::cerr << "warning: " << msg << "\n";
        };
        if (progress_to_stderr) {
            hooks.on_iteration = [](const RunState&, const IterationRecord& rec) {
                std::cerr << "iteration " << rec.iteration << ": +"
                          << rec.selected_positive << " positive, +"
                          << rec.selected_negative << " negative, "
                          << rec.unlabeled_total << " unlabeled left";
                if (rec.heldout) {
                    char buf[48];
                    std::snprintf(buf, sizeof(buf), ", heldout F1 %.4f",
                                  rec.heldout->weighted_f1);
                    std::cerr << buf;
                }
                std::cerr << "\n";
            };
        }

        const auto result = run_to_completion(
            *backend, prepared,
            config, heldout_prepared ? &*heldout_prepared : nullptr, hooks);

        ensure_dir(out_dir);
        const auto labels_path = (fs::path(out_dir) / "pseudo_labels.jsonl").string();
        const auto metrics_path = (fs::path(out_dir) / "metrics.csv").string();
        const auto report_path = (fs::path(out_dir) / "run_report.json").string();
        export_pseudo_labels(result.state, labels_path);
        write_metrics_csv(result.state.history, metrics_path);
        // Artifact paths are relative to the report's own directory, so two
        // identical runs serialize identically wherever they land.
        const auto report =
            run_report_json(result, config, "pseudo_labels.jsonl", "metrics.csv");
        {
            std::ofstream out(report_path, std::ios::trunc);
            if (!out) throw IoError("cannot write run report: " + report_path);
            out << report;
        }

        if (stop_reason_out) {
            switch (result.stop_reason) {
                case StopReason::Exhausted: *stop_reason_out = ST_STOP_EXHAUSTED; break;
                case StopReason::RatioStopPositive:
                    *stop_reason_out = ST_STOP_RATIO_POSITIVE;
                    break;
                case StopReason::RatioStopNegative:
                    *stop_reason_out = ST_STOP_RATIO_NEGATIVE;
                    break;
                case StopReason::MaxIterations:
                    *stop_reason_out = ST_STOP_MAX_ITERATIONS;
                    break;
                case StopReason::NumericAbort:
                    *stop_reason_out = ST_STOP_NUMERIC_ABORT;
                    break;
                case StopReason::BackendLost:
                    *stop_reason_out = ST_STOP_BACKEND_LOST;
                    break;
            }
        }
        if (report_json_out) *report_json_out = dup_string(report);
        return ST_OK;
    });
}

st_status st_estimate_ratio(const st_corpus* corpus, size_t k, uint64_t seed,
                            st_annotator annotate, void* user,
                            char** estimate_json_out) {
    if (!corpus) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        Annotator fn;
        if (annotate) {
            fn = [&](const Utterance& u, size_t index,
                     size_t total) -> std::optional<SentimentLabel> {
                const int answer = annotate(user, u.text.c_str(), index, total);
                if (answer == 1) return SentimentLabel::Positive;
                if (answer == 0) return SentimentLabel::Negative;
                return std::nullopt;
            };
        } else {
            fn = gold_annotator();
        }
        const auto est = estimate_ratio(corpus->corpus, k, seed, fn);
        if (estimate_json_out) {
            ordered_json j;
            j["p_positive_hat"] = est.p_positive_hat;
            j["sample_size"] = est.sample_size;
            j["dataset_size"] = est.dataset_size;
            j["expected_positive"] = est.expected_positive;
            j["expected_negative"] = est.expected_negative;
            *estimate_json_out = dup_string(j.dump(2) + "\n");
        }
        return ST_OK;
    });
}

st_status st_evaluate(const char* labels_path, const st_corpus* corpus,
                      const char* curve_csv_path, char** report_json_out) {
    if (!labels_path || !corpus) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        const auto matched = match_labels(labels_path, corpus->corpus);
        const auto rep = score(matched.gold, matched.pred);
        if (curve_csv_path) {
            std::vector<LabeledAt> labeled;
            labeled.reserve(matched.labels.size());
            for (const auto& pl : matched.labels) {
                labeled.push_back({pl.utterance_id, pl.label, pl.iteration});
            }
            const auto curve = algorithmic_curve(labeled, corpus->corpus);
            std::ofstream out(curve_csv_path, std::ios::trunc);
            if (!out) throw IoError("cannot write curve file: " +
                                    std::string(curve_csv_path));
            write_curve_csv(curve, out);
        }
        if (report_json_out) {
            auto j = report_to_json(rep);
            j["n_scored"] = matched.gold.size();
            *report_json_out = dup_string(j.dump(2) + "\n");
        }
        return ST_OK;
    });
}

st_status st_analyze(const st_corpus* corpus, const char* labels_path,
                     const char* out_dir, char** summary_json_out) {
    if (!corpus || !out_dir) return fail(ST_ERR_INVALID, "null argument");
    return guarded([&] {
        ensure_dir(out_dir);
        const Corpus& c = corpus->corpus;

        std::unordered_map<std::string, SentimentLabel> gold_labels;
        for (const auto& u : c.utterances()) {
            if (u.gold && *u.gold != SentimentLabel::Neutral) {
                gold_labels[u.id] = *u.gold;
            }
        }

        ordered_json summary;
        summary["total"] = c.size();
        size_t undefined = 0;
        for (const auto& u : c.utterances()) {
            if (!token_ratio(u)) ++undefined;
        }
        summary["undefined_htr"] = undefined;
        summary["gold_labeled"] = gold_labels.size();

        std::optional<DistributionSummary> gold_dist;
        if (!gold_labels.empty()) {
            gold_dist = prediction_distribution(c, gold_labels);
            std::ofstream out(fs::path(out_dir) / "histogram_gold.csv",
                              std::ios::trunc);
            write_distribution_csv(*gold_dist, out);
        }

        if (labels_path) {
            const auto matched = match_labels(labels_path, c);
            const auto pred_dist = prediction_distribution(c, matched.by_id);
            {
                std::ofstream out(fs::path(out_dir) / "histogram_pred.csv",
                                  std::ios::trunc);
                write_distribution_csv(pred_dist, out);
            }
            const auto perf = bucket_performance(c, matched.by_id);
            {
                std::ofstream out(fs::path(out_dir) / "buckets.csv", std::ios::trunc);
                write_bucket_csv(perf, out);
            }
            summary["scored"] = matched.gold.size();
            summary["nonempty_buckets"] = perf.buckets.size();
            if (gold_dist && gold_dist->total_defined() > 0 &&
                pred_dist.total_defined() > 0) {
                summary["tv_distance"] = tv_distance(pred_dist, *gold_dist);
            }
        }
        if (summary_json_out) {
            *summary_json_out = dup_string(summary.dump(2) + "\n");
        }
        return ST_OK;
    });
}

} // extern "C"
