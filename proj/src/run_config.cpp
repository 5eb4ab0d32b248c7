#include <memory>

#include "json.hpp"

#include "selftrain/engine.hpp"
#include "selftrain/errors.hpp"
#include "selftrain/external_backend.hpp"

namespace selftrain {

using nlohmann::json;

namespace {

SelectionPolicy parse_strategy(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("strategy must be an object with a \"kind\"");
    }
    const auto kind = j["kind"].get<std::string>();
    SelectionPolicy policy;
    if (kind == "vanilla") {
        policy.kind = SelectionPolicy::Kind::Vanilla;
    } else if (kind == "ratio") {
        policy.kind = SelectionPolicy::Kind::Ratio;
        if (!j.contains("positive_fraction")) {
            throw ConfigError("ratio strategy needs positive_fraction");
        }
        policy.positive_fraction = j["positive_fraction"].get<double>();
    } else if (kind == "scheduled") {
        policy.kind = SelectionPolicy::Kind::Scheduled;
        if (!j.contains("schedule") || !j["schedule"].is_array()) {
            throw ConfigError("scheduled strategy needs a schedule array");
        }
        for (const auto& n : j["schedule"]) {
            policy.schedule.push_back(n.get<size_t>());
        }
        SelectionPolicy inner;
        const auto inner_kind = j.value("inner", "vanilla");
        if (inner_kind == "vanilla") {
            inner.kind = SelectionPolicy::Kind::Vanilla;
        } else if (inner_kind == "ratio") {
            inner.kind = SelectionPolicy::Kind::Ratio;
            if (!j.contains("positive_fraction")) {
                throw ConfigError("scheduled ratio strategy needs positive_fraction");
            }
            inner.positive_fraction = j["positive_fraction"].get<double>();
        } else {
            throw ConfigError("scheduled inner must be vanilla or ratio");
        }
        policy.inner = std::make_shared<const SelectionPolicy>(std::move(inner));
    } else if (kind == "htr-filtered") {
        policy.kind = SelectionPolicy::Kind::HtrFiltered;
        if (!j.contains("min_l2_ratio")) {
            throw ConfigError("htr-filtered strategy needs min_l2_ratio");
        }
        policy.min_l2_ratio = j["min_l2_ratio"].get<double>();
        if (!j.contains("inner")) {
            throw ConfigError("htr-filtered strategy needs an inner strategy");
        }
        policy.inner =
            std::make_shared<const SelectionPolicy>(parse_strategy(j["inner"]));
    } else {
        throw ConfigError("unknown strategy kind \"" + kind + "\"");
    }
    if (j.contains("n_total")) policy.n_total = j["n_total"].get<size_t>();
    return policy;
}

RatioEstimate parse_estimate(const json& j) {
    RatioEstimate est;
    if (!j.contains("p_positive_hat") || !j.contains("dataset_size")) {
        throw ConfigError("ratio_estimate needs p_positive_hat and dataset_size");
    }
    est.p_positive_hat = j["p_positive_hat"].get<double>();
    if (est.p_positive_hat < 0.0 || est.p_positive_hat > 1.0) {
        throw ConfigError("p_positive_hat must be in [0,1]");
    }
    est.dataset_size = j["dataset_size"].get<size_t>();
    est.sample_size = j.value("sample_size", size_t{0});
    if (j.contains("expected_positive")) {
        est.expected_positive = j["expected_positive"].get<size_t>();
        est.expected_negative =
            j.value("expected_negative", est.dataset_size - est.expected_positive);
    } else {
        est.expected_positive = static_cast<size_t>(
            est.p_positive_hat * static_cast<double>(est.dataset_size) + 0.5);
        est.expected_negative = est.dataset_size - est.expected_positive;
    }
    if (est.expected_positive + est.expected_negative != est.dataset_size) {
        throw ConfigError("expected class totals must sum to dataset_size");
    }
    return est;
}

BackendSpec parse_backend(const json& j, uint64_t run_seed) {
    BackendSpec spec;
    spec.config.seed = run_seed;
    if (j.is_null()) return spec;
    if (!j.is_object()) throw ConfigError("backend must be an object");
    const auto kind = j.value("kind", "builtin");
    if (kind == "builtin") {
        spec.kind = BackendSpec::Kind::Builtin;
    } else if (kind == "external") {
        spec.kind = BackendSpec::Kind::External;
        if (!j.contains("cmd") || !j["cmd"].is_array() || j["cmd"].empty()) {
            throw ConfigError("external backend needs a nonempty cmd array");
        }
        for (const auto& arg : j["cmd"]) {
            spec.command.push_back(arg.get<std::string>());
        }
    } else {
        throw ConfigError("unknown backend kind \"" + kind + "\"");
    }
    if (j.contains("learning_rate")) {
        spec.config.learning_rate = j["learning_rate"].get<double>();
    }
    if (j.contains("batch_size")) spec.config.batch_size = j["batch_size"].get<size_t>();
    if (j.contains("hash_dim")) spec.config.hash_dim = j["hash_dim"].get<size_t>();
    if (j.contains("ngram_max")) spec.config.ngram_max = j["ngram_max"].get<int>();
    if (j.contains("seed")) spec.config.seed = j["seed"].get<uint64_t>();
    if (j.contains("pretrain_corpus")) {
        spec.pretrain_corpus = j["pretrain_corpus"].get<std::string>();
    }
    if (j.contains("pretrain_epochs")) {
        spec.pretrain_epochs = j["pretrain_epochs"].get<size_t>();
    }
    return spec;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text,
                           std::optional<uint64_t> seed_override) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid run config JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");

    RunConfig config;
    try {
        if (j.contains("seed")) config.seed = j["seed"].get<uint64_t>();
        if (seed_override) config.seed = *seed_override;
        if (j.contains("strategy")) config.strategy = parse_strategy(j["strategy"]);
        if (j.contains("selection_percent")) {
            config.selection_percent = j["selection_percent"].get<double>();
        }
        if (j.contains("epochs_per_iteration")) {
            config.epochs_per_iteration = j["epochs_per_iteration"].get<size_t>();
        }
        if (j.contains("max_iterations") && !j["max_iterations"].is_null()) {
            config.max_iterations = j["max_iterations"].get<size_t>();
        }
        if (j.contains("ratio_estimate") && !j["ratio_estimate"].is_null()) {
            config.ratio_estimate = parse_estimate(j["ratio_estimate"]);
        }
        if (j.contains("cumulative_retrain")) {
            config.cumulative_retrain = j["cumulative_retrain"].get<bool>();
        }
        config.backend = parse_backend(j.value("backend", json()), config.seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid run config field: ") + e.what());
    }
    config.validate();
    return config;
}

std::unique_ptr<ClassifierBackend> make_backend(const BackendSpec& spec) {
    if (spec.kind == BackendSpec::Kind::External) {
        return std::make_unique<ExternalBackend>(spec.command, spec.config);
    }
    auto backend = std::make_unique<BuiltinBackend>(spec.config);
    if (!spec.pretrain_corpus.empty()) {
        const auto source = read_corpus_file(spec.pretrain_corpus);
        const auto prepared = preprocess(source).corpus;
        backend->pretrain(prepared, spec.pretrain_epochs);
    }
    return backend;
}

} // namespace selftrain
