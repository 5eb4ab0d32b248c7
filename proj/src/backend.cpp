#include "selftrain/backend.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selftrain/errors.hpp"

namespace selftrain {

void ProbVector::validate() const {
    if (!(p_positive >= 0.0 && p_positive <= 1.0) ||
        !(p_negative >= 0.0 && p_negative <= 1.0)) {
        throw ProtocolError("probability out of [0,1]");
    }
    if (std::abs(p_positive + p_negative - 1.0) > 1e-6) {
        throw ProtocolError("probability pair does not sum to 1");
    }
}

Prediction make_prediction(std::string utterance_id, ProbVector probs) {
    probs.validate();
    Prediction p;
    p.utterance_id = std::move(utterance_id);
    p.probs = probs;
    p.predicted = probs.argmax();
    p.confidence = probs.confidence();
    return p;
}

void BackendConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
    if (hash_dim < (size_t{1} << 10)) throw ConfigError("hash_dim must be >= 1024");
    if ((hash_dim & (hash_dim - 1)) != 0) {
        throw ConfigError("hash_dim must be a power of two");
    }
    if (ngram_max != 1 && ngram_max != 2) throw ConfigError("ngram_max must be 1 or 2");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t hash = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

namespace {

FeatureVec featurize_surfaces(std::span<const std::string> surfaces,
                              const BackendConfig& config) {
    std::vector<uint32_t> raw;
    raw.reserve(surfaces.size() * (config.ngram_max == 2 ? 2 : 1));
    for (size_t i = 0; i < surfaces.size(); ++i) {
        raw.push_back(static_cast<uint32_t>(fnv1a64(surfaces[i]) % config.hash_dim));
        if (config.ngram_max == 2 && i + 1 < surfaces.size()) {
            raw.push_back(static_cast<uint32_t>(
                fnv1a64(surfaces[i] + "_" + surfaces[i + 1]) % config.hash_dim));
        }
    }
    std::sort(raw.begin(), raw.end());
    FeatureVec fv;
    for (size_t i = 0; i < raw.size();) {
        size_t j = i;
        while (j < raw.size() && raw[j] == raw[i]) ++j;
        fv.indexed.emplace_back(raw[i], static_cast<double>(j - i));
        i = j;
    }
    return fv;
}

} // namespace

FeatureVec featurize(const Utterance& u, const BackendConfig& config) {
    std::vector<std::string> surfaces;
    surfaces.reserve(u.tokens.size());
    for (const auto& t : u.tokens) surfaces.push_back(t.surface);
    return featurize_surfaces(surfaces, config);
}

FeatureVec featurize_text(const std::string& text, const BackendConfig& config) {
    std::vector<std::string> surfaces;
    std::istringstream in(text);
    std::string word;
    while (in >> word) surfaces.push_back(word);
    return featurize_surfaces(surfaces, config);
}

BuiltinBackend::BuiltinBackend(BackendConfig config)
    : config_(config), rng_(config.seed) {
    config_.validate();
    weights_[0].assign(config_.hash_dim + 1, 0.0);
    weights_[1].assign(config_.hash_dim + 1, 0.0);
}

double BuiltinBackend::class_score(size_t cls, const FeatureVec& features) const {
    const auto& w = weights_[cls];
    double score = w[config_.hash_dim]; // bias
    for (const auto& [index, count] : features.indexed) {
        score += w[index] * count;
    }
    return score;
}

ProbVector BuiltinBackend::predict_features(const FeatureVec& features) const {
    const double z_pos = class_score(0, features);
    const double z_neg = class_score(1, features);
    if (!std::isfinite(z_pos) || !std::isfinite(z_neg)) {
        throw NumericError("non-finite class score");
    }
    // Stable two-class softmax.
    const double m = std::max(z_pos, z_neg);
    const double e_pos = std::exp(z_pos - m);
    const double e_neg = std::exp(z_neg - m);
    ProbVector p;
    p.p_positive = e_pos / (e_pos + e_neg);
    p.p_negative = e_neg / (e_pos + e_neg);
    return p;
}

std::vector<Prediction> BuiltinBackend::predict_batch(
    std::span<const Utterance> utterances) {
    std::vector<Prediction> out;
    out.reserve(utterances.size());
    for (const auto& u : utterances) {
        out.push_back(
            make_prediction(u.id, predict_features(featurize(u, config_))));
    }
    return out;
}

double BuiltinBackend::example_loss(const FeatureVec& features,
                                    SentimentLabel label) const {
    const auto p = predict_features(features);
    const double py =
        label == SentimentLabel::Positive ? p.p_positive : p.p_negative;
    return -std::log(std::max(py, 1e-300));
}

std::vector<std::pair<std::pair<size_t, size_t>, double>>
BuiltinBackend::example_gradient(const FeatureVec& features,
                                 SentimentLabel label) const {
    // d loss / d z_c = p_c - 1[c == label]; d z_c / d w_c[i] = count_i.
    const auto p = predict_features(features);
    const double g[2] = {
        p.p_positive - (label == SentimentLabel::Positive ? 1.0 : 0.0),
        p.p_negative - (label == SentimentLabel::Negative ? 1.0 : 0.0)};
    std::vector<std::pair<std::pair<size_t, size_t>, double>> grad;
    grad.reserve(2 * (features.indexed.size() + 1));
    for (size_t cls = 0; cls < 2; ++cls) {
        for (const auto& [index, count] : features.indexed) {
            grad.push_back({{cls, index}, g[cls] * count});
        }
        grad.push_back({{cls, bias_index()}, g[cls]});
    }
    return grad;
}

void BuiltinBackend::sgd_step(const FeatureVec& features, SentimentLabel label) {
    const auto p = predict_features(features);
    const double g[2] = {
        p.p_positive - (label == SentimentLabel::Positive ? 1.0 : 0.0),
        p.p_negative - (label == SentimentLabel::Negative ? 1.0 : 0.0)};
    for (size_t cls = 0; cls < 2; ++cls) {
        auto& w = weights_[cls];
        const double step = config_.learning_rate * g[cls];
        for (const auto& [index, count] : features.indexed) {
            w[index] -= step * count;
            if (!std::isfinite(w[index])) {
                throw NumericError("non-finite weight after SGD update");
            }
        }
        w[config_.hash_dim] -= step;
        if (!std::isfinite(w[config_.hash_dim])) {
            throw NumericError("non-finite bias after SGD update");
        }
    }
}

void BuiltinBackend::train(std::span<const TrainExample> examples, size_t epochs) {
    if (examples.empty()) return;
    std::vector<std::pair<FeatureVec, SentimentLabel>> prepared;
    prepared.reserve(examples.size());
    for (const auto& ex : examples) {
        if (ex.label == SentimentLabel::Neutral) {
            throw ConfigError("neutral label in a training example");
        }
        prepared.emplace_back(featurize_text(ex.text, config_), ex.label);
    }
    std::vector<size_t> order(prepared.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t epoch = 0; epoch < epochs; ++epoch) {
        // Seeded Fisher-Yates; rng_ state advances across calls so repeated
        // fine-tune steps see fresh orders while staying deterministic.
        for (size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng_() % i]);
        }
        for (const size_t idx : order) {
            sgd_step(prepared[idx].first, prepared[idx].second);
        }
    }
}

double BuiltinBackend::mean_loss(std::span<const TrainExample> examples) const {
    if (examples.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& ex : examples) {
        sum += example_loss(featurize_text(ex.text, config_), ex.label);
    }
    return sum / static_cast<double>(examples.size());
}

double BuiltinBackend::weight(size_t cls, size_t index) const {
    return weights_[cls].at(index);
}

void BuiltinBackend::set_weight(size_t cls, size_t index, double value) {
    weights_[cls].at(index) = value;
}

void BuiltinBackend::pretrain(const Corpus& corpus, size_t epochs) {
    std::vector<TrainExample> examples;
    examples.reserve(corpus.size());
    for (const auto& u : corpus.utterances()) {
        if (!u.gold) {
            throw ConfigError("pre-training corpus has unlabeled utterance " + u.id);
        }
        if (*u.gold == SentimentLabel::Neutral) {
            throw ConfigError("pre-training corpus has a neutral label: " + u.id);
        }
        examples.push_back(to_train_example(u, *u.gold));
    }
    train(examples, epochs);
}

TrainExample to_train_example(const Utterance& u, SentimentLabel label) {
    return TrainExample{u.id, u.text, label};
}

} // namespace selftrain
