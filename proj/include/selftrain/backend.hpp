#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "selftrain/corpus.hpp"

namespace selftrain {

// Two-class probability vector; entries in [0,1], summing to 1 within 1e-6.
struct ProbVector {
    double p_positive = 0.5;
    double p_negative = 0.5;

    double confidence() const {
        return p_positive >= p_negative ? p_positive : p_negative;
    }
    // Exact ties break toward Positive.
    SentimentLabel argmax() const {
        return p_positive >= p_negative ? SentimentLabel::Positive
                                        : SentimentLabel::Negative;
    }
    void validate() const; // throws ProtocolError when malformed
};

struct Prediction {
    std::string utterance_id;
    ProbVector probs;
    SentimentLabel predicted = SentimentLabel::Positive;
    double confidence = 0.5;
};

Prediction make_prediction(std::string utterance_id, ProbVector probs);

struct TrainExample {
    std::string utterance_id;
    std::string text;
    SentimentLabel label = SentimentLabel::Positive; // Positive or Negative
};

struct BackendConfig {
    double learning_rate = 0.1; // the recorded external reference is 2e-5
    size_t batch_size = 16;     // predict chunk size for external backends
    size_t hash_dim = size_t{1} << 18;
    int ngram_max = 2; // 1 = unigrams only, 2 = unigrams + bigrams
    uint64_t seed = 42;

    void validate() const; // throws ConfigError
};

// The classifier behind the loop: batch probability prediction plus
// single-epoch fine-tuning. predict_batch never mutates the model.
class ClassifierBackend {
public:
    virtual ~ClassifierBackend() = default;

    virtual std::vector<Prediction> predict_batch(
        std::span<const Utterance> utterances) = 0;

    // One SGD pass per epoch over the examples. The loop always calls this
    // with epochs = 1; pre-training may use more.
    virtual void train(std::span<const TrainExample> examples, size_t epochs) = 0;

    virtual std::string name() const = 0;
};

// Hashed feature multiset: (index, count) pairs sorted by index, plus an
// implicit always-on bias feature.
struct FeatureVec {
    std::vector<std::pair<uint32_t, double>> indexed;

    size_t active_count() const { return indexed.size() + 1; } // + bias
};

// Word unigrams (and bigrams when ngram_max = 2) over token surfaces, hashed
// with 64-bit FNV-1a modulo hash_dim. Deterministic; empty input yields just
// the bias feature.
FeatureVec featurize(const Utterance& u, const BackendConfig& config);
FeatureVec featurize_text(const std::string& text, const BackendConfig& config);

uint64_t fnv1a64(std::string_view bytes);

// Two-class linear softmax model over hashed n-gram features. Plays the
// pre-trained initialization model's role at desk scale: supports zero-shot
// prediction after pre-training on a labeled source corpus, then incremental
// one-epoch fine-tuning on pseudo-labels.
class BuiltinBackend final : public ClassifierBackend {
public:
    explicit BuiltinBackend(BackendConfig config);

    std::vector<Prediction> predict_batch(
        std::span<const Utterance> utterances) override;
    void train(std::span<const TrainExample> examples, size_t epochs) override;
    std::string name() const override { return "builtin"; }

    const BackendConfig& config() const { return config_; }

    ProbVector predict_features(const FeatureVec& features) const;

    // Cross-entropy of the softmax output for one example.
    double example_loss(const FeatureVec& features, SentimentLabel label) const;

    // Analytic gradient of example_loss with respect to the weights the
    // example touches. Entries are ((class, index), d loss / d weight);
    // index == bias_index() addresses the class bias.
    std::vector<std::pair<std::pair<size_t, size_t>, double>> example_gradient(
        const FeatureVec& features, SentimentLabel label) const;

    // Mean example_loss over a set; used by tests and diagnostics.
    double mean_loss(std::span<const TrainExample> examples) const;

    size_t bias_index() const { return config_.hash_dim; }
    double weight(size_t cls, size_t index) const;
    void set_weight(size_t cls, size_t index, double value);

    // Convenience: supervised pre-training on a gold-labeled corpus.
    void pretrain(const Corpus& corpus, size_t epochs);

private:
    void sgd_step(const FeatureVec& features, SentimentLabel label);
    double class_score(size_t cls, const FeatureVec& features) const;

    BackendConfig config_;
    // Per class: hash_dim weights followed by the bias term.
    std::vector<double> weights_[2];
    std::mt19937_64 rng_;
};

TrainExample to_train_example(const Utterance& u, SentimentLabel label);

} // namespace selftrain
