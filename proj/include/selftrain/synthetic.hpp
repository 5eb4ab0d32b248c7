#pragma once

#include <cstdint>
#include <string>

#include "selftrain/corpus.hpp"

namespace selftrain {

// Parameters for the synthetic code-switched corpus generator, the
// desk-scale stand-in for real datasets. Each class draws tokens from a
// class-conditional vocabulary (partially shared between classes) in two
// languages; the per-utterance L2 token fraction is drawn from a clipped
// normal around the class mix mean, so classes can differ in how much L2
// they carry.
struct SyntheticSpec {
    size_t size = 1000;                // train + test together
    double class_prior_positive = 0.5; // fraction of positive gold labels
    size_t vocab_size_l1 = 200;
    size_t vocab_size_l2 = 200;
    double mix_mean_positive = 0.35; // mean L2 token fraction, positive class
    double mix_mean_negative = 0.7;
    size_t length_min = 4; // tokens per utterance
    size_t length_max = 16;
    double label_noise = 0.0; // probability of flipping a recorded gold label
    uint64_t seed = 42;

    void validate() const; // throws ConfigError
};

// Parses a SyntheticSpec from its JSON form:
//   {"size":N,"class_prior_positive":p,"vocab_size_l1":N,"vocab_size_l2":N,
//    "mix_mean_positive":m,"mix_mean_negative":m,"length_range":[lo,hi],
//    "label_noise":x,"seed":N}
// Missing fields keep their defaults.
SyntheticSpec parse_synthetic_spec(const std::string& json_text);

struct SyntheticCorpora {
    Corpus train;  // code-switched, gold-labeled
    Corpus test;   // disjoint 20% split with the same class balance
    Corpus source; // pure-L1 labeled data for pre-training the init model
};

// Deterministic in spec.seed: the same spec always produces byte-identical
// corpora.
SyntheticCorpora generate_synthetic(const SyntheticSpec& spec);

// Word prefixes for the two languages and the per-class vocabulary split,
// exposed so tests can recount class-indicative tokens independently.
namespace synth_vocab {
constexpr double indicative_fraction = 0.3; // leading share per class
constexpr double other_token_prob = 0.05;
constexpr double indicative_token_prob = 0.5;
constexpr double mix_stddev = 0.15;

std::string word(LangTag lang, size_t index);
// Class whose indicative vocabulary range contains this word, if any.
bool is_indicative_of(const std::string& surface, SentimentLabel label,
                      size_t vocab_size_l1, size_t vocab_size_l2);
} // namespace synth_vocab

} // namespace selftrain
