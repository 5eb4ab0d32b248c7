#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "selftrain/corpus.hpp"
#include "selftrain/metrics.hpp"

namespace selftrain {

// L2 token ratio: (#L2 tokens) / (#L1 + #L2 tokens). Other-tagged tokens
// count on neither side. Undefined (nullopt) when the utterance has no
// L1/L2 tokens at all.
std::optional<double> token_ratio(const Utterance& u);

// Bucket index 0..9 for a defined ratio; bucket i covers
// [i/10, i/10 + 0.1), with the last bucket closed at 1.0.
size_t htr_bucket(double ratio);

inline constexpr size_t kHtrBuckets = 10;

struct BucketReport {
    size_t bucket = 0; // bucket_lo = bucket / 10.0
    size_t count = 0;
    ClassificationReport report;
};

struct BucketPerformance {
    std::vector<BucketReport> buckets; // nonempty buckets only, ascending
    size_t undefined_count = 0;        // utterances with no defined ratio
};

// Partitions gold-bearing utterances by token-ratio bucket and scores the
// predictions inside each bucket. `predictions` maps utterance id to the
// predicted label; utterances without a prediction or gold are skipped.
BucketPerformance bucket_performance(
    const Corpus& corpus,
    const std::unordered_map<std::string, SentimentLabel>& predictions);

// Per-class histogram over token-ratio buckets.
struct DistributionSummary {
    std::array<size_t, kHtrBuckets> positive{};
    std::array<size_t, kHtrBuckets> negative{};
    size_t undefined_count = 0;

    size_t total_defined() const;
};

// Histogram of the given labels (gold or predicted) over buckets. Utterances
// missing from `labels` are skipped; Neutral labels are rejected.
DistributionSummary prediction_distribution(
    const Corpus& corpus,
    const std::unordered_map<std::string, SentimentLabel>& labels);

// Total-variation distance between the two (class, bucket) joint
// distributions, each normalized over its defined mass. 0 for identical
// summaries, 1 for disjoint ones.
double tv_distance(const DistributionSummary& a, const DistributionSummary& b);

struct ClasswiseAccuracy {
    std::optional<double> positive; // recall on gold-Positive items
    std::optional<double> negative; // absent when the class has no gold items
};

ClasswiseAccuracy classwise_accuracy(const std::vector<SentimentLabel>& gold,
                                     const std::vector<SentimentLabel>& pred);

// CSV: bucket_lo,count,weighted_f1,acc_positive,acc_negative
void write_bucket_csv(const BucketPerformance& perf, std::ostream& out);
// CSV: bucket_lo,count_positive,count_negative
void write_distribution_csv(const DistributionSummary& dist, std::ostream& out);

} // namespace selftrain
