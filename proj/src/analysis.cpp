#include "selftrain/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "selftrain/errors.hpp"

namespace selftrain {

std::optional<double> token_ratio(const Utterance& u) {
    size_t l1 = 0, l2 = 0;
    for (const auto& t : u.tokens) {
        if (t.tag == LangTag::L1) ++l1;
        if (t.tag == LangTag::L2) ++l2;
    }
    const size_t words = l1 + l2;
    if (words == 0) return std::nullopt;
    return static_cast<double>(l2) / static_cast<double>(words);
}

size_t htr_bucket(double ratio) {
    if (ratio < 0.0 || ratio > 1.0) {
        throw ConfigError("token ratio out of [0,1]: " + std::to_string(ratio));
    }
    const auto bucket = static_cast<size_t>(ratio * 10.0);
    return bucket > 9 ? 9 : bucket;
}

namespace {

// Bucket straight from token counts, sidestepping float rounding.
std::optional<size_t> bucket_of(const Utterance& u) {
    size_t l1 = 0, l2 = 0;
    for (const auto& t : u.tokens) {
        if (t.tag == LangTag::L1) ++l1;
        if (t.tag == LangTag::L2) ++l2;
    }
    const size_t words = l1 + l2;
    if (words == 0) return std::nullopt;
    const size_t bucket = 10 * l2 / words;
    return bucket > 9 ? 9 : bucket;
}

} // namespace

BucketPerformance bucket_performance(
    const Corpus& corpus,
    const std::unordered_map<std::string, SentimentLabel>& predictions) {
    std::array<std::vector<SentimentLabel>, kHtrBuckets> gold_by_bucket;
    std::array<std::vector<SentimentLabel>, kHtrBuckets> pred_by_bucket;
    BucketPerformance perf;
    for (const auto& u : corpus.utterances()) {
        if (!u.gold) continue;
        auto it = predictions.find(u.id);
        if (it == predictions.end()) continue;
        const auto bucket = bucket_of(u);
        if (!bucket) {
            ++perf.undefined_count;
            continue;
        }
        gold_by_bucket[*bucket].push_back(*u.gold);
        pred_by_bucket[*bucket].push_back(it->second);
    }
    for (size_t b = 0; b < kHtrBuckets; ++b) {
        if (gold_by_bucket[b].empty()) continue;
        BucketReport br;
        br.bucket = b;
        br.count = gold_by_bucket[b].size();
        br.report = score(gold_by_bucket[b], pred_by_bucket[b]);
        perf.buckets.push_back(std::move(br));
    }
    return perf;
}

size_t DistributionSummary::total_defined() const {
    size_t total = 0;
    for (size_t b = 0; b < kHtrBuckets; ++b) total += positive[b] + negative[b];
    return total;
}

DistributionSummary prediction_distribution(
    const Corpus& corpus,
    const std::unordered_map<std::string, SentimentLabel>& labels) {
    DistributionSummary dist;
    for (const auto& u : corpus.utterances()) {
        auto it = labels.find(u.id);
        if (it == labels.end()) continue;
        if (it->second == SentimentLabel::Neutral) {
            throw ConfigError("neutral label in distribution analysis: " + u.id);
        }
        const auto bucket = bucket_of(u);
        if (!bucket) {
            ++dist.undefined_count;
            continue;
        }
        if (it->second == SentimentLabel::Positive) {
            ++dist.positive[*bucket];
        } else {
            ++dist.negative[*bucket];
        }
    }
    return dist;
}

double tv_distance(const DistributionSummary& a, const DistributionSummary& b) {
    const auto ta = static_cast<double>(a.total_defined());
    const auto tb = static_cast<double>(b.total_defined());
    if (ta == 0.0 || tb == 0.0) {
        throw ConfigError("tv_distance over an empty distribution");
    }
    double sum = 0.0;
    for (size_t i = 0; i < kHtrBuckets; ++i) {
        sum += std::abs(static_cast<double>(a.positive[i]) / ta -
                        static_cast<double>(b.positive[i]) / tb);
        sum += std::abs(static_cast<double>(a.negative[i]) / ta -
                        static_cast<double>(b.negative[i]) / tb);
    }
    return 0.5 * sum;
}

ClasswiseAccuracy classwise_accuracy(const std::vector<SentimentLabel>& gold,
                                     const std::vector<SentimentLabel>& pred) {
    if (gold.size() != pred.size()) {
        throw ConfigError("gold/pred length mismatch");
    }
    size_t pos_total = 0, pos_hit = 0, neg_total = 0, neg_hit = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == SentimentLabel::Positive) {
            ++pos_total;
            if (pred[i] == SentimentLabel::Positive) ++pos_hit;
        } else if (gold[i] == SentimentLabel::Negative) {
            ++neg_total;
            if (pred[i] == SentimentLabel::Negative) ++neg_hit;
        } else {
            throw ConfigError("neutral gold label in classwise accuracy");
        }
    }
    ClasswiseAccuracy acc;
    if (pos_total > 0) {
        acc.positive = static_cast<double>(pos_hit) / static_cast<double>(pos_total);
    }
    if (neg_total > 0) {
        acc.negative = static_cast<double>(neg_hit) / static_cast<double>(neg_total);
    }
    return acc;
}

void write_bucket_csv(const BucketPerformance& perf, std::ostream& out) {
    out << "bucket_lo,count,weighted_f1,acc_positive,acc_negative\n";
    char buf[160];
    for (const auto& br : perf.buckets) {
        std::snprintf(buf, sizeof(buf), "%.1f,%zu,%.6f,%.6f,%.6f\n",
                      static_cast<double>(br.bucket) / 10.0, br.count,
                      br.report.weighted_f1, br.report.positive.recall,
                      br.report.negative.recall);
        out << buf;
    }
}

void write_distribution_csv(const DistributionSummary& dist, std::ostream& out) {
    out << "bucket_lo,count_positive,count_negative\n";
    char buf[96];
    for (size_t b = 0; b < kHtrBuckets; ++b) {
        std::snprintf(buf, sizeof(buf), "%.1f,%zu,%zu\n",
                      static_cast<double>(b) / 10.0, dist.positive[b],
                      dist.negative[b]);
        out << buf;
    }
}

} // namespace selftrain
