#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "selftrain/corpus.hpp"

namespace selftrain {

// 2x2 confusion counts indexed [gold][pred] with Positive = 0, Negative = 1.
struct ConfusionMatrix {
    size_t counts[2][2] = {{0, 0}, {0, 0}};

    size_t total() const {
        return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
    }
};

// gold/pred label sequences must be equal-length, nonempty and two-class.
ConfusionMatrix confusion_matrix(const std::vector<SentimentLabel>& gold,
                                 const std::vector<SentimentLabel>& pred);

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    size_t support = 0;
};

// Weighted F1 / accuracy report. Zero denominators score 0, matching the
// usual classification-report convention.
struct ClassificationReport {
    ClassScores positive;
    ClassScores negative;
    double weighted_f1 = 0.0;
    double accuracy = 0.0;
};

ClassificationReport report(const ConfusionMatrix& cm);

ClassificationReport score(const std::vector<SentimentLabel>& gold,
                           const std::vector<SentimentLabel>& pred);

// One point of the algorithmic-perspective curve: the cumulative pseudo-label
// pool after some iteration, scored against gold.
struct CurvePoint {
    size_t iteration = 0;
    size_t n_selected = 0; // cumulative
    double weighted_f1 = 0.0;
    double acc_positive = 0.0; // per-class recall
    double acc_negative = 0.0;
};

// A pseudo-label paired with the iteration that produced it.
struct LabeledAt {
    std::string utterance_id;
    SentimentLabel label = SentimentLabel::Positive;
    size_t iteration = 0;
};

// Scores the cumulative pool after each iteration against the corpus gold.
// Throws if a labeled id is missing from the corpus or lacks gold.
std::vector<CurvePoint> algorithmic_curve(const std::vector<LabeledAt>& labels,
                                          const Corpus& gold_corpus);

// CSV with header n_selected,weighted_f1,acc_positive,acc_negative.
void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out);

} // namespace selftrain
