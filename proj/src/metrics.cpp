#include "selftrain/metrics.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "selftrain/errors.hpp"

namespace selftrain {

namespace {

size_t class_index(SentimentLabel label) {
    switch (label) {
        case SentimentLabel::Positive: return 0;
        case SentimentLabel::Negative: return 1;
        case SentimentLabel::Neutral: break;
    }
    throw ConfigError("neutral label in a two-class scoring call");
}

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

} // namespace

ConfusionMatrix confusion_matrix(const std::vector<SentimentLabel>& gold,
                                 const std::vector<SentimentLabel>& pred) {
    if (gold.size() != pred.size()) {
        throw ConfigError("gold/pred length mismatch: " +
                          std::to_string(gold.size()) + " vs " +
                          std::to_string(pred.size()));
    }
    if (gold.empty()) throw ConfigError("cannot score an empty label sequence");
    ConfusionMatrix cm;
    for (size_t i = 0; i < gold.size(); ++i) {
        ++cm.counts[class_index(gold[i])][class_index(pred[i])];
    }
    return cm;
}

ClassificationReport report(const ConfusionMatrix& cm) {
    ClassificationReport rep;
    const double total = static_cast<double>(cm.total());
    if (total == 0.0) throw ConfigError("cannot report on an empty confusion matrix");

    ClassScores* per_class[2] = {&rep.positive, &rep.negative};
    for (size_t c = 0; c < 2; ++c) {
        const double tp = static_cast<double>(cm.counts[c][c]);
        const double fn = static_cast<double>(cm.counts[c][1 - c]);
        const double fp = static_cast<double>(cm.counts[1 - c][c]);
        auto& s = *per_class[c];
        s.support = cm.counts[c][0] + cm.counts[c][1];
        s.precision = safe_div(tp, tp + fp);
        s.recall = safe_div(tp, tp + fn);
        s.f1 = safe_div(2.0 * s.precision * s.recall, s.precision + s.recall);
    }
    rep.weighted_f1 =
        (static_cast<double>(rep.positive.support) * rep.positive.f1 +
         static_cast<double>(rep.negative.support) * rep.negative.f1) /
        total;
    rep.accuracy =
        (static_cast<double>(cm.counts[0][0]) + static_cast<double>(cm.counts[1][1])) /
        total;
    return rep;
}

ClassificationReport score(const std::vector<SentimentLabel>& gold,
                           const std::vector<SentimentLabel>& pred) {
    return report(confusion_matrix(gold, pred));
}

std::vector<CurvePoint> algorithmic_curve(const std::vector<LabeledAt>& labels,
                                          const Corpus& gold_corpus) {
    std::map<size_t, std::vector<const LabeledAt*>> by_iteration;
    std::vector<std::string> missing;
    for (const auto& l : labels) {
        const Utterance* u = gold_corpus.find(l.utterance_id);
        if (!u || !u->gold) {
            if (missing.size() < 10) missing.push_back(l.utterance_id);
            continue;
        }
        by_iteration[l.iteration].push_back(&l);
    }
    if (!missing.empty()) {
        std::string msg = "no gold label for pseudo-labeled ids:";
        for (const auto& id : missing) msg += " " + id;
        throw ConfigError(msg);
    }

    std::vector<SentimentLabel> gold, pred;
    std::vector<CurvePoint> curve;
    for (const auto& [iteration, batch] : by_iteration) {
        for (const auto* l : batch) {
            gold.push_back(*gold_corpus.find(l->utterance_id)->gold);
            pred.push_back(l->label);
        }
        const auto rep = score(gold, pred);
        CurvePoint pt;
        pt.iteration = iteration;
        pt.n_selected = gold.size();
        pt.weighted_f1 = rep.weighted_f1;
        pt.acc_positive = rep.positive.recall;
        pt.acc_negative = rep.negative.recall;
        curve.push_back(pt);
    }
    return curve;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out) {
    out << "n_selected,weighted_f1,acc_positive,acc_negative\n";
    char buf[128];
    for (const auto& pt : curve) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f\n", pt.n_selected,
                      pt.weighted_f1, pt.acc_positive, pt.acc_negative);
        out << buf;
    }
}

} // namespace selftrain
