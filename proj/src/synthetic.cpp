#include "selftrain/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"

#include "selftrain/errors.hpp"

namespace selftrain {

namespace {

// All randomness goes through these explicit transforms. std::mt19937_64 is
// bit-exact by standard; the distribution classes are not, so we avoid them.
double draw_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw_unit_open(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double draw_normal(std::mt19937_64& rng, double mean, double stddev) {
    const double u1 = draw_unit_open(rng);
    const double u2 = draw_unit_open(rng);
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + stddev * z;
}

size_t draw_index(std::mt19937_64& rng, size_t n) { return rng() % n; }

size_t draw_range(std::mt19937_64& rng, size_t lo, size_t hi) {
    return lo + draw_index(rng, hi - lo + 1);
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[draw_index(rng, i)]);
    }
}

size_t round_count(double x) { return static_cast<size_t>(std::floor(x + 0.5)); }

const char* const kOtherSurfaces[] = {"!", "?", "#", "...", ",", ";"};

struct VocabRanges {
    size_t pos_end;    // [0, pos_end) positive-indicative
    size_t neg_end;    // [pos_end, neg_end) negative-indicative
    size_t vocab_size; // [neg_end, vocab_size) shared
};

VocabRanges ranges_for(size_t vocab_size) {
    auto part = static_cast<size_t>(
        std::floor(static_cast<double>(vocab_size) * synth_vocab::indicative_fraction));
    return VocabRanges{part, 2 * part, vocab_size};
}

Token draw_token(std::mt19937_64& rng, SentimentLabel cls, double mix,
                 size_t vocab_l1, size_t vocab_l2) {
    if (draw_unit(rng) < synth_vocab::other_token_prob) {
        return Token{kOtherSurfaces[draw_index(rng, std::size(kOtherSurfaces))],
                     LangTag::Other};
    }
    const LangTag lang = draw_unit(rng) < mix ? LangTag::L2 : LangTag::L1;
    const auto r = ranges_for(lang == LangTag::L1 ? vocab_l1 : vocab_l2);
    size_t index;
    if (draw_unit(rng) < synth_vocab::indicative_token_prob) {
        const bool positive = cls == SentimentLabel::Positive;
        const size_t lo = positive ? 0 : r.pos_end;
        const size_t hi = positive ? r.pos_end : r.neg_end;
        index = lo + draw_index(rng, hi - lo);
    } else {
        index = r.neg_end + draw_index(rng, r.vocab_size - r.neg_end);
    }
    return Token{synth_vocab::word(lang, index), lang};
}

Utterance make_utterance(std::mt19937_64& rng, SentimentLabel cls,
                         const SyntheticSpec& spec, double mix_mean,
                         double other_lang_allowed) {
    Utterance u;
    double mix = 0.0;
    if (other_lang_allowed > 0.0) {
        mix = std::clamp(draw_normal(rng, mix_mean, synth_vocab::mix_stddev), 0.0, 1.0);
    }
    const size_t len = draw_range(rng, spec.length_min, spec.length_max);
    u.tokens.reserve(len);
    for (size_t i = 0; i < len; ++i) {
        u.tokens.push_back(
            draw_token(rng, cls, mix, spec.vocab_size_l1, spec.vocab_size_l2));
    }
    std::string text;
    for (const auto& t : u.tokens) {
        if (!text.empty()) text += ' ';
        text += t.surface;
    }
    u.text = std::move(text);
    SentimentLabel gold = cls;
    if (spec.label_noise > 0.0 && draw_unit(rng) < spec.label_noise) {
        gold = cls == SentimentLabel::Positive ? SentimentLabel::Negative
                                               : SentimentLabel::Positive;
    }
    u.gold = gold;
    return u;
}

std::string padded_id(const char* prefix, size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%06zu", prefix, n);
    return buf;
}

} // namespace

namespace synth_vocab {

std::string word(LangTag lang, size_t index) {
    return (lang == LangTag::L1 ? "en" : "xx") + std::to_string(index);
}

bool is_indicative_of(const std::string& surface, SentimentLabel label,
                      size_t vocab_size_l1, size_t vocab_size_l2) {
    size_t vocab_size = 0;
    size_t index = 0;
    if (surface.rfind("en", 0) == 0) {
        vocab_size = vocab_size_l1;
        index = std::stoul(surface.substr(2));
    } else if (surface.rfind("xx", 0) == 0) {
        vocab_size = vocab_size_l2;
        index = std::stoul(surface.substr(2));
    } else {
        return false;
    }
    const auto r = ranges_for(vocab_size);
    if (label == SentimentLabel::Positive) return index < r.pos_end;
    return index >= r.pos_end && index < r.neg_end;
}

} // namespace synth_vocab

void SyntheticSpec::validate() const {
    if (size < 2) throw ConfigError("synthetic spec: size must be >= 2");
    if (class_prior_positive < 0.0 || class_prior_positive > 1.0) {
        throw ConfigError("synthetic spec: class_prior_positive must be in [0,1]");
    }
    if (mix_mean_positive < 0.0 || mix_mean_positive > 1.0 ||
        mix_mean_negative < 0.0 || mix_mean_negative > 1.0) {
        throw ConfigError("synthetic spec: mix means must be in [0,1]");
    }
    if (length_min < 1) throw ConfigError("synthetic spec: length_min must be >= 1");
    if (length_max < length_min) {
        throw ConfigError("synthetic spec: length_max must be >= length_min");
    }
    if (label_noise < 0.0 || label_noise >= 0.5) {
        throw ConfigError("synthetic spec: label_noise must be in [0, 0.5)");
    }
    if (vocab_size_l1 < 10 || vocab_size_l2 < 10) {
        throw ConfigError("synthetic spec: vocab sizes must be >= 10");
    }
}

SyntheticSpec parse_synthetic_spec(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid synthetic spec JSON: ") + e.what());
    }
    SyntheticSpec spec;
    try {
        if (j.contains("size")) spec.size = j["size"].get<size_t>();
        if (j.contains("class_prior_positive")) {
            spec.class_prior_positive = j["class_prior_positive"].get<double>();
        }
        if (j.contains("vocab_size_l1")) spec.vocab_size_l1 = j["vocab_size_l1"].get<size_t>();
        if (j.contains("vocab_size_l2")) spec.vocab_size_l2 = j["vocab_size_l2"].get<size_t>();
        if (j.contains("mix_mean_positive")) {
            spec.mix_mean_positive = j["mix_mean_positive"].get<double>();
        }
        if (j.contains("mix_mean_negative")) {
            spec.mix_mean_negative = j["mix_mean_negative"].get<double>();
        }
        if (j.contains("length_range")) {
            const auto& r = j["length_range"];
            if (!r.is_array() || r.size() != 2) {
                throw ConfigError("synthetic spec: length_range must be [min,max]");
            }
            spec.length_min = r[0].get<size_t>();
            spec.length_max = r[1].get<size_t>();
        }
        if (j.contains("label_noise")) spec.label_noise = j["label_noise"].get<double>();
        if (j.contains("seed")) spec.seed = j["seed"].get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid synthetic spec field: ") + e.what());
    }
    spec.validate();
    return spec;
}

SyntheticCorpora generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    const size_t n_pos = round_count(static_cast<double>(spec.size) *
                                     spec.class_prior_positive);
    const size_t n_neg = spec.size - n_pos;

    std::vector<Utterance> all;
    all.reserve(spec.size);
    for (size_t i = 0; i < n_pos; ++i) {
        all.push_back(make_utterance(rng, SentimentLabel::Positive, spec,
                                     spec.mix_mean_positive, 1.0));
    }
    for (size_t i = 0; i < n_neg; ++i) {
        all.push_back(make_utterance(rng, SentimentLabel::Negative, spec,
                                     spec.mix_mean_negative, 1.0));
    }
    shuffle_vec(all, rng);
    for (size_t i = 0; i < all.size(); ++i) all[i].id = padded_id("u", i);

    // Stratified 20% test split on the recorded gold labels.
    size_t gold_pos = 0;
    for (const auto& u : all) {
        if (u.gold == SentimentLabel::Positive) ++gold_pos;
    }
    size_t test_pos_quota = round_count(0.2 * static_cast<double>(gold_pos));
    size_t test_neg_quota =
        round_count(0.2 * static_cast<double>(all.size() - gold_pos));
    std::vector<Utterance> train_utts, test_utts;
    for (auto& u : all) {
        auto& quota =
            u.gold == SentimentLabel::Positive ? test_pos_quota : test_neg_quota;
        if (quota > 0) {
            --quota;
            test_utts.push_back(std::move(u));
        } else {
            train_utts.push_back(std::move(u));
        }
    }

    // Pure-L1 source corpus, balanced, noise-free: the stand-in for the
    // pre-trained initialization model's training data.
    const size_t n_src = spec.size;
    const size_t n_src_pos = n_src / 2;
    std::vector<Utterance> source_utts;
    source_utts.reserve(n_src);
    SyntheticSpec src_spec = spec;
    src_spec.label_noise = 0.0;
    for (size_t i = 0; i < n_src; ++i) {
        const auto cls = i < n_src_pos ? SentimentLabel::Positive
                                       : SentimentLabel::Negative;
        source_utts.push_back(make_utterance(rng, cls, src_spec, 0.0, 0.0));
    }
    shuffle_vec(source_utts, rng);
    for (size_t i = 0; i < source_utts.size(); ++i) {
        source_utts[i].id = padded_id("s", i);
    }

    return SyntheticCorpora{Corpus("train", std::move(train_utts)),
                            Corpus("test", std::move(test_utts)),
                            Corpus("source", std::move(source_utts))};
}

} // namespace selftrain
