#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace selftrain {

// Token-level language tag. The artifact generalizes the usual HIN/ENG/0
// annotation scheme: L1 is the matrix language the initialization model was
// trained on, L2 the embedded language, Other covers symbols and special
// tokens.
enum class LangTag : uint8_t { L1, L2, Other };

enum class SentimentLabel : uint8_t { Positive, Negative, Neutral };

const char* to_string(LangTag tag);
const char* to_string(SentimentLabel label);

struct Token {
    std::string surface;
    LangTag tag = LangTag::L1;

    bool operator==(const Token&) const = default;
};

// One text unit. `gold` is an evaluation-only annotation; engine runs never
// read it.
struct Utterance {
    std::string id;
    std::string text;
    std::vector<Token> tokens;
    std::optional<SentimentLabel> gold;

    bool operator==(const Utterance&) const = default;
};

// Ordered, id-unique collection of utterances. Immutable after construction;
// all transformations return a new Corpus and preserve order.
class Corpus {
public:
    Corpus() = default;
    Corpus(std::string name, std::vector<Utterance> utterances);

    const std::string& name() const { return name_; }
    const std::vector<Utterance>& utterances() const { return utterances_; }
    size_t size() const { return utterances_.size(); }
    bool empty() const { return utterances_.empty(); }
    const Utterance& at(size_t i) const { return utterances_.at(i); }

    // Index of the utterance with this id, or nullopt.
    std::optional<size_t> index_of(const std::string& id) const;
    const Utterance* find(const std::string& id) const;

    bool operator==(const Corpus& other) const {
        return utterances_ == other.utterances_;
    }

private:
    std::string name_;
    std::vector<Utterance> utterances_;
    std::unordered_map<std::string, size_t> index_;
};

// Maps tag strings of the token-tagged format onto LangTags. Defaults to the
// HIN/ENG/0 scheme.
struct TagMapping {
    std::unordered_map<std::string, LangTag> map = {
        {"ENG", LangTag::L1}, {"HIN", LangTag::L2}, {"0", LangTag::Other}};
};

// Format A: one JSON object per line,
//   {"id":string,"text":string,"tokens":[[surface,tag],...],"label":...?}
// with tag in {"L1","L2","O"} and label in {"positive","negative","neutral"}.
// Throws ParseError (with line number) on malformed records or duplicate ids.
Corpus parse_jsonl(std::istream& in, const std::string& name = "");
Corpus read_jsonl_file(const std::string& path);

// Inverse of parse_jsonl; "label" emitted only when gold is present.
void write_jsonl(const Corpus& corpus, std::ostream& out);
void write_jsonl_file(const Corpus& corpus, const std::string& path);

// Format B: blank-line-separated blocks, first line "meta <id> <label?>",
// then one "<surface>\t<tag>" line per token. Unknown tags are errors.
Corpus parse_token_tagged(std::istream& in, const TagMapping& mapping = {},
                          const std::string& name = "");
Corpus read_token_tagged_file(const std::string& path,
                              const TagMapping& mapping = {});

// Sniffs format A vs B from the first non-blank line.
Corpus read_corpus_file(const std::string& path);

struct PreprocessStats {
    size_t url_tokens_removed = 0;
    std::vector<std::string> emptied_ids; // token-empty after URL removal
};

struct PreprocessResult {
    Corpus corpus;
    PreprocessStats stats;
};

// URL-token removal (prefixes http://, https://, www., case-insensitive),
// then surface lowercasing + NFC. Text is rebuilt from the surviving
// surfaces. Idempotent; ids and order unchanged.
PreprocessResult preprocess(const Corpus& corpus);

struct FilterResult {
    Corpus corpus;
    size_t removed_neutral = 0;
};

// Drops gold=Neutral utterances; unlabeled ones stay. Survivors are
// untouched.
FilterResult filter_two_class(const Corpus& corpus);

} // namespace selftrain
