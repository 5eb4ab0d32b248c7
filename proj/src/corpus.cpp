#include "selftrain/corpus.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "selftrain/errors.hpp"
#include "selftrain/text_norm.hpp"

namespace selftrain {

using ordered_json = nlohmann::ordered_json;

const char* to_string(LangTag tag) {
    switch (tag) {
        case LangTag::L1: return "L1";
        case LangTag::L2: return "L2";
        case LangTag::Other: return "O";
    }
    return "?";
}

const char* to_string(SentimentLabel label) {
    switch (label) {
        case SentimentLabel::Positive: return "positive";
        case SentimentLabel::Negative: return "negative";
        case SentimentLabel::Neutral: return "neutral";
    }
    return "?";
}

Corpus::Corpus(std::string name, std::vector<Utterance> utterances)
    : name_(std::move(name)), utterances_(std::move(utterances)) {
    index_.reserve(utterances_.size());
    for (size_t i = 0; i < utterances_.size(); ++i) {
        const auto& u = utterances_[i];
        if (u.id.empty()) {
            throw ParseError("utterance with empty id");
        }
        if (!index_.emplace(u.id, i).second) {
            throw ParseError("duplicate utterance id \"" + u.id + "\"");
        }
    }
}

std::optional<size_t> Corpus::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const Utterance* Corpus::find(const std::string& id) const {
    auto idx = index_of(id);
    return idx ? &utterances_[*idx] : nullptr;
}

namespace {

std::optional<SentimentLabel> label_from_string(const std::string& s) {
    if (s == "positive") return SentimentLabel::Positive;
    if (s == "negative") return SentimentLabel::Negative;
    if (s == "neutral") return SentimentLabel::Neutral;
    return std::nullopt;
}

LangTag jsonl_tag(const std::string& s, size_t line) {
    if (s == "L1") return LangTag::L1;
    if (s == "L2") return LangTag::L2;
    if (s == "O") return LangTag::Other;
    throw ParseError(line, "unknown token tag \"" + s + "\"");
}

void validate_utterance(const Utterance& u, size_t line) {
    if (u.id.empty()) throw ParseError(line, "empty \"id\"");
    if (u.tokens.empty() && !u.text.empty()) {
        throw ParseError(line, "utterance \"" + u.id +
                                   "\" has text but no tokens");
    }
    for (const auto& t : u.tokens) {
        if (t.surface.find('\n') != std::string::npos) {
            throw ParseError(line, "token surface contains a newline");
        }
    }
}

} // namespace

Corpus parse_jsonl(std::istream& in, const std::string& name) {
    std::vector<Utterance> utterances;
    std::string line;
    size_t line_no = 0;
    std::unordered_map<std::string, size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!rec.is_object()) throw ParseError(line_no, "record is not an object");
        Utterance u;
        try {
            u.id = rec.at("id").get<std::string>();
            u.text = rec.at("text").get<std::string>();
            for (const auto& tok : rec.at("tokens")) {
                if (!tok.is_array() || tok.size() != 2) {
                    throw ParseError(line_no, "token entry is not a [surface, tag] pair");
                }
                u.tokens.push_back(Token{tok[0].get<std::string>(),
                                         jsonl_tag(tok[1].get<std::string>(), line_no)});
            }
            if (rec.contains("label")) {
                auto s = rec.at("label").get<std::string>();
                auto label = label_from_string(s);
                if (!label) throw ParseError(line_no, "unknown label \"" + s + "\"");
                u.gold = *label;
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("bad record: ") + e.what());
        }
        validate_utterance(u, line_no);
        if (!seen.emplace(u.id, line_no).second) {
            throw ParseError(line_no, "duplicate utterance id \"" + u.id + "\"");
        }
        utterances.push_back(std::move(u));
    }
    return Corpus(name, std::move(utterances));
}

Corpus read_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    return parse_jsonl(in, path);
}

void write_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const auto& u : corpus.utterances()) {
        ordered_json rec;
        rec["id"] = u.id;
        rec["text"] = u.text;
        auto tokens = ordered_json::array();
        for (const auto& t : u.tokens) {
            tokens.push_back({t.surface, to_string(t.tag)});
        }
        rec["tokens"] = std::move(tokens);
        if (u.gold) rec["label"] = to_string(*u.gold);
        out << rec.dump() << '\n';
    }
}

void write_jsonl_file(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write corpus file: " + path);
    write_jsonl(corpus, out);
    if (!out.good()) throw IoError("write failed: " + path);
}

Corpus parse_token_tagged(std::istream& in, const TagMapping& mapping,
                          const std::string& name) {
    std::vector<Utterance> utterances;
    std::unordered_map<std::string, size_t> seen;
    std::string line;
    size_t line_no = 0;
    bool in_block = false;
    Utterance current;

    auto finish_block = [&](size_t at_line) {
        if (!in_block) return;
        std::string text;
        for (const auto& t : current.tokens) {
            if (!text.empty()) text += ' ';
            text += t.surface;
        }
        current.text = std::move(text);
        validate_utterance(current, at_line);
        if (!seen.emplace(current.id, at_line).second) {
            throw ParseError(at_line, "duplicate utterance id \"" + current.id + "\"");
        }
        utterances.push_back(std::move(current));
        current = Utterance{};
        in_block = false;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            finish_block(line_no);
            continue;
        }
        if (!in_block) {
            if (line.rfind("meta", 0) != 0 ||
                (line.size() > 4 && line[4] != ' ' && line[4] != '\t')) {
                throw ParseError(line_no, "block does not start with a meta header");
            }
            std::istringstream hdr(line);
            std::string kw, id, label_str;
            hdr >> kw >> id >> label_str;
            if (id.empty()) throw ParseError(line_no, "meta header without id");
            current.id = id;
            if (!label_str.empty()) {
                auto label = label_from_string(label_str);
                if (!label) {
                    throw ParseError(line_no, "unknown label \"" + label_str + "\"");
                }
                current.gold = *label;
            }
            in_block = true;
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(line_no, "token line without a tab separator");
        }
        std::string surface = line.substr(0, tab);
        std::string tag_str = line.substr(tab + 1);
        auto it = mapping.map.find(tag_str);
        if (it == mapping.map.end()) {
            throw ParseError(line_no, "unknown token tag \"" + tag_str + "\"");
        }
        current.tokens.push_back(Token{std::move(surface), it->second});
    }
    finish_block(line_no + 1);
    return Corpus(name, std::move(utterances));
}

Corpus read_token_tagged_file(const std::string& path, const TagMapping& mapping) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    return parse_token_tagged(in, mapping, path);
}

Corpus read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        in.clear();
        in.seekg(0);
        if (line[pos] == '{') return parse_jsonl(in, path);
        return parse_token_tagged(in, TagMapping{}, path);
    }
    return Corpus(path, {});
}

namespace {

bool ascii_iequal_prefix(const std::string& s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (size_t i = 0; i < prefix.size(); ++i) {
        char c = s[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 0x20);
        if (c != prefix[i]) return false;
    }
    return true;
}

bool is_url_token(const std::string& surface) {
    return ascii_iequal_prefix(surface, "http://") ||
           ascii_iequal_prefix(surface, "https://") ||
           ascii_iequal_prefix(surface, "www.");
}

} // namespace

PreprocessResult preprocess(const Corpus& corpus) {
    PreprocessStats stats;
    std::vector<Utterance> out;
    out.reserve(corpus.size());
    for (const auto& u : corpus.utterances()) {
        Utterance v;
        v.id = u.id;
        v.gold = u.gold;
        const bool had_tokens = !u.tokens.empty();
        for (const auto& t : u.tokens) {
            if (is_url_token(t.surface)) {
                ++stats.url_tokens_removed;
                continue;
            }
            v.tokens.push_back(Token{normalize_surface(t.surface), t.tag});
        }
        std::string text;
        for (const auto& t : v.tokens) {
            if (!text.empty()) text += ' ';
            text += t.surface;
        }
        v.text = std::move(text);
        if (had_tokens && v.tokens.empty()) stats.emptied_ids.push_back(v.id);
        out.push_back(std::move(v));
    }
    return PreprocessResult{Corpus(corpus.name(), std::move(out)), std::move(stats)};
}

FilterResult filter_two_class(const Corpus& corpus) {
    FilterResult result;
    std::vector<Utterance> out;
    out.reserve(corpus.size());
    for (const auto& u : corpus.utterances()) {
        if (u.gold && *u.gold == SentimentLabel::Neutral) {
            ++result.removed_neutral;
            continue;
        }
        out.push_back(u);
    }
    result.corpus = Corpus(corpus.name(), std::move(out));
    return result;
}

} // namespace selftrain
