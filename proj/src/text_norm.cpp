#include "selftrain/text_norm.hpp"

#include <cstdint>
#include <utility>

namespace selftrain {

namespace {

// Decodes one UTF-8 code point starting at pos. Returns (code point, byte
// length). Invalid sequences decode as a single byte with cp = 0xFFFFFFFF
// so the caller can copy it through verbatim.
std::pair<uint32_t, size_t> decode_utf8(std::string_view s, size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1};
    auto cont = [&](size_t i) {
        return pos + i < s.size() &&
               (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
    };
    auto cb = [&](size_t i) {
        return static_cast<uint32_t>(static_cast<unsigned char>(s[pos + i]) & 0x3F);
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        return {(static_cast<uint32_t>(b0 & 0x1F) << 6) | cb(1), 2};
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        return {(static_cast<uint32_t>(b0 & 0x0F) << 12) | (cb(1) << 6) | cb(2), 3};
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        return {(static_cast<uint32_t>(b0 & 0x07) << 18) | (cb(1) << 12) |
                    (cb(2) << 6) | cb(3),
                4};
    }
    return {0xFFFFFFFFu, 1};
}

void encode_utf8(uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

uint32_t lower_cp(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    // Latin-1 supplement: U+00C0..U+00DE map +0x20, except the multiply sign.
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
    if (cp == 0x0178) return 0x00FF; // Y with diaeresis
    // Latin Extended-A: even/odd pairs.
    if (cp >= 0x0100 && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x0179 || cp == 0x017B || cp == 0x017D) return cp + 1;
    return cp;
}

// Canonical composition for (base letter, combining mark) limited to the
// precomposed Latin-1 / Latin Extended-A forms. Marks covered: grave U+0300,
// acute U+0301, circumflex U+0302, tilde U+0303, macron U+0304, diaeresis
// U+0308, ring above U+030A, cedilla U+0327.
uint32_t compose_pair(uint32_t base, uint32_t mark) {
    struct Entry {
        uint32_t base, mark, composed;
    };
    static constexpr Entry table[] = {
        {'A', 0x0300, 0x00C0}, {'A', 0x0301, 0x00C1}, {'A', 0x0302, 0x00C2},
        {'A', 0x0303, 0x00C3}, {'A', 0x0308, 0x00C4}, {'A', 0x030A, 0x00C5},
        {'A', 0x0304, 0x0100},
        {'C', 0x0327, 0x00C7}, {'C', 0x0301, 0x0106},
        {'E', 0x0300, 0x00C8}, {'E', 0x0301, 0x00C9}, {'E', 0x0302, 0x00CA},
        {'E', 0x0308, 0x00CB}, {'E', 0x0304, 0x0112},
        {'I', 0x0300, 0x00CC}, {'I', 0x0301, 0x00CD}, {'I', 0x0302, 0x00CE},
        {'I', 0x0308, 0x00CF}, {'I', 0x0304, 0x012A},
        {'N', 0x0303, 0x00D1}, {'N', 0x0301, 0x0143},
        {'O', 0x0300, 0x00D2}, {'O', 0x0301, 0x00D3}, {'O', 0x0302, 0x00D4},
        {'O', 0x0303, 0x00D5}, {'O', 0x0308, 0x00D6}, {'O', 0x0304, 0x014C},
        {'U', 0x0300, 0x00D9}, {'U', 0x0301, 0x00DA}, {'U', 0x0302, 0x00DB},
        {'U', 0x0308, 0x00DC}, {'U', 0x0304, 0x016A},
        {'Y', 0x0301, 0x00DD}, {'Y', 0x0308, 0x0178},
        {'a', 0x0300, 0x00E0}, {'a', 0x0301, 0x00E1}, {'a', 0x0302, 0x00E2},
        {'a', 0x0303, 0x00E3}, {'a', 0x0308, 0x00E4}, {'a', 0x030A, 0x00E5},
        {'a', 0x0304, 0x0101},
        {'c', 0x0327, 0x00E7}, {'c', 0x0301, 0x0107},
        {'e', 0x0300, 0x00E8}, {'e', 0x0301, 0x00E9}, {'e', 0x0302, 0x00EA},
        {'e', 0x0308, 0x00EB}, {'e', 0x0304, 0x0113},
        {'i', 0x0300, 0x00EC}, {'i', 0x0301, 0x00ED}, {'i', 0x0302, 0x00EE},
        {'i', 0x0308, 0x00EF}, {'i', 0x0304, 0x012B},
        {'n', 0x0303, 0x00F1}, {'n', 0x0301, 0x0144},
        {'o', 0x0300, 0x00F2}, {'o', 0x0301, 0x00F3}, {'o', 0x0302, 0x00F4},
        {'o', 0x0303, 0x00F5}, {'o', 0x0308, 0x00F6}, {'o', 0x0304, 0x014D},
        {'u', 0x0300, 0x00F9}, {'u', 0x0301, 0x00FA}, {'u', 0x0302, 0x00FB},
        {'u', 0x0308, 0x00FC}, {'u', 0x0304, 0x016B},
        {'y', 0x0301, 0x00FD}, {'y', 0x0308, 0x00FF},
    };
    for (const auto& e : table) {
        if (e.base == base && e.mark == mark) return e.composed;
    }
    return 0;
}

bool is_combining_mark(uint32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

} // namespace

std::string to_lower(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    size_t i = 0;
    while (i < utf8.size()) {
        auto [cp, len] = decode_utf8(utf8, i);
        if (cp == 0xFFFFFFFFu) {
            out.push_back(utf8[i]);
        } else {
            encode_utf8(lower_cp(cp), out);
        }
        i += len;
    }
    return out;
}

std::string nfc_latin(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    size_t i = 0;
    uint32_t pending = 0; // one decoded code point waiting for a possible mark
    bool has_pending = false;
    auto flush = [&]() {
        if (has_pending) {
            encode_utf8(pending, out);
            has_pending = false;
        }
    };
    while (i < utf8.size()) {
        auto [cp, len] = decode_utf8(utf8, i);
        i += len;
        if (cp == 0xFFFFFFFFu) {
            flush();
            out.push_back(utf8[i - len]);
            continue;
        }
        if (has_pending && is_combining_mark(cp)) {
            if (uint32_t composed = compose_pair(pending, cp)) {
                pending = composed; // composed form may take another mark
                continue;
            }
        }
        flush();
        pending = cp;
        has_pending = true;
    }
    flush();
    return out;
}

std::string normalize_surface(std::string_view utf8) {
    return to_lower(nfc_latin(utf8));
}

} // namespace selftrain
