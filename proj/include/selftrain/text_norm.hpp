#pragma once

#include <string>
#include <string_view>

namespace selftrain {

// Text normalization used by corpus preprocessing. Coverage is the Latin
// script (the datasets this targets are romanized): ASCII and Latin-1 /
// Latin Extended-A case folding, and NFC composition of a base letter
// followed by one combining diacritic. Other code points pass through
// unchanged. Invalid UTF-8 bytes also pass through unchanged.

// Lowercase, Latin range.
std::string to_lower(std::string_view utf8);

// Compose (base, combining mark) pairs into their precomposed forms where
// a canonical composition exists in the Latin-1 / Latin Extended range.
std::string nfc_latin(std::string_view utf8);

// nfc_latin then to_lower; idempotent.
std::string normalize_surface(std::string_view utf8);

} // namespace selftrain
