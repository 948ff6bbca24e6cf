#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace logmorph::text {

/// True when `s` is well-formed UTF-8 (no overlongs, no surrogates).
bool is_valid_utf8(std::string_view s);

/// Replaces every ill-formed UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view s);

/// Sanitizes and flattens a message to a single line: every run of CR/LF
/// characters becomes one space.
std::string single_line(std::string_view s);

/// Simple (one-to-one) Unicode lowercase of valid UTF-8 text.
std::string casefold(std::string_view s);

std::string_view trim(std::string_view s);

/// Splits on runs of ASCII whitespace; no empty pieces.
std::vector<std::string_view> split_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);
bool iequals_ascii(std::string_view a, std::string_view b);

/// RFC 4180 field quoting: quotes only when the field needs it.
std::string csv_escape(std::string_view field);

std::string base64_encode(std::string_view bytes);
/// Throws ArgumentError on malformed input.
std::string base64_decode(std::string_view encoded);

}  // namespace logmorph::text
