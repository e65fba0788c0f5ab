#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace carebot {

using Tokens = std::vector<std::string>;

// Case-folds, deletes punctuation (so "don't" becomes "dont") and splits on
// whitespace. ASCII and the Latin-1 / Latin Extended-A letters used by
// Polish and most European languages are lower-cased; any other non-ASCII
// code point is kept verbatim as part of the word.
Tokens normalize(std::string_view text);

// Tokens joined with single spaces.
std::string join(const Tokens& tokens);

// normalize() followed by join(); the form used as a lookup key.
std::string normalized_key(std::string_view text);

// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_run(const Tokens& haystack, const Tokens& needle);

// Strips leading and trailing ASCII whitespace.
std::string trim(std::string_view text);

bool is_valid_utf8(std::string_view text);

} // namespace carebot
