#pragma once

#include <string>
#include <string_view>

namespace trivia {

// Classic Porter stemmer (1980 definition). Expects a lowercase ASCII word;
// words of length <= 2 are returned unchanged, matching the reference
// implementation.
std::string porter_stem(std::string_view word);

} // namespace trivia
