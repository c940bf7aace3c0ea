#pragma once

#include <string>
#include <string_view>

namespace sedigest::prep {

// Porter stemmer, 1980 rule set. Expects a lowercase alphabetic word.
std::string porter_stem(std::string_view word);

}  // namespace sedigest::prep
