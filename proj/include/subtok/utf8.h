#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace subtok::utf8 {

// Throws DecodeError with the offset of the first invalid byte.
void validate(std::string_view text);

// Splits valid UTF-8 into code points, each returned as its byte sequence.
std::vector<std::string> code_points(std::string_view text);

std::size_t length(std::string_view text);

}  // namespace subtok::utf8
