#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace subtok {

// Flat `key=value` text. Blank lines and lines starting with '#' are ignored;
// whitespace around keys and values is trimmed.
using KeyValues = std::map<std::string, std::string>;

KeyValues read_key_values(std::istream& in);
KeyValues load_key_values(const std::filesystem::path& path);
void write_key_values(const KeyValues& kv, std::ostream& out);

// Typed access; throw FormatError naming the key on missing or bad values.
std::string kv_string(const KeyValues& kv, const std::string& key);
long long kv_int(const KeyValues& kv, const std::string& key);
double kv_double(const KeyValues& kv, const std::string& key);
bool kv_bool(const KeyValues& kv, const std::string& key);

}  // namespace subtok
