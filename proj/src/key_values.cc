#include "subtok/key_values.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "subtok/error.h"

namespace subtok {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FormatError("expected key=value", line_no);
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_key_values(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_key_values(const KeyValues& kv, std::ostream& out) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

std::string kv_string(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("missing key '" + key + "'");
  return it->second;
}

long long kv_int(const KeyValues& kv, const std::string& key) {
  const std::string v = kv_string(kv, key);
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::logic_error&) {
  }
  if (used != v.size() || v.empty()) {
    throw FormatError("key '" + key + "' expects an integer, got '" + v + "'");
  }
  return x;
}

double kv_double(const KeyValues& kv, const std::string& key) {
  const std::string v = kv_string(kv, key);
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::logic_error&) {
  }
  if (used != v.size() || v.empty()) {
    throw FormatError("key '" + key + "' expects a number, got '" + v + "'");
  }
  return x;
}

bool kv_bool(const KeyValues& kv, const std::string& key) {
  const std::string v = kv_string(kv, key);
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw FormatError("key '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace subtok
