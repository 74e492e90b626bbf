#include "hjb/config_reader.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hjb/errors.hpp"

namespace hjb {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  void run(std::map<std::string, std::map<std::string, ConfigValue>>& tables) {
    std::string section;
    tables[section];
    for (;;) {
      skip_blank_lines();
      if (pos_ >= s_.size()) break;
      if (s_[pos_] == '[') {
        ++pos_;
        skip_inline_space();
        section = read_key();
        skip_inline_space();
        expect(']');
        if (tables.count(section) && section != "")
          fail("duplicate section [" + section + "]");
        tables[section];
      } else {
        const std::string key = read_key();
        skip_inline_space();
        expect('=');
        skip_inline_space();
        ConfigValue v = read_value();
        auto& table = tables[section];
        if (table.count(key)) fail("duplicate key '" + key + "'");
        table.emplace(key, std::move(v));
      }
      finish_line();
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "config: line " << line_ << ": " << what;
    throw ParameterError(os.str());
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  void advance() {
    if (s_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) advance();
  }

  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') advance();
  }

  void skip_blank_lines() {
    for (;;) {
      skip_inline_space();
      skip_comment();
      if (at_end()) return;
      if (peek() == '\n' || peek() == '\r')
        advance();
      else
        return;
    }
  }

  // Whitespace, newlines and comments inside arrays.
  void skip_array_space() {
    for (;;) {
      skip_inline_space();
      skip_comment();
      if (!at_end() && (peek() == '\n' || peek() == '\r'))
        advance();
      else
        return;
    }
  }

  void finish_line() {
    skip_inline_space();
    skip_comment();
    if (!at_end() && peek() == '\r') advance();
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    advance();
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  std::string read_key() {
    if (peek() == '"') return read_basic_string();
    std::string key;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                         peek() == '_' || peek() == '-')) {
      key += peek();
      advance();
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::string read_basic_string() {
    expect('"');
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char c = peek();
      advance();
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      const char e = peek();
      advance();
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
  }

  std::string read_literal_string() {
    expect('\'');
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = peek();
      advance();
      if (c == '\'') return out;
      out += c;
    }
  }

  ConfigValue read_value() {
    ConfigValue v;
    const char c = peek();
    if (c == '"' || c == '\'') {
      v.kind = ConfigValue::Kind::string;
      v.text = c == '"' ? read_basic_string() : read_literal_string();
      return v;
    }
    if (c == '[') {
      advance();
      v.kind = ConfigValue::Kind::array;
      skip_array_space();
      while (peek() != ']') {
        v.items.push_back(read_value());
        skip_array_space();
        if (peek() == ',') {
          advance();
          skip_array_space();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      advance();
      return v;
    }
    std::string word;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                         peek() == '+' || peek() == '-' || peek() == '.' ||
                         peek() == '_')) {
      word += peek();
      advance();
    }
    if (word == "true" || word == "false") {
      v.kind = ConfigValue::Kind::boolean;
      v.boolean = word == "true";
      return v;
    }
    if (word.empty()) fail("expected a value");
    std::string digits;
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (word[i] != '_') {
        digits += word[i];
        continue;
      }
      const bool ok = i > 0 && i + 1 < word.size() &&
                      std::isdigit(static_cast<unsigned char>(word[i - 1])) &&
                      std::isdigit(static_cast<unsigned char>(word[i + 1]));
      if (!ok) fail("misplaced '_' in number '" + word + "'");
    }
    const char* first = digits.data();
    if (*first == '+') ++first;
    double x = 0.0;
    const auto [ptr, ec] =
        std::from_chars(first, digits.data() + digits.size(), x);
    if (ec != std::errc() || ptr != digits.data() + digits.size() ||
        !std::isfinite(x))
      fail("invalid value '" + word + "'");
    v.kind = ConfigValue::Kind::number;
    v.number = x;
    return v;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

const char* kind_name(ConfigValue::Kind k) {
  switch (k) {
    case ConfigValue::Kind::boolean: return "boolean";
    case ConfigValue::Kind::number: return "number";
    case ConfigValue::Kind::string: return "string";
    case ConfigValue::Kind::array: return "array";
  }
  return "?";
}

[[noreturn]] void type_error(const std::string& section, const std::string& key,
                             const char* want, ConfigValue::Kind got) {
  throw ParameterError("config: [" + section + "] " + key + " must be a " +
                       want + ", got " + kind_name(got));
}

int as_int(const std::string& section, const std::string& key, double x) {
  if (x != std::floor(x) || std::abs(x) > 2e9)
    throw ParameterError("config: [" + section + "] " + key +
                         " must be an integer");
  return static_cast<int>(x);
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  Parser(text).run(doc.tables_);
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("config: read failed for " + path);
  return parse(buf.str());
}

bool ConfigDocument::has(const std::string& section,
                         const std::string& key) const {
  const auto it = tables_.find(section);
  return it != tables_.end() && it->second.count(key) > 0;
}

bool ConfigDocument::has_section(const std::string& section) const {
  return tables_.count(section) > 0;
}

std::vector<std::string> ConfigDocument::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, table] : tables_)
    if (!name.empty() || !table.empty()) out.push_back(name);
  return out;
}

std::vector<std::string> ConfigDocument::keys(
    const std::string& section) const {
  std::vector<std::string> out;
  const auto it = tables_.find(section);
  if (it != tables_.end())
    for (const auto& kv : it->second) out.push_back(kv.first);
  return out;
}

const ConfigValue& ConfigDocument::at(const std::string& section,
                                      const std::string& key) const {
  if (!has(section, key))
    throw ParameterError("config: missing [" + section + "] " + key);
  return tables_.at(section).at(key);
}

double ConfigDocument::number(const std::string& section,
                              const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  const auto& v = at(section, key);
  if (v.kind != ConfigValue::Kind::number)
    type_error(section, key, "number", v.kind);
  return v.number;
}

int ConfigDocument::integer(const std::string& section, const std::string& key,
                            int fallback) const {
  if (!has(section, key)) return fallback;
  return as_int(section, key, number(section, key, 0.0));
}

bool ConfigDocument::boolean(const std::string& section,
                             const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const auto& v = at(section, key);
  if (v.kind != ConfigValue::Kind::boolean)
    type_error(section, key, "boolean", v.kind);
  return v.boolean;
}

std::string ConfigDocument::string(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) const {
  if (!has(section, key)) return fallback;
  const auto& v = at(section, key);
  if (v.kind != ConfigValue::Kind::string)
    type_error(section, key, "string", v.kind);
  return v.text;
}

std::vector<double> ConfigDocument::numbers(
    const std::string& section, const std::string& key,
    const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  const auto& v = at(section, key);
  if (v.kind == ConfigValue::Kind::number) return {v.number};
  if (v.kind != ConfigValue::Kind::array)
    type_error(section, key, "number array", v.kind);
  std::vector<double> out;
  for (const auto& item : v.items) {
    if (item.kind != ConfigValue::Kind::number)
      type_error(section, key, "number array", item.kind);
    out.push_back(item.number);
  }
  return out;
}

std::vector<int> ConfigDocument::integers(
    const std::string& section, const std::string& key,
    const std::vector<int>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<int> out;
  for (double x : numbers(section, key, {})) out.push_back(as_int(section, key, x));
  return out;
}

std::vector<std::string> ConfigDocument::strings(
    const std::string& section, const std::string& key,
    const std::vector<std::string>& fallback) const {
  if (!has(section, key)) return fallback;
  const auto& v = at(section, key);
  if (v.kind == ConfigValue::Kind::string) return {v.text};
  if (v.kind != ConfigValue::Kind::array)
    type_error(section, key, "string array", v.kind);
  std::vector<std::string> out;
  for (const auto& item : v.items) {
    if (item.kind != ConfigValue::Kind::string)
      type_error(section, key, "string array", item.kind);
    out.push_back(item.text);
  }
  return out;
}

}  // namespace hjb
