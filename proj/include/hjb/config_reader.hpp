#pragma once

#include <map>
#include <string>
#include <vector>

namespace hjb {

/// One value of the TOML subset: boolean, number, string or array.
struct ConfigValue {
  enum class Kind { boolean, number, string, array };
  Kind kind = Kind::number;
  bool boolean = false;
  double number = 0.0;
  std::string text;
  std::vector<ConfigValue> items;
};

/// Tables of key/value pairs read from a TOML subset: [section] headers,
/// bare keys, strings, numbers, booleans and (possibly nested, possibly
/// multi-line) arrays. Keys before the first header live in section "".
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;
  const ConfigValue& at(const std::string& section,
                        const std::string& key) const;

  double number(const std::string& section, const std::string& key,
                double fallback) const;
  int integer(const std::string& section, const std::string& key,
              int fallback) const;
  bool boolean(const std::string& section, const std::string& key,
               bool fallback) const;
  std::string string(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  std::vector<double> numbers(const std::string& section,
                              const std::string& key,
                              const std::vector<double>& fallback) const;
  std::vector<int> integers(const std::string& section, const std::string& key,
                            const std::vector<int>& fallback) const;
  std::vector<std::string> strings(
      const std::string& section, const std::string& key,
      const std::vector<std::string>& fallback) const;

 private:
  std::map<std::string, std::map<std::string, ConfigValue>> tables_;
};

}  // namespace hjb
