#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sentinel {

/// INI document in configparser dialect: `[section]` headers, `key = value` or
/// `key: value`, full-line `#`/`;` comments, indented continuation lines.
/// Keys are lowercased; section names keep their case.
struct IniDocument {
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::vector<Section> sections;

  const Section* find(std::string_view name) const;
  std::optional<std::string> get(std::string_view section, std::string_view key) const;
};

/// Throws Error(ConfigError) with the offending line number.
IniDocument parse_ini(std::string_view text);
std::optional<IniDocument> try_parse_ini(std::string_view text);

} // namespace sentinel
