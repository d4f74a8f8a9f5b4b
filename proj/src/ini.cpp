#include "sentinel/ini.hpp"

#include "sentinel/error.hpp"
#include "sentinel/text.hpp"

namespace sentinel {

const IniDocument::Section* IniDocument::find(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) {
      return &s;
    }
  }
  return nullptr;
}

std::optional<std::string> IniDocument::get(std::string_view section, std::string_view key) const {
  const Section* s = find(section);
  if (s == nullptr) {
    return std::nullopt;
  }
  std::optional<std::string> found;
  for (const auto& [k, v] : s->entries) {
    if (k == key) {
      found = v;
    }
  }
  return found;
}

IniDocument parse_ini(std::string_view text) {
  IniDocument doc;
  IniDocument::Section* current = nullptr;
  std::pair<std::string, std::string>* last_entry = nullptr;
  int lineno = 0;
  for (auto raw : split_lines(text)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') {
      continue;
    }
    bool indented = !raw.empty() && (raw.front() == ' ' || raw.front() == '\t');
    if (indented && last_entry != nullptr) {
      if (!last_entry->second.empty()) {
        last_entry->second += '\n';
      }
      last_entry->second += line;
      continue;
    }
    if (line.front() == '[') {
      auto close = line.find(']');
      if (close == std::string_view::npos) {
        throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": unterminated section header");
      }
      std::string name(trim(line.substr(1, close - 1)));
      current = nullptr;
      for (auto& s : doc.sections) {
        if (s.name == name) {
          current = &s;
        }
      }
      if (current == nullptr) {
        doc.sections.push_back({name, {}});
        current = &doc.sections.back();
      }
      last_entry = nullptr;
      continue;
    }
    auto sep = line.find_first_of("=:");
    if (sep == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    if (current == nullptr) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": entry before any section header");
    }
    std::string key = ascii_lower(trim(line.substr(0, sep)));
    if (key.empty()) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": empty key");
    }
    current->entries.emplace_back(std::move(key), std::string(trim(line.substr(sep + 1))));
    last_entry = &current->entries.back();
  }
  return doc;
}

std::optional<IniDocument> try_parse_ini(std::string_view text) {
  try {
    return parse_ini(text);
  } catch (const Error&) {
    return std::nullopt;
  }
}

} // namespace sentinel
