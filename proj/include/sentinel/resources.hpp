#pragma once

#include <string_view>

// Bundled data files, compiled into the library from data/.
namespace sentinel::resources {

std::string_view allowlist();
std::string_view licenses();
std::string_view public_suffix();
std::string_view python_keywords();
std::string_view stopwords();
std::string_view suspicious_apis();
std::string_view tlds();

} // namespace sentinel::resources
