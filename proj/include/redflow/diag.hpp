#pragma once

#include <string>
#include <vector>

namespace redflow {

enum class DiagLevel { Info, Warning, Error };

struct Diagnostic {
  DiagLevel level = DiagLevel::Warning;
  std::string file;
  int line = 0;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

inline const char* to_string(DiagLevel level) {
  switch (level) {
    case DiagLevel::Info: return "info";
    case DiagLevel::Warning: return "warning";
    case DiagLevel::Error: return "error";
  }
  return "unknown";
}

inline Diagnostic make_warning(std::string file, int line, std::string message) {
  return Diagnostic{DiagLevel::Warning, std::move(file), line, std::move(message)};
}

inline Diagnostic make_error(std::string file, int line, std::string message) {
  return Diagnostic{DiagLevel::Error, std::move(file), line, std::move(message)};
}

} // namespace redflow
