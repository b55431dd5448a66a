#pragma once

namespace redflow {

inline constexpr const char* kToolName = "redflow";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1";

} // namespace redflow
