#pragma once

// Risk model: every flow lands in a (data class x action) group with a fixed
// severity. The listed grid covers the sixteen class/action groups plus the
// two misc severity groups; class/action pairs outside the listed grid take
// the worst severity listed for the same action and are flagged as
// extrapolated so reports keep the distinction auditable.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redflow/catalog.hpp"
#include "redflow/conformance.hpp"
#include "redflow/taint.hpp"

namespace redflow {

enum class Severity { Low, Medium, High };

inline std::string to_string(Severity s) {
  switch (s) {
    case Severity::Low: return "low";
    case Severity::Medium: return "medium";
    case Severity::High: return "high";
  }
  return "?";
}

namespace detail_risk {

// The listed severity grid. Absent pairs are extrapolated per the worst-case
// column rule; misc has its own rule.
inline const std::map<std::pair<DataClass, SinkCategory>, Severity>& listed_grid() {
  using DC = DataClass;
  using SC = SinkCategory;
  static const std::map<std::pair<DC, SC>, Severity> grid = {
      {{DC::Sensitive, SC::Terminal}, Severity::High},
      {{DC::Sensitive, SC::Dashboard}, Severity::Medium},
      {{DC::Sensitive, SC::Log}, Severity::High},
      {{DC::Sensitive, SC::ExternalServer}, Severity::High},
      {{DC::Sensitive, SC::File}, Severity::High},
      {{DC::Sensitive, SC::Framework}, Severity::Medium},

      {{DC::ErrorMessage, SC::Log}, Severity::High},
      {{DC::ErrorMessage, SC::Dashboard}, Severity::Medium},
      {{DC::ErrorMessage, SC::Terminal}, Severity::High},

      {{DC::InputMessage, SC::OtherNode}, Severity::Low},
      {{DC::InputMessage, SC::Log}, Severity::High},
      {{DC::InputMessage, SC::Hardware}, Severity::High},
      {{DC::InputMessage, SC::Dashboard}, Severity::Medium},
      {{DC::InputMessage, SC::File}, Severity::High},
      {{DC::InputMessage, SC::ExternalServer}, Severity::High},
      {{DC::InputMessage, SC::Terminal}, Severity::High},
  };
  return grid;
}

inline Severity worst_listed_for_action(SinkCategory action) {
  Severity worst = Severity::Low;
  bool any = false;
  for (const auto& [key, sev] : listed_grid()) {
    if (key.second != action) continue;
    any = true;
    if (static_cast<int>(sev) > static_cast<int>(worst)) worst = sev;
  }
  // an action no data class lists defaults to high (nothing vouches for it)
  return any ? worst : Severity::High;
}

} // namespace detail_risk

struct SeverityCell {
  Severity severity = Severity::Low;
  bool extrapolated = false; // filled by the worst-case rule, not listed
};

// Total severity mapping over (data class x action).
inline SeverityCell severity_for(DataClass dc, SinkCategory action) {
  if (dc == DataClass::Misc) {
    bool low = action == SinkCategory::OtherNode || action == SinkCategory::Framework;
    return {low ? Severity::Low : Severity::High, true};
  }
  const auto& grid = detail_risk::listed_grid();
  auto it = grid.find({dc, action});
  if (it != grid.end()) return {it->second, false};
  return {detail_risk::worst_listed_for_action(action), true};
}

// Group label: "<data-class>/<action>" for listed classes; misc groups fold
// to "misc/low" and "misc/high" by their severity.
inline std::string group_label(DataClass dc, SinkCategory action) {
  if (dc == DataClass::Misc)
    return std::string("misc/") + to_string(severity_for(dc, action).severity);
  return to_string(dc) + "/" + to_string(action);
}

struct RiskFinding {
  EndpointKey source;
  EndpointKey sink;
  std::string sink_entry;
  DataClass data_class = DataClass::Misc;
  SinkCategory action = SinkCategory::OtherNode;
  Severity severity = Severity::Low;
  bool extrapolated = false;
  bool data_class_missing = false; // no source hint resolved; treated as misc
  std::string group;
};

// Pure function of (data class, sink category); runs on unmerged flows.
inline RiskFinding classify_flow(const TaintFlow& flow) {
  RiskFinding f;
  f.source = key_of(flow.source);
  f.sink = key_of(flow.sink);
  f.sink_entry = flow.sink.entry_id;
  f.data_class = flow.data_class;
  f.action = flow.sink.sink_category;
  SeverityCell cell = severity_for(f.data_class, f.action);
  f.severity = cell.severity;
  f.extrapolated = cell.extrapolated;
  f.data_class_missing = flow.data_class == DataClass::Misc;
  f.group = group_label(f.data_class, f.action);
  return f;
}

struct RiskSummary {
  std::map<std::string, int> severity_counts;        // low/medium/high -> count
  std::map<std::string, double> severity_percentages;
  std::map<std::string, int> group_counts;           // group label -> count
  int total = 0;
};

inline RiskSummary summarize_risk(const std::vector<RiskFinding>& findings) {
  RiskSummary s;
  s.total = static_cast<int>(findings.size());
  for (Severity sev : {Severity::Low, Severity::Medium, Severity::High})
    s.severity_counts[to_string(sev)] = 0;
  for (const RiskFinding& f : findings) {
    ++s.severity_counts[to_string(f.severity)];
    ++s.group_counts[f.group];
  }
  for (const auto& [name, count] : s.severity_counts)
    s.severity_percentages[name] = percent(count, s.total);
  return s;
}

// The full mapping in catalog-compatible JSON, for external audit.
inline nlohmann::ordered_json severity_table_json() {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (DataClass dc : all_data_classes()) {
    for (SinkCategory action : all_sink_categories()) {
      SeverityCell cell = severity_for(dc, action);
      rows.push_back({{"data_class", to_string(dc)},
                      {"action", to_string(action)},
                      {"severity", to_string(cell.severity)},
                      {"extrapolated", cell.extrapolated},
                      {"group", group_label(dc, action)}});
    }
  }
  return rows;
}

} // namespace redflow
