#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace qdev {

/// Analysis report body: one flat, unit-suffixed key schema rendered either
/// as JSON or as an equivalent `key = value` text listing. Both renderings
/// carry identical numeric values and are byte-deterministic.
using ReportBody = nlohmann::ordered_json;

std::string render_report_json(const ReportBody& body);
std::string render_report_text(const ReportBody& body);

} // namespace qdev
