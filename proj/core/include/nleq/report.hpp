#pragma once

// Text, CSV and JSON renderings of harness output. Text and CSV share one
// column set per report kind; numbers carry at least 10 significant digits.

#include <string>
#include <string_view>
#include <vector>

#include "nleq/harness.hpp"
#include "nleq/problems.hpp"

namespace nleq {

enum class OutputFormat { table, csv, json };

std::string_view to_string(OutputFormat f) noexcept;
OutputFormat parse_output_format(std::string_view name);

std::string format_grid(const GridReport& report, OutputFormat format);
std::string format_cascade(const CascadeResult& cascade, OutputFormat format);
std::string format_comparison(const ComparisonTable& table, OutputFormat format);
std::string format_catalog(const std::vector<CatalogEntry>& catalog, OutputFormat format);

}  // namespace nleq
