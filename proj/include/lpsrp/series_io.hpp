#pragma once

// Coefficient files: JSON documents holding the coordinate, velocity and
// frequency series of a solution plus the data needed to evaluate it.

#include <string>

#include "json.hpp"
#include "lpsrp/lindstedt.hpp"

namespace lpsrp {

inline constexpr const char* series_format = "lpsrp-series/1";

nlohmann::json series_to_json(const TrigSeries<double>& s);
TrigSeries<double> series_from_json(const nlohmann::json& j);
nlohmann::json frequency_to_json(const FrequencySeries<double>& f);
FrequencySeries<double> frequency_from_json(const nlohmann::json& j);

nlohmann::json linear_model_to_json(const LinearModel<double>& m);

nlohmann::json solution_to_json(const SeriesSolution<double>& s);
/// Rebuilds the solution; the linear model is recomputed from the stored
/// equilibrium, the series are taken verbatim.
SeriesSolution<double> solution_from_json(const nlohmann::json& j);

/// Canonical text of a document: two-space indent, trailing newline.
std::string dump_document(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

void write_solution(const std::string& path, const SeriesSolution<double>& s);
SeriesSolution<double> read_solution(const std::string& path);

}  // namespace lpsrp
