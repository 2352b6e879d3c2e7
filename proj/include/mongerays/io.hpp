#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mongerays/mmspace.hpp"

namespace mongerays {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "monge-rays/1";

// Two-space indentation, sorted keys, floats with 17 significant digits, scalar arrays
// on one line, non-finite numbers as null. Ends with a newline.
std::string dump_json(const Json& value);

// Throws InputError on unreadable files or malformed JSON.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// {"points": [...], "mode": "matrix", "dist": [[...]], "weights": [...]} or
// {"mode": "graph", "edges": [[id, id, length], ...]}. Optional "geo_tol".
MetricMeasureSpace space_from_json(const Json& doc);
Json space_to_json(const MetricMeasureSpace& space);

// {"mass": {id: value, ...}}; absent ids carry zero mass.
ProbabilityMeasure measure_from_json(const MetricMeasureSpace& space, const Json& doc);
Json measure_to_json(const MetricMeasureSpace& space, const ProbabilityMeasure& measure);

}  // namespace mongerays
