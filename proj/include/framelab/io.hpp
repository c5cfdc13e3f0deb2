#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "framelab/banach_asf.hpp"
#include "framelab/hilbert_frames.hpp"
#include "framelab/paulsen_flow.hpp"
#include "framelab/projections.hpp"

namespace framelab::io {

using Json = nlohmann::json;

// Documents. Numbers must be finite; rows must all have length `dim`.
Frame frame_from_json(const Json& doc);
Json frame_to_json(const Frame& frame);

ASF asf_from_json(const Json& doc);
Json asf_to_json(const ASF& asf);

/// Matrix from {"kind":"projection","dim":d,"matrix":[[row],...]}.
Matrix projection_matrix_from_json(const Json& doc);
Json projection_to_json(const Matrix& m);

AuerbachSystem auerbach_from_json(const Json& doc);
Json auerbach_to_json(const AuerbachSystem& sys);

Json report_to_json(const FrameReport& report);
Json report_to_json(const ASFReport& report);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& doc);

}  // namespace framelab::io
