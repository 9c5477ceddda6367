#pragma once

// Solution documents:
//   {"vertices": [12 ints],
//    "faces": [{"corners": [a, b, c], "type": t} x 20],
//    "stats": {"nodes": n, "backtracks": b, "millis": ms}}

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "icosoku/model.hpp"

namespace icosoku {

class SolutionParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline nlohmann::ordered_json to_json(const Solution& s) {
  nlohmann::ordered_json doc;
  doc["vertices"] = s.vertex_values;
  auto faces = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < kFaceCount; ++f) {
    nlohmann::ordered_json face;
    face["corners"] = s.face_corners[f];
    face["type"] = s.face_types[f];
    faces.push_back(std::move(face));
  }
  doc["faces"] = std::move(faces);
  doc["stats"] = {{"nodes", s.stats.nodes_visited},
                  {"backtracks", s.stats.backtracks},
                  {"millis", s.stats.millis()}};
  return doc;
}

inline Solution solution_from_json(const nlohmann::json& doc) {
  try {
    Solution s;
    const auto& vertices = doc.at("vertices");
    if (!vertices.is_array() || vertices.size() != kVertexCount) {
      throw SolutionParseError("'vertices' must hold 12 integers");
    }
    for (std::size_t v = 0; v < kVertexCount; ++v) s.vertex_values[v] = vertices[v].get<int>();

    const auto& faces = doc.at("faces");
    if (!faces.is_array() || faces.size() != kFaceCount) throw SolutionParseError("'faces' must hold 20 records");
    for (std::size_t f = 0; f < kFaceCount; ++f) {
      const auto& corners = faces[f].at("corners");
      if (!corners.is_array() || corners.size() != 3) {
        throw SolutionParseError("face " + std::to_string(f) + ": 'corners' must hold 3 integers");
      }
      for (std::size_t c = 0; c < 3; ++c) s.face_corners[f][c] = corners[c].get<int>();
      s.face_types[f] = faces[f].at("type").get<int>();
    }

    if (doc.contains("stats")) {
      const auto& st = doc["stats"];
      s.stats.nodes_visited = st.value("nodes", std::uint64_t{0});
      s.stats.backtracks = st.value("backtracks", std::uint64_t{0});
      s.stats.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::duration<double, std::milli>(st.value("millis", 0.0)));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SolutionParseError(e.what());
  }
}

inline Solution parse_solution(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SolutionParseError(e.what());
  }
  return solution_from_json(doc);
}

inline Solution read_solution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SolutionParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_solution(ss.str());
}

inline void write_solution(const std::filesystem::path& path, const Solution& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(s).dump(2) << '\n';
}

}  // namespace icosoku
