#ifndef CKERN_IO_HPP
#define CKERN_IO_HPP

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ckern/blockmat.hpp"
#include "ckern/error.hpp"
#include "ckern/graph.hpp"

namespace ckern::io {

using json = nlohmann::json;

/// Shortest decimal text that round-trips: 17 significant digits.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("failed reading '" + path + "'");
  return ss.str();
}

// ---------------------------------------------------------------------------
// Matrices

inline Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw schema_error(what + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.empty()) throw schema_error(what + ": row " + std::to_string(r) + " is not an array");
    if (r == 0) {
      cols = row.size();
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      throw schema_error(what + ": ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw schema_error(what + ": non-numeric entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Row-major CSV of numbers; blank lines and lines starting with '#' are skipped.
inline Matrix parse_matrix_csv(const std::string& text, const std::string& what = "matrix") {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw schema_error(what + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw schema_error(what + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw schema_error(what + ": empty");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

inline std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

/// "rotation:θ" for the 2×2 rotation, "identity:d", "scalar:±1", or a CSV
/// file path.
inline Matrix parse_matrix_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = colon == std::string::npos ? "" : spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (head == "rotation") return rotation(std::stod(arg));
    if (head == "identity") return identity(static_cast<std::size_t>(std::stoul(arg)));
    if (head == "scalar") return Matrix::Constant(1, 1, std::stod(arg));
  } catch (const std::logic_error&) {
    throw schema_error("bad matrix shorthand '" + spec + "'");
  }
  return parse_matrix_csv(read_file(spec), spec);
}

// ---------------------------------------------------------------------------
// Graph documents

/// A parsed graph plus any explicitly stored reverse connections.
struct GraphDocument {
  ConnectionGraph graph;
  std::vector<ExplicitReverse> reverses;
};

namespace detail {

inline std::string id_text(const json& j, const std::string& what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  throw schema_error(what + ": vertex ids must be strings or integers");
}

}  // namespace detail

/// { "dim": d, "vertices": [ids], "edges": [{"u", "v", "w", "sigma_uv"[, "sigma_vu"]}] }.
/// A missing sigma_uv means the identity. Matrices of the wrong shape are
/// kept so that validate() can report them.
inline GraphDocument graph_from_json(const json& doc) {
  if (!doc.is_object()) throw schema_error("graph: top level must be an object");
  for (const char* key : {"dim", "vertices", "edges"}) {
    if (!doc.contains(key)) throw schema_error(std::string("graph: missing key '") + key + "'");
  }
  if (!doc["dim"].is_number_integer() || doc["dim"].get<std::int64_t>() < 1) {
    throw schema_error("graph: 'dim' must be a positive integer");
  }
  if (!doc["vertices"].is_array()) throw schema_error("graph: 'vertices' must be an array");
  if (!doc["edges"].is_array()) throw schema_error("graph: 'edges' must be an array");

  GraphDocument out{ConnectionGraph(doc["dim"].get<std::size_t>()), {}};
  ConnectionGraph& g = out.graph;
  for (const auto& v : doc["vertices"]) {
    const std::string id = detail::id_text(v, "graph");
    if (g.index_of(id)) throw schema_error("graph: duplicate vertex id '" + id + "'");
    g.add_vertex(id);
  }
  std::size_t i = 0;
  for (const auto& e : doc["edges"]) {
    const std::string where = "graph: edge " + std::to_string(i++);
    if (!e.is_object() || !e.contains("u") || !e.contains("v")) throw schema_error(where + ": needs 'u' and 'v'");
    const auto u = g.index_of(detail::id_text(e["u"], where));
    const auto v = g.index_of(detail::id_text(e["v"], where));
    if (!u || !v) throw schema_error(where + ": unknown endpoint");
    if (*u == *v) throw schema_error(where + ": self loop");
    if (g.edge_between(*u, *v)) throw schema_error(where + ": duplicate edge");
    double w = 1.0;
    if (e.contains("w")) {
      if (!e["w"].is_number()) throw schema_error(where + ": 'w' must be a number");
      w = e["w"].get<double>();
    }
    Matrix sigma = e.contains("sigma_uv") ? matrix_from_json(e["sigma_uv"], where + " sigma_uv") : identity(g.dim());
    const std::size_t idx = g.add_edge(*u, *v, w, std::move(sigma));
    if (e.contains("sigma_vu")) out.reverses.push_back({idx, matrix_from_json(e["sigma_vu"], where + " sigma_vu")});
  }
  return out;
}

inline GraphDocument parse_graph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw schema_error(std::string("graph: malformed JSON: ") + ex.what());
  }
  return graph_from_json(doc);
}

inline GraphDocument load_graph(const std::string& path) { return parse_graph(read_file(path)); }

inline json graph_to_json(const ConnectionGraph& g) {
  json doc;
  doc["dim"] = g.dim();
  doc["vertices"] = g.vertex_ids();
  json edges = json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({{"u", g.id(e.u)}, {"v", g.id(e.v)}, {"w", e.weight}, {"sigma_uv", matrix_to_json(e.sigma_uv)}});
  }
  doc["edges"] = std::move(edges);
  return doc;
}

}  // namespace ckern::io

#endif  // CKERN_IO_HPP
