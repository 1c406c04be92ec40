#pragma once

// Text and JSON formats.
//
// Hypergraph text form (canonical):
//   # comment lines start with '#'
//   n m
//   k v1 v2 ... vk        (one line per edge, ids strictly increasing)
// A "# model=<tag>" comment carries the provenance tag through a round trip.
// The JSON mirror is {"n": .., "m": .., "edges": [[..], ..]}.

#include <cctype>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disclab/discrepancy.hpp"
#include "disclab/error.hpp"
#include "disclab/h2_moments.hpp"
#include "disclab/hypergraph.hpp"
#include "disclab/spectral.hpp"

namespace disclab {

using json = nlohmann::json;

inline void write_text(std::ostream& os, const Hypergraph& h) {
  if (!h.model_tag.empty()) os << "# model=" << h.model_tag << '\n';
  os << h.n << ' ' << h.edges.size() << '\n';
  for (const auto& e : h.edges) {
    os << e.size();
    for (Vertex v : e) os << ' ' << v;
    os << '\n';
  }
}

inline json to_json(const Hypergraph& h) {
  json j;
  j["n"] = h.n;
  j["m"] = h.edges.size();
  j["edges"] = h.edges;
  if (!h.model_tag.empty()) j["model"] = h.model_tag;
  return j;
}

namespace detail {

inline bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline long parse_int(std::istringstream& in, std::size_t line, const char* what) {
  long v;
  if (!(in >> v)) throw ParseError(line, std::string("expected ") + what);
  return v;
}

inline void expect_end(std::istringstream& in, std::size_t line) {
  std::string rest;
  if (in >> rest) throw ParseError(line, "unexpected trailing token '" + rest + "'");
}

}  // namespace detail

inline Hypergraph read_text(std::istream& is) {
  Hypergraph h;
  h.model_tag = "file";
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  long m = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# model=", 0) == 0) {
      h.model_tag = line.substr(8);
      continue;
    }
    if (detail::blank_or_comment(line)) continue;
    std::istringstream in(line);
    if (!have_header) {
      const long n = detail::parse_int(in, lineno, "vertex count n");
      m = detail::parse_int(in, lineno, "edge count m");
      detail::expect_end(in, lineno);
      if (n < 0 || m < 0 || n > std::numeric_limits<int>::max())
        throw ParseError(lineno, "n and m must be nonnegative");
      h.n = static_cast<int>(n);
      h.edges.reserve(static_cast<std::size_t>(m));
      have_header = true;
      continue;
    }
    if (static_cast<long>(h.edges.size()) == m) throw ParseError(lineno, "more edge lines than m");
    const long k = detail::parse_int(in, lineno, "edge size k");
    if (k < 0) throw ParseError(lineno, "edge size must be nonnegative");
    Edge e;
    e.reserve(static_cast<std::size_t>(k));
    for (long i = 0; i < k; ++i) {
      const long v = detail::parse_int(in, lineno, "vertex id");
      if (v < 0 || v >= h.n)
        throw ParseError(lineno, "vertex id " + std::to_string(v) + " outside [0, " +
                                     std::to_string(h.n) + ")");
      if (!e.empty() && v <= e.back()) throw ParseError(lineno, "vertex ids must be strictly increasing");
      e.push_back(static_cast<Vertex>(v));
    }
    detail::expect_end(in, lineno);
    h.edges.push_back(std::move(e));
  }
  if (!have_header) throw ParseError(lineno, "missing 'n m' header");
  if (static_cast<long>(h.edges.size()) != m)
    throw ParseError(lineno, "expected " + std::to_string(m) + " edge lines, found " +
                                 std::to_string(h.edges.size()));
  return h;
}

inline Hypergraph from_json(const json& j) {
  Hypergraph h;
  try {
    h.n = j.at("n").get<int>();
    h.edges = j.at("edges").get<std::vector<Edge>>();
    h.model_tag = j.value("model", std::string("file"));
    if (j.contains("m") && j.at("m").get<std::size_t>() != h.edges.size())
      throw ParameterError("field m does not match the number of edges");
    h.validate();
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("malformed hypergraph JSON: ") + e.what());
  } catch (const ParameterError& e) {
    throw ParseError(1, e.what());
  }
  return h;
}

inline void save(const Hypergraph& h, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  const bool as_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (as_json)
    os << to_json(h).dump() << '\n';
  else
    write_text(os, h);
  if (!os) throw IoError("write failed: " + path);
}

/// Reads either format; JSON is recognized by a leading '{'.
inline Hypergraph load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::ws(is);
  if (is.peek() == '{') {
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw ParseError(1, std::string("malformed JSON: ") + e.what());
    }
    return from_json(j);
  }
  return read_text(is);
}

// ---------------------------------------------------------------------------

inline void write_coloring(std::ostream& os, const Coloring& chi) {
  for (std::size_t i = 0; i < chi.signs.size(); ++i) {
    if (i) os << ' ';
    os << (chi.signs[i] > 0 ? "+1" : "-1");
  }
  os << '\n';
}

inline Coloring read_coloring(std::istream& is) {
  Coloring chi;
  std::string line, tok;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::blank_or_comment(line)) continue;
    std::istringstream in(line);
    while (in >> tok) {
      if (tok == "+1" || tok == "1")
        chi.signs.push_back(1);
      else if (tok == "-1")
        chi.signs.push_back(-1);
      else
        throw ParseError(lineno, "coloring entries must be +1 or -1, got '" + tok + "'");
    }
  }
  return chi;
}

inline Coloring load_coloring(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_coloring(is);
}

inline void save_coloring(const Coloring& chi, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_coloring(os, chi);
}

inline json to_json(const DiscReport& r, bool per_edge = false) {
  json j;
  j["disc"] = r.disc;
  j["argmax_edge"] = r.argmax_edge ? json(*r.argmax_edge) : json(nullptr);
  if (per_edge) j["per_edge"] = r.per_edge;
  return j;
}

inline json to_json(const NormEstimate& e) {
  return json{{"sigma", e.sigma},
              {"iterations", e.iterations},
              {"residual", e.residual},
              {"c_norm", e.c_norm},
              {"converged", e.converged}};
}

inline json to_json(const MomentReport& r) {
  auto exact = [](const ExactRational& q) {
    return json{{"num", boost::multiprecision::numerator(q).str()},
                {"den", boost::multiprecision::denominator(q).str()}};
  };
  return json{{"n", r.n},
              {"m", r.m},
              {"e_x", exact(r.e_x)},
              {"e_x2", exact(r.e_x2)},
              {"ratio", exact(r.ratio)},
              {"e_x_float", r.e_x_float},
              {"e_x2_float", r.e_x2_float},
              {"ratio_float", r.ratio_float},
              {"e_x_asymptotic", r.e_x_asymptotic}};
}

}  // namespace disclab
