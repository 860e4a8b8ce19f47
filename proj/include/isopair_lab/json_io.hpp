#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isopair_lab/colligation.hpp"
#include "isopair_lab/ideal.hpp"
#include "isopair_lab/kernel.hpp"
#include "isopair_lab/poly2.hpp"
#include "isopair_lab/types.hpp"

namespace isopair_lab::json_io {

using Json = nlohmann::ordered_json;

/// Parses text, reporting the byte offset of a syntax error.
inline Json parse(const std::string &text, const std::string &source = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw InputError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline Json read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

namespace detail {

inline const Json &field(const Json &j, const char *key, const std::string &what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(what + ": missing field '" + key + "'");
  return j.at(key);
}

inline int as_int(const Json &j, const std::string &what) {
  if (!j.is_number_integer()) throw InputError(what + ": expected an integer");
  return j.get<int>();
}

} // namespace detail

inline Json to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

/// [re, im] or a bare real number.
inline Complex complex_from_json(const Json &j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw InputError("expected a complex number [re, im], got " + j.dump());
}

// --- BiPoly ----------------------------------------------------------------

inline Json to_json(const poly2::BiPoly &p) {
  Json out;
  out["bidegree"] = Json::array({p.deg_z(), p.deg_w()});
  Json rows = Json::array();
  for (int i = 0; i <= p.deg_z(); ++i) {
    Json row = Json::array();
    for (int j = 0; j <= p.deg_w(); ++j) row.push_back(to_json(p.coeff(i, j)));
    rows.push_back(row);
  }
  out["coeffs"] = rows;
  return out;
}

inline poly2::BiPoly bipoly_from_json(const Json &j) {
  const std::string what = "BiPoly";
  const Json &deg = detail::field(j, "bidegree", what);
  const Json &coeffs = detail::field(j, "coeffs", what);
  if (!deg.is_array() || deg.size() != 2) throw InputError("BiPoly: bidegree must be [n, m]");
  const int n = detail::as_int(deg[0], what);
  const int m = detail::as_int(deg[1], what);
  if (!coeffs.is_array()) throw InputError("BiPoly: coeffs must be an array");
  if (coeffs.empty()) {
    if (n >= 0 || m >= 0) throw InputError("BiPoly: empty coeffs need bidegree [-1, -1]");
    return {};
  }
  if (n < 0 || m < 0 || coeffs.size() != static_cast<std::size_t>(n + 1)) {
    throw InputError("BiPoly: coeffs must have n + 1 rows");
  }
  std::vector<Complex> grid;
  for (const auto &row : coeffs) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(m + 1)) {
      throw InputError("BiPoly: every row of coeffs must have m + 1 entries");
    }
    for (const auto &c : row) grid.push_back(complex_from_json(c));
  }
  return {n, m, std::move(grid)};
}

// --- Matrices and colligations ----------------------------------------------

inline Json to_json(const CMatrix &m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

inline CMatrix matrix_from_json(const Json &j, Eigen::Index rows, Eigen::Index cols, const std::string &what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(rows)) {
    throw InputError(what + ": expected " + std::to_string(rows) + " rows");
  }
  CMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json &row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
      throw InputError(what + ": expected " + std::to_string(cols) + " columns");
    }
    for (Eigen::Index k = 0; k < cols; ++k) out(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return out;
}

inline Json to_json(const colligation::Colligation &c) {
  Json out;
  out["M"] = c.M();
  out["N"] = c.N();
  out["A"] = to_json(c.A());
  out["B"] = to_json(c.B());
  out["C"] = to_json(c.C());
  out["D"] = to_json(c.D());
  return out;
}

inline colligation::Colligation colligation_from_json(const Json &j) {
  const std::string what = "Colligation";
  const int m = detail::as_int(detail::field(j, "M", what), what);
  const int n = detail::as_int(detail::field(j, "N", what), what);
  if (m <= 0 || n < 0) throw InputError("Colligation: need M > 0 and N >= 0");
  return {matrix_from_json(detail::field(j, "A", what), m, m, "Colligation.A"),
          matrix_from_json(detail::field(j, "B", what), m, n, "Colligation.B"),
          matrix_from_json(detail::field(j, "C", what), n, m, "Colligation.C"),
          matrix_from_json(detail::field(j, "D", what), n, n, "Colligation.D")};
}

/// A bare array of BiPoly objects or {"factors": [...]}.
inline std::vector<poly2::BiPoly> factors_from_json(const Json &j) {
  const Json &list = j.is_object() ? detail::field(j, "factors", "factors") : j;
  if (!list.is_array() || list.empty()) throw InputError("factors: expected a nonempty array of polynomials");
  std::vector<poly2::BiPoly> out;
  for (const auto &f : list) out.push_back(bipoly_from_json(f));
  return out;
}

// --- MatrixBiPoly ------------------------------------------------------------

inline Json to_json(const kernel::MatrixBiPoly &m) {
  Json out;
  out["shape"] = Json::array({m.rows(), m.cols()});
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  out["entries"] = rows;
  return out;
}

inline kernel::MatrixBiPoly matrix_bipoly_from_json(const Json &j) {
  const std::string what = "MatrixBiPoly";
  const Json &shape = detail::field(j, "shape", what);
  if (!shape.is_array() || shape.size() != 2) throw InputError("MatrixBiPoly: shape must be [rows, cols]");
  const int r = detail::as_int(shape[0], what);
  const int c = detail::as_int(shape[1], what);
  const Json &entries = detail::field(j, "entries", what);
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(r)) {
    throw InputError("MatrixBiPoly: entries do not match the shape");
  }
  kernel::MatrixBiPoly out(r, c);
  for (int i = 0; i < r; ++i) {
    const Json &row = entries[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(c)) {
      throw InputError("MatrixBiPoly: entries do not match the shape");
    }
    for (int k = 0; k < c; ++k) out(i, k) = bipoly_from_json(row[static_cast<std::size_t>(k)]);
  }
  return out;
}

// --- ExactBiPoly -------------------------------------------------------------

inline Json to_json(const ideal::ExactBiPoly &p) {
  Json terms = Json::array();
  for (const auto &[m, c] : p.terms()) {
    Json t;
    t["i"] = m.first;
    t["j"] = m.second;
    t["re"] = c.re().get_str();
    t["im"] = c.im().get_str();
    terms.push_back(t);
  }
  Json out;
  out["terms"] = terms;
  out["order"] = ideal::to_string(p.order());
  return out;
}

inline ideal::ExactBiPoly exact_from_json(const Json &j) {
  const std::string what = "ExactBiPoly";
  const ideal::TermOrder order =
      j.contains("order") ? ideal::parse_order(j.at("order").get<std::string>()) : ideal::TermOrder::lex_zw;
  ideal::ExactBiPoly out(order);
  const Json &terms = detail::field(j, "terms", what);
  if (!terms.is_array()) throw InputError("ExactBiPoly: terms must be an array");
  for (const auto &t : terms) {
    const int i = detail::as_int(detail::field(t, "i", what), what);
    const int k = detail::as_int(detail::field(t, "j", what), what);
    if (i < 0 || k < 0) throw InputError("ExactBiPoly: negative exponent");
    const auto text = [&](const char *key) {
      if (!t.contains(key)) return std::string("0");
      const Json &v = t.at(key);
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long>());
      throw InputError(std::string("ExactBiPoly: '") + key + "' must be a fraction string");
    };
    out.add_term({i, k}, ideal::GaussianRational::from_strings(text("re"), text("im")));
  }
  return out;
}

/// Exact polynomial from either JSON form; floating coefficients are rationalized.
inline ideal::ExactBiPoly any_exact_from_json(const Json &j, ideal::TermOrder order) {
  if (j.is_object() && j.contains("terms")) return exact_from_json(j).with_order(order);
  return ideal::ExactBiPoly::from_bipoly(bipoly_from_json(j), 1e-12, order);
}

} // namespace isopair_lab::json_io
