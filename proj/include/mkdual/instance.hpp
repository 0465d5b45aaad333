#pragma once

// JSON instance files. Rationals are "p/q" strings, floats are JSON
// numbers. Needs nlohmann/json; not pulled in by mkdual.hpp.

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mkdual/mkdual.hpp"

namespace mkdual {

using Json = nlohmann::ordered_json;

enum class CostFormula { matrix, absolute_difference, squared_difference, equality_indicator, custom_table };

inline std::string to_string(CostFormula f) {
  switch (f) {
    case CostFormula::matrix: return "matrix";
    case CostFormula::absolute_difference: return "absolute-difference";
    case CostFormula::squared_difference: return "squared-difference";
    case CostFormula::equality_indicator: return "equality-indicator";
    case CostFormula::custom_table: return "custom-table";
  }
  return "?";
}

template <class S>
struct TableEntry {
  std::size_t x = 0;
  std::size_t y = 0;
  S value{0};
  bool operator==(const TableEntry&) const = default;
};

/// Cost as written in the file. Formulas are sampled on the point
/// coordinates (x_coords, y_coords); equality-indicator compares labels
/// when no coordinates are given.
template <class S>
struct CostSpec {
  CostFormula formula = CostFormula::matrix;
  Matrix<S> matrix;
  std::vector<S> x_coords, y_coords;
  std::vector<TableEntry<S>> entries;
  S fill{0};

  bool operator==(const CostSpec&) const = default;
};

template <class S>
struct Instance {
  ProbabilitySpace<S> space_x, space_y;
  CostSpec<S> cost_spec;
  std::optional<RectangleFamily> rectangles;
  std::optional<Partition> partition;
  std::optional<std::vector<std::size_t>> map;

  static constexpr ArithmeticMode arithmetic = mode_of<S>();

  std::size_t nx() const { return space_x.size(); }
  std::size_t ny() const { return space_y.size(); }
  const Weights<S>& mu() const { return space_x.weights; }
  const Weights<S>& nu() const { return space_y.weights; }

  /// Materialized |X| x |Y| cost.
  CostMatrix<S> cost() const {
    const auto& s = cost_spec;
    Matrix<S> m(nx(), ny());
    for (std::size_t x = 0; x < nx(); ++x)
      for (std::size_t y = 0; y < ny(); ++y) {
        switch (s.formula) {
          case CostFormula::matrix: m(x, y) = s.matrix(x, y); break;
          case CostFormula::absolute_difference: m(x, y) = abs_value<S>(s.x_coords[x] - s.y_coords[y]); break;
          case CostFormula::squared_difference: {
            S diff = s.x_coords[x] - s.y_coords[y];
            m(x, y) = diff * diff;
            break;
          }
          case CostFormula::equality_indicator: {
            bool same = s.x_coords.empty() ? space_x.points[x] == space_y.points[y] : s.x_coords[x] == s.y_coords[y];
            m(x, y) = same ? S(1) : S(0);
            break;
          }
          case CostFormula::custom_table: m(x, y) = s.fill; break;
        }
      }
    if (s.formula == CostFormula::custom_table)
      for (const auto& e : s.entries) m(e.x, e.y) = e.value;
    return CostMatrix<S>(std::move(m));
  }

  bool operator==(const Instance&) const = default;
};

using AnyInstance = std::variant<Instance<Rational>, Instance<double>>;

namespace detail {

template <class S>
Json scalar_to_json(const S& v) {
  if constexpr (is_exact_v<S>) return format_rational(v);
  else return v;
}

template <class S>
S scalar_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return parse_scalar<S>(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, e.what());
    }
  }
  if (j.is_number_integer()) return S(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return S(j.get<std::uint64_t>());
  if (j.is_number_float()) {
    double v = j.get<double>();
    if constexpr (is_exact_v<S>) {
      if (std::floor(v) != v) throw ParseError(path, "non-integer number in rational mode; write it as a \"p/q\" string");
      return Rational(static_cast<std::int64_t>(v));
    } else {
      return v;
    }
  }
  throw ParseError(path, "expected a number or a \"p/q\" string");
}

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
inline std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  return j;
}

template <class S>
std::vector<S> vector_from_json(const Json& j, const std::string& path) {
  require_array(j, path);
  std::vector<S> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(scalar_from_json<S>(j[i], at(path, i)));
  return out;
}

template <class S>
Matrix<S> matrix_from_json(const Json& j, const std::string& path) {
  require_array(j, path);
  std::vector<std::vector<S>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(vector_from_json<S>(j[i], at(path, i)));
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].size() != rows[0].size()) throw ValidationError(at(path, i) + ": ragged matrix row");
  return Matrix<S>::from_rows(rows);
}

inline std::size_t index_from_json(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw ParseError(path, "expected a nonnegative integer index");
  return j.get<std::size_t>();
}

inline std::vector<std::size_t> indices_from_json(const Json& j, const std::string& path) {
  require_array(j, path);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(index_from_json(j[i], at(path, i)));
  return out;
}

template <class S>
Json vector_to_json(const std::vector<S>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(scalar_to_json(x));
  return out;
}

template <class S>
Json matrix_to_json(const Matrix<S>& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

inline Json mask_to_json(const SubsetMask& m) { return m.indices(); }

inline SubsetMask mask_from_json(const Json& j, std::size_t n, const std::string& path) {
  auto idx = indices_from_json(j, path);
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (idx[i] >= n) throw ValidationError(at(path, i) + ": index " + std::to_string(idx[i]) + " out of range");
  return SubsetMask::from_indices(n, idx);
}

template <class S>
ProbabilitySpace<S> space_from_json(const Json& j, const std::string& path) {
  auto weights = vector_from_json<S>(require(j, "weights", path), join(path, "weights"));
  std::vector<std::string> points;
  if (auto it = j.find("points"); it != j.end()) {
    require_array(*it, join(path, "points"));
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) throw ParseError(at(join(path, "points"), i), "expected a string label");
      points.push_back((*it)[i].get<std::string>());
    }
    if (points.size() != weights.size()) throw ValidationError(path + ": points and weights differ in length");
  } else {
    for (std::size_t i = 0; i < weights.size(); ++i) points.push_back(std::to_string(i));
  }
  std::optional<Matrix<S>> metric;
  if (auto it = j.find("metric"); it != j.end()) {
    metric = matrix_from_json<S>(*it, join(path, "metric"));
    if (metric->rows() != weights.size() || metric->cols() != weights.size())
      throw ValidationError(join(path, "metric") + ": must be |points| x |points|");
  }
  return ProbabilitySpace<S>(std::move(points), std::move(weights), std::move(metric));
}

template <class S>
Json space_to_json(const ProbabilitySpace<S>& s) {
  Json out;
  out["points"] = s.points;
  out["weights"] = vector_to_json(s.weights);
  if (s.metric) out["metric"] = matrix_to_json(*s.metric);
  return out;
}

inline std::size_t point_ref(const Json& j, const std::vector<std::string>& labels, const std::string& path) {
  if (j.is_string()) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == j.get<std::string>()) return i;
    throw ValidationError(path + ": unknown point label '" + j.get<std::string>() + "'");
  }
  auto i = index_from_json(j, path);
  if (i >= labels.size()) throw ValidationError(path + ": index " + std::to_string(i) + " out of range");
  return i;
}

template <class S>
CostSpec<S> cost_from_json(const Json& j, const ProbabilitySpace<S>& x, const ProbabilitySpace<S>& y) {
  const std::string path = "cost";
  CostSpec<S> c;
  if (!j.is_object()) throw ParseError(path, "expected an object");
  if (j.contains("matrix")) {
    c.formula = CostFormula::matrix;
    c.matrix = matrix_from_json<S>(j["matrix"], "cost.matrix");
    if (c.matrix.rows() != x.size() || c.matrix.cols() != y.size())
      throw ValidationError("cost.matrix: expected " + std::to_string(x.size()) + " x " + std::to_string(y.size()) +
                            ", got " + std::to_string(c.matrix.rows()) + " x " + std::to_string(c.matrix.cols()));
    return c;
  }
  const auto& name = require(j, "formula", path);
  if (!name.is_string()) throw ParseError("cost.formula", "expected a string");
  const auto f = name.get<std::string>();
  auto coords = [&](bool required) {
    if (!j.contains("x") && !required) return;
    c.x_coords = vector_from_json<S>(require(j, "x", path), "cost.x");
    c.y_coords = vector_from_json<S>(require(j, "y", path), "cost.y");
    if (c.x_coords.size() != x.size()) throw ValidationError("cost.x: one coordinate per point of X expected");
    if (c.y_coords.size() != y.size()) throw ValidationError("cost.y: one coordinate per point of Y expected");
  };
  if (f == "absolute-difference") {
    c.formula = CostFormula::absolute_difference;
    coords(true);
  } else if (f == "squared-difference") {
    c.formula = CostFormula::squared_difference;
    coords(true);
  } else if (f == "equality-indicator") {
    c.formula = CostFormula::equality_indicator;
    coords(false);
  } else if (f == "custom-table") {
    c.formula = CostFormula::custom_table;
    if (j.contains("default")) c.fill = scalar_from_json<S>(j["default"], "cost.default");
    const auto& entries = require_array(require(j, "entries", path), "cost.entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto p = at("cost.entries", i);
      TableEntry<S> e;
      e.x = point_ref(require(entries[i], "x", p), x.points, join(p, "x"));
      e.y = point_ref(require(entries[i], "y", p), y.points, join(p, "y"));
      e.value = scalar_from_json<S>(require(entries[i], "value", p), join(p, "value"));
      c.entries.push_back(e);
    }
  } else {
    throw ParseError("cost.formula", "unknown formula '" + f + "'");
  }
  return c;
}

template <class S>
Json cost_to_json(const CostSpec<S>& c) {
  Json out;
  if (c.formula == CostFormula::matrix) {
    out["matrix"] = matrix_to_json(c.matrix);
    return out;
  }
  out["formula"] = to_string(c.formula);
  const bool sampled = c.formula == CostFormula::absolute_difference || c.formula == CostFormula::squared_difference ||
                       (c.formula == CostFormula::equality_indicator && !c.x_coords.empty());
  if (sampled) {
    out["x"] = vector_to_json(c.x_coords);
    out["y"] = vector_to_json(c.y_coords);
  }
  if (c.formula == CostFormula::custom_table) {
    out["default"] = scalar_to_json(c.fill);
    Json entries = Json::array();
    for (const auto& e : c.entries) entries.push_back(Json{{"x", e.x}, {"y", e.y}, {"value", scalar_to_json(e.value)}});
    out["entries"] = std::move(entries);
  }
  return out;
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

template <class S>
void validate(const Instance<S>& inst) {
  for (const auto& [name, space] : {std::pair{"space_x", &inst.space_x}, std::pair{"space_y", &inst.space_y}}) {
    if (space->size() == 0) throw ValidationError(std::string(name) + ": no points");
    auto report = validate_space(*space);
    if (!report.valid()) throw ValidationError(std::string(name) + ": " + report.describe());
  }
  if (inst.rectangles) {
    const auto& fam = *inst.rectangles;
    if (fam.x_size != inst.nx() || fam.y_size != inst.ny()) throw ValidationError("rectangles: sized to the wrong spaces");
  }
  if (inst.partition) {
    if (auto d = partition_defect(*inst.partition, inst.nx()); !d.empty()) throw ValidationError("partition: " + d);
    if (auto k = inst.partition->null_cell) {
      auto m = mass(inst.mu(), inst.partition->cells[*k]);
      if (definitely_positive<S>(m)) throw ValidationError("partition.null_cell: cell carries positive mu mass");
    }
  }
  if (inst.map) {
    if (inst.map->size() != inst.nx()) throw ValidationError("map: one target per point of X expected");
    for (std::size_t i = 0; i < inst.map->size(); ++i)
      if ((*inst.map)[i] >= inst.ny()) throw ValidationError(at("map", i) + ": target out of range");
  }
}

template <class S>
Instance<S> instance_from_json(const Json& j) {
  Instance<S> inst;
  inst.space_x = space_from_json<S>(require(j, "space_x", ""), "space_x");
  inst.space_y = space_from_json<S>(require(j, "space_y", ""), "space_y");
  inst.cost_spec = cost_from_json<S>(require(j, "cost", ""), inst.space_x, inst.space_y);
  if (auto it = j.find("rectangles"); it != j.end()) {
    require_array(*it, "rectangles");
    RectangleFamily fam(inst.nx(), inst.ny());
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto p = at("rectangles", i);
      fam.rects.push_back({mask_from_json(require((*it)[i], "a", p), inst.nx(), join(p, "a")),
                           mask_from_json(require((*it)[i], "b", p), inst.ny(), join(p, "b"))});
    }
    inst.rectangles = std::move(fam);
  }
  if (auto it = j.find("partition"); it != j.end()) {
    const auto& cells = require_array(require(*it, "cells", "partition"), "partition.cells");
    Partition part;
    for (std::size_t k = 0; k < cells.size(); ++k) part.cells.push_back(mask_from_json(cells[k], inst.nx(), at("partition.cells", k)));
    if (auto nc = it->find("null_cell"); nc != it->end() && !nc->is_null()) {
      part.null_cell = index_from_json(*nc, "partition.null_cell");
      if (*part.null_cell >= cells.size()) throw ValidationError("partition.null_cell: no such cell");
    }
    if (auto reps = it->find("representatives"); reps != it->end()) {
      require_array(*reps, "partition.representatives");
      if (reps->size() != cells.size()) throw ValidationError("partition.representatives: one entry per cell expected");
      for (std::size_t k = 0; k < reps->size(); ++k) {
        if ((*reps)[k].is_null()) part.representatives.emplace_back(std::nullopt);
        else part.representatives.emplace_back(index_from_json((*reps)[k], at("partition.representatives", k)));
      }
    } else {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        auto idx = part.cells[k].indices();
        if (part.is_null(k) || idx.empty()) part.representatives.emplace_back(std::nullopt);
        else part.representatives.emplace_back(idx.front());
      }
    }
    inst.partition = std::move(part);
  }
  if (auto it = j.find("map"); it != j.end()) inst.map = indices_from_json(*it, "map");
  validate(inst);
  return inst;
}

template <class To, class From>
To convert_scalar(const From& v) {
  if constexpr (std::is_same_v<To, From>) return v;
  else if constexpr (is_exact_v<To>) return Rational(v);  // binary double, exactly
  else return to_double(v);
}

template <class To, class From>
std::vector<To> convert_vector(const std::vector<From>& v) {
  std::vector<To> out;
  for (const auto& x : v) out.push_back(convert_scalar<To>(x));
  return out;
}

template <class To, class From>
Matrix<To> convert_matrix(const Matrix<From>& m) {
  Matrix<To> out(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.size(); ++k) out.flat(k) = convert_scalar<To>(m.flat(k));
  return out;
}

template <class To, class From>
ProbabilitySpace<To> convert_space(const ProbabilitySpace<From>& s) {
  std::optional<Matrix<To>> metric;
  if (s.metric) metric = convert_matrix<To>(*s.metric);
  return ProbabilitySpace<To>(s.points, convert_vector<To>(s.weights), std::move(metric));
}

}  // namespace detail

template <class S>
Json to_json(const Instance<S>& inst) {
  Json j;
  j["arithmetic"] = to_string(Instance<S>::arithmetic);
  j["space_x"] = detail::space_to_json(inst.space_x);
  j["space_y"] = detail::space_to_json(inst.space_y);
  j["cost"] = detail::cost_to_json(inst.cost_spec);
  if (inst.rectangles) {
    Json rects = Json::array();
    for (const auto& r : inst.rectangles->rects)
      rects.push_back(Json{{"a", detail::mask_to_json(r.a)}, {"b", detail::mask_to_json(r.b)}});
    j["rectangles"] = std::move(rects);
  }
  if (inst.partition) {
    const auto& p = *inst.partition;
    Json cells = Json::array(), reps = Json::array();
    for (const auto& c : p.cells) cells.push_back(detail::mask_to_json(c));
    for (const auto& r : p.representatives) reps.push_back(r ? Json(*r) : Json(nullptr));
    j["partition"] = Json{{"cells", cells}, {"representatives", reps}};
    if (p.null_cell) j["partition"]["null_cell"] = *p.null_cell;
  }
  if (inst.map) j["map"] = *inst.map;
  return j;
}

inline std::string to_string(const AnyInstance& inst) {
  return std::visit([](const auto& i) { return to_json(i).dump(2); }, inst);
}

/// Same instance in the other arithmetic. double -> rational is exact on
/// the binary value; the result is revalidated.
template <class To, class From>
Instance<To> convert_instance(const Instance<From>& in) {
  Instance<To> out;
  out.space_x = detail::convert_space<To>(in.space_x);
  out.space_y = detail::convert_space<To>(in.space_y);
  out.cost_spec.formula = in.cost_spec.formula;
  out.cost_spec.matrix = detail::convert_matrix<To>(in.cost_spec.matrix);
  out.cost_spec.x_coords = detail::convert_vector<To>(in.cost_spec.x_coords);
  out.cost_spec.y_coords = detail::convert_vector<To>(in.cost_spec.y_coords);
  for (const auto& e : in.cost_spec.entries) out.cost_spec.entries.push_back({e.x, e.y, detail::convert_scalar<To>(e.value)});
  out.cost_spec.fill = detail::convert_scalar<To>(in.cost_spec.fill);
  out.rectangles = in.rectangles;
  out.partition = in.partition;
  out.map = in.map;
  detail::validate(out);
  return out;
}

/// Parses and validates. `mode` overrides the file's "arithmetic" field.
inline AnyInstance parse_instance(const std::string& text, std::optional<ArithmeticMode> mode = std::nullopt) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("line " + std::to_string(detail::line_of(text, e.byte)), e.what());
  }
  if (!j.is_object()) throw ParseError("", "instance must be a JSON object");
  ArithmeticMode file_mode = ArithmeticMode::rational;
  if (auto it = j.find("arithmetic"); it != j.end()) {
    if (*it == "rational") file_mode = ArithmeticMode::rational;
    else if (*it == "float") file_mode = ArithmeticMode::floating;
    else throw ParseError("arithmetic", "expected \"rational\" or \"float\"");
  }
  if (file_mode == ArithmeticMode::rational) {
    auto inst = detail::instance_from_json<Rational>(j);
    if (mode == ArithmeticMode::floating) return convert_instance<double>(inst);
    return inst;
  }
  auto inst = detail::instance_from_json<double>(j);
  if (mode == ArithmeticMode::rational) return convert_instance<Rational>(inst);
  return inst;
}

inline AnyInstance load_instance(const std::string& path, std::optional<ArithmeticMode> mode = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open instance file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), mode);
}

}  // namespace mkdual
