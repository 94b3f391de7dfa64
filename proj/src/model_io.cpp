#include "gaussrd/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gaussrd {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(),
                                         text.begin() + offset, '\n'));
}

Eigen::MatrixXd read_matrix(const json& j, const std::string& field,
                            const std::string& origin) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ParseError(origin + ": field '" + field +
                     "' must be a nested array (rows of numbers)");
  const auto rows = j.size();
  const auto cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ParseError(origin + ": field '" + field + "' row " +
                       std::to_string(i) + " has inconsistent length");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number())
        throw ParseError(origin + ": field '" + field + "' entry (" +
                         std::to_string(i) + "," + std::to_string(k) +
                         ") is not a number");
      m(i, k) = j[i][k].get<double>();
      if (!std::isfinite(m(i, k)))
        throw ParseError(origin + ": field '" + field + "' entry (" +
                         std::to_string(i) + "," + std::to_string(k) +
                         ") is not finite");
    }
  }
  return m;
}

Eigen::VectorXd read_vector(const json& j, const std::string& field,
                            const std::string& origin) {
  if (!j.is_array())
    throw ParseError(origin + ": field '" + field + "' must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ParseError(origin + ": field '" + field + "' entry " +
                       std::to_string(i) + " is not a number");
    v[i] = j[i].get<double>();
    if (!std::isfinite(v[i]))
      throw ParseError(origin + ": field '" + field + "' entry " +
                       std::to_string(i) + " is not finite");
  }
  return v;
}

const json& require(const json& j, const std::string& field,
                    const std::string& origin) {
  auto it = j.find(field);
  if (it == j.end())
    throw ParseError(origin + ": missing field '" + field + "'");
  return *it;
}

void write_matrix(std::ostringstream& out, const Eigen::MatrixXd& m) {
  out << "[";
  for (int i = 0; i < m.rows(); ++i) {
    out << (i ? ", [" : "[");
    for (int j = 0; j < m.cols(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? ", " : "") << buf;
    }
    out << "]";
  }
  out << "]";
}

void write_vector(std::ostringstream& out, const Eigen::VectorXd& v) {
  out << "[";
  for (int i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out << (i ? ", " : "") << buf;
  }
  out << "]";
}

}  // namespace

LoadedModel parse_model(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + " line " +
                     std::to_string(line_of_offset(text, e.byte)) + ": " +
                     e.what());
  }
  if (!j.is_object())
    throw ParseError(origin + ": top level must be an object");

  std::string kind = "remote";
  if (auto it = j.find("kind"); it != j.end()) {
    if (!it->is_string())
      throw ParseError(origin + ": field 'kind' must be a string");
    kind = it->get<std::string>();
  }

  if (kind == "direct") {
    DirectModel dm;
    dm.l = require(j, "l", origin).get<int>();
    dm.sigma_x = read_matrix(require(j, "sigma_x", origin), "sigma_x", origin);
    dm.noise_var =
        read_vector(require(j, "noise_var", origin), "noise_var", origin);
    try {
      return validate_direct_model(std::move(dm));
    } catch (const Error& e) {
      throw ParseError(origin + ": " + e.what());
    }
  }
  if (kind != "remote")
    throw ParseError(origin + ": field 'kind' must be 'remote' or 'direct'");

  SourceModel m;
  m.k = require(j, "k", origin).get<int>();
  m.l = require(j, "l", origin).get<int>();
  m.sigma_x = read_matrix(require(j, "sigma_x", origin), "sigma_x", origin);
  m.a = read_matrix(require(j, "a", origin), "a", origin);
  m.noise_var =
      read_vector(require(j, "noise_var", origin), "noise_var", origin);
  try {
    return validate_model(std::move(m));
  } catch (const Error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), path);
}

std::string to_json(const SourceModel& model) {
  std::ostringstream out;
  out << "{\"kind\": \"remote\", \"k\": " << model.k << ", \"l\": " << model.l
      << ", \"sigma_x\": ";
  write_matrix(out, model.sigma_x);
  out << ", \"a\": ";
  write_matrix(out, model.a);
  out << ", \"noise_var\": ";
  write_vector(out, model.noise_var);
  out << "}";
  return out.str();
}

std::string to_json(const DirectModel& model) {
  std::ostringstream out;
  out << "{\"kind\": \"direct\", \"l\": " << model.l << ", \"sigma_x\": ";
  write_matrix(out, model.sigma_x);
  out << ", \"noise_var\": ";
  write_vector(out, model.noise_var);
  out << "}";
  return out.str();
}

}  // namespace gaussrd
