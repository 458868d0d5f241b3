#include "refl/io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace refl::io {

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::ParseError, "complex entries must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, "matrix must be a non-empty array of rows");
  const auto rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw Error(ErrorCode::ParseError, "matrix rows must be arrays");
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw Error(ErrorCode::ParseError, "ragged matrix rows");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_from_json(j[i][k]);
  }
  return m;
}

Json eigenvalues_to_json(const std::vector<Complex>& values) {
  Json out = Json::array();
  for (Complex v : values) out.push_back(complex_to_json(v));
  return out;
}

Json mps_to_json(const UniformMPS& mps) {
  Json mats = Json::array();
  for (const auto& a : mps.matrices()) mats.push_back(matrix_to_json(a));
  return Json{{"d", mps.physical_dim()}, {"D", mps.bond_dim()}, {"matrices", mats}, {"log_scale", mps.log_scale()}};
}

UniformMPS mps_from_json(const Json& j) {
  try {
    const int d = j.at("d").get<int>();
    const int bond = j.at("D").get<int>();
    const Json& mats = j.at("matrices");
    if (d < 1 || bond < 1) throw Error(ErrorCode::ParseError, "d and D must be positive");
    if (!mats.is_array() || static_cast<int>(mats.size()) != d)
      throw Error(ErrorCode::ParseError, "expected exactly d matrices");
    std::vector<Matrix> matrices;
    for (const auto& mj : mats) {
      Matrix m = matrix_from_json(mj);
      if (m.rows() != bond || m.cols() != bond) throw Error(ErrorCode::ParseError, "matrix is not D x D");
      matrices.push_back(std::move(m));
    }
    const double log_scale = j.contains("log_scale") ? j.at("log_scale").get<double>() : 0.0;
    return UniformMPS(std::move(matrices), log_scale);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

UniformMPS load_mps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  try {
    return mps_from_json(Json::parse(in));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

}  // namespace refl::io
