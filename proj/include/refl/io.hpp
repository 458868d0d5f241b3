#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "refl/mps.hpp"

namespace refl::io {

using Json = nlohmann::ordered_json;

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

/// Row-major [[ [re, im], ... ], ...].
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json eigenvalues_to_json(const std::vector<Complex>& values);

/// {"d", "D", "matrices", "log_scale"}; parser throws ParseError on wrong arity.
Json mps_to_json(const UniformMPS& mps);
UniformMPS mps_from_json(const Json& j);

UniformMPS load_mps(const std::string& path);

/// Shortest text that round-trips the double exactly.
std::string format_double(double x);

}  // namespace refl::io
