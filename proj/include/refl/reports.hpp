#pragma once

#include "refl/io.hpp"
#include "refl/mps.hpp"
#include "refl/reflection.hpp"
#include "refl/rg_flow.hpp"

namespace refl::io {

Json spectrum_to_json(const SpectrumReport& report);

/// {label, eta_modulus, ratio, witness: {U, X} | null, spectra: {E, ET2}, ...}
Json classification_to_json(const ReflectionClass& result);

Json fixed_point_check_to_json(const FixedPointCheck& check);

Json vector_to_json(const Vector& v);

}  // namespace refl::io
