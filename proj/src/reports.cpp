#include "refl/reports.hpp"

namespace refl::io {

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Json spectrum_to_json(const SpectrumReport& report) {
  return Json{{"eigenvalues", eigenvalues_to_json(report.eigenvalues)},
              {"dominant_modulus", report.dominant_modulus},
              {"dominant_degenerate", report.dominant_degenerate},
              {"correlation_length", optional_json(report.correlation_length)}};
}

Json classification_to_json(const ReflectionClass& result) {
  Json witness(nullptr);
  if (result.witness) witness = Json{{"U", matrix_to_json(result.witness->u)}, {"X", matrix_to_json(result.witness->x)}};
  return Json{{"label", std::string(to_string(result.label))},
              {"eta_modulus", result.eta_modulus},
              {"ratio", result.ratio},
              {"witness", std::move(witness)},
              {"spectra", {{"E", eigenvalues_to_json(result.spectrum_e)}, {"ET2", eigenvalues_to_json(result.spectrum_et2)}}},
              {"spectra_differ", result.spectra_differ},
              {"search_converged", result.search_converged}};
}

Json fixed_point_check_to_json(const FixedPointCheck& check) {
  const FixedPointReport& fp = check.fixed_point;
  Json out{{"converged", fp.converged},
           {"steps_used", fp.steps_used},
           {"unique_dominant", fp.unique_dominant},
           {"residual", fp.residual},
           {"phi_R", fp.phi_right ? vector_to_json(*fp.phi_right) : Json(nullptr)},
           {"phi_L", fp.phi_left ? vector_to_json(*fp.phi_left) : Json(nullptr)},
           {"E_infinity", matrix_to_json(fp.e_infinity.entries)},
           {"transfer_residual", check.transfer_residual},
           {"eta_infinity", complex_to_json(check.eta_infinity)},
           {"reference_transfer_residual", optional_json(check.reference_transfer_residual)},
           {"reference_is_reflected", check.reference_is_reflected},
           {"search_ratio", optional_json(check.search_ratio)},
           {"passed", check.passed}};
  if (check.reference_witness)
    out["reference_witness"] = {{"passed", check.reference_witness->passed},
                                {"residual", check.reference_witness->residual}};
  else
    out["reference_witness"] = nullptr;
  return out;
}

}  // namespace refl::io
