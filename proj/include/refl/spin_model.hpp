#pragma once

#include <optional>
#include <string>
#include <vector>

#include "refl/io.hpp"

namespace refl {

// Nearest-neighbour chain H = Σ_i h_{i,i+1} + Σ_i h1_i with h acting on (left ⊗ right).
struct SpinChainModel {
  int d = 2;
  Matrix two_site_term;
  std::optional<Matrix> single_site_term;
  std::string name = "custom";
  io::Json params = io::Json::object();
};

/// Validates shapes and Hermiticity (1e-12).
SpinChainModel make_model(int d, Matrix two_site_term, std::optional<Matrix> single_site_term = std::nullopt,
                          std::string name = "custom", io::Json params = io::Json::object());

/// h = J S·S for spin-1/2.
SpinChainModel heisenberg_model(double j = 1.0);

/// h = J(SˣSˣ + SʸSʸ + Δ SᶻSᶻ) + D(SˣSʸ − SʸSˣ); the D term is odd under swap.
SpinChainModel xxz_dm_model(double j, double delta, double dm);

/// H = −J Σ σᶻσᶻ − h Σ σˣ (Pauli matrices).
SpinChainModel ising_model(double j, double field);

/// Swap of the two tensor factors of C^d ⊗ C^d.
Matrix swap_operator(int d);

/// h → S h S, single-site term unchanged.
SpinChainModel reflect_model(const SpinChainModel& model);

bool is_parity_symmetric(const SpinChainModel& model, double tol = 1e-12);

// h = Σ_k left[k] ⊗ right[k]
struct OperatorSchmidt {
  std::vector<Matrix> left;
  std::vector<Matrix> right;
};

OperatorSchmidt decompose_two_site(const Matrix& h, int d);

/// {"d", "preset", "params", "two_site_term"?, "single_site_term"?}
SpinChainModel model_from_json(const io::Json& j);
io::Json model_to_json(const SpinChainModel& model);

}  // namespace refl
