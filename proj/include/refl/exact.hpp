#pragma once

#include <vector>

#include "refl/spin_model.hpp"

namespace refl {

// Open-chain exact diagonalization, the reference for DMRG tests.
struct ExactResult {
  double energy = 0.0;
  Vector state;          // site 1 is the most significant digit
  double gap = 0.0;      // E_1 − E_0
  double residual = 0.0;
};

inline constexpr long long kMaxExactDim = 1LL << 20;
inline constexpr long long kDenseExactDim = 1024;

/// H|ψ⟩ for the N-site open chain, without forming H.
void apply_chain_hamiltonian(const SpinChainModel& model, int sites, const Vector& in, Vector& out);

/// Dense N-site open-chain Hamiltonian.
Matrix dense_hamiltonian(const SpinChainModel& model, int sites);

/// Full diagonalization up to kDenseExactDim, matrix-free Lanczos above.
/// Throws TooLarge beyond kMaxExactDim.
ExactResult exact_ground_state(const SpinChainModel& model, int sites);

}  // namespace refl
