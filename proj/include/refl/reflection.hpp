#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "refl/mps.hpp"

namespace refl {

enum class ReflectionLabel { Symmetric, LocalUnitaryEquivalent, InequivalentCandidate, Unknown };

std::string_view to_string(ReflectionLabel label);

// (A^i)^T = Σ_j U(i,j) X A^j X^{-1}
struct Witness {
  Matrix u;
  Matrix x;
};

struct WitnessCheck {
  bool passed = false;
  double residual = 0.0;
};

inline constexpr double kWitnessTolerance = 1e-8;

/// Max over i of ‖(A^i)^T − Σ_j U(i,j) X A^j X^{-1}‖_F / ‖A^i‖_F.
/// Throws SingularX for numerically singular X, InvalidArgument for non-unitary U.
WitnessCheck verify_witness(const UniformMPS& mps, const Matrix& u, const Matrix& x);

/// f(U): dominant modulus of the cross transfer matrix between Ψ and U^{⊗N}Ψ_rfl
/// relative to that of E. Equals 1 exactly when U is a witness.
double unitary_overlap_ratio(const UniformMPS& mps, const Matrix& u);

/// Least-squares solve of (A^i)^T X = Σ_j U(i,j) X A^j for an invertible X.
std::optional<Matrix> fit_similarity(const UniformMPS& mps, const Matrix& u);

/// Alternates X fitting and a unitary Procrustes update of U; returns a witness
/// passing verify_witness, if one is reachable from `u`.
std::optional<Witness> refine_witness(const UniformMPS& mps, const Matrix& u, int iterations = 30);

struct SearchOptions {
  int restarts = 10;
  int budget = 5000;          // total objective evaluations
  std::uint64_t seed = 20240611;
  bool permutation_seeds = true;  // try permutation matrices before random starts
};

struct SearchResult {
  Matrix u;
  double ratio = 0.0;
  int evaluations = 0;
  int best_restart = -1;  // -1: permutation seed
  bool converged = false;
};

/// Maximizes unitary_overlap_ratio over U = U0 exp(iH) with multi-start BFGS.
std::optional<SearchResult> search_local_unitary(const UniformMPS& mps, const SearchOptions& options = {});

struct ReflectionClass {
  ReflectionLabel label = ReflectionLabel::Unknown;
  double eta_modulus = 0.0;
  double ratio = 0.0;
  std::optional<Witness> witness;
  std::vector<Complex> spectrum_e;
  std::vector<Complex> spectrum_et2;
  bool spectra_differ = false;
  bool search_converged = false;
};

ReflectionClass classify(const UniformMPS& mps, long long length = 64, const SearchOptions& options = {});

}  // namespace refl
