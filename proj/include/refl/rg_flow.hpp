#pragma once

#include <optional>
#include <string>
#include <vector>

#include "refl/mps.hpp"
#include "refl/reflection.hpp"

namespace refl {

struct CoarseGrainOptions {
  std::optional<int> max_kept;     // cap on the new physical dimension
  double zero_threshold = 1e-12;   // relative to the largest singular value
  bool renormalize = true;         // divide by sqrt of the dominant modulus of E'
};

struct RGStepRecord {
  int step_index = 0;
  std::vector<double> singular_values;  // retained λ_l, descending
  int d_prime = 0;
  double conjugacy_residual = 0.0;      // ‖E'_rfl − (E')^T‖_F / ‖E'‖_F
  std::optional<Complex> eta;           // η at this scale when a length was given
  double log_scale_delta = 0.0;
};

struct CoarseGrainResult {
  UniformMPS mps;
  RGStepRecord record;
};

/// One blocking step: merge A^p A^q, SVD the d²×D² matrix, keep λ_l V^l.
///
/// Right singular vectors are gauge-fixed so the procedure commutes with
/// transposition: inside a degenerate group the basis diagonalizes the form
/// tr(V_l^† Λ V_m Λ) with a fixed real diagonal Λ, and each vector's phase makes
/// Σ w_{αβ} V_{αβ} (w symmetric) real positive. Running the step on reflect(m)
/// then yields exactly the transposed matrices.
CoarseGrainResult coarse_grain_step(const UniformMPS& mps, const CoarseGrainOptions& options = {});

/// The transposition-covariant gauge used above, applied to rows of V^†
/// (each row is a row-major D×D matrix). Exposed for tests and the DMRG code.
void fix_right_vector_gauge(const RealVector& sigma, Matrix& vh, int bond_dim, double group_tolerance);

struct ConjugacyReport {
  double singular_value_mismatch = 0.0;  // relative to max(1, λ_max)
  double transfer_residual = 0.0;        // ‖E'_rfl − (E')^T‖_F / ‖E'‖_F
  double tensor_residual = 0.0;          // max_l ‖A'_rfl^l − (A'^l)^T‖_F / ‖A'^l‖_F
  double state_fidelity = 0.0;           // |⟨reflect(RG m)|RG(reflect m)⟩| at N sites
  bool passed = false;
};

/// Compares an RG'd state with the RG image of its reflection.
ConjugacyReport compare_branches(const CoarseGrainResult& forward, const CoarseGrainResult& reflected,
                                 long long fidelity_length = 8);

/// Runs coarse_grain_step on mps and reflect(mps) independently and compares.
ConjugacyReport conjugacy_check(const UniformMPS& mps, const CoarseGrainOptions& options = {},
                                long long fidelity_length = 8);

struct RGTrajectory {
  UniformMPS initial;
  std::vector<RGStepRecord> records;
  std::vector<UniformMPS> forward;     // forward[k] = state after k+1 steps
  std::vector<UniformMPS> reflected;   // independent flow of reflect(initial)
  std::vector<ConjugacyReport> conjugacy;
  UniformMPS final_state;
  long long chi = 1;
  std::optional<long long> effective_length;  // N / chi
};

RGTrajectory rg_flow(const UniformMPS& mps, int steps, std::optional<long long> length = std::nullopt,
                     const CoarseGrainOptions& options = {});

/// Closed form: entry k = Tr[(E^{2^k})^{T₂}]^{N/2^k} / Tr E^N, k = 0..steps.
std::vector<Complex> overlap_flow(const UniformMPS& mps, long long length, int steps);

/// Same quantity recomputed from the coarse-grained matrices.
std::vector<Complex> overlap_flow_direct(const UniformMPS& mps, long long length, int steps,
                                         const CoarseGrainOptions& options = {});

struct FixedPointReport {
  bool converged = false;
  int steps_used = 0;
  TransferMatrix e_infinity;       // normalized to dominant eigenvalue 1
  std::optional<Vector> phi_right;  // scaled so ⟨φ_L|φ_R⟩ = 1
  std::optional<Vector> phi_left;   // leading coefficient 1
  bool unique_dominant = false;
  double residual = 0.0;            // ‖E∞ − |φ_R⟩⟨φ_L|‖_F when unique
};

/// Normalized repeated squaring of E until successive iterates agree to `tol`.
/// Throws NoConvergence after max_steps squarings.
FixedPointReport fixed_point(const UniformMPS& mps, double tol = 1e-10, int max_steps = 64);

/// Rescales v so that its first entry above 1e-8·max|v| equals 1.
Vector normalize_leading(const Vector& v);

/// Closed-form fixed-point matrices of the eq6 family. With E = Σ conj(A)⊗A
/// their transfer matrix is proportional to (E∞)^T, so they represent the
/// reflected member of the fixed-point pair.
UniformMPS eq6_fixed_point_matrices(double g);

struct FixedPointCheckOptions {
  double tol = 1e-10;
  int max_steps = 64;
  long long eta_length = 4;
  std::optional<UniformMPS> reference;
  std::optional<Matrix> reference_unitary;
  bool search = false;
  SearchOptions search_options;
};

struct FixedPointCheck {
  FixedPointReport fixed_point;
  std::optional<UniformMPS> final_state;
  double transfer_residual = 0.0;  // final RG'd MPS vs E∞
  Complex eta_infinity{0.0, 0.0};  // Tr[(E∞)^{T₂}]^n / Tr[E∞]^n
  std::optional<double> reference_transfer_residual;  // best of E(ref) vs E∞ and vs (E∞)^T
  bool reference_is_reflected = false;                // E(ref) matched (E∞)^T
  std::optional<WitnessCheck> reference_witness;
  std::optional<double> search_ratio;
  bool passed = false;
};

FixedPointCheck fixed_point_mps_check(const UniformMPS& mps, const FixedPointCheckOptions& options = {});

/// CSV: step, chi, d_prime, lambda_1..lambda_k, eta_re, eta_im, conjugacy_residual, xi.
std::string rg_flow_csv(const RGTrajectory& trajectory);

}  // namespace refl
