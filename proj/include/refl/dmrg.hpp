#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "refl/io.hpp"
#include "refl/lanczos.hpp"
#include "refl/spin_model.hpp"

namespace refl {

enum class BlockSide { Left, Right };

// One truncation tensor per site: isometry[s] is D_{k-1}×D_k on the left
// (U^{[k],s}) and D_k×D_{k-1} on the right (V^{[k],s}).
using SiteIsometry = std::vector<Matrix>;

struct BlockState {
  BlockSide side = BlockSide::Left;
  int length = 0;
  Matrix hamiltonian;                 // basis_dim × basis_dim
  std::vector<Matrix> edge_operators;  // coupling pieces of h on the boundary site
  std::vector<SiteIsometry> isometries;

  Eigen::Index basis_dim() const { return hamiltonian.rows(); }
};

/// Block made of a single site with the trivial isometry.
BlockState initial_block(const SpinChainModel& model, BlockSide side);

// Superblock ground state. psi((α,s),(t,β)) is the (Dl·d)×(d·Dr) matricization.
struct TargetTensor {
  Matrix psi;
  int d = 2;
  double energy = 0.0;
  double residual = 0.0;
  std::optional<double> gap;  // E_1 − E_0 within the superblock
  int iterations = 0;

  Eigen::Index left_dim() const { return psi.rows() / d; }
  Eigen::Index right_dim() const { return psi.cols() / d; }
};

struct SuperblockOptions {
  LanczosOptions lanczos{1e-11, 2000, 64};
  bool compute_gap = true;
  std::uint64_t seed = 1;
};

/// H·X for the B••B superblock without forming the matrix.
void apply_superblock(const BlockState& left, const BlockState& right, const SpinChainModel& model,
                      const Matrix& x, Matrix& y);

/// Lowest eigenpair of the superblock; residual ≤ tol or EigensolverStall.
TargetTensor superblock_ground_state(const BlockState& left, const BlockState& right, const SpinChainModel& model,
                                     const SuperblockOptions& options = {});

struct Truncation {
  SiteIsometry u;      // new left-block isometry, U^s of size Dl × kept
  SiteIsometry v;      // new right-block isometry, V^s of size kept × Dr
  Matrix u_matrix;     // (Dl·d) × kept
  Matrix vh_matrix;    // kept × (d·Dr)
  RealVector sigma;    // full singular spectrum, descending
  int kept = 0;
  double truncation_error = 0.0;
};

inline constexpr double kSchmidtRankCutoff = 1e-13;
inline constexpr double kSchmidtDegeneracyTol = 1e-8;

/// Keeps min(D, rank) Schmidt vectors, extended to cover any degenerate
/// group cut by the boundary.
Truncation truncate(const TargetTensor& target, int max_kept);

/// max(‖Σ_s U^s† U^s − I‖, ‖Σ_s V^s V^s† − I‖) on the Frobenius norm.
double isometry_residual(const SiteIsometry& iso, BlockSide side);

struct DMRGStepRecord {
  int step = 0;
  int size = 0;
  double energy = 0.0;
  std::optional<double> gap;
  double residual = 0.0;
  std::vector<double> singular_values;
  int kept = 0;
  double truncation_error = 0.0;
  double isometry_residual = 0.0;
};

struct StepResult {
  BlockState left;
  BlockState right;
  TargetTensor target;
  Truncation truncation;
  DMRGStepRecord record;
};

StepResult dmrg_step(const BlockState& left, const BlockState& right, const SpinChainModel& model, int max_kept,
                     const SuperblockOptions& options = {});

struct DMRGRun {
  SpinChainModel model;
  int max_kept = 0;
  int final_size = 0;
  std::vector<DMRGStepRecord> steps;
  std::vector<TargetTensor> targets;
  BlockState left;   // after the last step; isometries cover every step
  BlockState right;
};

/// Infinite-system growth from 4 sites to final_size (even, ≥ 4).
DMRGRun run_dmrg(const SpinChainModel& model, int max_kept, int final_size, const SuperblockOptions& options = {});

// Site-dependent open-boundary MPS of one target: left isometries, the two
// centre sites, right isometries in reversed order.
class SiteMPS {
 public:
  SiteMPS(std::vector<SiteIsometry> left, Matrix psi, int d, std::vector<SiteIsometry> right);

  int sites() const;
  int physical_dim() const { return d_; }
  Complex amplitude(std::span<const int> config) const;
  /// Full state vector, site 1 most significant.
  Vector dense() const;
  /// ⟨ψ|ψ⟩ by transfer contraction.
  double norm_squared() const;
  /// Per-site tensors (each a list of d matrices) with the centre split by SVD.
  std::vector<SiteIsometry> site_tensors() const;

 private:
  std::vector<SiteIsometry> left_;
  std::vector<SiteIsometry> right_;  // right_[k] is V^{[k+1]}
  Matrix psi_;
  int d_;
};

/// Target of step `step` (1-based) as a site-dependent MPS.
SiteMPS target_as_mps(const DMRGRun& run, int step);

/// CSV: step,size,energy,kept,trunc_error,sigma_1..sigma_k.
std::string dmrg_csv(const DMRGRun& run);

io::Json dmrg_run_to_json(const DMRGRun& run);

// Mirrored run on H and P(H).
struct MirrorStep {
  int step = 0;
  int size = 0;
  double energy = 0.0;
  double energy_reflected = 0.0;
  double energy_difference = 0.0;
  double spectrum_difference = 0.0;
  double isometry_residual = 0.0;
  double block_overlap_deviation = 0.0;  // max |σ(O) − 1| of the block overlaps
  double fidelity = 0.0;                 // |⟨P Ψ | Ψ_rfl⟩|
  std::optional<double> gap;
};

struct MirrorReport {
  std::string model;
  int max_kept = 0;
  int size = 0;
  bool trivially_symmetric = false;
  bool degenerate_target = false;
  std::optional<double> oracle_gap;
  std::vector<MirrorStep> steps;
  double final_fidelity = 0.0;
  std::optional<double> dense_fidelity;
  std::vector<std::string> failures;
  bool passed = false;
};

inline constexpr double kMirrorEnergyTol = 1e-9;
inline constexpr double kMirrorSpectrumTol = 1e-8;
inline constexpr double kMirrorIsometryTol = 1e-10;
inline constexpr double kMirrorFidelityTol = 1e-8;
inline constexpr double kDegenerateGap = 1e-6;

MirrorReport mirrored_run_check(const SpinChainModel& model, int max_kept, int size,
                                const SuperblockOptions& options = {});

/// Same check on two runs already computed (original, reflected).
MirrorReport compare_mirrored_runs(const DMRGRun& original, const DMRGRun& reflected);

io::Json mirror_report_to_json(const MirrorReport& report);

}  // namespace refl
