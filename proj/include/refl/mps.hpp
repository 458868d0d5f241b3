#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "refl/core.hpp"

namespace refl {

/// Translation-invariant MPS: d matrices A^s of size D×D.
///
/// The represented site matrices are exp(log_scale) * A^s, so amplitudes of an
/// N-site chain carry a factor exp(N * log_scale). Instances are immutable.
class UniformMPS {
 public:
  explicit UniformMPS(std::vector<Matrix> matrices, double log_scale = 0.0);

  int physical_dim() const { return static_cast<int>(matrices_.size()); }
  int bond_dim() const { return static_cast<int>(matrices_.front().rows()); }
  double log_scale() const { return log_scale_; }
  const std::vector<Matrix>& matrices() const { return matrices_; }
  const Matrix& operator[](int s) const { return matrices_[static_cast<std::size_t>(s)]; }

  bool operator==(const UniformMPS& other) const;

 private:
  std::vector<Matrix> matrices_;
  double log_scale_;
};

enum class TransferKind { Plain, PartialTranspose, Mixed };

struct TransferMatrix {
  Matrix entries;
  TransferKind kind = TransferKind::Plain;

  int dim() const { return static_cast<int>(entries.rows()); }
};

struct SpectrumReport {
  std::vector<Complex> eigenvalues;
  double dominant_modulus = 0.0;
  bool dominant_degenerate = false;
  // Empty when the dominant modulus is degenerate. Zero when |λ₂| = 0.
  std::optional<double> correlation_length;
};

inline constexpr double kDegeneracyTolerance = 1e-9;

SpectrumReport spectrum(const Matrix& m);
SpectrumReport spectrum(const TransferMatrix& t);

/// E = Σ_s conj(A^s) ⊗ A^s with row (α,γ) = α·D+γ and column (β,δ) = β·D+δ.
TransferMatrix transfer_matrix(const UniformMPS& mps);

/// A^s → (A^s)^T.
UniformMPS reflect(const UniformMPS& mps);

/// E^{T₂} = Σ_s conj(A^s) ⊗ (A^s)^T.
TransferMatrix partial_transpose_transfer(const UniformMPS& mps);

/// K = Σ_{s,t} O(t,s) conj(B^s) ⊗ A^t for bra B and ket A.
TransferMatrix mixed_transfer(const UniformMPS& bra, const UniformMPS& ket, const Matrix& op);

/// η = ⟨Ψ|Ψ_rfl⟩ = Tr(E^{T₂})^N / Tr E^N.
Complex overlap_reflection(const UniformMPS& mps, long long length);

/// Unnormalized coefficient exp(N·log_scale) Tr(A^{s_1} ⋯ A^{s_N}).
Complex amplitude(const UniformMPS& mps, std::span<const int> config);

/// 1 / ln(|λ₁|/|λ₂|) of the transfer matrix; throws UndefinedDegenerate.
double correlation_length(const UniformMPS& mps);

enum class Preset { Ghz, Cluster, Aklt, Eq5, Eq6 };

Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset preset);
UniformMPS build_preset(Preset preset, std::span<const double> params = {});

/// Dense N-site amplitude vector (site 1 most significant), for small brute-force checks.
Vector dense_amplitudes(const UniformMPS& mps, int length);

/// Index permutation image of |s_1…s_N⟩ → |s_N…s_1⟩ applied to a dense vector.
Vector apply_parity(const Vector& state, int local_dim, int length);

}  // namespace refl
