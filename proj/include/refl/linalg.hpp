#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "refl/core.hpp"

namespace refl {

/// Kronecker product with (A ⊗ B)(i*rows(B)+k, j*cols(B)+l) = A(i,j) B(k,l).
Matrix kron(const Matrix& a, const Matrix& b);

/// Eigenvalues of a general complex matrix, sorted by descending modulus,
/// then descending real part, then descending imaginary part.
std::vector<Complex> sorted_eigenvalues(const Matrix& m);

/// Largest eigenvalue modulus (spectral radius).
double dominant_modulus(const Matrix& m);

/// Greedy nearest-neighbour matching between two eigenvalue multisets.
/// Returns the largest pairwise distance, or +inf when the sizes differ.
double multiset_distance(std::span<const Complex> a, std::span<const Complex> b);

/// Same as multiset_distance, for real values (e.g. singular spectra).
double multiset_distance(std::span<const double> a, std::span<const double> b);

// Tr M^N held as |λ_max|^N * scaled_sum so that large N neither overflows
// nor underflows.
struct TracePower {
  double log_modulus = 0.0;  // N * ln|λ_max|
  Complex scaled_sum{0.0, 0.0};

  double log_abs() const;
};

TracePower trace_power(std::span<const Complex> eigenvalues, long long power);
TracePower trace_power(const Matrix& m, long long power);

/// Tr A^N / Tr B^N, evaluated through the spectra. Throws DegenerateNorm when
/// the rescaled denominator falls below `floor`.
Complex trace_power_ratio(const TracePower& numerator, const TracePower& denominator,
                          double floor = 1e-12);

/// For a D²×D² matrix with row (α,γ) and column (β,δ), transposes the second
/// tensor factor: result((α,γ),(β,δ)) = m((α,δ),(β,γ)).
Matrix partial_transpose_second(const Matrix& m, int bond_dim);

struct SVDResult {
  Matrix u;            // left singular vectors as columns
  RealVector sigma;    // descending
  Matrix vh;           // right singular vectors as rows (V^†)
};

SVDResult thin_svd(const Matrix& m);

/// Partition of a descending sequence into runs whose neighbours differ by at
/// most `tol`. Returns [begin, end) index pairs.
std::vector<std::pair<int, int>> degenerate_groups(std::span<const double> values, double tol);

/// ‖a − b‖_F / max(‖b‖_F, tiny).
double relative_difference(const Matrix& a, const Matrix& b);

/// Unitary polar factor of a square matrix.
Matrix nearest_unitary(const Matrix& m);

/// Hermitian exponential exp(i H).
Matrix unitary_exp(const Matrix& hermitian);

std::vector<double> to_std(const RealVector& v);

}  // namespace refl
