#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "refl/core.hpp"

namespace refl {

using LinearOperator = std::function<void(const Vector& in, Vector& out)>;

struct LanczosOptions {
  double tol = 1e-10;        // on ‖Hx − θx‖
  int max_iterations = 2000;  // operator applications
  int krylov_dim = 64;        // vectors kept between restarts
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;
  int iterations = 0;
};

/// Lowest eigenpair of a Hermitian operator by explicitly restarted Lanczos
/// with full reorthogonalization. Vectors in `deflate` (orthonormal) are
/// projected out, which gives the next eigenpair above them.
/// Throws EigensolverStall when max_iterations is exhausted.
EigenPair lowest_eigenpair(const LinearOperator& apply, Eigen::Index dim, const Vector& start,
                           const LanczosOptions& options = {}, std::span<const Vector> deflate = {});

/// Reproducible pseudo-random unit vector.
Vector deterministic_start(Eigen::Index dim, std::uint64_t seed);

}  // namespace refl
