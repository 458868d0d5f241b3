#include "refl/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "refl/linalg.hpp"

namespace refl {

std::string_view to_string(ReflectionLabel label) {
  switch (label) {
    case ReflectionLabel::Symmetric: return "SYMMETRIC";
    case ReflectionLabel::LocalUnitaryEquivalent: return "LOCAL_UNITARY_EQUIVALENT";
    case ReflectionLabel::InequivalentCandidate: return "INEQUIVALENT_CANDIDATE";
    case ReflectionLabel::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

WitnessCheck verify_witness(const UniformMPS& mps, const Matrix& u, const Matrix& x) {
  const int d = mps.physical_dim();
  const int bond = mps.bond_dim();
  if (u.rows() != d || u.cols() != d || x.rows() != bond || x.cols() != bond)
    throw Error(ErrorCode::DimensionMismatch, "witness shapes do not match the MPS");
  if ((u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "U is not unitary");

  Eigen::JacobiSVD<Matrix> svd(x);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) throw Error(ErrorCode::SingularX, "X is numerically singular");
  const Matrix x_inv = x.inverse();

  WitnessCheck check;
  for (int i = 0; i < d; ++i) {
    Matrix rhs = Matrix::Zero(bond, bond);
    for (int j = 0; j < d; ++j) rhs += u(i, j) * mps[j];
    rhs = x * rhs * x_inv;
    const double scale = mps[i].norm();
    const double diff = (Matrix(mps[i].transpose()) - rhs).norm();
    check.residual = std::max(check.residual, scale > 0.0 ? diff / scale : diff);
  }
  check.passed = check.residual <= kWitnessTolerance;
  return check;
}

double unitary_overlap_ratio(const UniformMPS& mps, const Matrix& u) {
  // With O = conj(U) the kernel is similar to E exactly when U is a witness.
  const Matrix kernel = mixed_transfer(mps, reflect(mps), u.conjugate()).entries;
  return dominant_modulus(kernel) / dominant_modulus(transfer_matrix(mps).entries);
}

std::optional<Matrix> fit_similarity(const UniformMPS& mps, const Matrix& u) {
  const int d = mps.physical_dim();
  const int bond = mps.bond_dim();
  const int dd = bond * bond;
  const Matrix id = Matrix::Identity(bond, bond);
  // Column-major vec: vec(P X) = (I ⊗ P) vec X, vec(X Q) = (Q^T ⊗ I) vec X.
  Matrix system(d * dd, dd);
  for (int i = 0; i < d; ++i) {
    Matrix block = kron(id, mps[i].transpose());
    for (int j = 0; j < d; ++j) block -= u(i, j) * kron(mps[j].transpose(), id);
    system.middleRows(i * dd, dd) = block;
  }
  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Matrix& v = svd.matrixV();
  const double top = std::max(sv(0), 1e-300);

  std::vector<int> null_cols;
  for (int k = dd - 1; k >= 0; --k) {
    const double value = k < sv.size() ? sv(k) : 0.0;
    if (value <= 1e-6 * top || null_cols.empty())
      null_cols.push_back(k);
    else
      break;
  }

  auto reshape = [&](const Vector& vec) {
    Matrix x(bond, bond);
    for (int c = 0; c < bond; ++c)
      for (int r = 0; r < bond; ++r) x(r, c) = vec(c * bond + r);
    Eigen::Index ir, ic;
    x.cwiseAbs().maxCoeff(&ir, &ic);
    return Matrix(x / x(ir, ic));
  };
  auto invertible = [&](const Matrix& x) {
    Eigen::JacobiSVD<Matrix> xs(x);
    const auto& s = xs.singularValues();
    return s(s.size() - 1) > 1e-10 * s(0);
  };

  Vector combined = Vector::Zero(dd);
  for (std::size_t m = 0; m < null_cols.size(); ++m)
    combined += v.col(null_cols[m]) / static_cast<double>(m + 1);
  if (Matrix x = reshape(combined); invertible(x)) return x;
  for (int col : null_cols)
    if (Matrix x = reshape(v.col(col)); invertible(x)) return x;
  return std::nullopt;
}

std::optional<Witness> refine_witness(const UniformMPS& mps, const Matrix& u_start, int iterations) {
  const int d = mps.physical_dim();
  const int bond = mps.bond_dim();
  const int dd = bond * bond;
  Matrix u = nearest_unitary(u_start);
  std::optional<Witness> best;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int it = 0; it < iterations; ++it) {
    auto x = fit_similarity(mps, u);
    if (!x) break;
    WitnessCheck check;
    try {
      check = verify_witness(mps, u, *x);
    } catch (const Error&) {
      break;
    }
    if (check.residual < best_residual) {
      best_residual = check.residual;
      best = Witness{u, *x};
    }
    if (check.residual <= 1e-13) break;

    // Procrustes step: columns vec((A^i)^T) ≈ Σ_j U(i,j) vec(X A^j X^{-1}).
    const Matrix x_inv = x->inverse();
    Matrix targets(dd, d), basis(dd, d);
    for (int i = 0; i < d; ++i) {
      Matrix t = mps[i].transpose();
      Matrix b = *x * mps[i] * x_inv;
      targets.col(i) = Eigen::Map<const Vector>(t.data(), dd);
      basis.col(i) = Eigen::Map<const Vector>(b.data(), dd);
    }
    Matrix u_transpose = basis.completeOrthogonalDecomposition().solve(targets);
    u = nearest_unitary(u_transpose.transpose());
  }
  if (best && best_residual <= kWitnessTolerance) return best;
  return std::nullopt;
}

namespace {

Matrix hermitian_from(const RealVector& theta, int d) {
  Matrix h = Matrix::Zero(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) h(i, i) = theta(k++);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Complex z(theta(k), theta(k + 1));
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  return h;
}

Matrix haar_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Complex diag = r(i, i);
    if (std::abs(diag) > 0.0) q.col(i) *= diag / std::abs(diag);
  }
  return q;
}

struct AscentOutcome {
  Matrix u;
  double ratio = 0.0;
  bool converged = false;
};

// BFGS on −f with central-difference gradients; stops when `evaluations`
// reaches `limit`.
AscentOutcome ascend(const UniformMPS& mps, const Matrix& u0, int limit, int& evaluations) {
  const int d = mps.physical_dim();
  const int n = d * d;
  auto objective = [&](const RealVector& theta) {
    ++evaluations;
    return -unitary_overlap_ratio(mps, u0 * unitary_exp(hermitian_from(theta, d)));
  };
  const double h = 1e-5;
  auto gradient = [&](const RealVector& theta) {
    RealVector grad(n);
    RealVector probe = theta;
    for (int k = 0; k < n; ++k) {
      probe(k) = theta(k) + h;
      double up = objective(probe);
      probe(k) = theta(k) - h;
      double down = objective(probe);
      probe(k) = theta(k);
      grad(k) = (up - down) / (2.0 * h);
    }
    return grad;
  };

  RealVector theta = RealVector::Zero(n);
  double value = objective(theta);
  AscentOutcome out{u0, -value, false};
  if (-value >= 1.0 - 1e-15) {
    out.converged = true;
    return out;
  }
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
  RealVector grad = gradient(theta);

  while (evaluations + 2 * n + 1 < limit) {
    if (grad.norm() < 1e-10) {
      out.converged = true;
      break;
    }
    RealVector direction = -inv_hessian * grad;
    if (direction.dot(grad) >= 0.0) {
      inv_hessian.setIdentity();
      direction = -grad;
    }
    double step = 1.0;
    RealVector next = theta;
    double next_value = value;
    bool accepted = false;
    while (evaluations < limit) {
      next = theta + step * direction;
      next_value = objective(next);
      if (next_value <= value + 1e-4 * step * grad.dot(direction)) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-12) break;
    }
    if (!accepted) {
      out.converged = grad.norm() < 1e-7;
      break;
    }
    RealVector next_grad = gradient(next);
    RealVector s = next - theta;
    RealVector y = next_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-16) {
      const double rho = 1.0 / sy;
      Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      inv_hessian = (id - rho * s * y.transpose()) * inv_hessian * (id - rho * y * s.transpose()) +
                    rho * s * s.transpose();
    }
    const double improvement = value - next_value;
    theta = next;
    value = next_value;
    grad = next_grad;
    if (-value >= 1.0 - 1e-15) {
      out.converged = true;
      break;
    }
    if (improvement < 1e-17 && grad.norm() < 1e-7) {
      out.converged = true;
      break;
    }
  }
  out.u = u0 * unitary_exp(hermitian_from(theta, d));
  out.ratio = -value;
  return out;
}

}  // namespace

std::optional<SearchResult> search_local_unitary(const UniformMPS& mps, const SearchOptions& options) {
  if (options.budget < 1 || options.restarts < 0)
    throw Error(ErrorCode::InvalidArgument, "search budget must be >= 1");
  const int d = mps.physical_dim();
  SearchResult best;
  best.u = Matrix::Identity(d, d);
  best.ratio = -1.0;
  int evaluations = 0;

  if (options.permutation_seeds && d <= 4) {
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      Matrix p = Matrix::Zero(d, d);
      for (int i = 0; i < d; ++i) p(i, perm[static_cast<std::size_t>(i)]) = 1.0;
      ++evaluations;
      double ratio = unitary_overlap_ratio(mps, p);
      if (ratio > best.ratio) {
        best.u = p;
        best.ratio = ratio;
        best.best_restart = -1;
      }
    } while (std::next_permutation(perm.begin(), perm.end()) && evaluations < options.budget);
    if (best.ratio >= 1.0 - 1e-12) {
      best.converged = true;
      best.evaluations = evaluations;
      return best;
    }
  }

  for (int r = 0; r < options.restarts && evaluations < options.budget; ++r) {
    std::mt19937_64 rng(options.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(r + 1));
    Matrix u0 = haar_unitary(d, rng);
    const int remaining = options.budget - evaluations;
    const int share = remaining / (options.restarts - r);
    AscentOutcome outcome = ascend(mps, u0, evaluations + std::max(share, 1), evaluations);
    best.converged = best.converged || outcome.converged;
    if (outcome.ratio > best.ratio) {
      best.u = outcome.u;
      best.ratio = outcome.ratio;
      best.best_restart = r;
    }
  }
  best.evaluations = evaluations;
  if (best.ratio < 0.0) return std::nullopt;
  return best;
}

ReflectionClass classify(const UniformMPS& mps, long long length, const SearchOptions& options) {
  if (length < 2) throw Error(ErrorCode::BadLength, "classification needs N >= 2");
  ReflectionClass out;
  out.eta_modulus = std::abs(overlap_reflection(mps, length));
  out.spectrum_e = sorted_eigenvalues(transfer_matrix(mps).entries);
  out.spectrum_et2 = sorted_eigenvalues(partial_transpose_transfer(mps).entries);
  const double scale = std::abs(out.spectrum_e.front());
  out.spectra_differ = multiset_distance(out.spectrum_e, out.spectrum_et2) > 1e-6 * scale;

  const int d = mps.physical_dim();
  if (out.eta_modulus >= 1.0 - 1e-8) {
    out.label = ReflectionLabel::Symmetric;
    out.ratio = 1.0;
    out.search_converged = true;
    out.witness = refine_witness(mps, Matrix::Identity(d, d));
    return out;
  }

  auto found = search_local_unitary(mps, options);
  if (found) {
    out.ratio = found->ratio;
    out.search_converged = found->converged;
  }
  if (found && found->ratio >= 1.0 - 1e-8) {
    if (auto witness = refine_witness(mps, found->u)) {
      out.label = ReflectionLabel::LocalUnitaryEquivalent;
      out.witness = std::move(witness);
      return out;
    }
    out.label = ReflectionLabel::Unknown;
    return out;
  }
  if (out.spectra_differ && out.search_converged && out.ratio <= 1.0 - 1e-4)
    out.label = ReflectionLabel::InequivalentCandidate;
  else
    out.label = ReflectionLabel::Unknown;
  return out;
}

}  // namespace refl
