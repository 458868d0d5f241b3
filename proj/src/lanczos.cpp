#include "refl/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace refl {

namespace {

void project_out(Vector& v, std::span<const Vector> basis) {
  for (const auto& b : basis) v -= b.dot(v) * b;
}

}  // namespace

Vector deterministic_start(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = uniform(rng);
    const double im = uniform(rng);
    v(i) = Complex(re, im);
  }
  return v / v.norm();
}

EigenPair lowest_eigenpair(const LinearOperator& apply, Eigen::Index dim, const Vector& start,
                           const LanczosOptions& options, std::span<const Vector> deflate) {
  const Eigen::Index free_dim = dim - static_cast<Eigen::Index>(deflate.size());
  if (free_dim < 1) throw Error(ErrorCode::InvalidArgument, "nothing left after deflation");
  const int m = static_cast<int>(std::min<Eigen::Index>(options.krylov_dim, free_dim));

  int applications = 0;
  auto op = [&](const Vector& in, Vector& out) {
    apply(in, out);
    ++applications;
    project_out(out, deflate);
  };

  Vector x = start;
  project_out(x, deflate);
  if (x.norm() < 1e-12) {
    x = deterministic_start(dim, 7);
    project_out(x, deflate);
  }
  x /= x.norm();

  Matrix basis(dim, m);
  Vector w(dim);
  EigenPair result;
  while (true) {
    std::vector<double> alpha, beta;
    basis.col(0) = x;
    int k = 0;
    for (int j = 0; j < m; ++j) {
      op(basis.col(j), w);
      alpha.push_back(basis.col(j).dot(w).real());
      k = j + 1;
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
        project_out(w, deflate);
      }
      const double b = w.norm();
      if (j + 1 == m || b < 1e-13 * (std::abs(alpha.back()) + 1.0)) break;
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) tri(i, i) = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < k; ++i) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
    x = basis.leftCols(k) * eig.eigenvectors().col(0).cast<Complex>();
    project_out(x, deflate);
    x /= x.norm();

    op(x, w);
    const double refined = x.dot(w).real();
    result.value = refined;
    result.residual = (w - refined * x).norm();
    result.iterations = applications;
    if (result.residual <= options.tol) {
      result.vector = x;
      return result;
    }
    if (applications >= options.max_iterations)
      throw Error(ErrorCode::EigensolverStall,
                  "residual " + std::to_string(result.residual) + " after " + std::to_string(applications) +
                      " applications");
  }
}

}  // namespace refl
