#include "refl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace refl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::DegenerateNorm: return "DEGENERATE_NORM";
    case ErrorCode::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case ErrorCode::UndefinedDegenerate: return "UNDEFINED_DEGENERATE";
    case ErrorCode::UnknownPreset: return "UNKNOWN_PRESET";
    case ErrorCode::BadParams: return "BAD_PARAMS";
    case ErrorCode::SingularX: return "SINGULAR_X";
    case ErrorCode::ZeroState: return "ZERO_STATE";
    case ErrorCode::BadLength: return "BAD_LENGTH";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::NotConverged: return "NOT_CONVERGED";
    case ErrorCode::EigensolverStall: return "EIGENSOLVER_STALL";
    case ErrorCode::TooLarge: return "TOO_LARGE";
    case ErrorCode::AssertionFailed: return "ASSERTION_FAILED";
    case ErrorCode::ParseError: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<Complex> sorted_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "eigenvalues of a non-square matrix");
  std::vector<Complex> values;
  if (m.rows() == 0) return values;
  Eigen::ComplexEigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "complex eigensolver failed");
  values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + m.rows());
  std::sort(values.begin(), values.end(), [](Complex x, Complex y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return values;
}

double dominant_modulus(const Matrix& m) {
  auto values = sorted_eigenvalues(m);
  return values.empty() ? 0.0 : std::abs(values.front());
}

namespace {

template <typename T>
double greedy_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const T& x : a) {
    std::size_t best = b.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      double dist = std::abs(x - b[j]);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist);
  }
  return worst;
}

}  // namespace

double multiset_distance(std::span<const Complex> a, std::span<const Complex> b) {
  return greedy_distance(a, b);
}

double multiset_distance(std::span<const double> a, std::span<const double> b) {
  return greedy_distance(a, b);
}

double TracePower::log_abs() const { return log_modulus + std::log(std::abs(scaled_sum)); }

TracePower trace_power(std::span<const Complex> eigenvalues, long long power) {
  if (power < 1) throw Error(ErrorCode::BadLength, "trace power requires N >= 1");
  TracePower out;
  double radius = 0.0;
  for (Complex v : eigenvalues) radius = std::max(radius, std::abs(v));
  if (radius == 0.0) {
    out.log_modulus = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.log_modulus = static_cast<double>(power) * std::log(radius);
  const double n = static_cast<double>(power);
  for (Complex v : eigenvalues) {
    double r = std::abs(v) / radius;
    if (r == 0.0) continue;
    out.scaled_sum += std::polar(std::pow(r, n), n * std::arg(v));
  }
  return out;
}

TracePower trace_power(const Matrix& m, long long power) {
  auto values = sorted_eigenvalues(m);
  return trace_power(values, power);
}

Complex trace_power_ratio(const TracePower& numerator, const TracePower& denominator, double floor) {
  if (!(std::abs(denominator.scaled_sum) > floor) || !std::isfinite(denominator.log_modulus))
    throw Error(ErrorCode::DegenerateNorm, "Tr E^N vanishes after rescaling");
  if (numerator.scaled_sum == Complex(0.0, 0.0) || !std::isfinite(numerator.log_modulus))
    return {0.0, 0.0};
  return std::exp(numerator.log_modulus - denominator.log_modulus) * numerator.scaled_sum /
         denominator.scaled_sum;
}

Matrix partial_transpose_second(const Matrix& m, int bond_dim) {
  const int dd = bond_dim * bond_dim;
  if (m.rows() != dd || m.cols() != dd)
    throw Error(ErrorCode::DimensionMismatch, "partial transpose expects a D^2 x D^2 matrix");
  Matrix out(dd, dd);
  for (int a = 0; a < bond_dim; ++a)
    for (int c = 0; c < bond_dim; ++c)
      for (int b = 0; b < bond_dim; ++b)
        for (int d = 0; d < bond_dim; ++d)
          out(a * bond_dim + c, b * bond_dim + d) = m(a * bond_dim + d, b * bond_dim + c);
  return out;
}

SVDResult thin_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV().adjoint()};
}

std::vector<std::pair<int, int>> degenerate_groups(std::span<const double> values, double tol) {
  std::vector<std::pair<int, int>> groups;
  int n = static_cast<int>(values.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || std::abs(values[i - 1] - values[i]) > tol) {
      groups.emplace_back(start, i);
      start = i;
    }
  }
  return groups;
}

double relative_difference(const Matrix& a, const Matrix& b) {
  double scale = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / scale;
}

Matrix nearest_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix unitary_exp(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian);
  Vector phases = (Complex(0.0, 1.0) * eig.eigenvalues().cast<Complex>()).array().exp();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

std::vector<double> to_std(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace refl
