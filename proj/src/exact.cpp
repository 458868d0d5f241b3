#include "refl/exact.hpp"

#include <Eigen/Eigenvalues>

#include "refl/lanczos.hpp"
#include "refl/linalg.hpp"

namespace refl {

namespace {

long long chain_dim(int d, int sites) {
  long long dim = 1;
  for (int i = 0; i < sites; ++i) {
    dim *= d;
    if (dim > kMaxExactDim) throw Error(ErrorCode::TooLarge, "d^N exceeds 2^20");
  }
  return dim;
}

// out(block) += in(block) * op^T on the factor of size `mid` sitting between
// `left` and `right` dimensions.
void apply_local(const Matrix& op_transpose, long long left, long long mid, long long right, const Vector& in,
                 Vector& out) {
  for (long long l = 0; l < left; ++l) {
    const long long offset = l * mid * right;
    Eigen::Map<const Matrix> src(in.data() + offset, right, mid);
    Eigen::Map<Matrix> dst(out.data() + offset, right, mid);
    dst.noalias() += src * op_transpose;
  }
}

}  // namespace

void apply_chain_hamiltonian(const SpinChainModel& model, int sites, const Vector& in, Vector& out) {
  const int d = model.d;
  const long long dim = chain_dim(d, sites);
  out.setZero(dim);
  const Matrix h_t = model.two_site_term.transpose();
  long long left = 1;
  for (int i = 0; i + 1 < sites; ++i) {
    const long long right = dim / (left * d * d);
    apply_local(h_t, left, d * d, right, in, out);
    left *= d;
  }
  if (model.single_site_term) {
    const Matrix h1_t = model.single_site_term->transpose();
    left = 1;
    for (int i = 0; i < sites; ++i) {
      const long long right = dim / (left * d);
      apply_local(h1_t, left, d, right, in, out);
      left *= d;
    }
  }
}

Matrix dense_hamiltonian(const SpinChainModel& model, int sites) {
  const int d = model.d;
  const long long dim = chain_dim(d, sites);
  if (dim > 4 * kDenseExactDim) throw Error(ErrorCode::TooLarge, "dense Hamiltonian too large");
  Matrix h = Matrix::Zero(dim, dim);
  long long left = 1;
  for (int i = 0; i + 1 < sites; ++i) {
    const long long right = dim / (left * d * d);
    h += kron(kron(Matrix::Identity(left, left), model.two_site_term), Matrix::Identity(right, right));
    left *= d;
  }
  if (model.single_site_term) {
    left = 1;
    for (int i = 0; i < sites; ++i) {
      const long long right = dim / (left * d);
      h += kron(kron(Matrix::Identity(left, left), *model.single_site_term), Matrix::Identity(right, right));
      left *= d;
    }
  }
  return h;
}

ExactResult exact_ground_state(const SpinChainModel& model, int sites) {
  if (sites < 1) throw Error(ErrorCode::InvalidArgument, "chain needs at least one site");
  const long long dim = chain_dim(model.d, sites);
  ExactResult result;
  if (dim <= kDenseExactDim) {
    const Matrix h = dense_hamiltonian(model, sites);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    result.energy = eig.eigenvalues()(0);
    result.gap = dim > 1 ? eig.eigenvalues()(1) - eig.eigenvalues()(0) : 0.0;
    result.state = eig.eigenvectors().col(0);
    result.residual = (h * result.state - result.energy * result.state).norm();
    return result;
  }
  LinearOperator apply = [&](const Vector& in, Vector& out) { apply_chain_hamiltonian(model, sites, in, out); };
  LanczosOptions options;
  options.tol = 1e-11;
  options.max_iterations = 20000;
  options.krylov_dim = dim > (1 << 16) ? 40 : 120;
  EigenPair ground = lowest_eigenpair(apply, dim, deterministic_start(dim, 1), options);
  std::vector<Vector> found{ground.vector};
  EigenPair excited = lowest_eigenpair(apply, dim, deterministic_start(dim, 2), options, found);
  result.energy = ground.value;
  result.state = ground.vector;
  result.gap = excited.value - ground.value;
  result.residual = ground.residual;
  return result;
}

}  // namespace refl
