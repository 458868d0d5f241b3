#include "refl/dmrg.hpp"

#include <algorithm>
#include <cmath>

#include "refl/linalg.hpp"

namespace refl {

namespace {

Matrix site_term(const SpinChainModel& model) {
  return model.single_site_term ? *model.single_site_term : Matrix::Zero(model.d, model.d);
}

// Enlarged-block pieces of the superblock Hamiltonian, built once per solve.
struct Superblock {
  Eigen::Index rows = 0;  // Dl·d
  Eigen::Index cols = 0;  // d·Dr
  Matrix left_enlarged;
  Matrix right_enlarged_t;
  std::vector<Matrix> middle_left;     // I_Dl ⊗ L_k
  std::vector<Matrix> middle_right_t;  // (R_k ⊗ I_Dr)^T

  Superblock(const BlockState& left, const BlockState& right, const SpinChainModel& model) {
    const int d = model.d;
    const Eigen::Index dl = left.basis_dim();
    const Eigen::Index dr = right.basis_dim();
    rows = dl * d;
    cols = d * dr;
    const OperatorSchmidt parts = decompose_two_site(model.two_site_term, d);
    if (left.edge_operators.size() != parts.left.size() || right.edge_operators.size() != parts.right.size())
      throw Error(ErrorCode::DimensionMismatch, "block edge operators do not match the model");
    const Matrix h1 = site_term(model);
    const Matrix id_d = Matrix::Identity(d, d);
    const Matrix id_l = Matrix::Identity(dl, dl);
    const Matrix id_r = Matrix::Identity(dr, dr);

    left_enlarged = kron(left.hamiltonian, id_d) + kron(id_l, h1);
    Matrix right_enlarged = kron(h1, id_r) + kron(id_d, right.hamiltonian);
    for (std::size_t k = 0; k < parts.left.size(); ++k) {
      left_enlarged += kron(left.edge_operators[k], parts.right[k]);
      right_enlarged += kron(parts.left[k], right.edge_operators[k]);
      middle_left.push_back(kron(id_l, parts.left[k]));
      middle_right_t.push_back(kron(parts.right[k], id_r).transpose());
    }
    right_enlarged_t = right_enlarged.transpose();
  }

  void apply(const Matrix& x, Matrix& y) const {
    y.noalias() = left_enlarged * x;
    y.noalias() += x * right_enlarged_t;
    for (std::size_t k = 0; k < middle_left.size(); ++k) y.noalias() += middle_left[k] * x * middle_right_t[k];
  }
};

BlockState grow_left(const BlockState& left, const SpinChainModel& model, const Truncation& t,
                     const Matrix& left_enlarged) {
  const OperatorSchmidt parts = decompose_two_site(model.two_site_term, model.d);
  const Matrix& u = t.u_matrix;
  const Matrix id_l = Matrix::Identity(left.basis_dim(), left.basis_dim());
  BlockState out;
  out.side = BlockSide::Left;
  out.length = left.length + 1;
  out.hamiltonian = u.adjoint() * left_enlarged * u;
  out.hamiltonian = 0.5 * (out.hamiltonian + out.hamiltonian.adjoint()).eval();
  for (const Matrix& l : parts.left) out.edge_operators.push_back(u.adjoint() * kron(id_l, l) * u);
  out.isometries = left.isometries;
  out.isometries.push_back(t.u);
  return out;
}

BlockState grow_right(const BlockState& right, const SpinChainModel& model, const Truncation& t,
                      const Matrix& right_enlarged) {
  const OperatorSchmidt parts = decompose_two_site(model.two_site_term, model.d);
  const Matrix& vh = t.vh_matrix;
  const Matrix id_r = Matrix::Identity(right.basis_dim(), right.basis_dim());
  BlockState out;
  out.side = BlockSide::Right;
  out.length = right.length + 1;
  out.hamiltonian = vh.conjugate() * right_enlarged * vh.transpose();
  out.hamiltonian = 0.5 * (out.hamiltonian + out.hamiltonian.adjoint()).eval();
  for (const Matrix& r : parts.right) out.edge_operators.push_back(vh.conjugate() * kron(r, id_r) * vh.transpose());
  out.isometries = right.isometries;
  out.isometries.push_back(t.v);
  return out;
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + '\n';
}

}  // namespace

BlockState initial_block(const SpinChainModel& model, BlockSide side) {
  const int d = model.d;
  const OperatorSchmidt parts = decompose_two_site(model.two_site_term, d);
  BlockState block;
  block.side = side;
  block.length = 1;
  block.hamiltonian = site_term(model);
  block.edge_operators = side == BlockSide::Left ? parts.left : parts.right;
  SiteIsometry iso;
  for (int s = 0; s < d; ++s) {
    Matrix m = side == BlockSide::Left ? Matrix::Zero(1, d) : Matrix::Zero(d, 1);
    m(side == BlockSide::Left ? 0 : s, side == BlockSide::Left ? s : 0) = 1.0;
    iso.push_back(std::move(m));
  }
  block.isometries.push_back(std::move(iso));
  return block;
}

void apply_superblock(const BlockState& left, const BlockState& right, const SpinChainModel& model,
                      const Matrix& x, Matrix& y) {
  Superblock(left, right, model).apply(x, y);
}

TargetTensor superblock_ground_state(const BlockState& left, const BlockState& right, const SpinChainModel& model,
                                     const SuperblockOptions& options) {
  const Superblock sb(left, right, model);
  const Eigen::Index dim = sb.rows * sb.cols;
  LinearOperator op = [&](const Vector& in, Vector& out) {
    Eigen::Map<const Matrix> x(in.data(), sb.rows, sb.cols);
    Matrix y(sb.rows, sb.cols);
    sb.apply(x, y);
    out = Eigen::Map<const Vector>(y.data(), dim);
  };
  const EigenPair ground = lowest_eigenpair(op, dim, deterministic_start(dim, options.seed), options.lanczos);
  TargetTensor target;
  target.d = model.d;
  target.energy = ground.value;
  target.residual = ground.residual;
  target.iterations = ground.iterations;
  target.psi = Eigen::Map<const Matrix>(ground.vector.data(), sb.rows, sb.cols);
  if (options.compute_gap && dim > 1) {
    const std::vector<Vector> found{ground.vector};
    LanczosOptions loose = options.lanczos;
    loose.tol = std::max(loose.tol, 1e-8);
    const EigenPair excited =
        lowest_eigenpair(op, dim, deterministic_start(dim, options.seed + 0x5bd1e995ULL), loose, found);
    target.gap = excited.value - ground.value;
  }
  return target;
}

Truncation truncate(const TargetTensor& target, int max_kept) {
  if (max_kept < 1) throw Error(ErrorCode::InvalidArgument, "kept states must be at least 1");
  const int d = target.d;
  const Eigen::Index dl = target.left_dim();
  const Eigen::Index dr = target.right_dim();
  const SVDResult svd = thin_svd(target.psi);
  const int n = static_cast<int>(svd.sigma.size());
  int rank = 0;
  while (rank < n && svd.sigma(rank) > kSchmidtRankCutoff) ++rank;
  rank = std::max(rank, 1);
  int kept = std::min(max_kept, rank);
  while (kept < rank && svd.sigma(kept - 1) - svd.sigma(kept) <= kSchmidtDegeneracyTol) ++kept;

  Truncation t;
  t.sigma = svd.sigma;
  t.kept = kept;
  t.u_matrix = svd.u.leftCols(kept);
  t.vh_matrix = svd.vh.topRows(kept);
  double discarded = 0.0;
  for (int i = kept; i < n; ++i) discarded += svd.sigma(i) * svd.sigma(i);
  t.truncation_error = discarded;
  for (int s = 0; s < d; ++s) {
    Matrix us(dl, kept);
    for (Eigen::Index a = 0; a < dl; ++a) us.row(a) = t.u_matrix.row(a * d + s);
    t.u.push_back(std::move(us));
    t.v.push_back(t.vh_matrix.middleCols(s * dr, dr));
  }
  return t;
}

double isometry_residual(const SiteIsometry& iso, BlockSide side) {
  if (iso.empty()) return 0.0;
  const Eigen::Index k = side == BlockSide::Left ? iso.front().cols() : iso.front().rows();
  Matrix acc = Matrix::Zero(k, k);
  for (const Matrix& m : iso) acc += side == BlockSide::Left ? Matrix(m.adjoint() * m) : Matrix(m * m.adjoint());
  return (acc - Matrix::Identity(k, k)).norm();
}

StepResult dmrg_step(const BlockState& left, const BlockState& right, const SpinChainModel& model, int max_kept,
                     const SuperblockOptions& options) {
  StepResult out;
  out.target = superblock_ground_state(left, right, model, options);
  out.truncation = truncate(out.target, max_kept);
  const Superblock sb(left, right, model);
  out.left = grow_left(left, model, out.truncation, sb.left_enlarged);
  out.right = grow_right(right, model, out.truncation, sb.right_enlarged_t.transpose());

  DMRGStepRecord& r = out.record;
  r.size = left.length + right.length + 2;
  r.energy = out.target.energy;
  r.gap = out.target.gap;
  r.residual = out.target.residual;
  r.singular_values = to_std(out.truncation.sigma);
  r.kept = out.truncation.kept;
  r.truncation_error = out.truncation.truncation_error;
  r.isometry_residual = std::max(isometry_residual(out.truncation.u, BlockSide::Left),
                                 isometry_residual(out.truncation.v, BlockSide::Right));
  return out;
}

DMRGRun run_dmrg(const SpinChainModel& model, int max_kept, int final_size, const SuperblockOptions& options) {
  if (final_size < 4 || final_size % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "final superblock size must be even and at least 4");
  DMRGRun run;
  run.model = model;
  run.max_kept = max_kept;
  run.final_size = final_size;
  BlockState left = initial_block(model, BlockSide::Left);
  BlockState right = initial_block(model, BlockSide::Right);
  const int steps = (final_size - 2) / 2;
  for (int step = 1; step <= steps; ++step) {
    SuperblockOptions opts = options;
    opts.seed = options.seed + static_cast<std::uint64_t>(step);
    StepResult res = dmrg_step(left, right, model, max_kept, opts);
    res.record.step = step;
    run.steps.push_back(std::move(res.record));
    run.targets.push_back(std::move(res.target));
    left = std::move(res.left);
    right = std::move(res.right);
  }
  run.left = std::move(left);
  run.right = std::move(right);
  return run;
}

SiteMPS::SiteMPS(std::vector<SiteIsometry> left, Matrix psi, int d, std::vector<SiteIsometry> right)
    : left_(std::move(left)), right_(std::move(right)), psi_(std::move(psi)), d_(d) {}

int SiteMPS::sites() const { return static_cast<int>(left_.size() + right_.size()) + 2; }

Complex SiteMPS::amplitude(std::span<const int> config) const {
  if (static_cast<int>(config.size()) != sites()) throw Error(ErrorCode::BadLength, "configuration length");
  for (int s : config)
    if (s < 0 || s >= d_) throw Error(ErrorCode::IndexOutOfRange, "physical index out of range");
  const std::size_t m = left_.size();
  Matrix v = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < m; ++k) v = v * left_[k][static_cast<std::size_t>(config[k])];
  Matrix w = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < right_.size(); ++k)
    w = right_[k][static_cast<std::size_t>(config[config.size() - 1 - k])] * w;
  const int s = config[m];
  const int t = config[m + 1];
  const Eigen::Index dl = psi_.rows() / d_;
  const Eigen::Index dr = psi_.cols() / d_;
  Complex amp = 0.0;
  for (Eigen::Index a = 0; a < dl; ++a)
    for (Eigen::Index b = 0; b < dr; ++b) amp += v(0, a) * psi_(a * d_ + s, t * dr + b) * w(b, 0);
  return amp;
}

Vector SiteMPS::dense() const {
  const Eigen::Index dl = psi_.rows() / d_;
  const Eigen::Index dr = psi_.cols() / d_;
  Matrix lstates = Matrix::Identity(1, 1);  // configs × basis
  for (const SiteIsometry& iso : left_) {
    Matrix next(lstates.rows() * d_, iso.front().cols());
    for (Eigen::Index c = 0; c < lstates.rows(); ++c)
      for (int s = 0; s < d_; ++s) next.row(c * d_ + s) = lstates.row(c) * iso[static_cast<std::size_t>(s)];
    lstates = std::move(next);
  }
  Matrix rstates = Matrix::Identity(1, 1);  // basis × configs
  for (const SiteIsometry& iso : right_) {
    const Eigen::Index old = rstates.cols();
    Matrix next(iso.front().rows(), old * d_);
    for (int s = 0; s < d_; ++s) next.middleCols(s * old, old) = iso[static_cast<std::size_t>(s)] * rstates;
    rstates = std::move(next);
  }
  const Eigen::Index nl = lstates.rows();
  const Eigen::Index nr = rstates.cols();
  Vector out(nl * d_ * d_ * nr);
  for (int s = 0; s < d_; ++s)
    for (int t = 0; t < d_; ++t) {
      Matrix p(dl, dr);
      for (Eigen::Index a = 0; a < dl; ++a) p.row(a) = psi_.row(a * d_ + s).segment(t * dr, dr);
      const Matrix slice = lstates * p * rstates;
      for (Eigen::Index l = 0; l < nl; ++l)
        for (Eigen::Index r = 0; r < nr; ++r) out(((l * d_ + s) * d_ + t) * nr + r) = slice(l, r);
    }
  return out;
}

double SiteMPS::norm_squared() const {
  Matrix el = Matrix::Identity(1, 1);
  for (const SiteIsometry& iso : left_) {
    Matrix next = Matrix::Zero(iso.front().cols(), iso.front().cols());
    for (const Matrix& u : iso) next += u.adjoint() * el * u;
    el = std::move(next);
  }
  Matrix er = Matrix::Identity(1, 1);
  for (const SiteIsometry& iso : right_) {
    Matrix next = Matrix::Zero(iso.front().rows(), iso.front().rows());
    for (const Matrix& v : iso) next += v.conjugate() * er * v.transpose();
    er = std::move(next);
  }
  const Eigen::Index dl = psi_.rows() / d_;
  const Eigen::Index dr = psi_.cols() / d_;
  Complex total = 0.0;
  for (int s = 0; s < d_; ++s)
    for (int t = 0; t < d_; ++t) {
      Matrix p(dl, dr);
      for (Eigen::Index a = 0; a < dl; ++a) p.row(a) = psi_.row(a * d_ + s).segment(t * dr, dr);
      total += (p.adjoint() * el * p).cwiseProduct(er).sum();
    }
  return total.real();
}

std::vector<SiteIsometry> SiteMPS::site_tensors() const {
  std::vector<SiteIsometry> out = left_;
  const SVDResult svd = thin_svd(psi_);
  const Eigen::Index dl = psi_.rows() / d_;
  const Eigen::Index dr = psi_.cols() / d_;
  const Matrix us = svd.u * svd.sigma.cast<Complex>().asDiagonal();
  SiteIsometry c1, c2;
  for (int s = 0; s < d_; ++s) {
    Matrix m(dl, us.cols());
    for (Eigen::Index a = 0; a < dl; ++a) m.row(a) = us.row(a * d_ + s);
    c1.push_back(std::move(m));
    c2.push_back(svd.vh.middleCols(s * dr, dr));
  }
  out.push_back(std::move(c1));
  out.push_back(std::move(c2));
  for (auto it = right_.rbegin(); it != right_.rend(); ++it) out.push_back(*it);
  return out;
}

SiteMPS target_as_mps(const DMRGRun& run, int step) {
  if (step < 1 || step > static_cast<int>(run.targets.size()))
    throw Error(ErrorCode::IndexOutOfRange, "no such DMRG step");
  const auto n = static_cast<std::size_t>(step);
  std::vector<SiteIsometry> left(run.left.isometries.begin(), run.left.isometries.begin() + n);
  std::vector<SiteIsometry> right(run.right.isometries.begin(), run.right.isometries.begin() + n);
  return SiteMPS(std::move(left), run.targets[n - 1].psi, run.model.d, std::move(right));
}

std::string dmrg_csv(const DMRGRun& run) {
  std::size_t k = 0;
  for (const auto& s : run.steps) k = std::max(k, s.singular_values.size());
  std::vector<std::string> header{"step", "size", "energy", "kept", "trunc_error"};
  for (std::size_t i = 1; i <= k; ++i) header.push_back("sigma_" + std::to_string(i));
  std::string csv = join_csv(header);
  for (const auto& s : run.steps) {
    std::vector<std::string> row{std::to_string(s.step), std::to_string(s.size), io::format_double(s.energy),
                                 std::to_string(s.kept), io::format_double(s.truncation_error)};
    for (std::size_t i = 0; i < k; ++i)
      row.push_back(io::format_double(i < s.singular_values.size() ? s.singular_values[i] : 0.0));
    csv += join_csv(row);
  }
  return csv;
}

io::Json dmrg_run_to_json(const DMRGRun& run) {
  io::Json steps = io::Json::array();
  for (const auto& s : run.steps) {
    steps.push_back({{"step", s.step},
                     {"size", s.size},
                     {"energy", s.energy},
                     {"gap", s.gap ? io::Json(*s.gap) : io::Json(nullptr)},
                     {"residual", s.residual},
                     {"kept", s.kept},
                     {"truncation_error", s.truncation_error},
                     {"isometry_residual", s.isometry_residual},
                     {"singular_values", s.singular_values}});
  }
  return io::Json{{"model", model_to_json(run.model)},
                  {"D", run.max_kept},
                  {"final_size", run.final_size},
                  {"steps", std::move(steps)}};
}

}  // namespace refl
