#include "refl/rg_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "refl/io.hpp"
#include "refl/linalg.hpp"

namespace refl {

namespace {

double gram_weight(int alpha) { return 1.0 + 0.731 * alpha + 0.113 * alpha * alpha; }

double phase_weight(int alpha, int beta) { return 1.0 / (1.0 + alpha + beta); }

}  // namespace

void fix_right_vector_gauge(const RealVector& sigma, Matrix& vh, int bond_dim, double group_tolerance) {
  const int dd = bond_dim * bond_dim;
  const auto kept = static_cast<int>(std::min<Eigen::Index>(sigma.size(), vh.rows()));
  RealVector weight(dd);
  for (int a = 0; a < bond_dim; ++a)
    for (int b = 0; b < bond_dim; ++b) weight(a * bond_dim + b) = gram_weight(a) * gram_weight(b);

  std::vector<double> values(sigma.data(), sigma.data() + kept);
  for (auto [begin, end] : degenerate_groups(values, group_tolerance)) {
    const int k = end - begin;
    if (k < 2) continue;
    Matrix block = vh.middleRows(begin, k);
    Matrix gram = block.conjugate() * weight.asDiagonal() * block.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    vh.middleRows(begin, k) = eig.eigenvectors().transpose() * block;
  }

  for (int l = 0; l < kept; ++l) {
    auto row = vh.row(l);
    const double norm = row.norm();
    if (norm == 0.0) continue;
    Complex f(0.0, 0.0);
    for (int a = 0; a < bond_dim; ++a)
      for (int b = 0; b < bond_dim; ++b) f += phase_weight(a, b) * row(a * bond_dim + b);
    if (std::abs(f) <= 1e-8 * norm) {
      for (int i = 0; i < dd; ++i)
        if (std::abs(row(i)) > 1e-8 * norm) {
          f = row(i);
          break;
        }
    }
    row *= std::conj(f) / std::abs(f);
  }
}

CoarseGrainResult coarse_grain_step(const UniformMPS& mps, const CoarseGrainOptions& options) {
  const int d = mps.physical_dim();
  const int bond = mps.bond_dim();
  const int dd = bond * bond;
  Matrix merged(d * d, dd);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) {
      Matrix product = mps[p] * mps[q];
      for (int a = 0; a < bond; ++a)
        for (int b = 0; b < bond; ++b) merged(p * d + q, a * bond + b) = product(a, b);
    }

  SVDResult svd = thin_svd(merged);
  const double top = svd.sigma.size() > 0 ? svd.sigma(0) : 0.0;
  if (!(top > 0.0)) throw Error(ErrorCode::ZeroState, "all merged singular values vanish");
  int kept = 0;
  while (kept < svd.sigma.size() && svd.sigma(kept) > options.zero_threshold * top) ++kept;
  if (options.max_kept) kept = std::min(kept, std::max(*options.max_kept, 1));

  RealVector sigma = svd.sigma.head(kept);
  Matrix vh = svd.vh.topRows(kept);
  fix_right_vector_gauge(sigma, vh, bond, 1e-10 * top);

  std::vector<Matrix> matrices;
  matrices.reserve(static_cast<std::size_t>(kept));
  for (int l = 0; l < kept; ++l) {
    Matrix a(bond, bond);
    for (int r = 0; r < bond; ++r)
      for (int c = 0; c < bond; ++c) a(r, c) = sigma(l) * vh(l, r * bond + c);
    matrices.push_back(std::move(a));
  }

  double delta = 0.0;
  if (options.renormalize) {
    Matrix e = Matrix::Zero(dd, dd);
    for (const auto& a : matrices) e += kron(a.conjugate(), a);
    const double rho = dominant_modulus(e);
    if (!(rho > 0.0)) throw Error(ErrorCode::ZeroState, "coarse-grained transfer matrix is nilpotent");
    const double factor = 1.0 / std::sqrt(rho);
    for (auto& a : matrices) a *= factor;
    delta = 0.5 * std::log(rho);
  }

  RGStepRecord record;
  record.step_index = 1;
  record.singular_values = to_std(sigma);
  record.d_prime = kept;
  record.log_scale_delta = delta;
  return {UniformMPS(std::move(matrices), 2.0 * mps.log_scale() + delta), std::move(record)};
}

ConjugacyReport compare_branches(const CoarseGrainResult& forward, const CoarseGrainResult& reflected,
                                 long long fidelity_length) {
  ConjugacyReport report;
  const auto& sf = forward.record.singular_values;
  const auto& sr = reflected.record.singular_values;
  const double scale = std::max(1.0, sf.empty() ? 0.0 : sf.front());
  report.singular_value_mismatch = multiset_distance(sf, sr) / scale;

  const Matrix ef = transfer_matrix(forward.mps).entries;
  const Matrix er = transfer_matrix(reflected.mps).entries;
  report.transfer_residual = relative_difference(er, ef.transpose());

  const auto& fm = forward.mps.matrices();
  const auto& rm = reflected.mps.matrices();
  if (fm.size() == rm.size()) {
    for (std::size_t l = 0; l < fm.size(); ++l)
      report.tensor_residual = std::max(report.tensor_residual, relative_difference(rm[l], fm[l].transpose()));
  } else {
    report.tensor_residual = std::numeric_limits<double>::infinity();
  }

  if (fm.size() == rm.size()) {
    const UniformMPS bra = reflect(forward.mps);
    const Matrix id = Matrix::Identity(bra.physical_dim(), bra.physical_dim());
    const auto cross = trace_power(mixed_transfer(bra, reflected.mps, id).entries, fidelity_length);
    const auto norm_a = trace_power(transfer_matrix(bra).entries, fidelity_length);
    const auto norm_b = trace_power(er, fidelity_length);
    if (std::abs(cross.scaled_sum) > 0.0)
      report.state_fidelity = std::exp(cross.log_abs() - 0.5 * (norm_a.log_abs() + norm_b.log_abs()));
  }

  report.passed = report.singular_value_mismatch <= 1e-10 && report.transfer_residual <= 1e-10 &&
                  std::abs(report.state_fidelity - 1.0) <= 1e-8;
  return report;
}

ConjugacyReport conjugacy_check(const UniformMPS& mps, const CoarseGrainOptions& options, long long fidelity_length) {
  return compare_branches(coarse_grain_step(mps, options), coarse_grain_step(reflect(mps), options),
                          fidelity_length);
}

RGTrajectory rg_flow(const UniformMPS& mps, int steps, std::optional<long long> length,
                     const CoarseGrainOptions& options) {
  if (steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 0");
  RGTrajectory trajectory{mps, {}, {}, {}, {}, mps, 1, std::nullopt};
  UniformMPS forward = mps;
  UniformMPS reflected = reflect(mps);
  for (int k = 1; k <= steps; ++k) {
    CoarseGrainResult f = coarse_grain_step(forward, options);
    CoarseGrainResult r = coarse_grain_step(reflected, options);
    ConjugacyReport conj = compare_branches(f, r);
    f.record.step_index = k;
    f.record.conjugacy_residual = conj.transfer_residual;
    trajectory.chi *= 2;
    if (length && *length % trajectory.chi == 0)
      f.record.eta = overlap_reflection(f.mps, *length / trajectory.chi);
    trajectory.records.push_back(f.record);
    trajectory.conjugacy.push_back(conj);
    trajectory.forward.push_back(f.mps);
    trajectory.reflected.push_back(r.mps);
    forward = std::move(f.mps);
    reflected = std::move(r.mps);
  }
  trajectory.final_state = forward;
  if (length && *length % trajectory.chi == 0) trajectory.effective_length = *length / trajectory.chi;
  return trajectory;
}

std::vector<Complex> overlap_flow(const UniformMPS& mps, long long length, int steps) {
  if (steps < 0 || length < 1 || length % (1LL << steps) != 0)
    throw Error(ErrorCode::BadLength, "N must be divisible by 2^steps");
  const int bond = mps.bond_dim();
  Matrix power = transfer_matrix(mps).entries;
  std::vector<Complex> out;
  for (int k = 0; k <= steps; ++k) {
    const long long n = length >> k;
    const auto numerator = trace_power(partial_transpose_second(power, bond), n);
    const auto denominator = trace_power(power, n);
    out.push_back(trace_power_ratio(numerator, denominator));
    if (k < steps) {
      power = power * power;
      power /= dominant_modulus(power);
    }
  }
  return out;
}

std::vector<Complex> overlap_flow_direct(const UniformMPS& mps, long long length, int steps,
                                         const CoarseGrainOptions& options) {
  if (steps < 0 || length < 1 || length % (1LL << steps) != 0)
    throw Error(ErrorCode::BadLength, "N must be divisible by 2^steps");
  std::vector<Complex> out{overlap_reflection(mps, length)};
  UniformMPS current = mps;
  for (int k = 1; k <= steps; ++k) {
    current = coarse_grain_step(current, options).mps;
    out.push_back(overlap_reflection(current, length >> k));
  }
  return out;
}

Vector normalize_leading(const Vector& v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-8 * top) return v / v(i);
  return v;
}

FixedPointReport fixed_point(const UniformMPS& mps, double tol, int max_steps) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const Matrix e = transfer_matrix(mps).entries;
  Matrix current = e / dominant_modulus(e);
  FixedPointReport report;
  for (int k = 1; k <= max_steps; ++k) {
    Matrix next = current * current;
    next /= dominant_modulus(next);
    const double diff = (next - current).norm();
    current = std::move(next);
    if (diff < tol) {
      report.converged = true;
      report.steps_used = k;
      break;
    }
  }
  if (!report.converged) throw Error(ErrorCode::NoConvergence, "transfer-matrix squaring did not settle");
  report.e_infinity = {current, TransferKind::Plain};

  const auto spec = spectrum(e);
  report.unique_dominant = !spec.dominant_degenerate;
  if (!report.unique_dominant) return report;

  auto dominant_vector = [](const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> eig(m);
    Eigen::Index idx = 0;
    eig.eigenvalues().cwiseAbs().maxCoeff(&idx);
    return Vector(eig.eigenvectors().col(idx));
  };
  Vector left = normalize_leading(dominant_vector(e.adjoint()));
  Vector right = dominant_vector(e);
  right /= left.dot(right);  // Eigen's dot conjugates the first argument
  report.residual = (current - right * left.adjoint()).norm();
  report.phi_left = std::move(left);
  report.phi_right = std::move(right);
  return report;
}

UniformMPS eq6_fixed_point_matrices(double g) {
  Matrix a1 = Matrix::Zero(2, 2), a2 = Matrix::Zero(2, 2), a3 = Matrix::Zero(2, 2), a4 = Matrix::Zero(2, 2);
  a1(0, 0) = 1.0;
  a2(0, 1) = g;
  a3(1, 0) = 1.0;
  a4(1, 1) = g;
  return UniformMPS({a1, a2, a3, a4});
}

FixedPointCheck fixed_point_mps_check(const UniformMPS& mps, const FixedPointCheckOptions& options) {
  FixedPointCheck check;
  try {
    check.fixed_point = fixed_point(mps, options.tol, options.max_steps);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoConvergence) throw Error(ErrorCode::NotConverged, e.what());
    throw;
  }
  const Matrix& e_inf = check.fixed_point.e_infinity.entries;
  const int bond = mps.bond_dim();

  RGTrajectory trajectory = rg_flow(mps, check.fixed_point.steps_used);
  const Matrix e_final = transfer_matrix(trajectory.final_state).entries;
  check.transfer_residual = relative_difference(e_final / dominant_modulus(e_final), e_inf);
  check.final_state = trajectory.final_state;

  check.eta_infinity =
      trace_power_ratio(trace_power(partial_transpose_second(e_inf, bond), options.eta_length),
                        trace_power(e_inf, options.eta_length));

  bool passed = check.transfer_residual <= 1e-6;
  if (options.reference) {
    const Matrix e_ref = transfer_matrix(*options.reference).entries;
    const Matrix normalized = e_ref / dominant_modulus(e_ref);
    const double direct = relative_difference(normalized, e_inf);
    const double transposed = relative_difference(normalized, e_inf.transpose());
    check.reference_is_reflected = transposed < direct;
    check.reference_transfer_residual = std::min(direct, transposed);
    passed = passed && *check.reference_transfer_residual <= 1e-6;
    if (options.reference_unitary) {
      auto x = fit_similarity(*options.reference, *options.reference_unitary);
      if (x)
        check.reference_witness = verify_witness(*options.reference, *options.reference_unitary, *x);
      else
        check.reference_witness = WitnessCheck{false, std::numeric_limits<double>::infinity()};
      passed = passed && check.reference_witness->passed;
    }
  }
  if (options.search) {
    auto found = search_local_unitary(trajectory.final_state, options.search_options);
    if (found) check.search_ratio = found->ratio;
  }
  check.passed = passed;
  return check;
}

std::string rg_flow_csv(const RGTrajectory& trajectory) {
  std::size_t width = 0;
  for (const auto& r : trajectory.records) width = std::max(width, r.singular_values.size());
  std::ostringstream out;
  out << "step,chi,d_prime";
  for (std::size_t i = 1; i <= width; ++i) out << ",lambda_" << i;
  out << ",eta_re,eta_im,conjugacy_residual,xi\n";

  auto xi_text = [](const UniformMPS& m) {
    auto report = spectrum(transfer_matrix(m));
    return report.correlation_length ? io::format_double(*report.correlation_length) : std::string();
  };

  std::optional<Complex> eta0;
  if (trajectory.effective_length)
    eta0 = overlap_reflection(trajectory.initial, *trajectory.effective_length * trajectory.chi);
  out << "0,1," << trajectory.initial.physical_dim();
  for (std::size_t i = 0; i < width; ++i) out << ",0";
  out << ',' << (eta0 ? io::format_double(eta0->real()) : "") << ','
      << (eta0 ? io::format_double(eta0->imag()) : "") << ",0," << xi_text(trajectory.initial) << '\n';

  long long chi = 1;
  for (std::size_t k = 0; k < trajectory.records.size(); ++k) {
    const auto& r = trajectory.records[k];
    chi *= 2;
    out << r.step_index << ',' << chi << ',' << r.d_prime;
    for (std::size_t i = 0; i < width; ++i)
      out << ',' << (i < r.singular_values.size() ? io::format_double(r.singular_values[i]) : "0");
    out << ',' << (r.eta ? io::format_double(r.eta->real()) : "") << ','
        << (r.eta ? io::format_double(r.eta->imag()) : "") << ',' << io::format_double(r.conjugacy_residual)
        << ',' << xi_text(trajectory.forward[k]) << '\n';
  }
  return out.str();
}

}  // namespace refl
