#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "refl/dmrg.hpp"
#include "refl/exact.hpp"
#include "refl/linalg.hpp"
#include "refl/mps.hpp"

namespace refl {

namespace {

// Overlap between the reflected run's left block and the parity image of the
// original run's right block, over the first `steps` sites.
Matrix left_block_overlap(const DMRGRun& original, const DMRGRun& reflected, int steps) {
  Matrix o = Matrix::Identity(1, 1);
  for (int k = 0; k < steps; ++k) {
    const SiteIsometry& u = reflected.left.isometries[static_cast<std::size_t>(k)];
    const SiteIsometry& v = original.right.isometries[static_cast<std::size_t>(k)];
    Matrix next = Matrix::Zero(u.front().cols(), v.front().rows());
    for (std::size_t s = 0; s < u.size(); ++s) next += u[s].adjoint() * o * v[s].transpose();
    o = std::move(next);
  }
  return o;
}

Matrix right_block_overlap(const DMRGRun& original, const DMRGRun& reflected, int steps) {
  Matrix o = Matrix::Identity(1, 1);
  for (int k = 0; k < steps; ++k) {
    const SiteIsometry& v = reflected.right.isometries[static_cast<std::size_t>(k)];
    const SiteIsometry& u = original.left.isometries[static_cast<std::size_t>(k)];
    Matrix next = Matrix::Zero(v.front().rows(), u.front().cols());
    for (std::size_t s = 0; s < v.size(); ++s) next += v[s].conjugate() * o * u[s];
    o = std::move(next);
  }
  return o;
}

double unitarity_deviation(const Matrix& o) {
  if (o.rows() != o.cols()) return 1.0;
  const RealVector sigma = thin_svd(o).sigma;
  return (sigma.array() - 1.0).abs().maxCoeff();
}

Matrix centre_block(const Matrix& psi, int d, int s, int t) {
  const Eigen::Index dl = psi.rows() / d;
  const Eigen::Index dr = psi.cols() / d;
  Matrix p(dl, dr);
  for (Eigen::Index a = 0; a < dl; ++a) p.row(a) = psi.row(a * d + s).segment(t * dr, dr);
  return p;
}

// |⟨Ψ_rfl | P Ψ⟩| through the block overlaps.
double parity_fidelity(const TargetTensor& original, const TargetTensor& reflected, const Matrix& o1,
                       const Matrix& o2) {
  const int d = original.d;
  Complex total = 0.0;
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t) {
      const Matrix p = centre_block(original.psi, d, s, t);
      const Matrix q = centre_block(reflected.psi, d, t, s);
      const Matrix image = o1 * p.transpose() * o2.transpose();
      if (image.rows() != q.rows() || image.cols() != q.cols()) return 0.0;
      total += q.conjugate().cwiseProduct(image).sum();
    }
  return std::abs(total);
}

}  // namespace

MirrorReport compare_mirrored_runs(const DMRGRun& original, const DMRGRun& reflected) {
  if (original.targets.size() != reflected.targets.size() || original.model.d != reflected.model.d)
    throw Error(ErrorCode::DimensionMismatch, "mirrored runs have different shapes");
  MirrorReport report;
  report.model = original.model.name;
  report.max_kept = original.max_kept;
  report.size = original.final_size;
  report.trivially_symmetric = is_parity_symmetric(original.model);

  for (std::size_t i = 0; i < original.targets.size(); ++i) {
    const DMRGStepRecord& a = original.steps[i];
    const DMRGStepRecord& b = reflected.steps[i];
    const int steps = static_cast<int>(i) + 1;
    MirrorStep m;
    m.step = a.step;
    m.size = a.size;
    m.energy = a.energy;
    m.energy_reflected = b.energy;
    m.energy_difference = std::abs(a.energy - b.energy);
    m.spectrum_difference = multiset_distance(a.singular_values, b.singular_values);
    m.isometry_residual = std::max(a.isometry_residual, b.isometry_residual);
    if (a.gap && b.gap) m.gap = std::min(*a.gap, *b.gap);
    const Matrix o1 = left_block_overlap(original, reflected, steps);
    const Matrix o2 = right_block_overlap(original, reflected, steps);
    m.block_overlap_deviation = std::max(unitarity_deviation(o1), unitarity_deviation(o2));
    m.fidelity = parity_fidelity(original.targets[i], reflected.targets[i], o1, o2);
    if (m.gap && *m.gap < kDegenerateGap) report.degenerate_target = true;
    report.steps.push_back(m);
  }
  if (!report.steps.empty()) report.final_fidelity = report.steps.back().fidelity;

  for (const MirrorStep& m : report.steps) {
    if (!(m.energy_difference <= kMirrorEnergyTol))
      report.failures.push_back(fmt::format("step {}: energy difference {:.3e}", m.step, m.energy_difference));
    if (!(m.spectrum_difference <= kMirrorSpectrumTol))
      report.failures.push_back(fmt::format("step {}: singular spectrum difference {:.3e}", m.step,
                                            m.spectrum_difference));
    if (!(m.isometry_residual <= kMirrorIsometryTol))
      report.failures.push_back(fmt::format("step {}: isometry residual {:.3e}", m.step, m.isometry_residual));
  }
  return report;
}

MirrorReport mirrored_run_check(const SpinChainModel& model, int max_kept, int size,
                                const SuperblockOptions& options) {
  const DMRGRun original = run_dmrg(model, max_kept, size, options);
  const DMRGRun reflected = run_dmrg(reflect_model(model), max_kept, size, options);
  MirrorReport report = compare_mirrored_runs(original, reflected);

  if (size <= 12 && std::pow(static_cast<double>(model.d), size) <= 4096.0) {
    report.oracle_gap = exact_ground_state(model, size).gap;
    if (*report.oracle_gap < kDegenerateGap) report.degenerate_target = true;
    const Vector psi = target_as_mps(original, static_cast<int>(original.targets.size())).dense();
    const Vector phi = target_as_mps(reflected, static_cast<int>(reflected.targets.size())).dense();
    report.dense_fidelity = std::abs(phi.dot(apply_parity(psi, model.d, size)));
  }

  if (!report.degenerate_target) {
    for (const MirrorStep& m : report.steps) {
      if (!(m.block_overlap_deviation <= kMirrorFidelityTol))
        report.failures.push_back(
            fmt::format("step {}: block overlap deviation {:.3e}", m.step, m.block_overlap_deviation));
      if (!(m.fidelity >= 1.0 - kMirrorFidelityTol))
        report.failures.push_back(fmt::format("step {}: parity fidelity {:.12f}", m.step, m.fidelity));
    }
    if (report.dense_fidelity && !(*report.dense_fidelity >= 1.0 - kMirrorFidelityTol))
      report.failures.push_back(fmt::format("dense parity fidelity {:.12f}", *report.dense_fidelity));
  }
  report.passed = report.failures.empty();
  return report;
}

io::Json mirror_report_to_json(const MirrorReport& report) {
  io::Json steps = io::Json::array();
  for (const MirrorStep& m : report.steps) {
    steps.push_back({{"step", m.step},
                     {"size", m.size},
                     {"energy", m.energy},
                     {"energy_reflected", m.energy_reflected},
                     {"energy_difference", m.energy_difference},
                     {"spectrum_difference", m.spectrum_difference},
                     {"isometry_residual", m.isometry_residual},
                     {"block_overlap_deviation", m.block_overlap_deviation},
                     {"fidelity", m.fidelity},
                     {"gap", m.gap ? io::Json(*m.gap) : io::Json(nullptr)}});
  }
  io::Json flags = io::Json::array();
  if (report.degenerate_target) flags.push_back("DEGENERATE_TARGET");
  if (report.trivially_symmetric) flags.push_back("TRIVIALLY_SYMMETRIC");
  return io::Json{{"model", report.model},
                  {"D", report.max_kept},
                  {"size", report.size},
                  {"passed", report.passed},
                  {"flags", std::move(flags)},
                  {"oracle_gap", report.oracle_gap ? io::Json(*report.oracle_gap) : io::Json(nullptr)},
                  {"final_fidelity", report.final_fidelity},
                  {"dense_fidelity", report.dense_fidelity ? io::Json(*report.dense_fidelity) : io::Json(nullptr)},
                  {"failures", report.failures},
                  {"steps", std::move(steps)}};
}

}  // namespace refl
