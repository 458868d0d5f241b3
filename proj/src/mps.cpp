#include "refl/mps.hpp"

#include <cmath>
#include <string>

#include "refl/linalg.hpp"

namespace refl {

UniformMPS::UniformMPS(std::vector<Matrix> matrices, double log_scale)
    : matrices_(std::move(matrices)), log_scale_(log_scale) {
  if (matrices_.empty()) throw Error(ErrorCode::InvalidArgument, "MPS needs at least one matrix");
  const auto bond = matrices_.front().rows();
  if (bond < 1) throw Error(ErrorCode::InvalidArgument, "bond dimension must be positive");
  bool any_nonzero = false;
  for (const auto& a : matrices_) {
    if (a.rows() != bond || a.cols() != bond)
      throw Error(ErrorCode::DimensionMismatch, "all MPS matrices must be D x D");
    any_nonzero = any_nonzero || a.norm() > 0.0;
  }
  if (!any_nonzero) throw Error(ErrorCode::ZeroState, "all MPS matrices vanish");
  if (!std::isfinite(log_scale_)) throw Error(ErrorCode::InvalidArgument, "log_scale must be finite");
}

bool UniformMPS::operator==(const UniformMPS& other) const {
  if (log_scale_ != other.log_scale_ || matrices_.size() != other.matrices_.size()) return false;
  for (std::size_t s = 0; s < matrices_.size(); ++s) {
    if (matrices_[s].rows() != other.matrices_[s].rows() || matrices_[s] != other.matrices_[s]) return false;
  }
  return true;
}

SpectrumReport spectrum(const Matrix& m) {
  SpectrumReport report;
  report.eigenvalues = sorted_eigenvalues(m);
  if (report.eigenvalues.empty()) return report;
  const double first = std::abs(report.eigenvalues[0]);
  report.dominant_modulus = first;
  if (report.eigenvalues.size() < 2) {
    report.correlation_length = 0.0;
    return report;
  }
  const double second = std::abs(report.eigenvalues[1]);
  report.dominant_degenerate = first - second <= kDegeneracyTolerance * first;
  if (report.dominant_degenerate) return report;
  if (second <= 1e-13 * first)
    report.correlation_length = 0.0;
  else
    report.correlation_length = 1.0 / std::log(first / second);
  return report;
}

SpectrumReport spectrum(const TransferMatrix& t) { return spectrum(t.entries); }

TransferMatrix transfer_matrix(const UniformMPS& mps) {
  const int dd = mps.bond_dim() * mps.bond_dim();
  Matrix e = Matrix::Zero(dd, dd);
  for (const auto& a : mps.matrices()) e += kron(a.conjugate(), a);
  return {std::move(e), TransferKind::Plain};
}

UniformMPS reflect(const UniformMPS& mps) {
  std::vector<Matrix> out;
  out.reserve(mps.matrices().size());
  for (const auto& a : mps.matrices()) out.emplace_back(a.transpose());
  return UniformMPS(std::move(out), mps.log_scale());
}

TransferMatrix partial_transpose_transfer(const UniformMPS& mps) {
  const int dd = mps.bond_dim() * mps.bond_dim();
  Matrix e = Matrix::Zero(dd, dd);
  for (const auto& a : mps.matrices()) e += kron(a.conjugate(), a.transpose());
  return {std::move(e), TransferKind::PartialTranspose};
}

TransferMatrix mixed_transfer(const UniformMPS& bra, const UniformMPS& ket, const Matrix& op) {
  const int d = ket.physical_dim();
  if (bra.physical_dim() != d || op.rows() != d || op.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "bra, ket and operator physical dimensions differ");
  const int rows = bra.bond_dim() * ket.bond_dim();
  Matrix k = Matrix::Zero(rows, rows);
  for (int s = 0; s < d; ++s) {
    Matrix rotated = Matrix::Zero(ket.bond_dim(), ket.bond_dim());
    for (int t = 0; t < d; ++t) rotated += op(t, s) * ket[t];
    k += kron(bra[s].conjugate(), rotated);
  }
  return {std::move(k), TransferKind::Mixed};
}

Complex overlap_reflection(const UniformMPS& mps, long long length) {
  if (length < 1) throw Error(ErrorCode::BadLength, "chain length must be >= 1");
  auto numerator = trace_power(partial_transpose_transfer(mps).entries, length);
  auto denominator = trace_power(transfer_matrix(mps).entries, length);
  return trace_power_ratio(numerator, denominator);
}

Complex amplitude(const UniformMPS& mps, std::span<const int> config) {
  const int d = mps.physical_dim();
  Matrix product = Matrix::Identity(mps.bond_dim(), mps.bond_dim());
  for (int s : config) {
    if (s < 0 || s >= d) throw Error(ErrorCode::IndexOutOfRange, "physical index " + std::to_string(s));
    product = product * mps[s];
  }
  return std::exp(static_cast<double>(config.size()) * mps.log_scale()) * product.trace();
}

double correlation_length(const UniformMPS& mps) {
  auto report = spectrum(transfer_matrix(mps));
  if (!report.correlation_length)
    throw Error(ErrorCode::UndefinedDegenerate, "two largest transfer eigenvalue moduli coincide");
  return *report.correlation_length;
}

Preset parse_preset(std::string_view name) {
  if (name == "ghz") return Preset::Ghz;
  if (name == "cluster") return Preset::Cluster;
  if (name == "aklt") return Preset::Aklt;
  if (name == "eq5") return Preset::Eq5;
  if (name == "eq6") return Preset::Eq6;
  throw Error(ErrorCode::UnknownPreset, std::string(name));
}

std::string_view preset_name(Preset preset) {
  switch (preset) {
    case Preset::Ghz: return "ghz";
    case Preset::Cluster: return "cluster";
    case Preset::Aklt: return "aklt";
    case Preset::Eq5: return "eq5";
    case Preset::Eq6: return "eq6";
  }
  return "unknown";
}

namespace {

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

UniformMPS build_preset(Preset preset, std::span<const double> params) {
  const bool needs_g = preset == Preset::Eq5 || preset == Preset::Eq6;
  if (needs_g ? params.size() != 1 : !params.empty())
    throw Error(ErrorCode::BadParams, std::string(preset_name(preset)) +
                                          (needs_g ? " takes exactly one parameter g" : " takes no parameters"));
  switch (preset) {
    case Preset::Ghz:
      return UniformMPS({mat2(1, 0, 0, 0), mat2(0, 0, 0, 1)});
    case Preset::Cluster:
      return UniformMPS({mat2(0, 0, 1, 1), mat2(1, -1, 0, 0)});
    case Preset::Aklt: {
      const double plus = std::sqrt(2.0 / 3.0);
      const double zero = std::sqrt(1.0 / 3.0);
      return UniformMPS({mat2(0, plus, 0, 0), mat2(-zero, 0, 0, zero), mat2(0, 0, -plus, 0)});
    }
    case Preset::Eq5: {
      const double g = params[0];
      return UniformMPS({mat2(1, 0, 0, -1), mat2(0, 1, 0, 0), mat2(0, 0, 1, g)});
    }
    case Preset::Eq6: {
      const double g = params[0];
      return UniformMPS({mat2(1, 0, 0, g), mat2(0, 1, 0, 0), mat2(0, 0, g, 0)});
    }
  }
  throw Error(ErrorCode::UnknownPreset, "unhandled preset");
}

Vector dense_amplitudes(const UniformMPS& mps, int length) {
  const int d = mps.physical_dim();
  long long total = 1;
  for (int i = 0; i < length; ++i) total *= d;
  Vector out(total);
  std::vector<int> config(static_cast<std::size_t>(length), 0);
  for (long long index = 0; index < total; ++index) {
    long long rest = index;
    for (int i = length - 1; i >= 0; --i) {
      config[static_cast<std::size_t>(i)] = static_cast<int>(rest % d);
      rest /= d;
    }
    out(index) = amplitude(mps, config);
  }
  return out;
}

Vector apply_parity(const Vector& state, int local_dim, int length) {
  Vector out(state.size());
  for (Eigen::Index index = 0; index < state.size(); ++index) {
    Eigen::Index rest = index, reversed = 0;
    for (int i = 0; i < length; ++i) {
      reversed = reversed * local_dim + rest % local_dim;
      rest /= local_dim;
    }
    out(reversed) = state(index);
  }
  return out;
}

}  // namespace refl
