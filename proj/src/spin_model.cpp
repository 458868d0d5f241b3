#include "refl/spin_model.hpp"

#include <cmath>

#include "refl/linalg.hpp"

namespace refl {

namespace {

struct SpinHalf {
  Matrix x, y, z;
};

SpinHalf spin_half() {
  SpinHalf s{Matrix(2, 2), Matrix(2, 2), Matrix(2, 2)};
  const Complex i(0.0, 1.0);
  s.x << 0.0, 0.5, 0.5, 0.0;
  s.y << 0.0, -0.5 * i, 0.5 * i, 0.0;
  s.z << 0.5, 0.0, 0.0, -0.5;
  return s;
}

}  // namespace

SpinChainModel make_model(int d, Matrix two_site_term, std::optional<Matrix> single_site_term, std::string name,
                          io::Json params) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "local dimension must be positive");
  if (two_site_term.rows() != d * d || two_site_term.cols() != d * d)
    throw Error(ErrorCode::DimensionMismatch, "two-site term must be d^2 x d^2");
  if ((two_site_term - two_site_term.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "two-site term is not Hermitian");
  if (single_site_term) {
    if (single_site_term->rows() != d || single_site_term->cols() != d)
      throw Error(ErrorCode::DimensionMismatch, "single-site term must be d x d");
    if ((*single_site_term - single_site_term->adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "single-site term is not Hermitian");
  }
  return SpinChainModel{d, std::move(two_site_term), std::move(single_site_term), std::move(name),
                        std::move(params)};
}

SpinChainModel heisenberg_model(double j) {
  auto s = spin_half();
  Matrix h = j * (kron(s.x, s.x) + kron(s.y, s.y) + kron(s.z, s.z));
  return make_model(2, std::move(h), std::nullopt, "heisenberg", io::Json{{"J", j}});
}

SpinChainModel xxz_dm_model(double j, double delta, double dm) {
  auto s = spin_half();
  Matrix h = j * (kron(s.x, s.x) + kron(s.y, s.y) + delta * kron(s.z, s.z)) +
             dm * (kron(s.x, s.y) - kron(s.y, s.x));
  return make_model(2, std::move(h), std::nullopt, "xxz_dm", io::Json{{"J", j}, {"delta", delta}, {"dm", dm}});
}

SpinChainModel ising_model(double j, double field) {
  Matrix z(2, 2), x(2, 2);
  z << 1.0, 0.0, 0.0, -1.0;
  x << 0.0, 1.0, 1.0, 0.0;
  Matrix h = -j * kron(z, z);
  Matrix h1 = -field * x;
  return make_model(2, std::move(h), std::move(h1), "ising", io::Json{{"J", j}, {"h", field}});
}

Matrix swap_operator(int d) {
  Matrix s = Matrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) s(a * d + b, b * d + a) = 1.0;
  return s;
}

SpinChainModel reflect_model(const SpinChainModel& model) {
  const Matrix s = swap_operator(model.d);
  SpinChainModel out = model;
  out.two_site_term = s * model.two_site_term * s;
  if (!is_parity_symmetric(model)) out.name = "reflected(" + model.name + ")";
  return out;
}

bool is_parity_symmetric(const SpinChainModel& model, double tol) {
  const Matrix s = swap_operator(model.d);
  return (s * model.two_site_term * s - model.two_site_term).cwiseAbs().maxCoeff() <= tol;
}

OperatorSchmidt decompose_two_site(const Matrix& h, int d) {
  // T((a,a'),(b,b')) = h((a,b),(a',b'))
  Matrix t(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int ap = 0; ap < d; ++ap)
        for (int bp = 0; bp < d; ++bp) t(a * d + ap, b * d + bp) = h(a * d + b, ap * d + bp);
  SVDResult svd = thin_svd(t);
  OperatorSchmidt out;
  const double top = svd.sigma.size() > 0 ? svd.sigma(0) : 0.0;
  for (Eigen::Index k = 0; k < svd.sigma.size(); ++k) {
    if (!(svd.sigma(k) > 1e-14 * std::max(top, 1.0))) break;
    Matrix left(d, d), right(d, d);
    for (int a = 0; a < d; ++a)
      for (int ap = 0; ap < d; ++ap) left(a, ap) = svd.sigma(k) * svd.u(a * d + ap, k);
    for (int b = 0; b < d; ++b)
      for (int bp = 0; bp < d; ++bp) right(b, bp) = svd.vh(k, b * d + bp);
    out.left.push_back(std::move(left));
    out.right.push_back(std::move(right));
  }
  return out;
}

SpinChainModel model_from_json(const io::Json& j) {
  try {
    const std::string preset = j.value("preset", std::string("custom"));
    const io::Json params = j.value("params", io::Json::object());
    SpinChainModel model;
    if (preset == "heisenberg") {
      model = heisenberg_model(params.value("J", 1.0));
    } else if (preset == "xxz_dm") {
      model = xxz_dm_model(params.value("J", 1.0), params.value("delta", 1.0), params.value("dm", 0.0));
    } else if (preset == "ising") {
      model = ising_model(params.value("J", 1.0), params.value("h", 0.0));
    } else if (preset == "custom") {
      if (!j.contains("two_site_term")) throw Error(ErrorCode::ParseError, "custom model needs two_site_term");
      const int d = j.at("d").get<int>();
      std::optional<Matrix> h1;
      if (j.contains("single_site_term")) h1 = io::matrix_from_json(j.at("single_site_term"));
      model = make_model(d, io::matrix_from_json(j.at("two_site_term")), std::move(h1), "custom", params);
    } else {
      throw Error(ErrorCode::UnknownPreset, preset);
    }
    if (j.contains("d") && j.at("d").get<int>() != model.d)
      throw Error(ErrorCode::ParseError, "d does not match the preset");
    return model;
  } catch (const io::Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

io::Json model_to_json(const SpinChainModel& model) {
  const bool known = model.name == "heisenberg" || model.name == "xxz_dm" || model.name == "ising";
  io::Json j{{"d", model.d}, {"preset", known ? model.name : std::string("custom")}, {"params", model.params}};
  j["two_site_term"] = io::matrix_to_json(model.two_site_term);
  if (model.single_site_term) j["single_site_term"] = io::matrix_to_json(*model.single_site_term);
  return j;
}

}  // namespace refl
