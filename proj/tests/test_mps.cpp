#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "refl/io.hpp"
#include "refl/linalg.hpp"
#include "refl/mps.hpp"

using namespace refl;

namespace {

UniformMPS preset(Preset p, std::optional<double> g = std::nullopt) {
  std::vector<double> params;
  if (g) params.push_back(*g);
  return build_preset(p, params);
}

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_SUITE("mps-core") {
  TEST_CASE("transfer matrix of EQ5 at g = 1") {
    const auto ev = spectrum(transfer_matrix(preset(Preset::Eq5, 1.0))).eigenvalues;
    const double r5 = std::sqrt(5.0);
    CHECK(spectrum_distance(ev, {-1.0, -1.0, (3 + r5) / 2, (3 - r5) / 2}) <= 1e-10);
  }

  TEST_CASE("transfer matrix of a D = 1 state is the scalar norm") {
    const UniformMPS m({Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0)});
    const TransferMatrix e = transfer_matrix(m);
    REQUIRE(e.dim() == 1);
    CHECK(std::abs(e.entries(0, 0) - 2.0) < 1e-15);
    CHECK(e.kind == TransferKind::Plain);
  }

  TEST_CASE("cluster transfer spectrum is {2, 0, 0, 0}") {
    const auto ev = spectrum(transfer_matrix(preset(Preset::Cluster))).eigenvalues;
    CHECK(spectrum_distance(ev, {2.0, 0.0, 0.0, 0.0}) <= 1e-10);
  }

  TEST_CASE("real MPS gives a real transfer matrix") {
    const TransferMatrix e = transfer_matrix(preset(Preset::Eq6, 0.3));
    CHECK(e.entries.imag().cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("reflection of presets") {
    const UniformMPS ghz = preset(Preset::Ghz);
    CHECK(reflect(ghz) == ghz);

    const UniformMPS r = reflect(preset(Preset::Eq6, 0.5));
    CHECK(r[0] == mat2(1, 0, 0, 0.5));
    CHECK(r[1] == mat2(0, 0, 1, 0));
    CHECK(r[2] == mat2(0, 0.5, 0, 0));
  }

  TEST_CASE("reflection is an involution") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const UniformMPS m(oracle::random_mps(rng, 3, 3).matrices(), 0.25 * trial);
      const UniformMPS rr = reflect(reflect(m));
      CHECK(rr == m);
      CHECK(rr.log_scale() == m.log_scale());
    }
  }

  TEST_CASE("partial-transpose spectra") {
    for (double g : {0.3, 0.5, 0.8, 1.7}) {
      const auto ev = spectrum(partial_transpose_transfer(preset(Preset::Eq6, g))).eigenvalues;
      CHECK(spectrum_distance(ev, {2 * g, 1.0, g * g, 0.0}) <= 1e-10);
    }
    std::mt19937_64 rng(3);
    const UniformMPS scalar = oracle::random_mps(rng, 3, 1);
    CHECK((partial_transpose_transfer(scalar).entries - transfer_matrix(scalar).entries).norm() == 0.0);
    const UniformMPS cluster = preset(Preset::Cluster);
    // E has a nilpotent block here, so compare power traces instead of roots.
    const Matrix e = transfer_matrix(cluster).entries;
    const Matrix et2 = partial_transpose_transfer(cluster).entries;
    Matrix pe = e, pt = et2;
    for (int k = 1; k <= 4; ++k, pe = pe * e, pt = pt * et2) CHECK(std::abs(pe.trace() - pt.trace()) <= 1e-10);
    CHECK(partial_transpose_transfer(cluster).kind == TransferKind::PartialTranspose);
  }

  TEST_CASE("mixed transfer reductions") {
    std::mt19937_64 rng(5);
    const UniformMPS m = oracle::random_mps(rng, 3, 3);
    const Matrix id = Matrix::Identity(3, 3);
    const TransferMatrix k = mixed_transfer(m, m, id);
    CHECK(k.kind == TransferKind::Mixed);
    CHECK((k.entries - transfer_matrix(m).entries).norm() <= 1e-14 * transfer_matrix(m).entries.norm());

    const Matrix cross = mixed_transfer(m, reflect(m), id).entries;
    const Matrix et2 = partial_transpose_transfer(m).entries;
    Matrix pc = Matrix::Identity(9, 9), pt = Matrix::Identity(9, 9);
    for (int n = 1; n <= 6; ++n) {
      pc = pc * cross;
      pt = pt * et2;
      CHECK(std::abs(pc.trace() - pt.trace()) <= 1e-10 * std::max(1.0, std::abs(pt.trace())));
    }

    const UniformMPS eq6 = preset(Preset::Eq6, 0.5);
    Matrix u = Matrix::Zero(3, 3);
    u(0, 0) = u(1, 2) = u(2, 1) = 1.0;
    CHECK(std::abs(dominant_modulus(mixed_transfer(eq6, reflect(eq6), u).entries) -
                   dominant_modulus(transfer_matrix(eq6).entries)) <= 1e-12);

    CHECK_ERROR_CODE(mixed_transfer(m, oracle::random_mps(rng, 2, 3), id), ErrorCode::DimensionMismatch);
  }

  TEST_CASE("reflection overlap examples") {
    for (long long n : {2LL, 5LL, 64LL, 1000LL})
      CHECK(std::abs(overlap_reflection(preset(Preset::Cluster), n) - 1.0) <= 1e-10);
    CHECK(std::abs(std::abs(overlap_reflection(preset(Preset::Eq6, 1.0), 64)) - 1.0) <= 1e-10);
    const UniformMPS eq5 = preset(Preset::Eq5, 1.0);
    CHECK(std::abs(overlap_reflection(eq5, 8) - oracle::brute_block_reversal_overlap(eq5, 8)) <= 1e-9);
    CHECK(std::abs(overlap_reflection(preset(Preset::Aklt), 64) - 1.0) <= 1e-10);
  }

  TEST_CASE("overlap stays finite for very long chains") {
    std::mt19937_64 rng(17);
    const UniformMPS m = oracle::random_mps(rng, 2, 3);
    const Complex eta = overlap_reflection(m, 1000000);
    CHECK(std::isfinite(eta.real()));
    CHECK(std::abs(eta) <= 1.0 + 1e-9);
  }

  TEST_CASE("overlap with a vanishing norm is reported") {
    // Tr E^N = 2 + 2(−1)^N vanishes for odd N.
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = a(1, 0) = 1.0;
    const UniformMPS m({a});
    CHECK_ERROR_CODE(overlap_reflection(m, 3), ErrorCode::DegenerateNorm);
    CHECK_ERROR_CODE(overlap_reflection(m, 0), ErrorCode::BadLength);
  }

  TEST_CASE("amplitudes") {
    const UniformMPS ghz = preset(Preset::Ghz);
    for (int n : {1, 3, 10}) {
      const std::vector<int> zeros(static_cast<std::size_t>(n), 0);
      CHECK(std::abs(amplitude(ghz, zeros) - 1.0) < 1e-15);
    }
    const std::vector<int> mixed{0, 1, 0};
    CHECK(std::abs(amplitude(ghz, mixed)) < 1e-15);

    const UniformMPS eq6 = preset(Preset::Eq6, 0.5);
    const std::vector<int> c{1, 2, 0};
    const Matrix p = eq6[1] * eq6[2] * eq6[0];
    const Complex direct = p(0, 0) + p(1, 1);
    CHECK(std::abs(amplitude(eq6, c) - direct) < 1e-15);
    CHECK(std::abs(amplitude(eq6, c) - oracle::naive_amplitude(eq6.matrices(), {1, 2, 0})) < 1e-15);

    const std::vector<int> bad{0, 3};
    CHECK_ERROR_CODE(amplitude(eq6, bad), ErrorCode::IndexOutOfRange);
    const std::vector<int> negative{-1};
    CHECK_ERROR_CODE(amplitude(eq6, negative), ErrorCode::IndexOutOfRange);
  }

  TEST_CASE("amplitudes carry the log scale") {
    const UniformMPS base = preset(Preset::Eq6, 0.5);
    const UniformMPS scaled(base.matrices(), 0.3);
    const std::vector<int> c{0, 1, 2, 0};
    CHECK(std::abs(amplitude(scaled, c) - std::exp(4 * 0.3) * amplitude(base, c)) < 1e-12);
  }

  TEST_CASE("correlation length") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      const UniformMPS m = oracle::random_mps(rng, 2 + trial % 3, 2 + trial % 3);
      CHECK(correlation_length(m) == doctest::Approx(correlation_length(reflect(m))).epsilon(1e-10));
    }
    CHECK(std::abs(correlation_length(preset(Preset::Eq6, 0.5)) - 1.0 / std::log(2.5)) <= 1e-10);
    CHECK_ERROR_CODE(correlation_length(preset(Preset::Ghz)), ErrorCode::UndefinedDegenerate);
    CHECK(correlation_length(preset(Preset::Cluster)) == 0.0);
    CHECK_FALSE(spectrum(transfer_matrix(preset(Preset::Ghz))).correlation_length.has_value());
    CHECK(spectrum(transfer_matrix(preset(Preset::Ghz))).dominant_degenerate);
  }

  TEST_CASE("spectrum report ordering") {
    Matrix m = Matrix::Zero(4, 4);
    m.diagonal() << Complex(0, 1), Complex(-1, 0), Complex(1, 0), Complex(0.5, 0);
    const SpectrumReport r = spectrum(m);
    REQUIRE(r.eigenvalues.size() == 4);
    CHECK(std::abs(r.eigenvalues[0] - Complex(1, 0)) < 1e-14);
    CHECK(std::abs(r.eigenvalues[1] - Complex(0, 1)) < 1e-14);
    CHECK(std::abs(r.eigenvalues[2] - Complex(-1, 0)) < 1e-14);
    CHECK(r.dominant_modulus == doctest::Approx(1.0));
    CHECK(r.dominant_degenerate);
  }

  TEST_CASE("preset matrices") {
    const UniformMPS c = preset(Preset::Cluster);
    CHECK(c[0] == mat2(0, 0, 1, 1));
    CHECK(c[1] == mat2(1, -1, 0, 0));
    const double g = 0.7;
    const UniformMPS e5 = preset(Preset::Eq5, g);
    CHECK(e5[0] == mat2(1, 0, 0, -1));
    CHECK(e5[1] == mat2(0, 1, 0, 0));
    CHECK(e5[2] == mat2(0, 0, 1, g));
    const UniformMPS e6 = preset(Preset::Eq6, g);
    CHECK(e6[0] == mat2(1, 0, 0, g));
    CHECK(e6[1] == mat2(0, 1, 0, 0));
    CHECK(e6[2] == mat2(0, 0, g, 0));
    const UniformMPS ghz = preset(Preset::Ghz);
    CHECK(ghz[0] == mat2(1, 0, 0, 0));
    CHECK(ghz[1] == mat2(0, 0, 0, 1));
    CHECK(preset(Preset::Aklt).physical_dim() == 3);

    CHECK(parse_preset("eq6") == Preset::Eq6);
    CHECK(preset_name(Preset::Cluster) == "cluster");
    CHECK_ERROR_CODE(parse_preset("w-state"), ErrorCode::UnknownPreset);
    CHECK_ERROR_CODE(preset(Preset::Eq5), ErrorCode::BadParams);
    CHECK_ERROR_CODE(preset(Preset::Ghz, 1.0), ErrorCode::BadParams);
  }

  TEST_CASE("constructor invariants") {
    CHECK_ERROR_CODE(UniformMPS({}), ErrorCode::InvalidArgument);
    CHECK_ERROR_CODE(UniformMPS({Matrix::Zero(2, 2), Matrix::Zero(2, 2)}), ErrorCode::ZeroState);
    CHECK_ERROR_CODE(UniformMPS({Matrix::Identity(2, 2), Matrix::Identity(3, 3)}), ErrorCode::DimensionMismatch);
    CHECK_ERROR_CODE(UniformMPS({Matrix::Identity(2, 3)}), ErrorCode::DimensionMismatch);
    CHECK_ERROR_CODE(UniformMPS({Matrix::Identity(2, 2)}, std::nan("")), ErrorCode::InvalidArgument);
  }

  TEST_CASE("property: reflection spectrum and transpose laws") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 30; ++trial) {
      const int d = 1 + trial % 4, bond = 1 + trial % 5;
      const UniformMPS m = oracle::random_mps(rng, d, bond);
      const Matrix e = transfer_matrix(m).entries;
      const Matrix er = transfer_matrix(reflect(m)).entries;
      CHECK((er - e.transpose()).norm() <= 1e-14 * e.norm());
      const auto a = sorted_eigenvalues(e);
      const auto b = sorted_eigenvalues(er);
      CHECK(multiset_distance(a, b) <= 1e-10 * std::abs(a.front()));
    }
  }

  TEST_CASE("property: overlap equals brute force") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 24; ++trial) {
      const int d = 1 + trial % 3, bond = 1 + (trial / 3) % 3, n = 1 + trial % 6;
      const UniformMPS m = oracle::random_mps(rng, d, bond, trial % 2 == 0);
      const Complex eta = overlap_reflection(m, n);
      CHECK(std::abs(eta - oracle::brute_block_reversal_overlap(m, n)) <= 1e-9);
      CHECK(std::abs(eta) <= 1.0 + 1e-9);
    }
  }

  TEST_CASE("dense amplitudes and parity") {
    const UniformMPS m = preset(Preset::Eq6, 0.5);
    const Vector v = dense_amplitudes(m, 4);
    CHECK(v.size() == 81);
    CHECK(std::abs(v(1 * 27 + 2 * 9 + 0 * 3 + 1) - oracle::naive_amplitude(m.matrices(), {1, 2, 0, 1})) < 1e-14);
    const Vector p = apply_parity(v, 3, 4);
    CHECK(std::abs(p(1 * 27 + 2 * 9 + 0 * 3 + 1) - v(1 * 27 + 0 * 9 + 2 * 3 + 1)) < 1e-14);
    CHECK(apply_parity(p, 3, 4) == v);
  }

  TEST_CASE("JSON round trip and arity checks") {
    std::mt19937_64 rng(9);
    const UniformMPS m(oracle::random_mps(rng, 3, 2).matrices(), -0.125);
    const io::Json j = io::mps_to_json(m);
    CHECK(j.at("d") == 3);
    CHECK(j.at("D") == 2);
    const UniformMPS back = io::mps_from_json(io::Json::parse(j.dump()));
    CHECK(back == m);
    CHECK(back.log_scale() == m.log_scale());

    io::Json bad = j;
    bad["d"] = 4;
    CHECK_ERROR_CODE(io::mps_from_json(bad), ErrorCode::ParseError);
    bad = j;
    bad["matrices"][0][0].erase(0);
    CHECK_ERROR_CODE(io::mps_from_json(bad), ErrorCode::ParseError);
    bad = j;
    bad["matrices"][1][0][0] = io::Json::array({1.0, 2.0, 3.0});
    CHECK_ERROR_CODE(io::mps_from_json(bad), ErrorCode::ParseError);
  }
}
