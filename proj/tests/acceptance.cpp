// Standalone acceptance run: one PASS/FAIL line per criterion, nonzero exit
// status if any criterion fails.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "refl/dmrg.hpp"
#include "refl/exact.hpp"
#include "refl/linalg.hpp"
#include "refl/reflection.hpp"
#include "refl/reports.hpp"
#include "refl/rg_flow.hpp"

using namespace refl;

namespace {

struct Criterion {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      notes.push_back(what);
    }
  }
};

UniformMPS preset(Preset p, double g) {
  const std::vector<double> params{g};
  return build_preset(p, params);
}

double spectrum_gap(const Matrix& m, std::vector<Complex> expected) {
  const std::vector<Complex> got = spectrum(m).eigenvalues;
  return multiset_distance(std::span<const Complex>(got), std::span<const Complex>(expected));
}

Matrix swap23() {
  Matrix u = Matrix::Zero(3, 3);
  u(0, 0) = u(1, 2) = u(2, 1) = 1.0;
  return u;
}

Matrix fixed_point_unitary() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = u(3, 3) = u(1, 2) = u(2, 1) = 1.0;
  return u;
}

Vector basis4(Complex a, Complex b, Complex c, Complex d) {
  Vector v(4);
  v << a, b, c, d;
  return v;
}

const SpinChainModel& xxz_dm() {
  static const SpinChainModel m = xxz_dm_model(1.0, 0.5, 0.3);
  return m;
}

SearchOptions eq5_search() {
  SearchOptions o;
  o.restarts = 50;
  o.budget = 25000;
  return o;
}

// Reports reused by the determinism criterion.
std::string classification_report() {
  io::Json j = io::Json::array();
  j.push_back(io::classification_to_json(classify(preset(Preset::Eq6, 0.5))));
  j.push_back(io::classification_to_json(classify(preset(Preset::Eq5, 1.0), 64, eq5_search())));
  return j.dump();
}

std::vector<UniformMPS> random_family() {
  std::mt19937_64 rng(20250101);
  std::uniform_int_distribution<int> phys(2, 4), bond(1, 5);
  std::vector<UniformMPS> out;
  for (int i = 0; i < 20; ++i) {
    const int d = phys(rng);
    const int b = bond(rng);
    out.push_back(oracle::random_mps(rng, d, b));
  }
  return out;
}

std::string conjugacy_report(const std::vector<UniformMPS>& family, Criterion* c) {
  io::Json all = io::Json::array();
  for (std::size_t i = 0; i < family.size(); ++i) {
    const RGTrajectory t = rg_flow(family[i], 5);
    io::Json steps = io::Json::array();
    for (std::size_t k = 0; k < t.conjugacy.size(); ++k) {
      const ConjugacyReport& r = t.conjugacy[k];
      if (c) {
        const std::string where = fmt::format("mps {} step {}", i, k + 1);
        c->expect(r.transfer_residual <= 1e-10, fmt::format("{}: transfer residual {:.3e}", where, r.transfer_residual));
        c->expect(r.singular_value_mismatch <= 1e-10,
                  fmt::format("{}: spectrum mismatch {:.3e}", where, r.singular_value_mismatch));
        c->expect(r.state_fidelity >= 1.0 - 1e-8, fmt::format("{}: fidelity {:.17g}", where, r.state_fidelity));
      }
      steps.push_back({{"transfer_residual", r.transfer_residual},
                       {"singular_value_mismatch", r.singular_value_mismatch},
                       {"state_fidelity", r.state_fidelity},
                       {"singular_values", t.records[k].singular_values}});
    }
    all.push_back(steps);
  }
  return all.dump();
}

std::string mirror_report(Criterion* c) {
  const MirrorReport r = mirrored_run_check(xxz_dm(), 16, 10);
  if (c) {
    c->expect(!r.degenerate_target, "target flagged degenerate");
    for (const MirrorStep& s : r.steps) {
      c->expect(s.energy_difference <= 1e-9, fmt::format("step {}: energy difference {:.3e}", s.step, s.energy_difference));
      c->expect(s.spectrum_difference <= 1e-8,
                fmt::format("step {}: spectrum difference {:.3e}", s.step, s.spectrum_difference));
      c->expect(s.isometry_residual <= 1e-10,
                fmt::format("step {}: isometry residual {:.3e}", s.step, s.isometry_residual));
    }
    c->expect(r.final_fidelity >= 1.0 - 1e-8, fmt::format("final fidelity {:.17g}", r.final_fidelity));
    c->expect(r.passed, "mirror report not passed");
  }
  return mirror_report_to_json(r).dump();
}

Criterion criterion1() {
  Criterion c;
  for (double g : {0.5, 1.0, 2.0}) {
    const double k = std::sqrt(4 + std::pow(g, 4));
    const double dev = spectrum_gap(transfer_matrix(preset(Preset::Eq5, g)).entries,
                                    {-1.0, -1.0, (2 + g * g + k) / 2, (2 + g * g - k) / 2});
    c.expect(dev <= 1e-10, fmt::format("g={}: deviation {:.3e}", g, dev));
  }
  return c;
}

Criterion criterion2() {
  Criterion c;
  for (double g : {0.5, 1.0, 2.0}) {
    const UniformMPS m = preset(Preset::Eq6, g);
    const double e = spectrum_gap(transfer_matrix(m).entries, {1 + g * g, g, g, 0.0});
    const double et2 = spectrum_gap(partial_transpose_transfer(m).entries, {2 * g, 1.0, g * g, 0.0});
    c.expect(e <= 1e-10, fmt::format("g={}: E deviation {:.3e}", g, e));
    c.expect(et2 <= 1e-10, fmt::format("g={}: E^T2 deviation {:.3e}", g, et2));
  }
  const double at1 = std::abs(overlap_reflection(preset(Preset::Eq6, 1.0), 64));
  const double at05 = std::abs(overlap_reflection(preset(Preset::Eq6, 0.5), 64));
  c.expect(std::abs(at1 - 1.0) <= 1e-10, fmt::format("|eta(g=1)| = {:.17g}", at1));
  c.expect(at05 < 1.0 - 1e-4, fmt::format("|eta(g=0.5)| = {:.17g}", at05));
  return c;
}

Criterion criterion3() {
  Criterion c;
  const UniformMPS m = build_preset(Preset::Cluster);
  for (long long n : {4LL, 16LL, 64LL}) {
    const Complex eta = overlap_reflection(m, n);
    c.expect(std::abs(eta - 1.0) <= 1e-10, fmt::format("N={}: eta deviation {:.3e}", n, std::abs(eta - 1.0)));
  }
  Matrix x(2, 2);
  x << -1, 1, 1, 1;
  const WitnessCheck w = verify_witness(m, Matrix::Identity(2, 2), x);
  c.expect(w.passed && w.residual <= 1e-12, fmt::format("witness residual {:.3e}", w.residual));
  return c;
}

Criterion criterion4() {
  Criterion c;
  const ReflectionClass e6 = classify(preset(Preset::Eq6, 0.5));
  c.expect(e6.label == ReflectionLabel::LocalUnitaryEquivalent,
           fmt::format("EQ6 label {}", to_string(e6.label)));
  if (e6.witness) {
    const double match = std::abs((swap23().adjoint() * e6.witness->u).trace()) / 3.0;
    c.expect(match >= 1.0 - 1e-8, fmt::format("EQ6 witness phase-free match {:.17g}", match));
  } else {
    c.expect(false, "EQ6 has no witness");
  }
  const ReflectionClass e5 = classify(preset(Preset::Eq5, 1.0), 64, eq5_search());
  c.expect(e5.label != ReflectionLabel::Symmetric && e5.label != ReflectionLabel::LocalUnitaryEquivalent,
           fmt::format("EQ5 label {}", to_string(e5.label)));
  return c;
}

Criterion criterion5() {
  Criterion c;
  conjugacy_report(random_family(), &c);
  return c;
}

Criterion criterion6() {
  Criterion c;
  const std::vector<std::pair<std::string, UniformMPS>> all{
      {"ghz", build_preset(Preset::Ghz)},
      {"cluster", build_preset(Preset::Cluster)},
      {"aklt", build_preset(Preset::Aklt)},
      {"eq5", preset(Preset::Eq5, 1.0)},
      {"eq6", preset(Preset::Eq6, 0.5)},
  };
  for (const auto& [name, m] : all) {
    const std::vector<Complex> closed = overlap_flow(m, 64, 4);
    const std::vector<Complex> direct = overlap_flow_direct(m, 64, 4);
    for (std::size_t k = 0; k < closed.size(); ++k) {
      const double dev = std::abs(closed[k] - direct[k]);
      c.expect(dev <= 1e-8, fmt::format("{} scale {}: closed vs direct {:.3e}", name, k, dev));
    }
    const double brute = std::abs(overlap_flow(m, 6, 0)[0] - oracle::brute_block_reversal_overlap(m, 6));
    c.expect(brute <= 1e-9, fmt::format("{}: N=6 brute-force deviation {:.3e}", name, brute));
  }
  return c;
}

Criterion criterion7() {
  Criterion c;
  for (double g : {0.5, 1.0, 2.0}) {
    const FixedPointReport r = fixed_point(preset(Preset::Eq6, g));
    if (!r.unique_dominant) {
      c.expect(false, fmt::format("EQ6 g={}: dominant eigenvalue not unique", g));
      continue;
    }
    const double dr = (normalize_leading(*r.phi_right) - basis4(1, 0, 0, g * g)).norm();
    const double dl = (normalize_leading(*r.phi_left) - basis4(1, 0, 0, 1)).norm();
    const Eigen::VectorXd sv = Eigen::BDCSVD<Matrix>(r.e_infinity.entries).singularValues();
    c.expect(dr <= 1e-8, fmt::format("EQ6 g={}: phi_R deviation {:.3e}", g, dr));
    c.expect(dl <= 1e-8, fmt::format("EQ6 g={}: phi_L deviation {:.3e}", g, dl));
    c.expect(sv(1) <= 1e-8 * sv(0), fmt::format("EQ6 g={}: sigma2/sigma1 {:.3e}", g, sv(1) / sv(0)));
  }
  for (double g : {0.5, 1.0, 2.0}) {
    const double k = std::sqrt(4 + std::pow(g, 4));
    const double c11 = (k + g * g) / 2;
    const double c01 = g / (k + 1 - g * g);
    const FixedPointReport r = fixed_point(preset(Preset::Eq5, g));
    if (!r.unique_dominant) {
      c.expect(false, fmt::format("EQ5 g={}: dominant eigenvalue not unique", g));
      continue;
    }
    const double dr = (normalize_leading(*r.phi_right) - basis4(1, 0, 0, c11)).norm();
    const double dl = (normalize_leading(*r.phi_left) - basis4(1, c01, c01, c11)).norm();
    const Eigen::VectorXd sv = Eigen::BDCSVD<Matrix>(r.e_infinity.entries).singularValues();
    c.expect(dr <= 1e-8, fmt::format("EQ5 g={}: phi_R deviation {:.3e}", g, dr));
    c.expect(dl <= 1e-8, fmt::format("EQ5 g={}: phi_L deviation {:.3e}", g, dl));
    c.expect(sv(1) <= 1e-8 * sv(0), fmt::format("EQ5 g={}: sigma2/sigma1 {:.3e}", g, sv(1) / sv(0)));
  }
  FixedPointCheckOptions o;
  o.reference = eq6_fixed_point_matrices(0.5);
  o.reference_unitary = fixed_point_unitary();
  const FixedPointCheck check = fixed_point_mps_check(preset(Preset::Eq6, 0.5), o);
  c.expect(check.reference_witness && check.reference_witness->passed,
           fmt::format("fixed-point witness residual {:.3e}",
                       check.reference_witness ? check.reference_witness->residual : -1.0));
  return c;
}

Criterion criterion8() {
  Criterion c;
  for (const SpinChainModel& m : {heisenberg_model(), xxz_dm()}) {
    const DMRGRun run = run_dmrg(m, 16, 12);
    for (const DMRGStepRecord& s : run.steps) {
      const double exact = exact_ground_state(m, s.size).energy;
      const double diff = s.energy - exact;
      c.expect(std::abs(diff) <= 1e-6, fmt::format("{} N={}: energy error {:.3e}", m.name, s.size, diff));
      c.expect(diff >= -1e-12, fmt::format("{} N={}: below exact by {:.3e}", m.name, s.size, -diff));
    }
  }
  return c;
}

Criterion criterion9() {
  Criterion c;
  mirror_report(&c);
  return c;
}

Criterion criterion10() {
  Criterion c;
  c.expect(classification_report() == classification_report(), "classification reports differ");
  const std::vector<UniformMPS> family = random_family();
  c.expect(conjugacy_report(family, nullptr) == conjugacy_report(random_family(), nullptr),
           "conjugacy reports differ");
  c.expect(mirror_report(nullptr) == mirror_report(nullptr), "mirror reports differ");
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria{
      {"EQ5 transfer spectra", criterion1},
      {"EQ6 transfer spectra and overlaps", criterion2},
      {"cluster state overlap and similarity witness", criterion3},
      {"classification of EQ6 and EQ5", criterion4},
      {"RG conjugacy on random MPSs", criterion5},
      {"overlap flow closed form vs direct", criterion6},
      {"fixed-point vectors and witness", criterion7},
      {"DMRG energies against exact diagonalization", criterion8},
      {"mirrored DMRG runs", criterion9},
      {"determinism of reports", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.notes.push_back(std::string("exception: ") + e.what());
    }
    fmt::print("{} {:2d} {}\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first);
    for (const std::string& n : c.notes) fmt::print("     {}\n", n);
    std::fflush(stdout);
    if (!c.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
