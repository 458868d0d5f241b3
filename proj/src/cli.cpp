#include "refl/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "refl/dmrg.hpp"
#include "refl/exact.hpp"
#include "refl/reports.hpp"

namespace refl::cli {

namespace {

struct Options {
  std::string preset;
  std::optional<double> g;
  std::string input;
  std::string model;
  std::optional<long long> length;
  int steps = 4;
  int max_steps = 64;
  int max_kept = 16;
  int size = 10;
  double j = 1.0;
  double delta = 1.0;
  double dm = 0.0;
  double field = 0.0;
  std::uint64_t seed = SearchOptions{}.seed;
  int restarts = SearchOptions{}.restarts;
  int budget = SearchOptions{}.budget;
  double tol = 1e-10;
  std::string out;
  std::string manifest;
  double g_min = 0.0;
  double g_max = 0.0;
  double g_step = 0.1;
};

// Raised for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerbOutput {
  std::string text;
  int exit_code = kExitOk;
};

UniformMPS load_state(const Options& o) {
  if (!o.input.empty()) return io::load_mps(o.input);
  if (o.preset.empty()) throw UsageError("one of --preset or --input is required");
  std::vector<double> params;
  if (o.g) params.push_back(*o.g);
  return build_preset(parse_preset(o.preset), params);
}

SpinChainModel load_model(const Options& o) {
  if (!o.model.empty()) {
    std::ifstream in(o.model);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + o.model);
    io::Json j;
    try {
      in >> j;
    } catch (const io::Json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
    return model_from_json(j);
  }
  if (o.preset.empty() || o.preset == "heisenberg") return heisenberg_model(o.j);
  if (o.preset == "xxz_dm") return xxz_dm_model(o.j, o.delta, o.dm);
  if (o.preset == "ising") return ising_model(o.j, o.field);
  throw Error(ErrorCode::UnknownPreset, o.preset);
}

SearchOptions search_options(const Options& o) {
  SearchOptions s;
  s.seed = o.seed;
  s.restarts = o.restarts;
  s.budget = o.budget;
  return s;
}

std::string dump(const io::Json& j) { return j.dump(2) + "\n"; }

VerbOutput verb_spectrum(const Options& o) {
  const UniformMPS mps = load_state(o);
  io::Json j{{"d", mps.physical_dim()},
             {"D", mps.bond_dim()},
             {"E", io::spectrum_to_json(spectrum(transfer_matrix(mps)))},
             {"ET2", io::spectrum_to_json(spectrum(partial_transpose_transfer(mps)))}};
  if (o.length) j["eta"] = io::complex_to_json(overlap_reflection(mps, *o.length));
  return {dump(j)};
}

VerbOutput verb_classify(const Options& o) {
  const UniformMPS mps = load_state(o);
  const ReflectionClass result = classify(mps, o.length.value_or(64), search_options(o));
  return {dump(io::classification_to_json(result))};
}

VerbOutput verb_rg(const Options& o) {
  const UniformMPS mps = load_state(o);
  return {rg_flow_csv(rg_flow(mps, o.steps, o.length))};
}

VerbOutput verb_fixed_point(const Options& o) {
  const UniformMPS mps = load_state(o);
  FixedPointCheckOptions fp;
  fp.tol = o.tol;
  fp.max_steps = o.max_steps;
  if (o.input.empty() && parse_preset(o.preset) == Preset::Eq6 && o.g) {
    fp.reference = eq6_fixed_point_matrices(*o.g);
    Matrix u = Matrix::Zero(4, 4);
    u(0, 0) = u(3, 3) = u(1, 2) = u(2, 1) = 1.0;
    fp.reference_unitary = u;
  }
  const FixedPointCheck check = fixed_point_mps_check(mps, fp);
  return {dump(io::fixed_point_check_to_json(check)), check.passed ? kExitOk : kExitAssertion};
}

VerbOutput verb_dmrg(const Options& o) {
  return {dmrg_csv(run_dmrg(load_model(o), o.max_kept, o.size))};
}

VerbOutput verb_mirror(const Options& o) {
  const MirrorReport report = mirrored_run_check(load_model(o), o.max_kept, o.size);
  return {dump(mirror_report_to_json(report)), report.passed ? kExitOk : kExitAssertion};
}

VerbOutput verb_oracle(const Options& o) {
  const SpinChainModel model = load_model(o);
  const ExactResult ed = exact_ground_state(model, o.size);
  return {dump(io::Json{{"model", model_to_json(model)},
                        {"size", o.size},
                        {"energy", ed.energy},
                        {"gap", ed.gap},
                        {"residual", ed.residual}})};
}

int thread_count() {
  if (const char* env = std::getenv("REFL_NUM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<int>(std::min<long>(n, 256));
  }
  return 1;
}

VerbOutput verb_sweep(const Options& o) {
  const Preset preset = parse_preset(o.preset);
  if (preset != Preset::Eq5 && preset != Preset::Eq6) throw UsageError("sweep needs --preset eq5 or eq6");
  if (!(o.g_step > 0.0)) throw UsageError("--g-step must be positive");
  const std::vector<double> grid = parameter_grid(o.g_min, o.g_max, o.g_step);
  const long long length = o.length.value_or(64);

  std::vector<std::string> rows(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      const double g = grid[i];
      try {
        const std::vector<double> params{g};
        const Complex eta = overlap_reflection(build_preset(preset, params), length);
        rows[i] = fmt::format("{},{},{},{},\n", io::format_double(g), io::format_double(std::abs(eta)),
                              io::format_double(eta.real()), io::format_double(eta.imag()));
      } catch (const Error& e) {
        rows[i] = fmt::format("{},,,,{}\n", io::format_double(g), to_string(e.code()));
      }
    }
  };
  const int n = std::min<int>(thread_count(), static_cast<int>(std::max<std::size_t>(grid.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string csv = "g,eta_abs,eta_re,eta_im,error\n";
  for (const auto& r : rows) csv += r;
  return {csv};
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownPreset:
    case ErrorCode::BadParams:
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::BadLength:
    case ErrorCode::IndexOutOfRange:
      return kExitUsage;
    default:
      return kExitAssertion;
  }
}

const std::vector<std::pair<std::string, std::string>>& verbs() {
  static const std::vector<std::pair<std::string, std::string>> table{
      {"spectrum", "(--preset NAME [--g G] | --input FILE) [--N N] [--out FILE] [--manifest FILE]"},
      {"classify",
       "(--preset NAME [--g G] | --input FILE) [--N N] [--seed S] [--restarts R] [--budget B] [--out FILE] "
       "[--manifest FILE]"},
      {"rg", "(--preset NAME [--g G] | --input FILE) [--steps K] [--N N] [--out FILE] [--manifest FILE]"},
      {"fixed-point",
       "(--preset NAME [--g G] | --input FILE) [--tol T] [--steps MAX] [--out FILE] [--manifest FILE]"},
      {"dmrg",
       "(--preset heisenberg|xxz_dm|ising | --model FILE) [--J J] [--delta X] [--dm X] [--h X] [--D D] "
       "[--size N] [--out FILE] [--manifest FILE]"},
      {"mirror",
       "(--preset heisenberg|xxz_dm|ising | --model FILE) [--J J] [--delta X] [--dm X] [--h X] [--D D] "
       "[--size N] [--out FILE] [--manifest FILE]"},
      {"oracle",
       "(--preset heisenberg|xxz_dm|ising | --model FILE) [--J J] [--delta X] [--dm X] [--h X] [--size N] "
       "[--out FILE] [--manifest FILE]"},
      {"sweep", "--preset eq5|eq6 --g-min A --g-max B --g-step S [--N N] [--out FILE] [--manifest FILE]"},
  };
  return table;
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "output file (default stdout)");
  sub->add_option("--manifest", o.manifest, "manifest file (default <out>.manifest.json or stderr)");
}

void add_state(CLI::App* sub, Options& o) {
  auto* preset = sub->add_option("--preset", o.preset, "ghz, cluster, aklt, eq5 or eq6");
  auto* input = sub->add_option("--input", o.input, "MPS JSON file");
  preset->excludes(input);
  sub->add_option("--g", o.g, "preset parameter");
}

void add_model(CLI::App* sub, Options& o, bool with_kept) {
  sub->set_help_flag("--help", "print help");
  auto* preset = sub->add_option("--preset", o.preset, "heisenberg, xxz_dm or ising");
  auto* model = sub->add_option("--model", o.model, "model JSON file");
  preset->excludes(model);
  sub->add_option("--J", o.j, "exchange coupling");
  sub->add_option("--delta", o.delta, "XXZ anisotropy");
  sub->add_option("--dm", o.dm, "Dzyaloshinskii-Moriya coupling");
  sub->add_option("--h", o.field, "transverse field (ising)");
  sub->add_option("--size", o.size, "chain or final superblock length");
  if (with_kept) sub->add_option("--D", o.max_kept, "kept block states");
}

io::Json echoed_flags(const CLI::App* sub) {
  io::Json flags = io::Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    flags[opt->get_name()] = opt->results().front();
  }
  return flags;
}

}  // namespace

std::string synopsis() {
  std::string s;
  for (const auto& [verb, usage] : verbs()) s += fmt::format("usage: {} {} {}\n", kToolName, verb, usage);
  return s;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::vector<double> parameter_grid(double lo, double hi, double step) {
  std::vector<double> grid;
  if (!(step > 0.0) || lo > hi) return grid;
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long long i = 0; i < n; ++i) grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Reflection analysis, RG flows and mirrored DMRG for matrix product states", kToolName};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  std::map<std::string, std::function<VerbOutput(const Options&)>> handlers{
      {"spectrum", verb_spectrum}, {"classify", verb_classify}, {"rg", verb_rg},
      {"fixed-point", verb_fixed_point}, {"dmrg", verb_dmrg}, {"mirror", verb_mirror},
      {"oracle", verb_oracle}, {"sweep", verb_sweep}};

  auto* spectrum_cmd = app.add_subcommand("spectrum", "transfer-matrix spectra of E and E^T2");
  add_state(spectrum_cmd, o);
  spectrum_cmd->add_option("--N", o.length, "chain length for the reflection overlap");

  auto* classify_cmd = app.add_subcommand("classify", "reflection class with witness search");
  add_state(classify_cmd, o);
  classify_cmd->add_option("--N", o.length, "chain length for the reflection overlap (default 64)");
  classify_cmd->add_option("--seed", o.seed, "search seed");
  classify_cmd->add_option("--restarts", o.restarts, "random restarts");
  classify_cmd->add_option("--budget", o.budget, "objective evaluations");

  auto* rg_cmd = app.add_subcommand("rg", "coarse-graining flow as CSV");
  add_state(rg_cmd, o);
  rg_cmd->add_option("--steps", o.steps, "RG steps");
  rg_cmd->add_option("--N", o.length, "chain length for the overlap column");

  auto* fp_cmd = app.add_subcommand("fixed-point", "fixed-point transfer matrix and checks");
  add_state(fp_cmd, o);
  fp_cmd->add_option("--tol", o.tol, "convergence tolerance");
  fp_cmd->add_option("--steps", o.max_steps, "maximum squarings");

  auto* dmrg_cmd = app.add_subcommand("dmrg", "infinite-system DMRG run log as CSV");
  add_model(dmrg_cmd, o, true);
  auto* mirror_cmd = app.add_subcommand("mirror", "mirrored DMRG runs on H and its reflection");
  add_model(mirror_cmd, o, true);
  auto* oracle_cmd = app.add_subcommand("oracle", "exact ground state of the open chain");
  add_model(oracle_cmd, o, false);

  auto* sweep_cmd = app.add_subcommand("sweep", "reflection overlap over a parameter grid");
  sweep_cmd->add_option("--preset", o.preset, "eq5 or eq6")->required();
  sweep_cmd->add_option("--g-min", o.g_min, "grid start")->required();
  sweep_cmd->add_option("--g-max", o.g_max, "grid end")->required();
  sweep_cmd->add_option("--g-step", o.g_step, "grid spacing")->required();
  sweep_cmd->add_option("--N", o.length, "chain length (default 64)");

  for (auto* sub : app.get_subcommands({})) add_output(sub, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << synopsis();
    return kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string verb = sub->get_name();
  const auto start = std::chrono::steady_clock::now();
  VerbOutput result;
  try {
    result = handlers.at(verb)(o);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << synopsis();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (exit_code_for(e.code()) == kExitUsage) err << synopsis();
    result.exit_code = exit_code_for(e.code());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  io::Json outputs = io::Json::array();
  if (!result.text.empty()) {
    if (o.out.empty()) {
      out << result.text;
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) {
        err << "error: cannot write " << o.out << "\n";
        return kExitUsage;
      }
      f << result.text;
    }
    outputs.push_back({{"path", o.out.empty() ? std::string("-") : o.out}, {"sha256", sha256_hex(result.text)}});
  }

  std::string command = kToolName;
  for (const auto& a : args) command += " " + a;
  const io::Json manifest{{"tool", kToolName},
                          {"version", kToolVersion},
                          {"command", command},
                          {"verb", verb},
                          {"flags", echoed_flags(sub)},
                          {"seed", o.seed},
                          {"exit_code", result.exit_code},
                          {"wall_time", wall},
                          {"outputs", std::move(outputs)}};
  std::string manifest_path = o.manifest;
  if (manifest_path.empty() && !o.out.empty()) manifest_path = o.out + ".manifest.json";
  if (manifest_path.empty()) {
    err << manifest.dump(2) << "\n";
  } else {
    std::ofstream f(manifest_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << manifest_path << "\n";
      return kExitUsage;
    }
    f << manifest.dump(2) << "\n";
  }
  return result.exit_code;
}

}  // namespace refl::cli
