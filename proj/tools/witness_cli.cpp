// Command-line driver for the indistinguishability-witness toolkit.
//
//   witness haar-sweep|delay-scan|noise-sweep|extremal|certify --config <file> --out <dir> [--seed S] [--threads T]
//   witness extremal --n 3 --mode indist --restarts 200 --seed S
//   witness certify --value 0.027 --std-error 0.0039
//   witness mesh compile <matrix.json>
//   witness mesh reconstruct <mesh.json>
//   witness distribution <matrix.json> --gram <gram.json>
//   witness estimate <counts.csv> --modes 0 1
//
// Exit codes: 0 success, 2 configuration error, 3 runtime or statistical error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "witness/error.hpp"
#include "witness/harness.hpp"
#include "witness/io.hpp"
#include "witness/mesh.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ExperimentArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<witness::Seed> seed;
  std::optional<unsigned> threads;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the master seed");
  cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)");
}

witness::ExperimentConfig load_config(const ExperimentArgs& args, witness::ExperimentKind kind) {
  witness::Json j = witness::Json::object();
  if (!args.config_path.empty()) j = witness::read_json_file(args.config_path);
  if (!j.contains("experiment")) {
    j["experiment"] = witness::to_string(kind);
  } else if (j.at("experiment") != witness::to_string(kind)) {
    throw witness::ConfigError("config describes experiment '" + j.at("experiment").get<std::string>() +
                               "' but subcommand is '" + witness::to_string(kind) + "'");
  }
  if (args.seed) j["seed"] = *args.seed;
  if (args.threads) j["threads"] = *args.threads;
  return witness::parse_config(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-device-independent photonic indistinguishability witness toolkit"};
  app.require_subcommand(1);

  ExperimentArgs haar_args, delay_args, noise_args, extremal_args, certify_args;
  auto* haar = app.add_subcommand("haar-sweep", "correlators over Haar-random interferometers");
  add_experiment_options(haar, haar_args, true);
  auto* delay = app.add_subcommand("delay-scan", "correlator of the optimal matrix vs photon delay");
  add_experiment_options(delay, delay_args, true);
  auto* noise = app.add_subcommand("noise-sweep", "correlator of the optimal matrix under phase noise");
  add_experiment_options(noise, noise_args, true);

  auto* extremal = app.add_subcommand("extremal", "numerical search for the extremal correlator");
  add_experiment_options(extremal, extremal_args, false);
  std::optional<std::size_t> ext_n, ext_modes, ext_restarts;
  std::optional<std::string> ext_mode;
  extremal->add_option("--n", ext_n, "photon count");
  extremal->add_option("--modes", ext_modes, "interferometer dimension");
  extremal->add_option("--mode", ext_mode, "dist or indist")->check(CLI::IsMember({"dist", "indist"}));
  extremal->add_option("--restarts", ext_restarts, "number of random restarts");

  auto* cert = app.add_subcommand("certify", "certify a measured correlator against the classical bound");
  add_experiment_options(cert, certify_args, false);
  std::optional<double> cert_value, cert_error, cert_sig;
  cert->add_option("--value", cert_value, "measured correlator");
  cert->add_option("--std-error", cert_error, "standard error of the correlator");
  cert->add_option("--significance", cert_sig, "required z-score (default 5)");

  auto* mesh = app.add_subcommand("mesh", "compile and reconstruct Mach-Zehnder mesh programs");
  mesh->require_subcommand(1);
  std::string mesh_in, mesh_out;
  auto* compile = mesh->add_subcommand("compile", "matrix JSON -> mesh program JSON");
  compile->add_option("matrix", mesh_in, "matrix file")->required();
  compile->add_option("-o,--output", mesh_out, "output file (default stdout)");
  auto* rebuild = mesh->add_subcommand("reconstruct", "mesh program JSON -> matrix JSON");
  rebuild->add_option("mesh", mesh_in, "mesh program file")->required();
  rebuild->add_option("-o,--output", mesh_out, "output file (default stdout)");

  auto* distribution = app.add_subcommand("distribution", "exact output distribution as CSV");
  std::string dist_matrix, dist_gram;
  distribution->add_option("matrix", dist_matrix, "matrix file")->required();
  distribution->add_option("--gram", dist_gram, "Gram matrix file")->required();

  auto* estimate = app.add_subcommand("estimate", "correlator estimate from a counts CSV");
  std::string counts_path;
  std::vector<std::size_t> estimate_modes{0, 1};
  std::size_t resamples = 1000;
  witness::Seed boot_seed = 0;
  estimate->add_option("counts", counts_path, "counts CSV (with JSON sidecar)")->required();
  estimate->add_option("--modes", estimate_modes, "two output modes")->expected(2);
  estimate->add_option("--resamples", resamples, "bootstrap resamples");
  estimate->add_option("--bootstrap-seed", boot_seed, "bootstrap seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  auto emit = [&](const witness::Json& j) {
    if (mesh_out.empty()) {
      std::cout << j.dump(2) << '\n';
    } else {
      witness::write_json_file(mesh_out, j);
    }
  };

  try {
    if (haar->parsed()) {
      witness::run_experiment(load_config(haar_args, witness::ExperimentKind::kHaarSweep), haar_args.out_dir);
    } else if (delay->parsed()) {
      witness::run_experiment(load_config(delay_args, witness::ExperimentKind::kDelayScan), delay_args.out_dir);
    } else if (noise->parsed()) {
      witness::run_experiment(load_config(noise_args, witness::ExperimentKind::kNoiseSweep), noise_args.out_dir);
    } else if (extremal->parsed()) {
      auto config = load_config(extremal_args, witness::ExperimentKind::kExtremal);
      if (ext_n) {
        config.photons = *ext_n;
        if (!ext_modes && extremal_args.config_path.empty()) config.modes = *ext_n + 1;
      }
      if (ext_modes) config.modes = *ext_modes;
      if (ext_mode) config.indistinguishable = *ext_mode == "indist";
      if (ext_restarts) config.restarts = *ext_restarts;
      witness::validate_config(config);
      witness::run_experiment(config, extremal_args.out_dir);
      std::cout << witness::read_json_file(std::filesystem::path(extremal_args.out_dir) / "results.json").dump(2)
                << '\n';
    } else if (cert->parsed()) {
      auto config = load_config(certify_args, witness::ExperimentKind::kCertify);
      if (cert_value) config.value = *cert_value;
      if (cert_error) config.std_error = *cert_error;
      if (cert_sig) config.significance = *cert_sig;
      witness::validate_config(config);
      const auto report =
          witness::certify(witness::CorrelatorEstimate{config.value, config.std_error, 0}, config.significance);
      if (!certify_args.config_path.empty() || cert->count("--out") > 0) {
        witness::run_experiment(config, certify_args.out_dir);
      }
      std::cout << witness::report_to_json(report).dump(2) << '\n';
    } else if (compile->parsed()) {
      emit(witness::to_json(witness::decompose(witness::matrix_from_json(witness::read_json_file(mesh_in)))));
    } else if (rebuild->parsed()) {
      emit(witness::to_json(witness::reconstruct(witness::mesh_from_json(witness::read_json_file(mesh_in)))));
    } else if (distribution->parsed()) {
      const auto u = witness::matrix_from_json(witness::read_json_file(dist_matrix));
      const auto s = witness::gram_from_json(witness::read_json_file(dist_gram));
      const auto inputs = witness::first_modes(s.photons());
      witness::write_distribution_csv(std::cout, witness::output_distribution(u, s, inputs));
    } else if (estimate->parsed()) {
      const auto counts = witness::load_counts(counts_path);
      const auto est = witness::estimate_correlator(counts, estimate_modes.at(0), estimate_modes.at(1),
                                                    witness::BootstrapOptions{resamples, boot_seed});
      std::cout << witness::Json{{"value", est.value}, {"std_error", est.std_error}, {"n_events", est.n_events}}.dump(2)
                << '\n';
    }
  } catch (const witness::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const witness::Json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
