#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "dln/batch.hpp"
#include "dln/config.hpp"
#include "dln/digest.hpp"
#include "dln/emit.hpp"
#include "dln/error.hpp"
#include "dln/presets.hpp"
#include "dln/verify.hpp"

namespace dln::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_dir;
};

fs::path output_dir(const Options& opts) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return fs::current_path();
}

fs::path prepare_output_dir(const Options& opts) {
  fs::path dir = output_dir(opts);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::string matrix_text(const Matrix& m) {
  std::string text = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    text += r == 0 ? "[" : ", [";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) text += ", ";
      text += format_double(m(r, c));
    }
    text += "]";
  }
  return text + "]";
}

int cmd_run(const Options& opts, std::ostream& out) {
  ExperimentConfig config = load_config(opts.config_path);
  if (opts.seed) config.seed_base = *opts.seed;
  const fs::path dir = prepare_output_dir(opts);

  const BatchResult result = run_batch(config, opts.jobs);
  for (ArtifactKind kind : config.outputs) {
    const fs::path path = dir / artifact_filename(config.name, kind);
    if (kind == ArtifactKind::HeatmapCsv) {
      write_file(path.string(), heatmap_csv(config.problem, config.heatmap));
    } else {
      emit(result, kind, path.string());
    }
    out << "wrote " << path.string() << "\n";
  }
  out << config.name << ": " << result.count(Termination::Converged) << "/"
      << result.records.size() << " converged, digest " << batch_digest(result) << "\n";
  return kOk;
}

int cmd_volume_mc(const Options& opts, std::ostream& out) {
  ExperimentConfig config = load_config(opts.config_path);
  if (opts.seed) config.mc_volume.seed = *opts.seed;
  const fs::path dir = prepare_output_dir(opts);

  const auto entries = run_mc_study(config, opts.jobs);
  const fs::path path = dir / (config.name + ".mc_volume.csv");
  write_file(path.string(), mc_study_csv(entries));
  for (const auto& e : entries) {
    out << e.label << " log_mean_density=" << format_double(e.result.log_mean_density)
        << " accepted=" << e.result.accepted << "\n";
  }
  out << "wrote " << path.string() << "\n";
  return kOk;
}

int cmd_heatmap(const Options& opts, std::ostream& out) {
  const ExperimentConfig config = load_config(opts.config_path);
  const fs::path dir = prepare_output_dir(opts);
  const fs::path path = dir / artifact_filename(config.name, ArtifactKind::HeatmapCsv);
  write_file(path.string(), heatmap_csv(config.problem, config.heatmap));
  out << "wrote " << path.string() << "\n";
  return kOk;
}

int cmd_verify(const Options& opts, std::ostream& out) {
  bool ok = true;
  for (const auto& suite : run_verification(opts.seed.value_or(0))) {
    for (const auto& check : suite.checks) {
      out << (check.passed ? "PASS " : "FAIL ") << suite.name << " " << check.name
          << " worst=" << format_double(check.worst)
          << " tol=" << format_double(check.tolerance) << "\n";
    }
    ok = ok && suite.passed();
  }
  return ok ? kOk : kVerificationFailure;
}

int cmd_presets(std::ostream& out) {
  for (const auto& preset : presets()) {
    const ExperimentConfig c = config_from_json(preset.defaults);
    out << preset.name << "\n  " << preset.description << "\n"
        << "  phi  = " << matrix_text(c.problem.phi) << "\n"
        << "  mask = " << matrix_text(c.problem.mask) << "\n"
        << "  depth = " << c.flow.depth.to_string() << ", n_runs = " << c.n_runs
        << ", init sd = " << format_double(c.init.sd) << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deep linear network matrix-completion experiments", "dln"};
  app.require_subcommand(1);

  Options opts;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("config", opts.config_path, "JSON experiment config")->required();
    }
    sub->add_option("--seed", seed, "Override the base seed");
    sub->add_option("--jobs", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", opts.out_dir,
                    std::string("Output directory (default: $") + kOutDirEnv + " or .)");
  };
  auto* run_cmd = app.add_subcommand("run", "Run a seeded batch and write its artifacts");
  add_common(run_cmd, true);
  auto* mc_cmd = app.add_subcommand("volume-mc", "Monte Carlo volume study of the 3x3 cycle");
  add_common(mc_cmd, true);
  auto* heat_cmd = app.add_subcommand("heatmap", "Log-volume grid over a 2x2 minimizer plane");
  add_common(heat_cmd, true);
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in oracle suites");
  verify_cmd->add_option("--seed", seed, "Seed for the random test cases");
  auto* presets_cmd = app.add_subcommand("presets", "List the built-in presets");

  // CLI11 parses in reverse order from a vector.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "dln: " << e.what() << "\n";
    return kConfigError;
  }

  for (auto* sub : {run_cmd, mc_cmd, heat_cmd, verify_cmd}) {
    if (sub->parsed() && sub->count("--seed") > 0) opts.seed = seed;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(opts, out);
    if (mc_cmd->parsed()) return cmd_volume_mc(opts, out);
    if (heat_cmd->parsed()) return cmd_heatmap(opts, out);
    if (verify_cmd->parsed()) return cmd_verify(opts, out);
    if (presets_cmd->parsed()) return cmd_presets(out);
  } catch (const ConfigError& e) {
    err << "dln: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "dln: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kConfigError;
}

}  // namespace dln::cli
