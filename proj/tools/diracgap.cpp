// Batch front-end: diracgap <command> --config run.json [--out file.csv]
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "diracgap/commands.hpp"
#include "diracgap/errors.hpp"
#include "diracgap/log.hpp"
#include "diracgap/parallel.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kNumerical = 3;
constexpr int kPrecondition = 4;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw diracgap::ConfigError("cannot write " + path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure, eigenvalue counts and slow-decay asymptotics for periodic 1D Dirac systems"};
  app.require_subcommand(1, 1);

  std::string config_path, out_path, summary_path;
  int threads = 0;
  long seed = 0;  // reserved; nothing here is random
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "CSV output (stdout when omitted)");
  app.add_option("--summary", summary_path, "JSON summary (default <out>.summary.json, stderr without --out)");
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "reserved, unused");
  app.fallthrough();

  using Fn = diracgap::CommandOutput (*)(const diracgap::RunConfig&);
  Fn fn = nullptr;
  auto sub = [&](const char* name, const char* help, Fn f) {
    app.add_subcommand(name, help)->callback([&fn, f] { fn = f; });
  };
  sub("bands", "lambda,D,k,in_band over the lambda grid", diracgap::cmd_bands);
  sub("quasimomentum", "lambda,D,k,rotation_number over the lambda grid", diracgap::cmd_quasimomentum);
  sub("count", "eigenvalue counts on an interval or on the truncated half-line", diracgap::cmd_count);
  sub("asymptotics", "counts against the predicted density for each c", diracgap::cmd_asymptotics);
  sub("validate", "hypothesis check and gap containment", diracgap::cmd_validate);

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) diracgap::set_threads(threads);

  bool validate = app.got_subcommand("validate");
  try {
    const auto cfg = diracgap::RunConfig::load(config_path);
    const diracgap::CommandOutput out = fn(cfg);

    if (!validate) {
      if (out_path.empty())
        std::cout << out.csv;
      else
        write_file(out_path, out.csv);
    }
    const std::string summary = out.summary.dump(2) + "\n";
    if (validate) {
      if (out_path.empty())
        std::cout << summary;
      else
        write_file(out_path, summary);
    } else if (!summary_path.empty()) {
      write_file(summary_path, summary);
    } else if (!out_path.empty()) {
      write_file(out_path + ".summary.json", summary);
    } else if (diracgap::log::level() != diracgap::log::Level::quiet) {
      std::cerr << summary;
    }

    for (const auto& w : out.warnings) diracgap::log::warn(w);
    if (cfg.numeric.escalate_warnings && !out.warnings.empty()) {
      std::cerr << "error: " << out.warnings.size() << " numerical warning(s) escalated\n";
      for (const auto& w : out.warnings) std::cerr << "  " << w << '\n';
      return kNumerical;
    }
    return kOk;
  } catch (const diracgap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const diracgap::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const diracgap::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
}
