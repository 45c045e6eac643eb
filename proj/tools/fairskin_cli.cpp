// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: one subcommand per pipeline stage plus whole
// experiments, sweeps and comparisons. Exit codes: 0 success, 2 config or
// usage error, 3 stage failure, 4 incompatible metric options.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairskin/harness/compare.hpp"
#include "fairskin/harness/pipeline.hpp"
#include "fairskin/harness/sweep.hpp"

namespace {

using namespace fairskin;

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;
constexpr int kExitIncompatible = 4;

/// Config file path plus any per-key flags given on the command line.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;

  void Attach(CLI::App* cmd) {
    cmd->add_option("--config", file, "key = value config file");
    for (const auto& f : ConfigFields()) {
      auto* slot = &values[f.name];
      cmd->add_option("--" + f.name, *slot, f.help);
    }
  }

  ExperimentConfig Resolve(const CLI::App* cmd) const {
    ExperimentConfig c = file.empty() ? ExperimentConfig{} : LoadConfigFile(file);
    for (const auto& f : ConfigFields())
      if (cmd->count("--" + f.name) > 0) SetConfigValue(c, f.name, values.at(f.name));
    ValidateConfig(c);
    return c;
  }
};

void PrintRun(const RunRecord& rec) {
  std::cout << "run directory: " << rec.directory.string() << "\n";
  for (const auto& t : rec.timings) std::printf("  %-10s %8.2fs\n", t.stage.c_str(), t.seconds);
}

void WriteSplit(const DatasetSplit& data, const std::filesystem::path& dir) {
  std::filesystem::remove_all(dir);
  ExportSamples(data.train, dir / "train");
  ExportSamples(data.validation, dir / "validation");
  ExportSamples(data.test, dir / "test");
  std::cout << "train " << data.train.size() << ", validation " << data.validation.size() << ", test "
            << data.test.size() << " images written to " << dir.string() << "\n";
}

int Run(int argc, char** argv) {
  CLI::App app{"Fairness-aware diffusion augmentation for skin-lesion classification, desk scale"};
  app.require_subcommand(1);

  struct StageCommand {
    const char* name;
    const char* help;
    ConfigFlags flags;
    CLI::App* cmd = nullptr;
  };
  std::vector<StageCommand> stages = {
      {"gen-data", "generate or ingest the corpus and write the 8:1:1 split as PGM", {}},
      {"train-dm", "train the diffusion model", {}},
      {"sample", "draw the augmentation set from a trained diffusion model", {}},
      {"train-clf", "train the downstream classifier on real plus generated data", {}},
      {"eval", "evaluate, reusing checkpoints in the run directory", {}},
      {"experiment", "run every stage from scratch", {}},
  };
  for (auto& s : stages) {
    s.cmd = app.add_subcommand(s.name, s.help);
    s.flags.Attach(s.cmd);
  }

  ConfigFlags sweep_flags;
  std::string sweep_axis;
  std::vector<std::string> sweep_values;
  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "one experiment per augmentation size or race proportion");
  sweep_flags.Attach(sweep);
  sweep->add_option("--axis", sweep_axis, "aug_size (images per class) or proportions (African:Asian:Caucasian)")
      ->required();
  sweep->add_option("--values", sweep_values, "axis values, comma separated")->required()->delimiter(',');
  sweep->add_option("--sweep-out", sweep_out, "directory for sweep.csv and sweep.svg");

  std::vector<std::string> compare_inputs;
  std::string compare_csv, compare_svg;
  CLI::App* compare = app.add_subcommand("compare", "per-method medians over run records");
  compare->add_option("runs", compare_inputs, "run directories or run.json files");
  compare->add_option("--csv", compare_csv, "write the table as CSV");
  compare->add_option("--svg", compare_svg, "write a bar chart");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  for (auto& s : stages) {
    if (!s.cmd->parsed()) continue;
    const ExperimentConfig c = s.flags.Resolve(s.cmd);
    const std::string name = s.name;
    if (name == "gen-data") {
      std::filesystem::create_directories(RunDirectory(c));
      WriteSplit(LoadDataset(c), RunDirectory(c) / "data");
      return 0;
    }
    RunOptions opt;
    if (name == "train-dm") opt.until = Stage::kTrainDm;
    if (name == "sample") opt = {Stage::kSample, true, false};
    if (name == "train-clf") opt = {Stage::kTrainClf, true, false};
    if (name == "eval") opt = {Stage::kEval, true, true};
    const RunRecord rec = RunExperiment(c, opt);
    PrintRun(rec);
    if (opt.until == Stage::kEval) std::cout << ToText(rec.report);
    return 0;
  }

  if (sweep->parsed()) {
    const ExperimentConfig base = sweep_flags.Resolve(sweep);
    const SweepAxis axis = ParseSweepAxis(sweep_axis);
    const auto rows = RunSweep(base, axis, sweep_values, [](const SweepRow& r) {
      std::cout << r.value << ": " << r.record.directory.string() << "\n";
    });
    const std::filesystem::path dir =
        sweep_out.empty() ? RunDirectory(base).parent_path() / ("sweep-" + sweep_axis + "-" + ConfigHash(base))
                          : std::filesystem::path(sweep_out);
    std::filesystem::create_directories(dir);
    WriteTextFile(dir / "sweep.csv", SweepCsv(axis, rows));
    WriteTextFile(dir / "sweep.svg", SweepSvg(axis, rows));
    std::cout << "sweep table: " << (dir / "sweep.csv").string() << "\n";
    return 0;
  }

  if (compare->parsed()) {
    std::vector<ComparedRun> runs;
    for (const auto& p : compare_inputs) runs.push_back(LoadComparedRun(p));
    const auto rows = Compare(runs);
    std::cout << ComparisonText(rows);
    if (!compare_csv.empty()) WriteTextFile(compare_csv, ComparisonCsv(rows));
    if (!compare_svg.empty()) WriteTextFile(compare_svg, ComparisonSvg(rows));
    return 0;
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const fairskin::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fairskin::IncompatibleMetricsError& e) {
    std::cerr << "incompatible metrics: " << e.what() << "\n";
    return kExitIncompatible;
  } catch (const fairskin::StageError& e) {
    std::cerr << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
}
