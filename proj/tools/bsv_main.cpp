// bsv: simulate, register, volumes, evaluate and generate subcommands.
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bsv/error.hpp"
#include "bsv/humanoid.hpp"
#include "bsv/io.hpp"
#include "bsv/metrics.hpp"
#include "bsv/pipeline.hpp"

namespace fs = std::filesystem;
using namespace bsv;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kSimulate = 3,
  kRegister = 4,
  kVolumes = 5,
  kEvaluate = 6,
  kGenerate = 7,
};

/// Thrown with the exit code of the stage that failed.
struct StageFailure {
  int code;
  std::string message;
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string condition;
  std::string out;
};

void add_common(CLI::App* cmd, Options& o, bool with_condition = true) {
  cmd->add_option("--config", o.config, "Config file (key = value with [sections])");
  cmd->add_option("--seed", o.seed, "Base seed, overrides run.seed");
  if (with_condition) {
    cmd->add_option("--condition", o.condition, "Error condition")
        ->check(CLI::IsMember({"noer", "cali", "l515", "l5ca"}, CLI::ignore_case));
  }
  cmd->add_option("--out", o.out, "Output directory, overrides paths.output");
}

PipelineConfig load_config(const Options& o) {
  try {
    PipelineConfig cfg;
    std::vector<std::string> unused;
    if (!o.config.empty()) {
      const auto file = ConfigFile::load(o.config);
      cfg = PipelineConfig::from_config(file, fs::path(o.config).parent_path());
      unused = file.unused_keys();
    }
    if (o.seed) cfg.seed = *o.seed;
    if (!o.condition.empty()) cfg.condition = *parse_condition(o.condition);
    if (!o.out.empty()) cfg.output_dir = o.out;
    cfg.validate();
    for (const auto& k : unused) std::cerr << "warning: unknown config key " << k << '\n';
    return cfg;
  } catch (const Error& e) {
    throw StageFailure{kConfig, e.what()};
  }
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Timestamps only go here so every other artifact stays byte-reproducible.
void log_run(const fs::path& dir, const std::string& command, const std::string& line) {
  fs::create_directories(dir);
  std::ofstream log(dir / "run.log", std::ios::app);
  log << timestamp() << ' ' << command << ": " << line << '\n';
}

void write_used_config(const fs::path& dir, const PipelineConfig& cfg) {
  fs::create_directories(dir);
  std::ofstream out(dir / "config.used");
  out << cfg.to_config().to_string();
}

std::uint64_t require_seed(const PipelineConfig& cfg) {
  if (!cfg.seed) throw StageFailure{kConfig, "a seed is required (run.seed or --seed)"};
  return *cfg.seed;
}

TriangleMesh load_mesh(const fs::path& path, const char* what, int code) {
  if (path.empty()) throw StageFailure{kConfig, std::string("no ") + what + " mesh configured"};
  try {
    return read_mesh(path);
  } catch (const Error& e) {
    throw StageFailure{code, e.what()};
  }
}

void print_report(const VolumeReport& r) {
  const auto row = [](const VolumeEntry& e) {
    std::cout << std::left << std::setw(14) << e.name << std::right;
    if (e.error) {
      std::cout << " failed: " << *e.error << '\n';
      return;
    }
    std::cout << std::fixed << std::setprecision(6) << std::setw(12) << e.estimated.value_or(0.0);
    if (e.ground_truth) std::cout << std::setw(12) << *e.ground_truth;
    if (e.rve) std::cout << std::setprecision(2) << std::setw(9) << *e.rve << " %";
    std::cout << '\n';
  };
  std::cout << "segment          volume_m3       gt_m3      rve\n";
  row(r.whole_body);
  for (const auto& s : r.segments) row(s);
  if (r.rme) std::cout << "rme " << std::setprecision(2) << *r.rme << " %\n";
}

int cmd_simulate(const Options& o) {
  const auto cfg = load_config(o);
  const auto seed = run_seed(require_seed(cfg), cfg.subject_name(), cfg.condition);
  const auto gt = load_mesh(cfg.ground_truth, "ground-truth", kSimulate);
  const fs::path dir = cfg.output_dir / "capture";
  try {
    const auto sim = simulate(gt, cfg, seed);
    write_simulation(dir, sim);
  } catch (const Error& e) {
    throw StageFailure{kSimulate, std::string("simulate: ") + e.what()};
  }
  write_used_config(cfg.output_dir, cfg);
  log_run(cfg.output_dir, "simulate",
          std::string(condition_name(cfg.condition)) + " seed " + std::to_string(seed));
  std::cout << "capture written to " << dir.string() << '\n';
  return kOk;
}

int cmd_register(const Options& o) {
  const auto cfg = load_config(o);
  const auto tmpl = load_mesh(cfg.template_mesh, "template", kRegister);
  const fs::path in = cfg.output_dir / "capture";
  const fs::path dir = cfg.output_dir / "registration";
  std::vector<std::string> warnings;
  try {
    const auto front = read_view(in, View::Front);
    const auto back = read_view(in, View::Back);
    const auto reg = register_views(tmpl, front, back, cfg, &warnings);
    write_registration(dir, reg);
    const auto& last = reg.result.log.back();
    std::cout << "registered " << reg.body.size() << " points, " << reg.result.log.size()
              << " iterations, final objective " << last.energy.objective() << '\n';
  } catch (const Error& e) {
    throw StageFailure{kRegister, std::string("register: ") + e.what()};
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  log_run(cfg.output_dir, "register", "ok");
  return kOk;
}

int cmd_volumes(const Options& o) {
  const auto cfg = load_config(o);
  const fs::path fitted_path = cfg.output_dir / "registration" / "fitted.ply";
  const auto fitted = load_mesh(fitted_path, "fitted", kVolumes);
  std::optional<TriangleMesh> gt;
  if (!cfg.ground_truth.empty()) gt = load_mesh(cfg.ground_truth, "ground-truth", kVolumes);
  VolumeReport report;
  try {
    const std::uint64_t seed = cfg.seed ? run_seed(*cfg.seed, cfg.subject_name(), cfg.condition) : 0;
    report = measure_volumes(fitted, gt ? &*gt : nullptr, cfg.subject_name(), cfg.condition, seed,
                             cfg.real_mass);
    write_report_json(cfg.output_dir / "report.json", report);
    write_report_csv(cfg.output_dir / "report.csv", report);
  } catch (const Error& e) {
    throw StageFailure{kVolumes, std::string("volumes: ") + e.what()};
  }
  print_report(report);
  log_run(cfg.output_dir, "volumes", "ok");
  return kOk;
}

int cmd_run(const Options& o) {
  cmd_simulate(o);
  cmd_register(o);
  return cmd_volumes(o);
}

int cmd_evaluate(const Options& o) {
  auto cfg = load_config(o);
  const auto base_seed = require_seed(cfg);
  std::vector<fs::path> subjects = cfg.subjects;
  if (subjects.empty() && !cfg.ground_truth.empty()) subjects.push_back(cfg.ground_truth);
  if (subjects.empty()) throw StageFailure{kConfig, "evaluate needs paths.subjects or paths.ground_truth"};
  const auto tmpl = load_mesh(cfg.template_mesh, "template", kEvaluate);

  std::vector<VolumeReport> reports;
  int failures = 0;
  for (const auto& path : subjects) {
    std::optional<TriangleMesh> gt;
    try {
      gt = read_mesh(path);
    } catch (const Error& e) {
      std::cerr << path.string() << ": " << e.what() << '\n';
      ++failures;
      continue;
    }
    PipelineConfig run = cfg;
    run.subject = path.stem().string();
    for (auto condition : cfg.conditions) {
      run.condition = condition;
      for (int k = 0; k < cfg.seeds; ++k) {
        const auto seed = run_seed(base_seed, run.subject, condition, k);
        const fs::path dir = cfg.output_dir / run.subject / std::string(condition_name(condition)) /
                             ("seed_" + std::to_string(k));
        try {
          const auto report = run_end_to_end(*gt, tmpl, run, seed);
          fs::create_directories(dir);
          write_report_json(dir / "report.json", report);
          write_report_csv(dir / "report.csv", report);
          std::cout << run.subject << ' ' << condition_name(condition) << " seed " << k;
          if (report.whole_body.rve) {
            std::cout << " whole-body RVE " << std::fixed << std::setprecision(2)
                      << *report.whole_body.rve << " %";
          }
          std::cout << '\n';
          reports.push_back(report);
        } catch (const Error& e) {
          std::cerr << run.subject << ' ' << condition_name(condition) << " seed " << k
                    << " failed: " << e.what() << '\n';
          ++failures;
        }
      }
    }
  }
  if (!reports.empty()) {
    const auto rows = aggregate(reports);
    write_aggregate_csv(cfg.output_dir / "aggregate.csv", rows);
    write_aggregate_json(cfg.output_dir / "aggregate.json", rows);
    std::cout << "aggregate written to " << (cfg.output_dir / "aggregate.csv").string() << '\n';
  }
  write_used_config(cfg.output_dir, cfg);
  log_run(cfg.output_dir, "evaluate",
          std::to_string(reports.size()) + " runs, " + std::to_string(failures) + " failures");
  if (failures > 0) {
    throw StageFailure{kEvaluate, std::to_string(failures) + " run(s) failed"};
  }
  return kOk;
}

void write_config(const fs::path& path, const PipelineConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << cfg.to_config().to_string();
}

int cmd_generate(const Options& o) {
  const fs::path dir = o.out.empty() ? fs::path("bsv_assets") : fs::path(o.out);
  try {
    fs::create_directories(dir);
    std::cout << "generating humanoid subject..." << std::endl;
    write_mesh(dir / "humanoid.ply", make_humanoid(bundled_subject_params()).mesh);
    std::cout << "generating humanoid template..." << std::endl;
    write_mesh(dir / "humanoid_template.ply", make_humanoid_template());
    write_mesh(dir / "box1.ply", make_box_subject(kBox1Size));
    write_mesh(dir / "box2.ply", make_box_subject(kBox2Size));
    write_mesh(dir / "box_template.ply", make_box_template());

    PipelineConfig human;
    human.template_mesh = "humanoid_template.ply";
    human.ground_truth = "humanoid.ply";
    human.output_dir = "out/humanoid";
    human.seed = o.seed.value_or(1);
    human.clean = false;
    write_config(dir / "humanoid.cfg", human);

    PipelineConfig box;
    box.template_mesh = "box_template.ply";
    box.ground_truth = "box1.ply";
    box.output_dir = "out/box1";
    box.seed = o.seed.value_or(1);
    box.clean = false;
    box.conditions = {ErrorCondition::NoEr};
    write_config(dir / "box1.cfg", box);
    box.ground_truth = "box2.ply";
    box.output_dir = "out/box2";
    write_config(dir / "box2.cfg", box);
  } catch (const Error& e) {
    throw StageFailure{kGenerate, e.what()};
  } catch (const fs::filesystem_error& e) {
    throw StageFailure{kGenerate, e.what()};
  }
  std::cout << "assets written to " << dir.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Body segment volume estimation from front/back depth views"};
  app.require_subcommand(0, 1);
  bool version = false;
  app.add_flag("--version", version, "Print the tool and schema versions");

  Options o;
  auto* sim = app.add_subcommand("simulate", "Render front/back views of the ground truth");
  auto* reg = app.add_subcommand("register", "Fit the template to a simulated capture");
  auto* vol = app.add_subcommand("volumes", "Segment and whole-body volumes of the fitted mesh");
  auto* run = app.add_subcommand("run", "simulate, register and volumes in one go");
  auto* eva = app.add_subcommand("evaluate", "Subjects x conditions x seeds, aggregated");
  auto* gen = app.add_subcommand("generate", "Write the synthetic subjects, templates and configs");
  for (auto* cmd : {sim, reg, vol, run, eva}) add_common(cmd, o);
  gen->add_option("--out", o.out, "Output directory (default bsv_assets)");
  gen->add_option("--seed", o.seed, "Seed written into the generated configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (version) {
    std::cout << "bsv 0.1.0\n"
              << "config " << kConfigSchema << '\n'
              << "report " << kReportSchema << '\n'
              << "aggregate " << kAggregateSchema << '\n';
    return kOk;
  }
  try {
    if (sim->parsed()) return cmd_simulate(o);
    if (reg->parsed()) return cmd_register(o);
    if (vol->parsed()) return cmd_volumes(o);
    if (run->parsed()) return cmd_run(o);
    if (eva->parsed()) return cmd_evaluate(o);
    if (gen->parsed()) return cmd_generate(o);
  } catch (const StageFailure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  }
  std::cout << app.help();
  return kUsage;
}
