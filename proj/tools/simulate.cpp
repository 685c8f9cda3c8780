// simulate <kind> (--preset NAME | --config FILE) [--out DIR] [--threads N]
//          [--steps N] [--g1 A] [--g2 A] [--g A]

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fourlevel/config.hpp"
#include "fourlevel/errors.hpp"
#include "fourlevel/run.hpp"

using namespace fourlevel;

namespace {

struct Overrides {
  std::string preset;
  std::string config_file;
  std::string out;
  int threads = 0;
  std::optional<int> steps;
  std::optional<double> g1;
  std::optional<double> g2;
  std::optional<double> g;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunConfig build_config(SweepKind kind, const Overrides& o) {
  RunConfig c = o.preset.empty() ? parse_config(read_file(o.config_file)) : preset(o.preset);
  c = retarget(std::move(c), kind);
  if (!o.out.empty()) c.output = o.out;
  if (o.steps) c.medium.steps = *o.steps;
  if (o.g1) {
    if (c.system.scheme() != Scheme::Ladder4) throw ConfigError("--g1: the ytype scheme has no coupling field");
    c.drives.coupling = *o.g1;
  }
  if (o.g2) c.drives.probe = *o.g2;
  if (o.g) c.drives.control = *o.g;
  validate(c);
  return c;
}

void add_common(CLI::App* sub, Overrides& o) {
  auto* p = sub->add_option("--preset", o.preset, "named parameter set");
  auto* f = sub->add_option("--config", o.config_file, "JSON run configuration")->check(CLI::ExistingFile);
  p->excludes(f);
  sub->add_option("--out", o.out, "output directory (overrides the config)");
  sub->add_option("--threads", o.threads, "worker threads, 0 = all, 1 = sequential")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--steps", o.steps, "propagation steps through the medium");
  sub->add_option("--g1", o.g1, "coupling amplitude G1 / gamma (ladder)");
  sub->add_option("--g2", o.g2, "probe amplitude G2 (ladder) or g (ytype) / gamma");
  sub->add_option("--g", o.g, "control amplitude G / gamma");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Four-level atom steady-state, propagation, cavity and pulse simulator"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list-presets", list, "print the preset names and exit");

  Overrides o;
  std::vector<std::pair<CLI::App*, SweepKind>> subs;
  for (SweepKind k : {SweepKind::Spectrum, SweepKind::Switch, SweepKind::Cavity, SweepKind::Pulse,
                      SweepKind::SaRsa, SweepKind::SteadyState}) {
    auto* sub = app.add_subcommand(to_string(k), std::string("run a ") + to_string(k) + " sweep");
    add_common(sub, o);
    subs.emplace_back(sub, k);
  }
  auto* show = app.add_subcommand("show-config", "print a preset as a full JSON config");
  std::string show_name;
  show->add_option("preset", show_name, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
      return 0;
    }
    if (*show) {
      std::cout << emit_config(preset(show_name));
      return 0;
    }
    for (const auto& [sub, kind] : subs) {
      if (!*sub) continue;
      if (o.preset.empty() && o.config_file.empty()) {
        std::cerr << "error: one of --preset or --config is required\n";
        return 2;
      }
      const RunConfig c = build_config(kind, o);
      const auto report = run(c, RunOptions{o.threads});
      if (!report.ok) {
        std::cerr << "error: " << report.error << "\n  details in " << report.meta_path.string() << '\n';
        return 1;
      }
      std::cout << report.data_path.string() << '\n';
      return 0;
    }
    std::cerr << app.help();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
