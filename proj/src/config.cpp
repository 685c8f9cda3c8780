#include "fourlevel/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "fourlevel/cavity.hpp"
#include "fourlevel/errors.hpp"
#include "fourlevel/experiments.hpp"
#include "json.hpp"

namespace fourlevel {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct KindName {
  SweepKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {SweepKind::Spectrum, "spectrum"}, {SweepKind::Switch, "switch"},
    {SweepKind::Cavity, "cavity"},     {SweepKind::Pulse, "pulse"},
    {SweepKind::SaRsa, "sa-rsa"},      {SweepKind::SteadyState, "steady-state"},
};

bool uses_grid(SweepKind k) { return default_grid(k).has_value(); }
bool uses_medium(SweepKind k) { return k != SweepKind::SteadyState; }

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field + ": " + message);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string pair_key(const LevelPair& p) {
  return std::to_string(p.lower) + std::to_string(p.upper);
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "document" : path, "expected an object");
}

void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) {
      std::string list;
      for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      fail(join(path, key), "unknown key (allowed: " + list + ")");
    }
  }
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double number_or(const Json& parent, const char* key, const std::string& path, double fallback) {
  return parent.contains(key) ? number(parent.at(key), join(path, key)) : fallback;
}

int integer_or(const Json& parent, const char* key, const std::string& path, int fallback) {
  if (!parent.contains(key)) return fallback;
  const auto& j = parent.at(key);
  if (!j.is_number_integer()) fail(join(path, key), "expected an integer");
  const auto v = j.get<long long>();
  if (v < 0 || v > 100'000'000) fail(join(path, key), "out of range");
  return static_cast<int>(v);
}

std::string string_at(const Json& parent, const char* key, const std::string& path) {
  const auto& j = parent.at(key);
  if (!j.is_string()) fail(join(path, key), "expected a string");
  return j.get<std::string>();
}

Complex complex_value(const Json& j, const std::string& path) {
  if (j.is_number()) return {number(j, path), 0.0};
  if (j.is_array() && j.size() == 2) {
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  }
  fail(path, "expected a number or a [re, im] pair");
}

Json complex_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

std::map<LevelPair, double> pair_map(const Json& j, const std::string& path, Scheme scheme,
                                     bool all_required) {
  require_object(j, path);
  const auto channels = decay_channels(scheme);
  std::map<LevelPair, double> out;
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(channels.begin(), channels.end(),
                                 [&](const LevelPair& p) { return pair_key(p) == key; });
    if (it == channels.end()) {
      std::string list;
      for (const auto& p : channels) list += (list.empty() ? "" : ", ") + pair_key(p);
      fail(join(path, key), std::string("not a transition of the ") + to_string(scheme) +
                                " scheme (allowed: " + list + ")");
    }
    out[*it] = number(value, join(path, key));
  }
  for (const auto& p : channels) {
    if (out.count(p) == 0) {
      if (all_required) fail(join(path, pair_key(p)), "missing");
      out[p] = 0.0;
    }
  }
  return out;
}

Json pair_map_json(const std::map<LevelPair, double>& values, Scheme scheme) {
  Json j = Json::object();
  for (const auto& p : decay_channels(scheme)) {
    const auto it = values.find(p);
    j[pair_key(p)] = it == values.end() ? 0.0 : it->second;
  }
  return j;
}

Scheme scheme_from(const std::string& name, const std::string& path) {
  if (name == "ladder") return Scheme::Ladder4;
  if (name == "ytype") return Scheme::Ypsilon4;
  fail(path, "unknown scheme '" + name + "' (allowed: ladder, ytype)");
}

const char* scheme_name(Scheme s) { return s == Scheme::Ladder4 ? "ladder" : "ytype"; }

// Wraps a module-level parameter error with the config field it came from.
template <class Fn>
auto checked(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const SimulationError& e) {
    fail(field, e.what());
  }
}

// Parsing ----------------------------------------------------------------

void parse_system(const Json& j, RunConfig& c) {
  const std::string path = "system";
  require_object(j, path);
  reject_unknown(j, path, {"scheme", "decays", "gamma_coll", "gamma_rad_per_s"});
  for (const char* key : {"scheme", "decays"}) {
    if (!j.contains(key)) fail(join(path, key), "missing");
  }
  const Scheme scheme = scheme_from(string_at(j, "scheme", path), "system.scheme");
  const auto decays = pair_map(j.at("decays"), "system.decays", scheme, true);
  for (const auto& [pair, value] : decays) {
    if (value < 0.0) fail("system.decays." + pair_key(pair), "must be >= 0");
  }
  const double coll = number_or(j, "gamma_coll", path, 0.0);
  if (coll < 0.0) fail("system.gamma_coll", "must be >= 0");
  c.system = checked("system", [&] { return AtomicSystem(scheme, decays, coll); });
  c.gamma_rad_per_s = number_or(j, "gamma_rad_per_s", path, 0.0);
}

void parse_drives(const Json& j, RunConfig& c) {
  const std::string path = "drives";
  require_object(j, path);
  reject_unknown(j, path, {"coupling", "probe", "control", "delta1", "delta2", "delta"});
  DriveSet d;
  for (Field f : {Field::Coupling, Field::Probe, Field::Control}) {
    const char* key = to_string(f);
    if (j.contains(key)) d.field(f) = complex_value(j.at(key), join(path, key));
  }
  d.delta1 = number_or(j, "delta1", path, 0.0);
  d.delta2 = number_or(j, "delta2", path, 0.0);
  d.delta = number_or(j, "delta", path, 0.0);
  c.drives = d;
}

void parse_medium(const Json& j, RunConfig& c) {
  const std::string path = "medium";
  require_object(j, path);
  reject_unknown(j, path,
                 {"length_cm", "eta", "steps", "drive_propagation", "ytype_control_source"});
  MediumSpec m;
  m.length_cm = number_or(j, "length_cm", path, m.length_cm);
  if (!j.contains("eta")) fail("medium.eta", "missing");
  m.eta = pair_map(j.at("eta"), "medium.eta", c.system.scheme(), false);
  m.steps = integer_or(j, "steps", path, m.steps);
  if (j.contains("drive_propagation")) {
    const auto v = string_at(j, "drive_propagation", path);
    if (v == "propagated") {
      m.drive_propagation = DrivePropagation::Propagated;
    } else if (v == "undepleted") {
      m.drive_propagation = DrivePropagation::Undepleted;
    } else {
      fail("medium.drive_propagation", "unknown value '" + v + "' (allowed: propagated, undepleted)");
    }
  }
  if (j.contains("ytype_control_source")) {
    const auto v = string_at(j, "ytype_control_source", path);
    if (v == "rho43") {
      m.ytype_control_source = ControlSource::Rho43;
    } else if (v == "rho42") {
      m.ytype_control_source = ControlSource::Rho42;
    } else {
      fail("medium.ytype_control_source", "unknown value '" + v + "' (allowed: rho43, rho42)");
    }
  }
  c.medium = m;
}

GridSpec parse_grid(const Json& j, SweepKind kind) {
  const std::string path = "grid";
  require_object(j, path);
  reject_unknown(j, path, {"min", "max", "count", "spacing"});
  GridSpec g = *default_grid(kind);
  g.min = number_or(j, "min", path, g.min);
  g.max = number_or(j, "max", path, g.max);
  g.count = integer_or(j, "count", path, g.count);
  if (j.contains("spacing")) {
    const auto v = string_at(j, "spacing", path);
    if (v == "linear") {
      g.spacing = GridSpacing::Linear;
    } else if (v == "log") {
      g.spacing = GridSpacing::Log;
    } else {
      fail("grid.spacing", "unknown value '" + v + "' (allowed: linear, log)");
    }
  }
  return g;
}

CavityBlock parse_cavity(const Json& j) {
  const std::string path = "cavity";
  require_object(j, path);
  reject_unknown(j, path, {"C", "delta0"});
  CavityBlock b;
  b.C = number_or(j, "C", path, b.C);
  b.delta0 = number_or(j, "delta0", path, b.delta0);
  return b;
}

PulseBlock parse_pulse(const Json& j) {
  const std::string path = "pulse";
  require_object(j, path);
  reject_unknown(j, path, {"sigma_rad_per_s", "peak_rabi", "points", "span_sigmas", "spectral_cutoff"});
  if (!j.contains("sigma_rad_per_s")) fail("pulse.sigma_rad_per_s", "missing");
  PulseBlock b;
  b.sigma_rad_per_s = number(j.at("sigma_rad_per_s"), "pulse.sigma_rad_per_s");
  b.peak_rabi = number_or(j, "peak_rabi", path, b.peak_rabi);
  b.points = integer_or(j, "points", path, b.points);
  b.span_sigmas = number_or(j, "span_sigmas", path, b.span_sigmas);
  b.spectral_cutoff = number_or(j, "spectral_cutoff", path, b.spectral_cutoff);
  return b;
}

// Emission ---------------------------------------------------------------

Json grid_json(const GridSpec& g) {
  return Json{{"min", g.min},
              {"max", g.max},
              {"count", g.count},
              {"spacing", g.spacing == GridSpacing::Linear ? "linear" : "log"}};
}

// Shared helpers for presets ----------------------------------------------

// Sodium ladder 3S-3P-4D-... rates with gamma = gamma12 = gamma23 = 2pi x 9 MHz.
constexpr double kSodiumGamma = kTwoPi * 9e6;

RunConfig sodium_ladder(SweepKind kind, double g1, double g2, double g) {
  RunConfig c;
  c.kind = kind;
  c.system = AtomicSystem::ladder(1.0, 1.0, 0.005 / 9.0);
  c.gamma_rad_per_s = kSodiumGamma;
  c.drives.coupling = g1;
  c.drives.probe = g2;
  c.drives.control = g;
  c.medium.length_cm = 1.0;
  c.medium.eta = {{{1, 2}, 12.0}, {{2, 3}, 16.0}, {{3, 4}, 0.2}};
  c.medium.drive_propagation = DrivePropagation::Undepleted;
  c.grid = default_grid(kind);
  return c;
}

// Rubidium Y-type; rates are quoted as gamma/2pi in MHz and gamma = 1 MHz.
RunConfig rubidium_y(double r12, double r23, double r24, double eta12, double eta23, double eta24) {
  RunConfig c;
  c.kind = SweepKind::SaRsa;
  c.system = AtomicSystem::ypsilon(kTwoPi * r12, kTwoPi * r23, kTwoPi * r24);
  c.gamma_rad_per_s = 1e6;
  c.drives.probe = 1.0;
  c.drives.control = 10.0;
  c.medium.length_cm = 1.0;
  c.medium.eta = {{{1, 2}, eta12}, {{2, 3}, eta23}, {{2, 4}, eta24}};
  c.medium.drive_propagation = DrivePropagation::Propagated;
  c.grid = default_grid(c.kind);
  return c;
}

RunConfig with_pulse(RunConfig c) {
  c.pulse = PulseBlock{};
  c.pulse->sigma_rad_per_s = kTwoPi * 5e3;
  c.pulse->peak_rabi = 0.1;
  return c;
}

RunConfig named(RunConfig c, const char* name) {
  c.preset = name;
  return c;
}

}  // namespace

const char* to_string(SweepKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

std::optional<SweepKind> sweep_kind_from(std::string_view name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  return std::nullopt;
}

std::vector<double> GridSpec::values() const {
  return spacing == GridSpacing::Linear ? linspace(min, max, count) : logspace(min, max, count);
}

std::optional<GridSpec> default_grid(SweepKind kind) {
  switch (kind) {
    case SweepKind::Spectrum:
      return GridSpec{-30.0, 30.0, 601, GridSpacing::Linear};
    case SweepKind::Switch:
      return GridSpec{0.0, 200.0, 401, GridSpacing::Linear};
    case SweepKind::Cavity:
      return GridSpec{1e-3, 1e2, 400, GridSpacing::Log};
    case SweepKind::SaRsa:
      return GridSpec{1e-2, 1e4, 61, GridSpacing::Log};
    case SweepKind::Pulse:
    case SweepKind::SteadyState:
      return std::nullopt;
  }
  return std::nullopt;
}

void validate(const RunConfig& c) {
  const Scheme scheme = c.system.scheme();
  checked("drives", [&] {
    check_drives(c.system, c.drives);
    return 0;
  });
  if (!(c.gamma_rad_per_s >= 0.0) || !std::isfinite(c.gamma_rad_per_s)) {
    fail("system.gamma_rad_per_s", "must be finite and >= 0");
  }
  if (uses_medium(c.kind)) {
    if (!(c.medium.length_cm > 0.0)) fail("medium.length_cm", "must be > 0");
    if (c.medium.steps < 100) fail("medium.steps", "must be >= 100");
    for (const auto& [pair, value] : c.medium.eta) {
      if (!(value >= 0.0)) fail("medium.eta." + pair_key(pair), "must be >= 0");
    }
    checked("medium", [&] {
      check_medium(c.medium, scheme);
      return 0;
    });
  }

  if (uses_grid(c.kind)) {
    if (!c.grid) fail("grid", std::string("required for kind ") + to_string(c.kind));
    const auto& g = *c.grid;
    if (g.count < 1) fail("grid.count", "must be >= 1");
    if (g.count > 1 && !(g.max > g.min)) fail("grid.max", "must exceed grid.min");
    if (g.spacing == GridSpacing::Log && !(g.min > 0.0)) fail("grid.min", "log spacing needs min > 0");
    if ((c.kind == SweepKind::Switch || c.kind == SweepKind::SaRsa || c.kind == SweepKind::Cavity) &&
        g.min < 0.0) {
      fail("grid.min", "intensities and amplitudes must be >= 0");
    }
  } else if (c.grid) {
    fail("grid", std::string("not used by kind ") + to_string(c.kind));
  }

  if (c.kind == SweepKind::Cavity) {
    if (!c.cavity) fail("cavity", "block required for kind cavity");
    if (scheme != Scheme::Ladder4) fail("system.scheme", "the cavity sweep needs the ladder scheme");
    if (!(c.cavity->C > 0.0)) fail("cavity.C", "must be > 0");
    checked("cavity", [&] {
      check_cavity(cooperation_to_mirror(c.cavity->C, c.medium, c.system.decay(2, 3), c.cavity->delta0));
      return 0;
    });
  } else if (c.cavity) {
    fail("cavity", std::string("not used by kind ") + to_string(c.kind));
  }

  if (c.kind == SweepKind::Pulse) {
    if (!c.pulse) fail("pulse", "block required for kind pulse");
    if (!(c.gamma_rad_per_s > 0.0)) fail("system.gamma_rad_per_s", "required (> 0) for kind pulse");
    const auto& p = *c.pulse;
    if (!(p.sigma_rad_per_s > 0.0)) fail("pulse.sigma_rad_per_s", "must be > 0");
    if (!(p.peak_rabi > 0.0)) fail("pulse.peak_rabi", "must be > 0");
    if (p.points < 4096 || p.points % 4 != 0) fail("pulse.points", "must be >= 4096 and a multiple of 4");
    if (!(p.span_sigmas >= 6.0)) fail("pulse.span_sigmas", "must be >= 6");
    if (!(p.spectral_cutoff >= 0.0 && p.spectral_cutoff < 1.0)) {
      fail("pulse.spectral_cutoff", "must lie in [0, 1)");
    }
  } else if (c.pulse) {
    fail("pulse", std::string("not used by kind ") + to_string(c.kind));
  }

  if (c.kind == SweepKind::SaRsa && scheme != Scheme::Ypsilon4) {
    fail("system.scheme", "the sa-rsa sweep needs the ytype scheme");
  }
}

RunConfig parse_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // byte is the 1-based offset of the offending character
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << "syntax error at line " << line << ", column " << column << ": " << e.what();
    throw ConfigError(os.str(), line, column);
  }

  if (!doc.is_object()) fail("document", "expected a JSON object");
  reject_unknown(doc, "", {"units", "kind", "preset", "system", "drives", "medium", "grid", "cavity",
                           "pulse", "output"});
  std::vector<std::string> missing;
  for (const char* key : {"units", "kind", "system", "drives"}) {
    if (!doc.contains(key)) missing.emplace_back(key);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("missing required keys: " + list +
                      " (required: units, kind, system, drives; medium for every kind but "
                      "steady-state; cavity and pulse blocks for those kinds)");
  }

  if (string_at(doc, "units", "") != "gamma") fail("units", "must be \"gamma\"");
  RunConfig c;
  const auto kind_name = string_at(doc, "kind", "");
  const auto kind = sweep_kind_from(kind_name);
  if (!kind) {
    fail("kind", "unknown kind '" + kind_name +
                     "' (allowed: spectrum, switch, cavity, pulse, sa-rsa, steady-state)");
  }
  c.kind = *kind;
  if (doc.contains("preset")) c.preset = string_at(doc, "preset", "");
  parse_system(doc.at("system"), c);
  parse_drives(doc.at("drives"), c);

  if (doc.contains("medium")) {
    parse_medium(doc.at("medium"), c);
  } else if (uses_medium(c.kind)) {
    fail("medium", std::string("block required for kind ") + kind_name);
  } else {
    c.medium.eta = pair_map(Json::object(), "medium.eta", c.system.scheme(), false);
  }

  if (doc.contains("grid")) {
    if (!uses_grid(c.kind)) fail("grid", "not used by kind " + kind_name);
    c.grid = parse_grid(doc.at("grid"), c.kind);
  } else {
    c.grid = default_grid(c.kind);
  }
  if (doc.contains("cavity")) c.cavity = parse_cavity(doc.at("cavity"));
  if (doc.contains("pulse")) c.pulse = parse_pulse(doc.at("pulse"));
  if (doc.contains("output")) c.output = string_at(doc, "output", "");
  if (c.output.empty()) fail("output", "must not be empty");

  validate(c);
  return c;
}

std::string emit_config(const RunConfig& c) {
  const Scheme scheme = c.system.scheme();
  Json doc = Json::object();
  doc["units"] = "gamma";
  doc["kind"] = to_string(c.kind);
  if (!c.preset.empty()) doc["preset"] = c.preset;
  doc["system"] = Json{{"scheme", scheme_name(scheme)},
                       {"decays", pair_map_json(c.system.decays(), scheme)},
                       {"gamma_coll", c.system.gamma_coll()},
                       {"gamma_rad_per_s", c.gamma_rad_per_s}};
  Json drives = Json::object();
  for (Field f : {Field::Coupling, Field::Probe, Field::Control}) {
    drives[to_string(f)] = complex_json(c.drives.field(f));
  }
  drives["delta1"] = c.drives.delta1;
  drives["delta2"] = c.drives.delta2;
  drives["delta"] = c.drives.delta;
  doc["drives"] = drives;
  doc["medium"] = Json{{"length_cm", c.medium.length_cm},
                       {"eta", pair_map_json(c.medium.eta, scheme)},
                       {"steps", c.medium.steps},
                       {"drive_propagation", to_string(c.medium.drive_propagation)},
                       {"ytype_control_source", to_string(c.medium.ytype_control_source)}};
  if (c.grid) doc["grid"] = grid_json(*c.grid);
  if (c.cavity) doc["cavity"] = Json{{"C", c.cavity->C}, {"delta0", c.cavity->delta0}};
  if (c.pulse) {
    doc["pulse"] = Json{{"sigma_rad_per_s", c.pulse->sigma_rad_per_s},
                        {"peak_rabi", c.pulse->peak_rabi},
                        {"points", c.pulse->points},
                        {"span_sigmas", c.pulse->span_sigmas},
                        {"spectral_cutoff", c.pulse->spectral_cutoff}};
  }
  doc["output"] = c.output;
  return doc.dump(2) + "\n";
}

RunConfig retarget(RunConfig c, SweepKind kind) {
  if (c.kind == kind) return c;
  c.kind = kind;
  c.grid = default_grid(kind);
  if (kind != SweepKind::Cavity) c.cavity.reset();
  if (kind != SweepKind::Pulse) c.pulse.reset();
  return c;
}

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig6a", "fig6b", "fig8a", "fig8a-text", "fig8b"};
}

RunConfig preset(std::string_view name) {
  // Solid-line member of each figure family; the other curves differ only in
  // one amplitude (--g1/--g2/--g).
  if (name == "fig2a") return named(sodium_ladder(SweepKind::Spectrum, 10.0, 1.0, 0.0), "fig2a");
  if (name == "fig2b") return named(sodium_ladder(SweepKind::Spectrum, 10.0, 1.0, 10.0), "fig2b");
  if (name == "fig3") return named(sodium_ladder(SweepKind::Switch, 10.0, 0.01, 0.0), "fig3");
  if (name == "fig4a") return named(with_pulse(sodium_ladder(SweepKind::Pulse, 10.0, 0.1, 0.0)), "fig4a");
  if (name == "fig4b") return named(with_pulse(sodium_ladder(SweepKind::Pulse, 10.0, 0.1, 10.0)), "fig4b");
  if (name == "fig6a" || name == "fig6b") {
    auto c = sodium_ladder(SweepKind::Cavity, 5.0, 0.0, name == "fig6a" ? 0.0 : 5.0);
    c.cavity = CavityBlock{400.0, 0.0};
    return named(std::move(c), name == "fig6a" ? "fig6a" : "fig6b");
  }
  if (name == "fig8a") return named(rubidium_y(5.0, 11.0, 0.97, 88.0, 1.5, 8.8), "fig8a");
  // alternative gamma24/2pi = 0.67 MHz for the same rubidium system
  if (name == "fig8a-text") return named(rubidium_y(5.0, 11.0, 0.67, 88.0, 1.5, 8.8), "fig8a-text");
  if (name == "fig8b") return named(rubidium_y(6.0, 0.97, 1.1, 87.0, 14.0, 10.0), "fig8b");

  std::string list;
  for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + std::string(name) + "' (available: " + list + ")");
}

}  // namespace fourlevel
