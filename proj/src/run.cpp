#include "fourlevel/run.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fourlevel/cavity.hpp"
#include "fourlevel/errors.hpp"
#include "fourlevel/experiments.hpp"
#include "fourlevel/kernels.hpp"
#include "fourlevel/pulse.hpp"
#include "fourlevel/steady_state.hpp"
#include "json.hpp"

namespace fourlevel {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ += ',';
      out_ += h;
      first = false;
    }
    out_ += '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ += ',';
      out_ += format_number(v);
      first = false;
    }
    out_ += '\n';
  }

  const std::string& text() const { return out_; }

 private:
  std::string out_;
};

// Written to a temporary name first so a crash never leaves half a file.
void write_file(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw SimulationError(ErrorKind::Parameter, "cannot write " + tmp.string());
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw SimulationError(ErrorKind::Parameter, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

Json grid_metadata(const RunConfig& c, std::size_t rows) {
  Json g = Json::object();
  if (c.grid) {
    g["axis_min"] = c.grid->min;
    g["axis_max"] = c.grid->max;
    g["axis_count"] = c.grid->count;
    g["spacing"] = c.grid->spacing == GridSpacing::Linear ? "linear" : "log";
  }
  g["rows"] = rows;
  g["propagation_steps"] = c.medium.steps;
  return g;
}

struct Produced {
  std::string data;
  std::size_t rows = 0;
  Json summary = Json::object();
};

Experiment experiment_of(const RunConfig& c) { return {c.system, c.drives, c.medium}; }

// Header is the axis name followed by the selected columns.
Produced sweep_csv(const SweepResult& r, std::initializer_list<const char*> columns) {
  std::vector<const std::vector<double>*> data;
  std::string text = r.axis_name;
  for (const char* name : columns) {
    data.push_back(&r.column(name));
    text += ',';
    text += name;
  }
  text += '\n';
  for (std::size_t i = 0; i < r.axis.size(); ++i) {
    text += format_number(r.axis[i]);
    for (const auto* col : data) {
      text += ',';
      text += format_number((*col)[i]);
    }
    text += '\n';
  }
  Produced p;
  p.data = std::move(text);
  p.rows = r.axis.size();
  return p;
}

Json extrema_json(const SweepResult& r, const char* column) {
  Json list = Json::array();
  if (r.axis.size() < 3) return list;
  for (const auto& e : spectrum_extrema(r, column)) {
    list.push_back(Json{{"kind", e.kind == Extremum::Kind::Min ? "min" : "max"},
                        {"axis", e.axis},
                        {"value", e.value}});
  }
  return list;
}

Produced run_spectrum(const RunConfig& c, int threads) {
  const auto grid = c.grid->values();
  const auto r = probe_spectrum(experiment_of(c), grid, threads);
  auto p = sweep_csv(r, {"T2"});
  p.summary["T2_extrema"] = extrema_json(r, "T2");
  return p;
}

Produced run_switch(const RunConfig& c, int threads) {
  const auto grid = c.grid->values();
  const auto r = switching_curve(experiment_of(c), grid, threads);
  auto p = sweep_csv(r, {"T2"});
  p.summary["T2_extrema"] = extrema_json(r, "T2");
  return p;
}

Produced run_sa_rsa(const RunConfig& c, int threads) {
  const auto grid = c.grid->values();
  const auto r = sa_rsa_curve(experiment_of(c), grid, threads);
  return sweep_csv(r, {"T_off", "T_on"});
}

Produced run_cavity(const RunConfig& c, int threads) {
  const auto spec = cooperation_to_mirror(c.cavity->C, c.medium, c.system.decay(2, 3), c.cavity->delta0);
  const auto grid = c.grid->values();
  const auto curve = cavity_sweep(c.system, c.drives, spec, c.medium, grid, threads);
  Csv csv{"x_over_gamma", "input_intensity", "output_intensity"};
  for (std::size_t i = 0; i < curve.x.size(); ++i) csv.row({curve.x[i], curve.input[i], curve.output[i]});

  Produced p;
  p.data = csv.text();
  p.rows = curve.x.size();
  p.summary["mirror_T"] = spec.T;
  p.summary["mirror_R"] = spec.R;
  p.summary["refined_points"] = curve.x.size() - grid.size();
  if (curve.x.size() >= 5) {
    if (const auto t = bistability_thresholds(curve)) {
      p.summary["thresholds"] = Json{{"lower", t->lower}, {"upper", t->upper}};
    } else {
      p.summary["thresholds"] = nullptr;
    }
  }
  return p;
}

Produced run_pulse(const RunConfig& c, int threads) {
  PulseSpec spec;
  spec.sigma = c.pulse->sigma_rad_per_s;
  spec.peak_rabi = c.pulse->peak_rabi;
  spec.gamma_rad_per_s = c.gamma_rad_per_s;
  spec.points = c.pulse->points;
  spec.span_sigmas = c.pulse->span_sigmas;
  spec.spectral_cutoff = c.pulse->spectral_cutoff;
  const auto r = pulse_transmission(spec, c.system, c.drives, c.medium, threads);

  double peak_in = 0.0;
  for (const auto& e : r.input.trace) peak_in = std::max(peak_in, std::norm(e));
  const double window = 5.0 * spec.sigma_t();
  Csv csv{"tau_us", "input_norm", "output_norm"};
  Produced p;
  for (std::size_t i = 0; i < r.input.t.size(); ++i) {
    const double t = r.input.t[i];
    if (std::abs(t) > window) continue;
    csv.row({t * 1e6, std::norm(r.input.trace[i]) / peak_in, std::norm(r.output_trace[i]) / peak_in});
    ++p.rows;
  }
  p.data = csv.text();
  p.summary["peak_ratio"] = r.peak_ratio;
  p.summary["h0"] = Json::array({r.h0.real(), r.h0.imag()});
  p.summary["linearity_change"] = r.linearity_change;
  p.summary["evaluated_frequencies"] = r.evaluated;
  p.summary["sigma_t_s"] = spec.sigma_t();
  p.summary["regime_warning"] = r.regime_warning ? Json(*r.regime_warning) : Json(nullptr);
  return p;
}

Produced run_steady_state(const RunConfig& c) {
  const auto rho = steady_state(c.system, c.drives);
  Json re = Json::array();
  Json im = Json::array();
  for (int i = 1; i <= 4; ++i) {
    Json rr = Json::array();
    Json ii = Json::array();
    for (int j = 1; j <= 4; ++j) {
      rr.push_back(rho(i, j).real());
      ii.push_back(rho(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  Produced p;
  p.data = Json{{"re", re}, {"im", im}}.dump(2) + "\n";
  p.rows = 4;
  p.summary["generator_residual"] = generator_residual(c.system, c.drives, rho);
  return p;
}

Produced produce(const RunConfig& c, int threads) {
  switch (c.kind) {
    case SweepKind::Spectrum: return run_spectrum(c, threads);
    case SweepKind::Switch: return run_switch(c, threads);
    case SweepKind::Cavity: return run_cavity(c, threads);
    case SweepKind::Pulse: return run_pulse(c, threads);
    case SweepKind::SaRsa: return run_sa_rsa(c, threads);
    case SweepKind::SteadyState: return run_steady_state(c);
  }
  throw SimulationError(ErrorKind::Parameter, "unknown sweep kind");
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

RunReport run(const RunConfig& config, const RunOptions& options) {
  RunReport report;
  const fs::path dir(config.output);
  const std::string kind = to_string(config.kind);
  report.data_path = dir / (kind + (config.kind == SweepKind::SteadyState ? ".json" : ".csv"));
  report.meta_path = dir / (kind + ".meta.json");

  Json meta = Json::object();
  meta["tool"] = "simulate";
  meta["version"] = kToolVersion;
  meta["kernels"] = std::string(kernels::active_kernels().name);
  meta["kind"] = kind;
  meta["config"] = Json::parse(emit_config(config));

  const auto start = std::chrono::steady_clock::now();
  Json error = nullptr;
  try {
    validate(config);
    fs::create_directories(dir);
    auto produced = produce(config, options.threads);
    write_file(report.data_path, produced.data);
    meta["grid"] = grid_metadata(config, produced.rows);
    meta["summary"] = std::move(produced.summary);
    report.ok = true;
  } catch (const std::exception& e) {
    report.error = e.what();
    error = Json{{"message", e.what()}};
    if (const auto* se = dynamic_cast<const SimulationError*>(&e)) {
      error["kind"] = to_string(se->kind());
    } else {
      error["kind"] = "Internal";
    }
    if (const auto* pe = dynamic_cast<const PropagationError*>(&e)) error["z_cm"] = pe->z_cm();
    std::error_code ignored;
    fs::remove(report.data_path, ignored);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  meta["status"] = report.ok ? "ok" : "error";
  meta["wall_time_s"] = wall;
  meta["error"] = error;

  try {
    std::error_code ignored;
    fs::create_directories(dir, ignored);
    write_file(report.meta_path, meta.dump(2) + "\n");
  } catch (const std::exception& e) {
    if (report.ok) {
      report.ok = false;
      report.error = e.what();
      std::error_code ignored;
      fs::remove(report.data_path, ignored);
    }
  }
  return report;
}

}  // namespace fourlevel
