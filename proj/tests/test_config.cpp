#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "doctest.h"
#include "fourlevel/config.hpp"
#include "fourlevel/errors.hpp"
#include "json.hpp"

using namespace fourlevel;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string minimal_spectrum() {
  return R"({
  "units": "gamma",
  "kind": "spectrum",
  "system": {"scheme": "ladder", "decays": {"12": 1, "23": 1, "34": 0.01}},
  "drives": {"coupling": 10, "probe": [1, 0.5]},
  "medium": {"eta": {"23": 16}}
})";
}

// Returns the error message, or an empty string when parsing succeeded.
std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string edited(const std::string& preset_name, const std::function<void(nlohmann::json&)>& edit) {
  auto j = nlohmann::json::parse(emit_config(preset(preset_name)));
  edit(j);
  return j.dump();
}

}  // namespace

TEST_CASE("every preset survives emit and parse unchanged") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto c = preset(name);
    const auto text = emit_config(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(emit_config(back) == text);
  }
}

TEST_CASE("presets carry their figure parameters") {
  SUBCASE("sodium ladder figures") {
    for (const char* name : {"fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig6a", "fig6b"}) {
      CAPTURE(name);
      const auto c = preset(name);
      CHECK(c.system.scheme() == Scheme::Ladder4);
      CHECK(c.system.decay(1, 2) == 1.0);
      CHECK(c.system.decay(2, 3) == 1.0);
      CHECK(c.system.decay(3, 4) == doctest::Approx(0.005 / 9.0));
      CHECK(c.system.gamma_coll() == 0.0);
      CHECK(c.medium.length_cm == 1.0);
      CHECK(c.medium.coupling_constant(1, 2) == 12.0);
      CHECK(c.medium.coupling_constant(2, 3) == 16.0);
      CHECK(c.medium.coupling_constant(3, 4) == 0.2);
      CHECK(c.drives.delta1 == 0.0);
      CHECK(c.drives.delta == 0.0);
    }
  }

  SUBCASE("fig2a and fig2b") {
    const auto a = preset("fig2a");
    CHECK(a.kind == SweepKind::Spectrum);
    CHECK(a.drives.coupling == Complex(10.0));
    CHECK(a.drives.control == Complex(0.0));
    CHECK(a.drives.probe == Complex(1.0));
    REQUIRE(a.grid);
    CHECK(a.grid->min == -30.0);
    CHECK(a.grid->max == 30.0);
    CHECK(a.grid->count == 601);
    CHECK(preset("fig2b").drives.control == Complex(10.0));
  }

  SUBCASE("fig3") {
    const auto c = preset("fig3");
    CHECK(c.kind == SweepKind::Switch);
    CHECK(c.drives.probe == Complex(0.01));
    CHECK(c.drives.delta2 == 0.0);
  }

  SUBCASE("fig4") {
    for (const char* name : {"fig4a", "fig4b"}) {
      const auto c = preset(name);
      CHECK(c.kind == SweepKind::Pulse);
      REQUIRE(c.pulse);
      CHECK(c.pulse->sigma_rad_per_s == doctest::Approx(kTwoPi * 5e3));
      CHECK(c.pulse->peak_rabi == 0.1);
      CHECK(c.drives.coupling == Complex(10.0));
      CHECK(c.gamma_rad_per_s == doctest::Approx(kTwoPi * 9e6));
    }
    CHECK(preset("fig4a").drives.control == Complex(0.0));
    CHECK(preset("fig4b").drives.control == Complex(10.0));
  }

  SUBCASE("fig6") {
    for (const char* name : {"fig6a", "fig6b"}) {
      const auto c = preset(name);
      CHECK(c.kind == SweepKind::Cavity);
      REQUIRE(c.cavity);
      CHECK(c.cavity->C == 400.0);
      CHECK(c.cavity->delta0 == 0.0);
      CHECK(c.drives.delta2 == 0.0);
    }
    CHECK(preset("fig6a").drives.control == Complex(0.0));
    CHECK(preset("fig6b").drives.control == Complex(5.0));
  }

  SUBCASE("fig8") {
    const auto a = preset("fig8a");
    CHECK(a.kind == SweepKind::SaRsa);
    CHECK(a.system.scheme() == Scheme::Ypsilon4);
    CHECK(a.system.decay(1, 2) == doctest::Approx(kTwoPi * 5));
    CHECK(a.system.decay(2, 3) == doctest::Approx(kTwoPi * 11));
    CHECK(a.system.decay(2, 4) == doctest::Approx(kTwoPi * 0.97));
    CHECK(a.medium.coupling_constant(1, 2) == 88.0);
    CHECK(a.medium.coupling_constant(2, 3) == 1.5);
    CHECK(a.medium.coupling_constant(2, 4) == 8.8);
    CHECK(a.gamma_rad_per_s == 1e6);
    CHECK(a.medium.ytype_control_source == ControlSource::Rho43);

    CHECK(preset("fig8a-text").system.decay(2, 4) == doctest::Approx(kTwoPi * 0.67));

    const auto b = preset("fig8b");
    CHECK(b.system.decay(1, 2) == doctest::Approx(kTwoPi * 6));
    CHECK(b.system.decay(2, 3) == doctest::Approx(kTwoPi * 0.97));
    CHECK(b.system.decay(2, 4) == doctest::Approx(kTwoPi * 1.1));
    CHECK(b.medium.coupling_constant(1, 2) == 87.0);
    CHECK(b.medium.coupling_constant(2, 3) == 14.0);
    CHECK(b.medium.coupling_constant(2, 4) == 10.0);
  }

  CHECK_THROWS_AS(preset("fig5"), ConfigError);
}

TEST_CASE("parsing fills and echoes every default") {
  const auto c = parse_config(minimal_spectrum());
  CHECK(c.drives.probe == Complex(1.0, 0.5));
  CHECK(c.medium.length_cm == 1.0);
  CHECK(c.medium.steps == 2000);
  CHECK(c.medium.coupling_constant(1, 2) == 0.0);
  REQUIRE(c.grid);
  CHECK(*c.grid == *default_grid(SweepKind::Spectrum));
  CHECK(c.output == "out");

  const auto echoed = nlohmann::json::parse(emit_config(c));
  CHECK(echoed["medium"]["steps"] == 2000);
  CHECK(echoed["medium"]["drive_propagation"] == "propagated");
  CHECK(echoed["medium"]["eta"].size() == 3);
  CHECK(echoed["grid"]["count"] == 601);
  CHECK(echoed["drives"]["probe"] == nlohmann::json::array({1.0, 0.5}));
  CHECK(echoed["system"]["gamma_coll"] == 0.0);
  CHECK(parse_config(emit_config(c)) == c);
}

TEST_CASE("syntax errors report line and column") {
  const std::string text = "{\n  \"units\": \"gamma\",\n  \"kind\": spectrum\n}";
  try {
    parse_config(text);
    FAIL("expected a syntax error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 11);
    CHECK(std::string(e.what()).find("line 3, column 11") != std::string::npos);
  }
  try {
    parse_config("{\"units\": \"gamma\",}");
    FAIL("expected a syntax error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() > 0);
  }
}

TEST_CASE("empty documents list the required keys") {
  for (const char* text : {"{}", "  { }  "}) {
    const auto msg = parse_error(text);
    for (const char* key : {"units", "kind", "system", "drives"}) {
      CHECK(msg.find(key) != std::string::npos);
    }
  }
  CHECK(parse_error("").find("syntax error") != std::string::npos);
  CHECK(parse_error("[]").find("document") != std::string::npos);
}

TEST_CASE("validation errors name the field") {
  struct Case {
    const char* preset;
    std::function<void(nlohmann::json&)> edit;
    const char* field;
  };
  const Case cases[] = {
      {"fig2a", [](auto& j) { j["units"] = "MHz"; }, "units"},
      {"fig2a", [](auto& j) { j.erase("units"); }, "missing required keys: units"},
      {"fig2a", [](auto& j) { j["kind"] = "sweep"; }, "kind"},
      {"fig2a", [](auto& j) { j["colour"] = 1; }, "colour"},
      {"fig2a", [](auto& j) { j["medium"]["stepz"] = 1; }, "medium.stepz"},
      {"fig2a", [](auto& j) { j["system"]["decays"]["24"] = 1; }, "system.decays.24"},
      {"fig2a", [](auto& j) { j["system"]["decays"].erase("34"); }, "system.decays.34"},
      {"fig2a", [](auto& j) { j["system"]["decays"]["12"] = -1; }, "system.decays.12"},
      {"fig2a", [](auto& j) { j["system"]["scheme"] = "lambda"; }, "system.scheme"},
      {"fig2a", [](auto& j) { j["medium"]["steps"] = 20; }, "medium.steps"},
      {"fig2a", [](auto& j) { j["medium"]["steps"] = 200.5; }, "medium.steps"},
      {"fig2a", [](auto& j) { j["medium"]["length_cm"] = 0; }, "medium.length_cm"},
      {"fig2a", [](auto& j) { j["medium"]["eta"]["23"] = -1; }, "medium.eta.23"},
      {"fig2a", [](auto& j) { j["medium"]["drive_propagation"] = "fixed"; }, "medium.drive_propagation"},
      {"fig2a", [](auto& j) { j.erase("medium"); }, "medium"},
      {"fig2a", [](auto& j) { j["drives"]["probe"] = "one"; }, "drives.probe"},
      {"fig2a", [](auto& j) { j["drives"]["probe"] = nlohmann::json::array({1, 2, 3}); }, "drives.probe"},
      {"fig2a", [](auto& j) { j["grid"]["spacing"] = "cubic"; }, "grid.spacing"},
      {"fig2a", [](auto& j) { j["grid"]["max"] = -40; }, "grid.max"},
      {"fig2a", [](auto& j) { j["cavity"] = {{"C", 400}}; }, "cavity"},
      {"fig6a", [](auto& j) { j.erase("cavity"); }, "cavity"},
      {"fig6a", [](auto& j) { j["cavity"]["C"] = -1; }, "cavity.C"},
      {"fig6a", [](auto& j) { j["cavity"]["C"] = 1; }, "cavity"},
      {"fig6a", [](auto& j) { j["grid"]["min"] = 0; }, "grid.min"},
      {"fig4a", [](auto& j) { j["pulse"]["points"] = 4095; }, "pulse.points"},
      {"fig4a", [](auto& j) { j["pulse"].erase("sigma_rad_per_s"); }, "pulse.sigma_rad_per_s"},
      {"fig4a", [](auto& j) { j["system"]["gamma_rad_per_s"] = 0; }, "system.gamma_rad_per_s"},
      {"fig4a", [](auto& j) { j["grid"] = {{"min", 0}}; }, "grid"},
      {"fig8a", [](auto& j) { j["drives"]["coupling"] = 1; }, "drives"},
      {"fig8a", [](auto& j) { j["system"]["decays"]["34"] = 1; }, "system.decays.34"},
      {"fig8a", [](auto& j) { j["medium"]["ytype_control_source"] = "rho41"; }, "medium.ytype_control_source"},
  };
  for (const auto& c : cases) {
    const auto text = edited(c.preset, c.edit);
    CAPTURE(text);
    const auto msg = parse_error(text);
    REQUIRE_FALSE(msg.empty());
    CHECK(msg.rfind(c.field, 0) == 0);
  }
}

TEST_CASE("retargeting swaps grids and drops unused blocks") {
  const auto c = retarget(preset("fig6a"), SweepKind::Spectrum);
  CHECK(c.kind == SweepKind::Spectrum);
  CHECK_FALSE(c.cavity);
  CHECK(*c.grid == *default_grid(SweepKind::Spectrum));
  validate(c);

  const auto s = retarget(preset("fig2a"), SweepKind::SteadyState);
  CHECK_FALSE(s.grid);
  validate(s);
  CHECK(parse_config(emit_config(s)) == s);

  CHECK_THROWS_AS(validate(retarget(preset("fig2a"), SweepKind::Cavity)), ConfigError);
  CHECK_THROWS_AS(validate(retarget(preset("fig2a"), SweepKind::SaRsa)), ConfigError);
  CHECK(retarget(preset("fig2b"), SweepKind::Spectrum) == preset("fig2b"));
}

TEST_CASE("grid values follow the spacing") {
  const GridSpec lin{-1.0, 1.0, 5, GridSpacing::Linear};
  const auto v = lin.values();
  REQUIRE(v.size() == 5);
  CHECK(v[2] == doctest::Approx(0.0));
  const GridSpec lg{1e-2, 1e2, 5, GridSpacing::Log};
  const auto w = lg.values();
  REQUIRE(w.size() == 5);
  CHECK(w[1] == doctest::Approx(0.1));
  CHECK(w[4] == doctest::Approx(100.0));
}
