#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "localgain/errors.hpp"
#include "localgain/study.hpp"

using namespace localgain;

namespace {

const std::string kData = LOCALGAIN_TEST_DATA;

// The case-study parameter set: two GFMs and two GFLs with both PLL gain pairs.
const char* kCaseStudyConfig = R"({
  "devices": [
    {"name": "g1", "type": "gfm", "m": 2.0, "d": 8.0},
    {"name": "g2", "type": "gfm", "m": 4.0, "d": 12.0},
    {"name": "f1", "type": "gfl", "H": 2.0, "D": 8.0, "Kp": 4.0, "Ki": 40.0},
    {"name": "f2", "type": "gfl", "H": 2.0, "D": 8.0, "Kp": 2.0, "Ki": 20.0, "V0": 1.0}
  ],
  "topology": {
    "interior": ["bus"],
    "lines": [
      {"from": "g1", "to": "bus", "l": 0.5},
      {"from": "g2", "to": "bus", "l": 0.5},
      {"from": "f1", "to": "bus", "l": 0.5},
      {"from": "f2", "to": "bus", "l": 0.5}
    ]
  },
  "domain": {"sigma": 0.35, "xi": 0.37, "eps1": 0.001, "eps2": 0.1, "eta1": 10, "eta2": 10}
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string report_without_timing(const StudyConfig& cfg, const RunReport& r) {
    std::ostringstream os;
    write_report(os, cfg, r);
    const std::string s = os.str();
    return s.substr(0, s.find("[timing]"));
}

}  // namespace

TEST_CASE("load_config") {
    SUBCASE("case-study configuration loads with defaults injected") {
        const auto cfg = parse_config(kCaseStudyConfig);
        CHECK(cfg.devices.size() == 4);
        CHECK(cfg.topology.device_count() == 4);
        CHECK(cfg.topology.omega0() == 1.0);
        CHECK(cfg.spacing == 0.01);
        CHECK(cfg.certify.margin_tol == 1e-6);
        CHECK(std::get<GflParams>(cfg.devices[2].model).V0 == 1.0);
        CHECK(cfg.domain.tan_gamma() == doctest::Approx(2.5109).epsilon(1e-4));
        const auto j = to_json(cfg);
        CHECK(j["devices"][2]["V0"] == 1.0);
        CHECK(j["domain"]["spacing"] == 0.01);
        CHECK(j["certify"]["margin_tol"] == 1e-6);
        CHECK(j["topology"]["omega0"] == 1.0);
    }
    SUBCASE("empty domain section takes the case-study values") {
        const auto cfg = parse_config(replace(kCaseStudyConfig, R"("domain": {"sigma": 0.35, "xi": 0.37, "eps1": 0.001, "eps2": 0.1, "eta1": 10, "eta2": 10})", R"("domain": {})"));
        CHECK(cfg.domain.sigma() == 0.35);
        CHECK(cfg.domain.xi() == 0.37);
        CHECK(cfg.domain.eps1() == 1e-3);
        CHECK(cfg.domain.eps2() == 0.1);
        CHECK(cfg.domain.eta1() == 10.0);
    }
    SUBCASE("negative damping is rejected with the field path") {
        const auto msg = error_of(replace(kCaseStudyConfig, R"("d": 8.0)", R"("d": -1.0)"));
        CHECK(msg.find("devices[0]") != std::string::npos);
        CHECK(msg.find("GfmParams.d must be > 0") != std::string::npos);
    }
    SUBCASE("syntax errors report line and column") {
        const auto msg = error_of("{\n  \"devices\": [\n    {\"name\": }\n");
        CHECK(msg.find("line 3") != std::string::npos);
    }
    SUBCASE("unknown fields are rejected") {
        const auto msg = error_of(replace(kCaseStudyConfig, R"("Kp": 4.0,)", R"("Kp": 4.0, "Kd": 1.0,)"));
        CHECK(msg.find("devices[2].Kd: unknown field") != std::string::npos);
        CHECK(error_of(replace(kCaseStudyConfig, R"("domain")", R"("bogus": 1, "domain")")).find("bogus") != std::string::npos);
    }
    SUBCASE("inconsistent device order between sections") {
        const auto text = replace(kCaseStudyConfig, R"("topology": {)",
                                  R"("topology": {"devices": [{"id": "g2", "role": "gfm"}, {"id": "g1", "role": "gfm"}, {"id": "f1", "role": "gfl"}, {"id": "f2", "role": "gfl"}],)");
        CHECK(error_of(text).find("does not match topology node") != std::string::npos);
    }
    SUBCASE("GFL listed before GFM") {
        const auto text = replace(kCaseStudyConfig, R"("topology": {)",
                                  R"("topology": {"devices": [{"id": "f1", "role": "gfl"}, {"id": "g1", "role": "gfm"}, {"id": "g2", "role": "gfm"}, {"id": "f2", "role": "gfl"}],)");
        CHECK(error_of(text).find("GFM nodes must precede GFL nodes") != std::string::npos);
    }
    SUBCASE("domain invariants") {
        CHECK(error_of(replace(kCaseStudyConfig, R"("xi": 0.37)", R"("xi": 1.2)")).find("domain.xi") != std::string::npos);
        CHECK(error_of(replace(kCaseStudyConfig, R"("eta1": 10)", R"("eta1": 0.5)")).find("domain") != std::string::npos);
    }
    SUBCASE("improper custom devices") {
        const auto text = replace(kCaseStudyConfig, R"({"name": "g2", "type": "gfm", "m": 4.0, "d": 12.0})",
                                  R"({"name": "g2", "type": "custom", "role": "gfm", "num": [1, 1], "den": [1, 1]})");
        CHECK(error_of(text).find("strictly proper") != std::string::npos);
    }
    SUBCASE("missing files") { CHECK_THROWS_AS(load_config(kData + "/does_not_exist.json"), ConfigError); }
    SUBCASE("digest ignores execution settings") {
        auto a = parse_config(kCaseStudyConfig);
        auto b = a;
        b.execution.workers = 7;
        b.execution.output = "elsewhere";
        CHECK(config_digest(a) == config_digest(b));
        const auto c = parse_config(replace(kCaseStudyConfig, R"("m": 2.0)", R"("m": 2.5)"));
        CHECK(config_digest(a) != config_digest(c));
    }
}

TEST_CASE("cmd_certify") {
    SUBCASE("passing pair") {
        const auto cfg = load_config(kData + "/two_gfm_pass.json");
        const auto r = cmd_certify(cfg);
        CHECK(r.exit_code == kExitOk);
        REQUIRE(r.margins.size() == 2);
        CHECK(r.margins[0].passed);
        REQUIRE(r.poles);
        CHECK(screen_poles(*r.poles, cfg.domain));
    }
    SUBCASE("weak damping fails with diagnostics") {
        const auto cfg = load_config(kData + "/two_gfm_fail.json");
        const auto r = cmd_certify(cfg);
        CHECK(r.exit_code == kExitCertificateFail);
        CHECK_FALSE(r.margins[0].nonvanishing);
        std::ostringstream os;
        write_report(os, cfg, r);
        CHECK(os.str().find("worst_point") != std::string::npos);
        CHECK(os.str().find("FAIL") != std::string::npos);
    }
    SUBCASE("single device has no coupling") {
        const auto r = cmd_certify(load_config(kData + "/single_gfm.json"));
        CHECK(r.exit_code == kExitOk);
        CHECK(r.margins[0].max_rhs == 0.0);
    }
    SUBCASE("case-study system") {
        const auto cfg = parse_config(kCaseStudyConfig);
        const auto r = cmd_certify(cfg);
        for (const auto& m : r.margins) CHECK(m.passed);
        CHECK(r.exit_code == kExitOk);
    }
    SUBCASE("the report embeds the effective configuration and is reproducible") {
        auto cfg = load_config(kData + "/two_gfm_pass.json");
        const auto first = report_without_timing(cfg, cmd_certify(cfg));
        CHECK(first.find("\"margin_tol\": 1e-06") != std::string::npos);
        CHECK(first.find("\"omega0\": 1.0") != std::string::npos);
        CHECK(first == report_without_timing(cfg, cmd_certify(cfg)));
    }
}

TEST_CASE("cmd_sweep") {
    auto cfg = load_config(kData + "/three_device_sweep.json");
    cfg.execution.workers = 1;
    const auto serial = cmd_sweep(cfg);
    CHECK(serial.exit_code == kExitOk);
    REQUIRE(serial.masks.size() == 3);
    std::size_t timed = 0;
    for (const auto& [phase, seconds] : serial.timings) timed += phase.rfind("sweep_device_", 0) == 0;
    CHECK(timed == 3);

    cfg.execution.workers = 2;
    const auto parallel = cmd_sweep(cfg);
    for (const auto& [i, mask] : serial.masks) {
        std::ostringstream a, b;
        write_mask_tsv(a, mask);
        write_mask_tsv(b, parallel.masks.at(i));
        CHECK(a.str() == b.str());
    }

    SUBCASE("flagged points are confirmed by the pole oracle") {
        // Devices other than the swept one stay at the configured (passing) values.
        auto        check_cfg = cfg;
        const auto  base = cmd_certify(check_cfg);
        REQUIRE(base.exit_code == kExitOk);
        const auto& mask = serial.masks.at(0);
        for (std::size_t k = 0; k < mask.flags.size(); k += 7) {
            if (!mask.flags[k]) continue;
            const auto p = mask.grid.point(k);
            check_cfg.devices[0].model = GfmParams{p[0], p[1]};
            const auto poles = cmd_poles(check_cfg);
            CHECK(poles.exit_code == kExitOk);
        }
    }
    SUBCASE("missing sweep section") {
        CHECK_THROWS_AS(cmd_sweep(load_config(kData + "/two_gfm_pass.json")), ConfigError);
    }
}

TEST_CASE("cmd_poles") {
    const auto pass = cmd_poles(load_config(kData + "/two_gfm_pass.json"));
    CHECK(pass.exit_code == kExitOk);
    CHECK(pass.poles->origin_pole_count == 1);
    const auto fail = cmd_poles(load_config(kData + "/two_gfm_fail.json"));
    CHECK(fail.exit_code == kExitCertificateFail);
}

TEST_CASE("cmd_simulate and output files") {
    const auto cfg = load_config(kData + "/two_gfm_pass.json");
    const auto r = cmd_simulate(cfg);
    CHECK(r.exit_code == kExitOk);
    REQUIRE(r.response);
    CHECK_FALSE(r.response->divergent);
    REQUIRE(r.settling.size() == 2);
    CHECK(r.settling[0].cycles <= 1.0);

    const auto dir = std::filesystem::temp_directory_path() / "localgain_study_test";
    std::filesystem::remove_all(dir);
    write_outputs(dir, cfg, r);
    CHECK(std::filesystem::exists(dir / "report.txt"));
    CHECK(std::filesystem::exists(dir / "response.tsv"));
    CHECK(std::filesystem::exists(dir / "poles.tsv"));
    std::ifstream     in(dir / "report.txt");
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str().find("[simulation]") != std::string::npos);
    CHECK(text.str().find("version = ") != std::string::npos);
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(cmd_simulate(load_config(kData + "/two_gfm_fail.json")), ConfigError);
}
