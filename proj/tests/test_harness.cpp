#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "opspread/harness.hpp"

using namespace opspread;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("opspread_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

ErrorKind kind_of(const json& doc) {
    try {
        parse_config(doc);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("config was accepted");
    return ErrorKind::OutOfRange;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK(kind_of(json::parse(R"({"run_kind":"simulate","lattice":{"q":2,"N":4,"typo":1}})")) ==
          ErrorKind::InvalidConfig);
    CHECK(kind_of(json::parse(R"({"run_kind":"simulate","extra":1,"lattice":{}})")) == ErrorKind::InvalidConfig);
    CHECK(kind_of(json::parse(R"({"run_kind":"teleport"})")) == ErrorKind::InvalidConfig);
    CHECK(kind_of(json::parse(R"({"run_kind":"simulate","lattice":{"q":1}})")) == ErrorKind::InvalidConfig);
    CHECK(kind_of(json::parse(R"({"run_kind":"simulate","lattice":{"scrambler_mode":"x"}})")) ==
          ErrorKind::InvalidConfig);
    CHECK(kind_of(json::parse(R"({"run_kind":"analytic"})")) == ErrorKind::InvalidConfig);
    CHECK(kind_of(json::parse(R"({"run_kind":"haar-avg","haar":{"moments":[{"name":"a","factors":[{"times":[1,1]}]}]}})")) ==
          ErrorKind::InvalidConfig);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"run_kind":"analytic","analytic":{"epsilons":[0.1]}})"),
                                 RunKind::Simulate),
                    Error);

    auto c = parse_config(json::parse(R"({"analytic":{"q":3,"epsilons":[0.1]}})"), RunKind::Analytic);
    CHECK(c.run_kind == RunKind::Analytic);
    CHECK(c.analytic->q == 3);
    auto round = parse_config(to_json(c));
    CHECK(config_hash(round) == config_hash(c));
    auto moved = c;
    moved.output_dir = "elsewhere";
    moved.threads = 7;
    CHECK(config_hash(moved) == config_hash(c));
    moved.seed = 99;
    CHECK(config_hash(moved) != config_hash(c));
}

TEST_CASE("CSV round trip is exact") {
    CsvTable t;
    t.header = {"a", "b", "c"};
    t.rows = {{0.1, 1.0 / 3, -2.5e-300}, {kPi, std::nextafter(1.0, 2.0), 12345678901234567.0}};
    CHECK(parse_csv(format_csv(t)) == t);
    auto dir = scratch("csv");
    std::filesystem::create_directories(dir);
    write_csv((dir / "t.csv").string(), t);
    CHECK(read_csv((dir / "t.csv").string()) == t);

    CsvTable n;
    n.header = {"v"};
    n.rows = {{std::numeric_limits<double>::quiet_NaN()}};
    CHECK(std::isnan(parse_csv(format_csv(n)).rows[0][0]));
}

TEST_CASE("plots: deterministic and guarded") {
    PlotData d;
    d.series["epsilon"] = {0.0, 0.4, 0.785};
    d.series["f_chain"] = {0.0, 0.01, 0.0};
    CHECK(emit_plot(d, PlotKind::FCurve) == emit_plot(d, PlotKind::FCurve));
    CHECK(emit_plot(d, PlotKind::FCurve).find("<svg") != std::string::npos);
    try {
        emit_plot(d, PlotKind::VelocityCorrections);
        FAIL("expected missing series");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingSeries);
    }
    CHECK_THROWS_AS(emit_plot(d, PlotKind::FrontHeat), Error);
    d.series["dv_F"] = {0.0, 0.01, 0.02};
    d.series["dv_S_printed"] = {0.1, 0.2, 0.3};
    CHECK(!emit_plot(d, PlotKind::VelocityCorrections).empty());
    d.grid = {{1, 0, 0}, {0.5, 0.5, 0}};
    CHECK(!emit_plot(d, PlotKind::FrontHeat).empty());
}

TEST_CASE("analytic run writes a seven-row grid") {
    auto dir = scratch("analytic");
    auto cfg = parse_config(json{{"run_kind", "analytic"},
                                 {"output_dir", dir.string()},
                                 {"analytic", {{"q", 4}, {"epsilons", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}}}}});
    auto rec = run(cfg);
    CHECK(rec.run_kind == "analytic");
    auto t = read_csv((dir / "hydro.csv").string());
    CHECK(t.header == kHydroColumns);
    REQUIRE(t.rows.size() == 7);
    for (const auto& r : t.rows) {
        auto p = coupling_functions(r[0]);
        CHECK(r[1] == 4);
        CHECK(std::abs(r[2] - p.g) < 1e-14);
        CHECK(std::abs(r.back() - (p.v0 + r[13] + r[15])) < 1e-12);
    }
    CHECK(std::filesystem::exists(dir / "f_curve.svg"));
    CHECK(std::filesystem::exists(dir / "velocity_corrections.svg"));
    CHECK(std::filesystem::exists(dir / "record.json"));
    auto rec_json = json::parse(slurp(dir / "record.json"));
    CHECK(rec_json["config_hash"] == config_hash(cfg));
}

TEST_CASE("simulate run is bit-identical across thread counts") {
    auto base = json{{"run_kind", "simulate"},
                     {"seed", 5},
                     {"lattice",
                      {{"q", 2},
                       {"N", 5},
                       {"epsilon", 0.6},
                       {"scrambler_mode", "fully-random"},
                       {"t_max", 5},
                       {"n_samples", 8}}}};
    auto a = base, b = base;
    auto da = scratch("sim1"), db = scratch("sim3");
    a["output_dir"] = da.string();
    a["threads"] = 1;
    b["output_dir"] = db.string();
    b["threads"] = 3;
    run(parse_config(a));
    run(parse_config(b));
    CHECK(slurp(da / "profile.csv") == slurp(db / "profile.csv"));
    CHECK(slurp(da / "summary.csv") == slurp(db / "summary.csv"));
    CHECK(slurp(da / "front_heat.svg") == slurp(db / "front_heat.svg"));
    auto p = read_csv((da / "profile.csv").string());
    CHECK(p.header == std::vector<std::string>{"t", "x", "rho_mean", "rho_stderr"});
    CHECK(p.rows.size() == 6 * 5);
}

TEST_CASE("memory-exact run records every identity") {
    MemoryConfig m;
    auto recs = memory_identity_checks(m, 3);
    CHECK(recs.size() >= 8);
    for (const auto& r : recs) {
        INFO(r.operation);
        CHECK(r.residual < 1e-8);
    }
}

TEST_CASE("haar-avg run emits predictions and sigmas") {
    auto dir = scratch("haar");
    auto doc = json::parse(R"({"run_kind":"haar-avg","seed":2,"haar":{"q":8,"n_samples":2000,
        "moments":[{"name":"pair","factors":[{"times":[1,2]},{"times":[1,2],"conjugate":true}]}],
        "otocs":[{"name":"trivial","s1":[0,0],"s1bar":[0,0],"s2":[0,0],"s2bar":[0,0]}]}})");
    doc["output_dir"] = dir.string();
    run(parse_config(doc));
    auto out = json::parse(slurp(dir / "haar.json"));
    REQUIRE(out.is_array());
    CHECK(out.size() == 2);
    for (const auto& c : out) {
        CHECK(c.contains("prediction"));
        CHECK(c.contains("sigmas"));
        CHECK(c.contains("mean_re"));
    }
}

TEST_CASE("budget guard propagates") {
    auto cfg = parse_config(json::parse(R"({"run_kind":"simulate","lattice":{"q":4,"N":30}})"));
    cfg.output_dir = scratch("budget").string();
    try {
        run(cfg);
        FAIL("expected budget guard");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BudgetExceeded);
    }
}
