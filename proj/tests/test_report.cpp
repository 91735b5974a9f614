#include "einbulk/report.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace einbulk;
using json = nlohmann::ordered_json;

namespace {

json flat_manifest() {
    return json{{"version", "1"},
                {"manifold", "flat2"},
                {"lambda", 0.0},
                {"order", 4},
                {"tasks", json::array({"ricci", "embed-local"})}};
}

json circle_glue_manifest() {
    return json{{"version", "1"},
                {"manifold", "circle"},
                {"fiber", "interval"},
                {"lambda", 0.0},
                {"order", 4},
                {"cover", {{"seed", 2026}}},
                {"tasks", json::array({"glue"})}};
}

} // namespace

TEST_SUITE("report") {

TEST_CASE("flat manifest passes with exit 0") {
    RunResult r = run_manifest(flat_manifest());
    CHECK(r.exit_code == 0);
    CHECK(r.report["pass"].get<bool>());
    CHECK(r.report["tasks"]["ricci"]["pass"].get<bool>());
    CHECK(r.report["tasks"]["embed_local"]["pass"].get<bool>());
    // every numeric verdict carries its tolerance
    CHECK(r.report["tasks"]["ricci"].contains("tolerance"));
    CHECK(r.report["tasks"]["embed_local"].contains("tolerances"));
}

TEST_CASE("corrupted metric expression exits 2 with a parse position") {
    json m = flat_manifest();
    m["metric"] = json::array({json::array({"1/(x1", "0"}), json::array({"1/(x1", "1"})});
    RunResult r = run_manifest(m);
    CHECK(r.exit_code == 2);
    std::string what = r.report["error"]["what"].get<std::string>();
    CHECK(what.find("offset") != std::string::npos);
}

TEST_CASE("schema violations exit 2") {
    json bad = flat_manifest();
    bad["order"] = 1;
    CHECK(run_manifest(bad).exit_code == 2);

    json bad2 = flat_manifest();
    bad2["tasks"] = json::array({"warp"});
    CHECK(run_manifest(bad2).exit_code == 2);

    json bad3 = flat_manifest();
    bad3["manifold"] = json{{"dim", 2}};
    CHECK(run_manifest(bad3).exit_code == 2);
}

TEST_CASE("computation failures exit 1 and surface the module error") {
    // 2-dimensional Einstein factor with nonzero lambda
    json m = flat_manifest();
    m["manifold"] = "flat2";
    m["lambda"] = 1.0;
    m["tasks"] = json::array({"ricci"});
    RunResult r = run_manifest(m);
    CHECK(r.exit_code == 1);
    CHECK(r.report["error"]["code"].get<std::string>() == "DimensionTwoWithNonzeroLambda");
}

TEST_CASE("circle glue manifest reports M = 7, N = 8") {
    RunResult r = run_manifest(circle_glue_manifest());
    CHECK(r.exit_code == 0);
    const auto& glue = r.report["tasks"]["glue"];
    CHECK(glue["M"].get<long long>() == 7);
    CHECK(glue["N"].get<int>() == 8);
    CHECK(glue["solve_residual"].get<double>() <= 1e-8);
    CHECK(glue["assembled_residual_max"].get<double>() <= 1e-6);
    CHECK(glue["isometry_max_deviation"].get<double>() == 0.0);
    CHECK(glue["pass"].get<bool>());
}

TEST_CASE("reports are deterministic apart from the timestamp") {
    RunResult a = run_manifest(circle_glue_manifest());
    RunResult b = run_manifest(circle_glue_manifest());
    a.report["timestamp"] = "";
    b.report["timestamp"] = "";
    CHECK(a.report.dump() == b.report.dump());
}

TEST_CASE("verdict failure yields a nonzero exit") {
    // a round-sphere chart is not Ricci-flat: the ricci verdict must fail
    json m = json{{"version", "1"},
                  {"manifold",
                   {{"name", "sphere-chart"},
                    {"dim", 2},
                    {"charts", json::array({{{"center", {M_PI / 2, 0.0}}, {"half", {1.0, 1.0}}}})},
                    {"metric", json::array({json::array({"1", "0"}),
                                            json::array({"0", "sin(x1)^2"})})}}},
                  {"lambda", 0.0},
                  {"order", 4},
                  {"tasks", json::array({"ricci"})}};
    RunResult r = run_manifest(m);
    CHECK(r.exit_code == 1);
    CHECK_FALSE(r.report["tasks"]["ricci"]["pass"].get<bool>());
    CHECK(r.report["tasks"]["ricci"]["charts"][0]["scalar_curvature_at_center"].get<double>() ==
          doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("homotopy task") {
    json m = flat_manifest();
    m["tasks"] = json::array({"homotopy"});
    m["homotopy"] = json{{"base", "S2"}, {"fiber", "S1"}, {"max_level", 4}};
    RunResult r = run_manifest(m);
    CHECK(r.exit_code == 0);
    CHECK(r.report["tasks"]["homotopy"]["table"].size() == 4);
    CHECK(r.report["tasks"]["homotopy"]["table"][0]["pi_m_bulk"].get<std::string>() == "Z");
}

} // TEST_SUITE
