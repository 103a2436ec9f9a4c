#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include <json.hpp>

#include "tractscope/pipeline.hpp"
#include "tractscope/render.hpp"

using namespace tractscope;

TEST_CASE("ppm bytes: golden image for a constant positive field") {
    ScalarField f;
    f.window = Window{0, 1, 0, 1, 3, 2};
    f.values.assign(6, 1.0);
    f.mask.assign(6, 0);
    std::string bytes = render_ppm_bytes(f);
    std::string expect = "P6\n3 2\n255\n";
    expect.append(18, static_cast<char>(255));
    CHECK(bytes == expect);
}

TEST_CASE("ppm bytes: sign split with boundary marking, top row is y_max") {
    ScalarField f;
    f.window = Window{0, 2, 0, 1, 3, 2};
    // bottom row (j=0) negative, top row (j=1) positive
    f.values = {-1, -1, -1, 1, 1, 1};
    f.mask.assign(6, 0);
    std::string bytes = render_ppm_bytes(f);
    REQUIRE(bytes.size() == 11 + 18);
    // every pixel borders the sign change: all black
    for (size_t k = 11; k < bytes.size(); ++k) CHECK(bytes[k] == 0);

    // taller field: interior rows keep their shade
    ScalarField g;
    g.window = Window{0, 2, 0, 3, 2, 4};
    g.values = {-1, -1, -1, -1, 1, 1, 1, 1};
    g.mask.assign(8, 0);
    std::string b2 = render_ppm_bytes(g);
    size_t hdr = std::string("P6\n2 4\n255\n").size();
    // row 0 = j = 3 (positive interior): white
    CHECK(static_cast<unsigned char>(b2[hdr]) == 255);
    // row 3 = j = 0 (negative interior): dark gray
    CHECK(static_cast<unsigned char>(b2[hdr + 3 * 6]) == 64);
    // rows 1 and 2 straddle the crossing: black
    CHECK(static_cast<unsigned char>(b2[hdr + 6]) == 0);
    CHECK(static_cast<unsigned char>(b2[hdr + 2 * 6]) == 0);
}

TEST_CASE("analysis report: structure and frozen facts") {
    AnalyzeOptions opt;
    opt.expr_text = "2*exp(z^4)";
    opt.nx = opt.ny = 201;
    std::string text = run_analysis(opt);
    auto j = nlohmann::json::parse(text);
    CHECK(j["schema_version"] == "1.0");
    CHECK(j["expression"] == "2*exp(z^4)");
    CHECK(j["stats"]["tracts"] == 1);
    CHECK(j["stats"]["open_contours"] == 4);
    REQUIRE(j["tracts"].size() == 1);
    const auto& t = j["tracts"][0];
    CHECK(t["m"] == 4);
    CHECK(t["critical_count"] == 3);
    CHECK(t["label"] == "direct");
    CHECK(t["bound_ok"] == true);
    REQUIRE(t["channels"].size() == 4);
    for (const auto& ch : t["channels"]) {
        CHECK(ch["verdict"] == "contains_logarithmic_tract");
        CHECK(ch["omega_open_contours"] == 1);
    }
}

TEST_CASE("invalid expressions raise ParseError before any sampling") {
    AnalyzeOptions opt;
    opt.expr_text = "z^";
    CHECK_THROWS_AS(run_analysis(opt), ParseError);
}

TEST_CASE("reports are byte-identical across thread counts") {
    AnalyzeOptions opt;
    opt.expr_text = "exp(exp(z))";
    opt.x0 = -6; opt.x1 = 6; opt.y0 = -7; opt.y1 = 7;
    opt.nx = 201; opt.ny = 235;
    setenv("TRACTSCOPE_THREADS", "1", 1);
    std::string one = run_analysis(opt);
    std::string one_ppm = render_ppm_bytes(analysis_field(opt));
    setenv("TRACTSCOPE_THREADS", "4", 1);
    std::string four = run_analysis(opt);
    std::string four_ppm = render_ppm_bytes(analysis_field(opt));
    unsetenv("TRACTSCOPE_THREADS");
    CHECK(one == four);
    CHECK(one_ppm == four_ppm);
    // and against a repeat run with the same settings
    setenv("TRACTSCOPE_THREADS", "4", 1);
    CHECK(run_analysis(opt) == four);
    unsetenv("TRACTSCOPE_THREADS");
}
