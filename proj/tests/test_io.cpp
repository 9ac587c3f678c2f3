#include <doctest.h>

#include <nvb/experiment.hpp>
#include <nvb/grading.hpp>
#include <nvb/mesh_io.hpp>
#include <nvb/presets.hpp>
#include <nvb/singular.hpp>

#include <cstdlib>
#include <numbers>
#include <sstream>

using namespace nvb;
using nlohmann::json;

namespace {

Mesh graded_lshape()
{
    Mesh m = initial_mesh(DomainPreset::l_shape);
    std::vector<SingularTerm> terms{preset_poisson_corner(1.5 * std::numbers::pi)};
    grade(m, make_grading_params(m, 0.2, 1, terms));
    return m;
}

json lshape_config()
{
    return json::parse(R"({
        "domain": {"preset": "l_shape"},
        "terms": [{"center": [0, 0], "angular": {"kind": "sin", "omega": 4.71238898038469}}],
        "p": 1,
        "delta": 0.2
    })");
}

} // namespace

TEST_CASE("mesh files round-trip byte for byte")
{
    const Mesh m = graded_lshape();
    std::ostringstream first;
    write_mesh(first, m);
    std::istringstream in(first.str());
    const Mesh back = read_mesh(in);
    std::ostringstream second;
    write_mesh(second, back);
    CHECK(first.str() == second.str());
    CHECK(back.leaf_count() == m.leaf_count());
    CHECK(back.is_conforming());

    // the reloaded forest keeps refining consistently
    Mesh again = back;
    again.refine({again.leaves().front()});
    again.complete();
    CHECK(again.is_conforming());
}

TEST_CASE("truncated and malformed mesh files name the line")
{
    std::ostringstream out;
    write_mesh(out, initial_mesh(DomainPreset::square));
    const std::string text = out.str();

    std::istringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
    try {
        read_mesh(truncated);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
        CHECK(std::string(e.what()).find("line 7") != std::string::npos);
    }

    std::string bad = text;
    bad.replace(bad.find('\n') + 1, 1, "x");
    std::istringstream garbage(bad);
    CHECK_THROWS_AS(read_mesh(garbage), ParseError);

    std::istringstream header("nvb-mesh 2 0 0\n");
    CHECK_THROWS_AS(read_mesh(header), ParseError);
}

TEST_CASE("vtk output describes the leaves")
{
    const Mesh m = initial_mesh(DomainPreset::l_shape);
    std::ostringstream out;
    const std::vector<double> values(m.leaf_count(), 1.5);
    write_vtk(out, m, values, "error");
    const std::string s = out.str();
    CHECK(s.rfind("# vtk DataFile Version", 0) == 0);
    CHECK(s.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(s.find("CELLS 6 24") != std::string::npos);
    CHECK(s.find("SCALARS error double") != std::string::npos);
}

TEST_CASE("configuration parsing")
{
    const ExperimentConfig cfg = parse_config(lshape_config());
    CHECK(cfg.mesh.leaf_count() == 6);
    CHECK(cfg.terms.size() == 1);
    CHECK(cfg.terms.front().exponent() == doctest::Approx(2.0 / 3.0));
    CHECK(cfg.deltas == std::vector<double>{0.2});
    CHECK(cfg.slope_threshold == doctest::Approx(-0.45));

    json too_big = lshape_config();
    too_big["delta"] = 1.0;
    CHECK_THROWS_AS(parse_config(too_big), ConfigError);

    json low_order = lshape_config();
    low_order["p"] = 2;
    low_order["terms"][0]["cutoff"] = {{"kind", "smooth_radial"}, {"r1", 0.2}, {"r2", 0.5}, {"order", 2}};
    CHECK_THROWS_AS(parse_config(low_order), ConfigError);
    low_order["terms"][0]["cutoff"]["order"] = 3;
    CHECK_NOTHROW(parse_config(low_order));

    json unknown = lshape_config();
    unknown["terms"][0]["angular"]["kind"] = "bessel";
    CHECK_THROWS_AS(parse_config(unknown), ConfigError);

    json kellogg = lshape_config();
    kellogg["terms"][0]["angular"] = {{"kind", "kellogg"}, {"gamma", 0.1}};
    CHECK(parse_config(kellogg).terms.front().exponent() == doctest::Approx(0.1));

    json inline_mesh = lshape_config();
    inline_mesh["domain"] = json::parse(R"({"vertices": [[0,0],[1,0],[1,1],[0,1]], "triangles": [[2,0,1],[0,2,3]]})");
    CHECK(parse_config(inline_mesh).mesh.leaf_count() == 2);

    ::setenv("NVB_OUTPUT_DIR", "/tmp/nvb-override", 1);
    CHECK(parse_config(lshape_config()).output_dir == "/tmp/nvb-override");
    ::unsetenv("NVB_OUTPUT_DIR");
}

TEST_CASE("grading parameters survive a JSON round trip")
{
    const Mesh m = initial_mesh(DomainPreset::l_shape);
    std::vector<SingularTerm> terms{preset_poisson_corner(1.5 * std::numbers::pi)};
    const GradingParams params = make_grading_params(m, 0.1, 2, terms);
    const GradingParams back = params_from_json(params_to_json(params));
    CHECK(back.K == params.K);
    CHECK(back.gamma == params.gamma);
    CHECK(back.singular_points == params.singular_points);

    json tampered = params_to_json(params);
    tampered["K"] = params.K + 1;
    CHECK_THROWS_AS(params_from_json(tampered), ConfigError);
}
