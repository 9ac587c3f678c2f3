#include <nvb/experiment.hpp>

#include <nvb/kellogg.hpp>
#include <nvb/mesh_io.hpp>
#include <nvb/presets.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace nvb {

using nlohmann::json;

namespace {

Point parse_point(const json& j, const char* what)
{
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(std::string(what) + " must be a two-element array");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Mesh parse_domain(const json& j, const std::string& base_dir)
{
    if (!j.is_object()) {
        throw ConfigError("domain must be an object");
    }
    if (j.contains("preset")) {
        return initial_mesh(parse_domain_preset(j["preset"].get<std::string>()));
    }
    if (j.contains("mesh")) {
        std::filesystem::path path = j["mesh"].get<std::string>();
        if (path.is_relative()) {
            path = std::filesystem::path(base_dir) / path;
        }
        return load_mesh(path.string());
    }
    if (j.contains("vertices") && j.contains("triangles")) {
        std::vector<Point> vertices;
        for (const json& v : j["vertices"]) {
            vertices.push_back(parse_point(v, "vertex"));
        }
        std::vector<std::array<Index, 3>> triangles;
        for (const json& t : j["triangles"]) {
            if (!t.is_array() || t.size() != 3) {
                throw ConfigError("triangle must list three vertex indices");
            }
            triangles.push_back({t[0].get<Index>(), t[1].get<Index>(), t[2].get<Index>()});
        }
        return Mesh::from_initial(std::move(vertices), triangles);
    }
    throw ConfigError("domain needs one of 'preset', 'mesh' or 'vertices' + 'triangles'");
}

Cutoff parse_cutoff(const json& j, int p)
{
    const std::string kind = j.value("kind", "one");
    if (kind == "one") {
        return {};
    }
    if (kind == "smooth_radial") {
        const int order = j.value("order", p + 1);
        if (order < p + 1) {
            throw ConfigError("cutoff order m = " + std::to_string(order) + " must be at least p + 1 = " +
                              std::to_string(p + 1));
        }
        return Cutoff::smooth_radial(j.at("r1").get<double>(), j.at("r2").get<double>(), order);
    }
    throw ConfigError("unknown cutoff kind '" + kind + "'");
}

QuadratureOptions parse_quadrature(const json& j)
{
    QuadratureOptions q;
    q.standard_degree = j.value("degree", q.standard_degree);
    q.near_levels = j.value("near_levels", q.near_levels);
    q.radial_points = j.value("radial_points", q.radial_points);
    q.angular_points = j.value("angular_points", q.angular_points);
    q.initial_levels = j.value("initial_levels", q.initial_levels);
    q.max_levels = j.value("max_levels", q.max_levels);
    q.relative_tolerance = j.value("tolerance", q.relative_tolerance);
    if (q.initial_levels < 1 || q.max_levels < q.initial_levels || q.radial_points < 1 || q.angular_points < 1 ||
        !(q.relative_tolerance > 0.0)) {
        throw ConfigError("invalid quadrature options");
    }
    return q;
}

} // namespace

SingularTerm parse_term(const json& block, int p)
{
    if (!block.is_object()) {
        throw ConfigError("singular term must be an object");
    }
    const Point center = block.contains("center") ? parse_point(block["center"], "center") : Point{0.0, 0.0};
    const Point reference = block.contains("reference") ? parse_point(block["reference"], "reference") : Point{1.0, 0.0};
    const double c = block.value("c", 1.0);
    const int k = block.value("k", 0);
    const Cutoff cutoff = parse_cutoff(block.value("cutoff", json::object()), p);

    const json& angular = block.at("angular");
    const std::string kind = angular.value("kind", "");
    if (kind == "sin") {
        const double omega = angular.at("omega").get<double>();
        const double gamma = block.value("gamma", std::numbers::pi / omega);
        return SingularTerm(c, k, gamma, center, AngularFunction::poisson_corner(omega), cutoff, reference);
    }
    if (kind == "kellogg") {
        const KelloggSolution s = kellogg_solve(angular.at("gamma").get<double>());
        return SingularTerm(c, k, block.value("gamma", s.gamma), center, AngularFunction::kellogg(s), cutoff, reference);
    }
    if (kind == "piecewise") {
        std::vector<SinePiece> pieces;
        for (const json& row : angular.at("pieces")) {
            if (!row.is_array() || row.size() != 6) {
                throw ConfigError("piecewise angular entries are [start, end, amplitude, frequency, phase, offset]");
            }
            pieces.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(), row[3].get<double>(),
                              row[4].get<double>(), row[5].get<double>()});
        }
        if (!block.contains("gamma")) {
            throw ConfigError("piecewise angular terms need an explicit gamma");
        }
        return SingularTerm(c, k, block["gamma"].get<double>(), center, AngularFunction(std::move(pieces)), cutoff,
                            reference);
    }
    throw ConfigError("unknown angular kind '" + kind + "'");
}

ExperimentConfig parse_config(const json& doc, const std::string& base_dir)
{
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    ExperimentConfig cfg;
    try {
        cfg.p = doc.value("p", 1);
        if (cfg.p < 1) {
            throw ConfigError("p must be at least 1");
        }
        cfg.mesh = parse_domain(doc.at("domain"), base_dir);
        for (const json& t : doc.value("terms", json::array())) {
            cfg.terms.push_back(parse_term(t, cfg.p));
        }
        cfg.u0 = parse_regular_preset(doc.value("u0", "zero"));

        if (doc.contains("deltas")) {
            cfg.deltas = doc["deltas"].get<std::vector<double>>();
        }
        if (doc.contains("delta")) {
            cfg.deltas.insert(cfg.deltas.begin(), doc["delta"].get<double>());
        }
        for (double d : cfg.deltas) {
            if (!(d > 0.0 && d < 1.0)) {
                throw ConfigError("delta = " + std::to_string(d) + " must lie in (0, 1) so that K >= 0 exists");
            }
        }

        const std::string mode = doc.value("mode", "graded");
        if (mode != "graded" && mode != "uniform") {
            throw ConfigError("mode must be 'graded' or 'uniform'");
        }
        cfg.mode = mode == "graded" ? RefinementMode::graded : RefinementMode::uniform;

        const std::string rule = doc.value("gamma_rule", "half_min");
        if (rule != "half_min" && rule != "min") {
            throw ConfigError("gamma_rule must be 'half_min' or 'min'");
        }
        cfg.gamma_rule = rule == "min" ? GammaRule::min : GammaRule::half_min;
        cfg.slope_threshold = doc.value("slope_threshold", -0.45 * cfg.p);
        cfg.output_dir = doc.value("output_dir", cfg.output_dir);
        cfg.quadrature = parse_quadrature(doc.value("quadrature", json::object()));

        const json v = doc.value("verify", json::object());
        cfg.verify.size_lemma = v.value("size_lemma", true);
        cfg.verify.first_loop = v.value("first_loop", true);
        cfg.verify.marked_bound = v.value("marked_bound", true);
        cfg.verify.bdd = v.value("bdd", true);

        // surfaces bad centers, log powers under the "min" rule and coarse deltas up front
        for (double d : cfg.deltas) {
            make_grading_params(cfg.mesh, d, cfg.p, cfg.terms, cfg.gamma_rule);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    if (const char* dir = std::getenv("NVB_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        cfg.output_dir = dir;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration '" + path + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("configuration '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc, std::filesystem::path(path).parent_path().string());
}

FieldPtr ExperimentConfig::regular_field() const
{
    if (u0 == RegularPreset::zero) {
        return nullptr;
    }
    return std::make_shared<RegularField>(u0);
}

json kellogg_term_block(const KelloggSolution& solution)
{
    return {{"center", {0.0, 0.0}},
            {"reference", {1.0, 0.0}},
            {"c", 1.0},
            {"k", 0},
            {"gamma", solution.gamma},
            {"angular", {{"kind", "kellogg"}, {"gamma", solution.gamma}}},
            {"cutoff", {{"kind", "one"}}}};
}

json params_to_json(const GradingParams& params)
{
    json points = json::array();
    for (const Point& x : params.singular_points) {
        points.push_back({x.x, x.y});
    }
    return {{"delta", params.delta}, {"p", params.p},        {"d", params.d},
            {"gamma", params.gamma}, {"K", params.K}, {"singular_points", points}};
}

GradingParams params_from_json(const json& doc)
{
    try {
        std::vector<Point> points;
        for (const json& x : doc.value("singular_points", json::array())) {
            points.push_back(parse_point(x, "singular point"));
        }
        GradingParams params = GradingParams::make(doc.at("delta").get<double>(), doc.at("p").get<int>(),
                                                   doc.at("gamma").get<double>(), std::move(points), doc.value("d", 2));
        if (doc.contains("K") && doc["K"].get<int>() != params.K) {
            throw ConfigError("stored K does not match delta, gamma and p");
        }
        return params;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed parameter file: ") + e.what());
    }
}

} // namespace nvb
