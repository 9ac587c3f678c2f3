// Experiment runner: grade, converge, kellogg, export, verify.

#include <nvb/error_analysis.hpp>
#include <nvb/experiment.hpp>
#include <nvb/grading.hpp>
#include <nvb/kellogg.hpp>
#include <nvb/mesh_io.hpp>
#include <nvb/singular.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nvb;

namespace {

constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return out;
}

void write_size_report(const fs::path& path, const SizeLemmaReport& report)
{
    std::ofstream out = open_output(path);
    out << "checked " << report.checked << "\nviolations " << report.violations.size() << '\n';
    if (!report.violations.empty()) {
        out << "element,level,area,bound,distance\n";
        char line[200];
        for (const SizeViolation& v : report.violations) {
            std::snprintf(line, sizeof line, "%zu,%d,%.17g,%.17g,%.17g\n", v.element, v.level, v.area, v.bound,
                          v.distance);
            out << line;
        }
    }
}

int cmd_grade(const std::string& config_path)
{
    ExperimentConfig cfg = load_config(config_path);
    if (cfg.deltas.size() != 1) {
        throw UsageError("grade needs exactly one delta, got " + std::to_string(cfg.deltas.size()));
    }
    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);

    Mesh mesh = cfg.mesh;
    const GradingParams params = make_grading_params(mesh, cfg.deltas.front(), cfg.p, cfg.terms, cfg.gamma_rule);
    ComplexityLedger ledger;
    ledger.initial_leaves = mesh.leaf_count();
    ledger.rows = first_loop(mesh, params);
    const FirstLoopReport first = verify_first_loop(mesh, ledger, params);
    if (cfg.mode == RefinementMode::graded) {
        for (const LedgerRow& r : second_loop(mesh, params)) {
            ledger.rows.push_back(r);
        }
    }

    {
        std::ofstream out = open_output(dir / "mesh.txt");
        write_mesh(out, mesh);
    }
    {
        std::ofstream out = open_output(dir / "mesh.vtk");
        write_vtk(out, mesh);
    }
    {
        std::ofstream out = open_output(dir / "ledger.csv");
        write_ledger_csv(out, ledger);
    }
    {
        std::ofstream out = open_output(dir / "params.json");
        out << params_to_json(params).dump(2) << '\n';
    }

    bool ok = mesh.is_conforming();
    std::printf("delta %.6g  p %d  gamma %.6g  K %d\n", params.delta, params.p, params.gamma, params.K);
    std::printf("leaves %zu (initial %zu)  conforming %s\n", mesh.leaf_count(), mesh.initial_count(),
                mesh.is_conforming() ? "yes" : "no");
    if (cfg.verify.first_loop) {
        std::printf("first loop: %zu refining iterations (bound %.3f), %zu marks (bound %.1f) %s\n",
                    first.refining_iterations, first.iteration_bound, first.total_marks, first.marks_bound,
                    first.passed ? "pass" : "FAIL");
        ok = ok && first.passed;
    }
    if (cfg.verify.size_lemma) {
        const SizeLemmaReport size = verify_size_lemma(mesh, params);
        const fs::path report_path = dir / "size_lemma.txt";
        write_size_report(report_path, size);
        std::printf("size lemma: %zu checks, %zu violations %s\n", size.checked, size.violations.size(),
                    size.passed() ? "pass" : "FAIL");
        if (!size.passed()) {
            std::fprintf(stderr, "size-lemma violations written to %s\n", report_path.string().c_str());
            ok = false;
        }
    }
    if (cfg.verify.marked_bound) {
        const MarkedBoundReport marked = verify_marked_bound(ledger, params);
        std::printf("marked bound: max c_l %.4g, (#T - #T0) delta^d %.4g\n", marked.max_constant,
                    marked.complexity_constant);
    }
    if (cfg.verify.bdd) {
        const BddReport bdd = bdd_ledger_check(ledger);
        std::printf("completion ratio: %zu added / %zu marked = %.4f\n", bdd.added, bdd.marks, bdd.constant);
    }
    return ok ? 0 : exit_failed;
}

int cmd_converge(const std::string& config_path)
{
    ExperimentConfig cfg = load_config(config_path);
    if (cfg.deltas.size() < 4) {
        throw UsageError("converge needs a sweep of at least four deltas, got " + std::to_string(cfg.deltas.size()));
    }
    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);

    SweepOptions options;
    options.mode = cfg.mode;
    options.gamma_rule = cfg.gamma_rule;
    options.quadrature = cfg.quadrature;
    options.negative_control = false;
    EquidistributionStats finest;
    if (!cfg.terms.empty()) {
        options.on_run = [&](const Mesh& mesh, const GradingParams& params, const ErrorReport& report) {
            ErrorReport copy = report;
            attach_rings(copy, ring_decomposition(mesh, cfg.terms.front().center(), params.K, params.d));
            finest = equidistribution_stats(copy);
        };
    }
    const SweepResult result = convergence_sweep(cfg.mesh, cfg.terms, cfg.regular_field(), cfg.p, cfg.deltas, options);

    {
        std::ofstream out = open_output(dir / "convergence.csv");
        write_sweep_csv(out, result);
    }
    if (!cfg.terms.empty()) {
        std::ofstream out = open_output(dir / "rings.csv");
        write_ring_stats_csv(out, finest);
    }

    bool ok = true;
    std::printf("%10s %10s %14s %10s\n", "delta", "#T-#T0", "H1 error", "slope");
    for (const SweepRow& r : result.rows) {
        std::printf("%10.5g %10zu %14.6e %10.4f\n", r.delta, r.cardinality, r.error_total, r.slope_running);
        if (cfg.verify.size_lemma && r.size_violations > 0) {
            std::printf("  size lemma: %zu violations\n", r.size_violations);
            ok = false;
        }
        if (r.flagged_elements > 0) {
            std::printf("  %zu elements with unconverged singular quadrature\n", r.flagged_elements);
        }
    }
    const bool slope_ok = result.slope <= cfg.slope_threshold;
    std::printf("fitted slope %.4f (threshold %.4f, reference -p/d = %.4f) %s\n", result.slope, cfg.slope_threshold,
                -cfg.p / 2.0, slope_ok ? "pass" : "FAIL");
    return ok && slope_ok ? 0 : exit_failed;
}

int cmd_kellogg(double gamma)
{
    if (!(gamma > 0.0 && gamma < 2.0)) {
        throw UsageError("gamma must lie in (0, 2), got " + std::to_string(gamma));
    }
    try {
        const KelloggSolution s = kellogg_solve(gamma);
        const auto res = kellogg_residual(s.gamma, s.R, s.rho, s.sigma);
        json out = {{"gamma", s.gamma},
                    {"R", s.R},
                    {"rho", s.rho},
                    {"sigma", s.sigma},
                    {"iterations", s.iterations},
                    {"residuals", {res[0], res[1], res[2]}},
                    {"residual_trace", s.residual_trace},
                    {"term", kellogg_term_block(s)}};
        std::cout << out.dump(2) << '\n';
        return 0;
    } catch (const KelloggError& e) {
        std::fprintf(stderr, "kellogg: %s\nresidual trace:", e.what());
        for (double r : e.residual_trace()) {
            std::fprintf(stderr, " %.3e", r);
        }
        std::fprintf(stderr, "\n");
        return exit_failed;
    }
}

int cmd_export(const std::string& mesh_path, const std::string& format, const std::string& output)
{
    if (format != "vtk" && format != "mesh") {
        throw UsageError("unknown export format '" + format + "' (expected vtk or mesh)");
    }
    const Mesh mesh = load_mesh(mesh_path);
    std::ofstream out = open_output(output);
    if (format == "vtk") {
        write_vtk(out, mesh);
    } else {
        write_mesh(out, mesh);
    }
    return 0;
}

int cmd_verify(const std::string& mesh_path, const std::string& params_path)
{
    const Mesh mesh = load_mesh(mesh_path);
    std::ifstream in(params_path);
    if (!in) {
        throw std::runtime_error("cannot open '" + params_path + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("parameter file is not valid JSON: " + std::string(e.what()));
    }
    const GradingParams params = params_from_json(doc);
    const bool conforming = mesh.is_conforming();
    const SizeLemmaReport size = verify_size_lemma(mesh, params);
    std::printf("leaves %zu  conforming %s\n", mesh.leaf_count(), conforming ? "yes" : "no");
    std::printf("size lemma: %zu checks, %zu violations %s\n", size.checked, size.violations.size(),
                size.passed() ? "pass" : "FAIL");
    for (std::size_t i = 0; i < size.violations.size() && i < 10; ++i) {
        const SizeViolation& v = size.violations[i];
        std::printf("  element %zu level %d: area %.6g > %.6g (r_T %.6g)\n", v.element, v.level, v.area, v.bound,
                    v.distance);
    }
    return conforming && size.passed() ? 0 : exit_failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Graded newest-vertex-bisection meshes for corner and interface singularities"};
    app.require_subcommand(1);

    std::string config;
    auto* grade = app.add_subcommand("grade", "grade a mesh for one delta; writes mesh, VTK, ledger and lemma report");
    grade->add_option("config", config, "experiment JSON")->required();
    auto* converge = app.add_subcommand("converge", "run a delta sweep and fit the convergence rate");
    converge->add_option("config", config, "experiment JSON")->required();

    double gamma = 0.0;
    auto* kellogg = app.add_subcommand("kellogg", "solve for the interface parameters (R, rho, sigma)");
    kellogg->add_option("gamma", gamma, "singular exponent in (0, 2)")->required();

    std::string mesh_path;
    std::string format = "vtk";
    std::string output;
    auto* exporter = app.add_subcommand("export", "convert a saved mesh");
    exporter->add_option("mesh", mesh_path, "mesh file")->required();
    exporter->add_option("-f,--format", format, "vtk or mesh");
    exporter->add_option("-o,--output", output, "output file")->required();

    std::string params_path;
    auto* verify = app.add_subcommand("verify", "re-run the lemma verifiers on a saved mesh");
    verify->add_option("mesh", mesh_path, "mesh file")->required();
    verify->add_option("params", params_path, "params.json written by grade")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (grade->parsed()) {
            return cmd_grade(config);
        }
        if (converge->parsed()) {
            return cmd_converge(config);
        }
        if (kellogg->parsed()) {
            return cmd_kellogg(gamma);
        }
        if (exporter->parsed()) {
            return cmd_export(mesh_path, format, output);
        }
        return cmd_verify(mesh_path, params_path);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return exit_usage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration rejected: %s\n", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_failed;
    }
}
