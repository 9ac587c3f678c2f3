#pragma once

#include <nvb/error_analysis.hpp>
#include <nvb/field.hpp>
#include <nvb/grading.hpp>
#include <nvb/mesh.hpp>
#include <nvb/singular.hpp>

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvb {

class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct VerifierToggles
{
    bool size_lemma = true;
    bool first_loop = true;
    bool marked_bound = true;
    bool bdd = true;
};

/// One experiment, read from a single JSON document:
///
///   {
///     "domain": {"preset": "l_shape"} | {"mesh": "file"} | {"vertices": [[x,y],..], "triangles": [[a,b,c],..]},
///     "terms": [{"center": [0,0], "c": 1, "k": 0, "gamma": 0.667, "reference": [1,0],
///                "angular": {"kind": "sin", "omega": 4.712}
///                         | {"kind": "kellogg", "gamma": 0.1}
///                         | {"kind": "piecewise", "pieces": [[start,end,amp,freq,phase,offset], ..]},
///                "cutoff": {"kind": "one"} | {"kind": "smooth_radial", "r1": .., "r2": .., "order": m}}],
///     "u0": "sin_cos",
///     "p": 1,
///     "delta": 0.2 | "deltas": [0.4, 0.2, ...],
///     "mode": "graded" | "uniform",
///     "gamma_rule": "half_min" | "min",
///     "slope_threshold": -0.45,
///     "output_dir": "out",
///     "quadrature": {"degree": 0, "near_levels": 3, "initial_levels": 10, "max_levels": 40, "tolerance": 1e-8},
///     "verify": {"size_lemma": true, "first_loop": true, "marked_bound": true, "bdd": true}
///   }
///
/// "gamma" of a term defaults to pi/omega for "sin" and to the solved exponent
/// for "kellogg". The environment variable NVB_OUTPUT_DIR overrides output_dir.
struct ExperimentConfig
{
    Mesh mesh;
    std::vector<SingularTerm> terms;
    RegularPreset u0 = RegularPreset::zero;
    int p = 1;
    std::vector<double> deltas;
    RefinementMode mode = RefinementMode::graded;
    GammaRule gamma_rule = GammaRule::half_min;
    double slope_threshold = -0.45;
    std::string output_dir = "nvb-output";
    QuadratureOptions quadrature;
    VerifierToggles verify;

    FieldPtr regular_field() const;
};

/// Parses and validates a configuration. Relative mesh paths resolve against
/// `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Term parsed from a config block (see ExperimentConfig).
SingularTerm parse_term(const nlohmann::json& block, int p);

/// Config block describing a Kellogg term with the given solution.
nlohmann::json kellogg_term_block(const KelloggSolution& solution);

nlohmann::json params_to_json(const GradingParams& params);
GradingParams params_from_json(const nlohmann::json& doc);

} // namespace nvb
