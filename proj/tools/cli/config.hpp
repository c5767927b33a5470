#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "pairdeg/pairing_model.hpp"

namespace pairdeg::cli {

/// Malformed or unknown configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AtlasBlock {
    double re_min = -0.3, re_max = 0.3;
    double im_min = -0.3, im_max = 0.3;
    int nx = 121, ny = 121;
};

struct SweepBlock {
    double gamma_min = -0.6, gamma_max = -0.4;
    int steps = 41;
    double merge_radius = 1e-4;
};

struct EncircleBlock {
    double center_re = 0.0;
    double center_im = -0.17677669529663687;
    double radius = 0.01;
    int loops = 1;
    /// restore_count searches up to this many turns.
    int max_loops = 4;
    int orientation = 1;
};

struct CutBlock {
    double re_min = -0.05, re_max = 0.05;
    double im = -0.17677669529663687;
    /// Even by default so the symmetric cut skips Re g = 0.
    int samples = 200;
    /// 1-based labels of the tracked pair.
    std::array<int, 2> pair{2, 3};
};

struct PrecisionBlock {
    double tau_c = 1e-6;
    double interpolation_radius = 0.5;
    /// 0 selects the library default (1e-6 and 1e-3 times the radius).
    double cluster_radius = 0.0;
    double candidate_radius = 0.0;
    int loop_steps = 256;
    int max_bisections = 12;
};

struct RunConfig {
    ModelSpec model = ModelSpec::three_level(-0.5);
    AtlasBlock atlas;
    SweepBlock sweep;
    EncircleBlock encircle;
    CutBlock cut;
    PrecisionBlock precision;
};

/// INI file with sections [model], [atlas], [sweep], [encircle], [cut],
/// [precision]. Missing keys keep their defaults; unknown sections or keys
/// throw ConfigError, as do malformed values or an invalid model.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

/// Every resolved key in fixed order, one "section.key=value" per line.
std::string canonical_text(const RunConfig& config);
/// FNV-1a 64 of canonical_text, 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace pairdeg::cli
