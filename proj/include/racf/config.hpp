#pragma once

#include "racf/detect.hpp"
#include "racf/imaging.hpp"

#include <filesystem>
#include <string>

namespace racf {

/// Every tracker tunable. Serialized as `key=value` lines in a fixed order.
struct RunConfig {
    // illumination correction
    bool ic = true;
    double ic_amount = 0.8;
    double ic_sigma = 1.0;
    double ic_threshold = 0.5;
    // orientation search
    bool rotation = true;
    double rot_delta = 5.0;
    int rot_halfcount = 2;
    // false positive elimination
    bool fpe = true;
    double fpe_rho = 1.0;
    // displacement consistency
    bool dc = true;
    double omega_d = 0.9;
    double omega_a = 0.9;
    // scale search and sub-grid refinement
    int scales = 5;
    double scale_step = 1.01;
    int newton_iters = 5;
    // filter learning
    double learning_rate = 0.025;
    int memory_capacity = 30;
    int cell_size = 4;
    double sigma_factor = 1.0 / 16.0;
    double padding = 4.0;  // search-area / target-area
    double w_min = 0.1;
    double w_scale = 3.0;
    int reg_kernel = 5;
    int gs_sweeps_init = 30;
    int gs_sweeps = 4;
    double gs_tolerance = 1e-3;
    double low_confidence = kLowConfidenceScore;

    void validate() const;

    SearchConfig search() const;
    IcParams ic_params() const;
    double effective_omega_d() const { return dc ? omega_d : 1.0; }
    double effective_omega_a() const { return dc ? omega_a : 1.0; }

    /// Sets one field from its textual form; throws FormatError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
};

std::string emit_config(const RunConfig& cfg);
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace racf
