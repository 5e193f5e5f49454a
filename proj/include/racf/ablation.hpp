#pragma once

#include "racf/eval.hpp"
#include "racf/synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace racf {

struct Variant {
    std::string name;
    bool rotation = false;
    bool ic = false;
    bool dc = false;
    bool fpe = false;

    RunConfig apply(RunConfig base) const;
};

/// baseline, D, DF, R, RF, RD, RDF, RIDF
const std::vector<Variant>& ablation_variants();

struct SuiteEntry {
    std::string scenario;
    std::uint64_t seed = 0;

    std::string name() const;  // e.g. "mixed-s3"
};

/// "rotation" and "illumination" use one seed each, "mixed" uses five; "all" is their union.
std::vector<SuiteEntry> ablation_suite(const std::string& suite, std::uint64_t base_seed = 1);

struct VariantResult {
    std::string variant;
    double mean_iou = 0.0;  // over every evaluated frame of the suite
    int failures = 0;
    int evaluated = 0;
    std::vector<double> sequence_iou;  // suite order
};

struct AblationOptions {
    std::string suite = "mixed";
    int frames = 60;
    std::uint64_t seed = 1;
    int reinit_gap = 5;
    int threads = 0;  // 0: RACF_THREADS or hardware concurrency
};

/// Runs every variant over the suite. Scenes are rendered in memory and, when
/// `frames_dir` is non-empty, written there unless already present. Variants
/// are evaluated in parallel; the result order is the fixed variant order.
std::vector<VariantResult> run_ablation(const RunConfig& base, const AblationOptions& opts,
                                        const std::filesystem::path& frames_dir = {});

/// Fixed-format comparison table, one row per variant.
std::string ablation_table(const std::vector<VariantResult>& results, const std::vector<SuiteEntry>& suite);

/// Thread count from RACF_THREADS, else the hardware concurrency (at least 1).
int default_threads();

}  // namespace racf
