#include "racf/ablation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace racf {

namespace fs = std::filesystem;

RunConfig Variant::apply(RunConfig base) const {
    base.rotation = rotation;
    base.ic = ic;
    base.dc = dc;
    base.fpe = fpe;
    return base;
}

const std::vector<Variant>& ablation_variants() {
    static const std::vector<Variant> v = {
        {"baseline", false, false, false, false}, {"D", false, false, true, false},
        {"DF", false, false, true, true},         {"R", true, false, false, false},
        {"RF", true, false, false, true},         {"RD", true, false, true, false},
        {"RDF", true, false, true, true},         {"RIDF", true, true, true, true},
    };
    return v;
}

std::string SuiteEntry::name() const { return scenario + "-s" + std::to_string(seed); }

std::vector<SuiteEntry> ablation_suite(const std::string& suite, std::uint64_t base_seed) {
    std::vector<SuiteEntry> out;
    auto add = [&](const std::string& scenario, int count) {
        for (int i = 0; i < count; ++i) out.push_back({scenario, base_seed + std::uint64_t(i)});
    };
    if (suite == "rotation" || suite == "all") add("rotation", 1);
    if (suite == "illumination" || suite == "all") add("illumination", 1);
    if (suite == "mixed" || suite == "all") add("mixed", 5);
    if (out.empty()) throw ContractError("unknown ablation suite: " + suite + " (rotation, illumination, mixed, all)");
    return out;
}

int default_threads() {
    if (const char* env = std::getenv("RACF_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1) return int(n);
    }
    return std::max(1, int(std::thread::hardware_concurrency()));
}

std::vector<VariantResult> run_ablation(const RunConfig& base, const AblationOptions& opts,
                                        const fs::path& frames_dir) {
    require(opts.frames >= 2, "ablation: need at least two frames");
    const std::vector<SuiteEntry> suite = ablation_suite(opts.suite, opts.seed);
    const auto& variants = ablation_variants();

    std::vector<RenderedSequence> scenes;
    for (const auto& e : suite) {
        const SceneSpec spec = make_scenario(e.scenario, opts.frames, e.seed);
        if (!frames_dir.empty() && !fs::exists(frames_dir / e.name() / "groundtruth.txt"))
            generate(spec, frames_dir / e.name());
        scenes.push_back(render(spec));
    }
    std::vector<Annotation> gts;
    for (const auto& s : scenes) gts.emplace_back(s.groundtruth.begin(), s.groundtruth.end());

    std::vector<VariantResult> results(variants.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t v; (v = next.fetch_add(1)) < variants.size();) {
            VariantResult r;
            r.variant = variants[v].name;
            double iou_sum = 0;
            for (std::size_t s = 0; s < scenes.size(); ++s) {
                Tracker tracker(variants[v].apply(base));
                const RunReport rep = run_with_resets(tracker, scenes[s].frames, gts[s], opts.reinit_gap);
                r.failures += rep.failures;
                r.evaluated += rep.evaluated;
                iou_sum += rep.mean_iou * rep.evaluated;
                r.sequence_iou.push_back(rep.mean_iou);
            }
            r.mean_iou = r.evaluated ? iou_sum / r.evaluated : 0.0;
            results[v] = std::move(r);
        }
    };
    const int threads = std::clamp(opts.threads > 0 ? opts.threads : default_threads(), 1, int(variants.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return results;
}

std::string ablation_table(const std::vector<VariantResult>& results, const std::vector<SuiteEntry>& suite) {
    std::ostringstream out;
    out << "variant,mean_iou,failures,evaluated";
    for (const auto& e : suite) out << ',' << e.name();
    out << '\n';
    char buf[32];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%.6f", r.mean_iou);
        out << r.variant << ',' << buf << ',' << r.failures << ',' << r.evaluated;
        for (double v : r.sequence_iou) {
            std::snprintf(buf, sizeof buf, "%.6f", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace racf
