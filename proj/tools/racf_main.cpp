#include "racf/ablation.hpp"
#include "racf/eval.hpp"
#include "racf/imaging.hpp"
#include "racf/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace racf;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMissingGroundTruth = 2;

struct Overrides {
    std::string config_path;
    std::optional<double> ic_amount, ic_sigma, ic_threshold, scale_step, rot_delta, fpe_rho, omega_d, omega_a;
    std::optional<int> scales, rot_halfcount;
    bool no_ic = false, no_fpe = false, no_rotation = false, no_dc = false;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
        app->add_option("--ic-amount", ic_amount, "unsharp-mask amount");
        app->add_option("--ic-sigma", ic_sigma, "unsharp-mask blur sigma");
        app->add_option("--ic-threshold", ic_threshold, "unsharp-mask threshold in [0,1]");
        app->add_option("--scales", scales, "number of scales S (odd)");
        app->add_option("--scale-step", scale_step, "scale step a");
        app->add_option("--rot-halfcount", rot_halfcount, "orientation half-count A");
        app->add_option("--rot-delta", rot_delta, "orientation step in degrees");
        app->add_option("--fpe-rho", fpe_rho, "FPE distance regularizer in cells");
        app->add_option("--omega-d", omega_d, "displacement-length weight");
        app->add_option("--omega-a", omega_a, "displacement-angle weight");
        app->add_flag("--no-ic", no_ic, "disable illumination correction");
        app->add_flag("--no-fpe", no_fpe, "disable false positive elimination");
        app->add_flag("--no-rotation", no_rotation, "disable the orientation search");
        app->add_flag("--no-dc", no_dc, "disable displacement consistency");
    }

    RunConfig resolve() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (ic_amount) cfg.ic_amount = *ic_amount;
        if (ic_sigma) cfg.ic_sigma = *ic_sigma;
        if (ic_threshold) cfg.ic_threshold = *ic_threshold;
        if (scales) cfg.scales = *scales;
        if (scale_step) cfg.scale_step = *scale_step;
        if (rot_halfcount) cfg.rot_halfcount = *rot_halfcount;
        if (rot_delta) cfg.rot_delta = *rot_delta;
        if (fpe_rho) cfg.fpe_rho = *fpe_rho;
        if (omega_d) cfg.omega_d = *omega_d;
        if (omega_a) cfg.omega_a = *omega_a;
        if (no_ic) cfg.ic = false;
        if (no_fpe) cfg.fpe = false;
        if (no_rotation) cfg.rotation = false;
        if (no_dc) cfg.dc = false;
        cfg.validate();
        return cfg;
    }
};

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

std::string frame_name(int frame, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%08d%s", frame, ext);
    return buf;
}

// Score maps are written min-max normalized so they are viewable.
void dump_scoremap(const Grid<double>& s, const fs::path& path) {
    if (s.size() == 0) return;
    Image img;
    img.pixels = s;
    save_pgm(contrast_stretch(img), path);
}

// Tracker wrapper that writes per-frame dumps as it goes.
class DumpingTracker final : public SequenceTracker {
public:
    DumpingTracker(RunConfig cfg, fs::path dir, bool filters, bool scoremaps)
        : inner_(std::move(cfg)), dir_(std::move(dir)), filters_(filters), scoremaps_(scoremaps) {
        if (filters_ || scoremaps_) fs::create_directories(dir_);
    }

    FrameRecord init(const Image& frame, const RotatedBox& box) override { return dump(inner_.init(frame, box)); }
    FrameRecord step(const Image& frame) override { return dump(inner_.step(frame)); }

private:
    FrameRecord dump(FrameRecord rec) {
        if (filters_) {
            std::ofstream out(dir_ / ("filter_" + frame_name(rec.frame, ".bin")), std::ios::binary);
            write_filter_dump(inner_.state().filter, out);
        }
        if (scoremaps_) dump_scoremap(rec.score_grid, dir_ / ("score_" + frame_name(rec.frame, ".pgm")));
        return rec;
    }

    Tracker inner_;
    fs::path dir_;
    bool filters_, scoremaps_;
};

struct Common {
    fs::path out_dir = "out";
    fs::path report_dir;

    fs::path reports() const { return report_dir.empty() ? out_dir / "reports" : report_dir; }
};

int cmd_track(const Overrides& ov, const Common& common, const fs::path& seq_dir, bool dump_filter,
              bool dump_scores) {
    const RunConfig cfg = ov.resolve();
    const Sequence seq = load_sequence(seq_dir);
    const std::vector<Image> frames = seq.load_frames();
    DumpingTracker tracker(cfg, common.out_dir / "dumps" / seq.name, dump_filter, dump_scores);
    const RunReport rep = run_sequence(tracker, frames, seq.groundtruth);
    std::vector<FrameRecord> records;
    for (const auto& f : rep.frames) records.push_back(f.record);
    write_text(common.reports() / (seq.name + "_track.csv"), track_csv(records));
    write_text(common.reports() / (seq.name + "_summary.txt"), report_summary(rep, seq.name));
    std::cout << report_summary(rep, seq.name);
    return 0;
}

int cmd_eval(const Overrides& ov, const Common& common, std::vector<fs::path> dirs, int reinit_gap) {
    const RunConfig cfg = ov.resolve();
    std::vector<Sequence> seqs;
    for (const auto& d : dirs) seqs.push_back(load_sequence(d));
    std::sort(seqs.begin(), seqs.end(), [](const Sequence& a, const Sequence& b) { return a.name < b.name; });

    std::ostringstream table;
    table << "sequence,frames,evaluated,mean_iou,failures,precision20,mean_fpe_score\n";
    double iou_sum = 0;
    int evaluated = 0, failures = 0;
    for (const auto& seq : seqs) {
        Tracker tracker(cfg);
        const RunReport rep = run_with_resets(tracker, seq.load_frames(), seq.groundtruth, reinit_gap);
        write_text(common.reports() / (seq.name + "_eval.csv"), report_csv(rep));
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%zu,%d,%.6f,%d,%.6f,%.6f\n", seq.name.c_str(), rep.frames.size(),
                      rep.evaluated, rep.mean_iou, rep.failures, rep.evaluated ? precision_at(rep) : 0.0,
                      rep.mean_fpe_score);
        table << buf;
        iou_sum += rep.mean_iou * rep.evaluated;
        evaluated += rep.evaluated;
        failures += rep.failures;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "ALL,,%d,%.6f,%d,,\n", evaluated, evaluated ? iou_sum / evaluated : 0.0,
                  failures);
    table << buf;
    write_text(common.reports() / "eval_summary.csv", table.str());
    std::cout << table.str();
    return 0;
}

int cmd_ablate(const Overrides& ov, const Common& common, const AblationOptions& opts) {
    const RunConfig cfg = ov.resolve();
    const auto results = run_ablation(cfg, opts, common.out_dir / "frames");
    const std::string table = ablation_table(results, ablation_suite(opts.suite, opts.seed));
    write_text(common.reports() / ("ablation_" + opts.suite + ".csv"), table);
    std::cout << table;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rotation-adaptive correlation filter tracker"};
    app.require_subcommand(1);

    Overrides ov;
    Common common;

    auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out-dir", common.out_dir, "output tree (frames/, reports/, dumps/)");
        sub->add_option("--report-dir", common.report_dir, "report directory (default OUT/reports)");
    };

    fs::path sequence;
    bool dump_filter = false, dump_scores = false;
    auto* track = app.add_subcommand("track", "track one sequence and write a per-frame CSV");
    track->add_option("--sequence", sequence, "sequence directory")->required();
    track->add_flag("--dump-filter", dump_filter, "write filter coefficients per frame");
    track->add_flag("--dump-scoremaps", dump_scores, "write winning score maps as PGM");
    ov.attach(track);
    add_out(track);

    std::vector<fs::path> sequences;
    int reinit_gap = 5;
    auto* eval = app.add_subcommand("eval", "reset-protocol evaluation over one or more sequences");
    eval->add_option("--sequence", sequences, "sequence directory (repeatable)")->required();
    eval->add_option("--reinit-gap", reinit_gap, "frames skipped after a failure")->check(CLI::NonNegativeNumber);
    ov.attach(eval);
    add_out(eval);

    std::string scenario = "rotation";
    int frames = 60;
    std::uint64_t seed = 1;
    fs::path out;
    auto* synth = app.add_subcommand("synth", "render a synthetic annotated sequence");
    synth->add_option("--scenario", scenario, "scene type")->check(CLI::IsMember(scenario_names()));
    synth->add_option("--frames", frames, "frame count")->check(CLI::PositiveNumber);
    synth->add_option("--seed", seed, "texture and jitter seed");
    synth->add_option("--out", out, "sequence directory (default OUT/frames/SCENARIO-sSEED)");
    add_out(synth);

    AblationOptions ab;
    auto* ablate = app.add_subcommand("ablate", "run the eight-variant ablation matrix");
    ablate->add_option("--suite", ab.suite, "scenario set")->check(CLI::IsMember({"rotation", "illumination", "mixed", "all"}));
    ablate->add_option("--frames", ab.frames, "frames per sequence")->check(CLI::Range(2, 100000));
    ablate->add_option("--seed", ab.seed, "first seed");
    ablate->add_option("--threads", ab.threads, "worker threads (default RACF_THREADS)")->check(CLI::NonNegativeNumber);
    ov.attach(ablate);
    add_out(ablate);

    auto* emit = app.add_subcommand("emit-config", "print the resolved configuration");
    emit->add_option("--out", out, "write to a file instead of stdout");
    ov.attach(emit);

    CLI11_PARSE(app, argc, argv);

    try {
        if (track->parsed()) return cmd_track(ov, common, sequence, dump_filter, dump_scores);
        if (eval->parsed()) return cmd_eval(ov, common, sequences, reinit_gap);
        if (ablate->parsed()) return cmd_ablate(ov, common, ab);
        if (synth->parsed()) {
            const SceneSpec spec = make_scenario(scenario, frames, seed);
            const fs::path dir = out.empty() ? common.out_dir / "frames" / (scenario + "-s" + std::to_string(seed)) : out;
            generate(spec, dir);
            std::cout << dir.string() << '\n';
            return 0;
        }
        if (emit->parsed()) {
            const std::string text = emit_config(ov.resolve());
            if (out.empty())
                std::cout << text;
            else
                write_text(out, text);
            return 0;
        }
    } catch (const MissingGroundTruthError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitMissingGroundTruth;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
