#include "racf/eval.hpp"

#include "racf/config.hpp"
#include "racf/imaging.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace racf {

namespace fs = std::filesystem;

namespace {

bool is_frame_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void record_columns(std::ostringstream& out, int frame, const FrameRecord& r) {
    out << frame;
    for (const Point& c : r.box.corners()) out << ',' << fixed(c.x(), 4) << ',' << fixed(c.y(), 4);
    out << ',' << fixed(r.theta, 4) << ',' << fixed(r.scale, 6) << ',' << fixed(r.raw_score, 6) << ','
        << fixed(r.fpe_score, 6) << ',' << (r.low_confidence ? 1 : 0);
}

constexpr const char* kTrackHeader =
    "frame,x1,y1,x2,y2,x3,y3,x4,y4,theta,scale,raw_score,fpe_score,low_confidence";

void aggregate(RunReport& rep) {
    double iou = 0, fpe = 0;
    rep.evaluated = 0;
    rep.failures = 0;
    for (const auto& f : rep.frames) {
        if (f.failure) ++rep.failures;
        if (f.init || f.skipped || !f.has_groundtruth) continue;
        ++rep.evaluated;
        iou += f.iou;
        fpe += f.record.fpe_score;
    }
    rep.mean_iou = rep.evaluated ? iou / rep.evaluated : 0.0;
    rep.mean_fpe_score = rep.evaluated ? fpe / rep.evaluated : 0.0;
}

void score(FrameEval& fe, const std::optional<Quad>& gt) {
    fe.has_groundtruth = gt.has_value();
    if (!gt) return;
    const Quad pred = fe.record.box.corners();
    fe.iou = quad_iou(pred, *gt);
    fe.center_error = (centroid(pred) - centroid(*gt)).norm();
}

void check_lengths(const std::vector<Image>& frames, const Annotation& gt) {
    if (frames.size() != gt.size())
        throw FormatError("annotation has " + std::to_string(gt.size()) + " entries for " +
                          std::to_string(frames.size()) + " frames");
    if (frames.empty()) throw FormatError("empty sequence");
}

}  // namespace

Annotation parse_groundtruth(const std::string& text) {
    Annotation out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line == "absent") {
            out.emplace_back(std::nullopt);
            continue;
        }
        std::vector<double> v;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(tok, &used));
                if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw FormatError("groundtruth line " + std::to_string(lineno) + ": bad number '" + tok + "'");
            }
        }
        if (v.size() != 8) throw FormatError("groundtruth line " + std::to_string(lineno) + ": expected 8 values");
        if (std::all_of(v.begin(), v.end(), [](double x) { return std::isnan(x); })) {
            out.emplace_back(std::nullopt);
            continue;
        }
        Quad q;
        for (int i = 0; i < 4; ++i) q[i] = Point(v[2 * i], v[2 * i + 1]);
        out.emplace_back(q);
    }
    if (out.empty()) throw FormatError("groundtruth is empty");
    return out;
}

Annotation read_groundtruth(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingGroundTruthError("missing groundtruth file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_groundtruth(ss.str());
}

void write_groundtruth(const std::vector<Quad>& polys, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const Quad& q : polys) {
        for (int i = 0; i < 4; ++i)
            out << format_double(q[i].x()) << ',' << format_double(q[i].y()) << (i == 3 ? '\n' : ',');
    }
}

std::vector<Image> Sequence::load_frames() const {
    std::vector<Image> out;
    out.reserve(frame_paths.size());
    for (const auto& p : frame_paths) out.push_back(load_frame(p));
    return out;
}

Sequence load_sequence(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw FileNotFoundError("sequence directory not found: " + dir.string());
    Sequence seq;
    seq.name = dir.filename().string();
    if (seq.name.empty()) seq.name = dir.parent_path().filename().string();
    seq.groundtruth = read_groundtruth(dir / "groundtruth.txt");
    const fs::path frames_dir = fs::is_directory(dir / "frames") ? dir / "frames" : dir;
    for (const auto& e : fs::directory_iterator(frames_dir))
        if (e.is_regular_file() && is_frame_file(e.path())) seq.frame_paths.push_back(e.path());
    std::sort(seq.frame_paths.begin(), seq.frame_paths.end());
    if (seq.frame_paths.empty()) throw FormatError("no frames found in " + frames_dir.string());
    if (seq.frame_paths.size() != seq.groundtruth.size())
        throw FormatError("sequence " + dir.string() + " has " + std::to_string(seq.frame_paths.size()) +
                          " frames but " + std::to_string(seq.groundtruth.size()) + " annotations");
    if (!seq.groundtruth.front()) throw FormatError("first frame of " + dir.string() + " has no annotation");
    return seq;
}

RunReport run_sequence(SequenceTracker& tracker, const std::vector<Image>& frames, const Annotation& gt) {
    check_lengths(frames, gt);
    if (!gt.front()) throw FormatError("first frame has no annotation");
    RunReport rep;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        FrameEval fe;
        fe.frame = int(i) + 1;
        if (i == 0) {
            fe.record = tracker.init(frames[0], RotatedBox::from_quad(*gt[0]));
            fe.init = true;
        } else {
            fe.record = tracker.step(frames[i]);
        }
        fe.record.frame = fe.frame;
        score(fe, gt[i]);
        rep.frames.push_back(std::move(fe));
    }
    aggregate(rep);
    return rep;
}

RunReport run_with_resets(SequenceTracker& tracker, const std::vector<Image>& frames, const Annotation& gt,
                          int reinit_gap) {
    check_lengths(frames, gt);
    require(reinit_gap >= 0, "run_with_resets: reinit_gap must be >= 0");
    RunReport rep;
    bool need_init = true;
    std::size_t i = 0;
    while (i < frames.size()) {
        FrameEval fe;
        fe.frame = int(i) + 1;
        if (need_init) {
            if (!gt[i]) {
                fe.skipped = true;
                rep.frames.push_back(std::move(fe));
                ++i;
                continue;
            }
            fe.record = tracker.init(frames[i], RotatedBox::from_quad(*gt[i]));
            fe.record.frame = fe.frame;
            fe.init = true;
            need_init = false;
            score(fe, gt[i]);
            rep.frames.push_back(std::move(fe));
            ++i;
            continue;
        }
        fe.record = tracker.step(frames[i]);
        fe.record.frame = fe.frame;
        score(fe, gt[i]);
        const bool failed = fe.has_groundtruth && fe.iou == 0.0;
        fe.failure = failed;
        rep.frames.push_back(std::move(fe));
        ++i;
        if (failed) {
            for (int g = 0; g < reinit_gap && i < frames.size(); ++g, ++i) {
                FrameEval skip;
                skip.frame = int(i) + 1;
                skip.skipped = true;
                skip.has_groundtruth = gt[i].has_value();
                rep.frames.push_back(std::move(skip));
            }
            need_init = true;
        }
    }
    aggregate(rep);
    return rep;
}

double precision_at(const RunReport& report, double threshold) {
    int hit = 0, total = 0;
    for (const auto& f : report.frames) {
        if (f.init || f.skipped || !f.has_groundtruth) continue;
        ++total;
        if (f.center_error <= threshold) ++hit;
    }
    if (total == 0) {
        std::cerr << "warning: precision requested on a report with no evaluated frames\n";
        return 0.0;
    }
    return double(hit) / total;
}

std::string track_csv(const std::vector<FrameRecord>& records) {
    std::ostringstream out;
    out << kTrackHeader << '\n';
    for (const auto& r : records) {
        record_columns(out, r.frame, r);
        out << '\n';
    }
    return out.str();
}

std::string report_csv(const RunReport& report) {
    std::ostringstream out;
    out << kTrackHeader << ",iou,center_error,status\n";
    for (const auto& f : report.frames) {
        record_columns(out, f.frame, f.record);
        const char* status = f.skipped ? "skipped" : f.init ? "init" : f.failure ? "failure" : "tracked";
        out << ',' << fixed(f.iou) << ',' << fixed(f.center_error, 4) << ',' << status << '\n';
    }
    return out.str();
}

std::string report_summary(const RunReport& report, const std::string& name) {
    std::ostringstream out;
    out << "sequence=" << name << '\n'
        << "frames=" << report.frames.size() << '\n'
        << "evaluated=" << report.evaluated << '\n'
        << "mean_iou=" << fixed(report.mean_iou) << '\n'
        << "failures=" << report.failures << '\n'
        << "precision@20=" << fixed(report.evaluated ? precision_at(report, 20.0) : 0.0) << '\n'
        << "mean_fpe_score=" << fixed(report.mean_fpe_score) << '\n';
    return out.str();
}

}  // namespace racf
