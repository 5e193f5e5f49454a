#pragma once

#include "racf/tracker.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace racf {

/// One polygon per frame; std::nullopt marks a frame where the target is absent.
using Annotation = std::vector<std::optional<Quad>>;

/// Lines of 8 comma-separated reals (x1,y1,...,x4,y4). A line of NaNs or the
/// word "absent" marks a missing target.
Annotation parse_groundtruth(const std::string& text);
Annotation read_groundtruth(const std::filesystem::path& path);
void write_groundtruth(const std::vector<Quad>& polys, const std::filesystem::path& path);

class MissingGroundTruthError : public FileNotFoundError {
public:
    using FileNotFoundError::FileNotFoundError;
};

struct Sequence {
    std::string name;
    std::vector<std::filesystem::path> frame_paths;  // sorted by file name
    Annotation groundtruth;

    std::vector<Image> load_frames() const;
};

/// Reads DIR/groundtruth.txt and the frames in DIR/frames (or DIR itself).
Sequence load_sequence(const std::filesystem::path& dir);

struct FrameEval {
    int frame = 0;  // 1-based
    FrameRecord record;
    double iou = 0.0;
    double center_error = 0.0;
    bool has_groundtruth = false;
    bool init = false;
    bool skipped = false;
    bool failure = false;
};

struct RunReport {
    std::vector<FrameEval> frames;
    double mean_iou = 0.0;
    double mean_fpe_score = 0.0;
    int failures = 0;
    int evaluated = 0;
};

/// Runs the tracker once from frame 1 without resets.
RunReport run_sequence(SequenceTracker& tracker, const std::vector<Image>& frames, const Annotation& gt);

/// Reset protocol: a frame with IoU exactly 0 counts a failure, the next
/// `reinit_gap` frames are skipped and the tracker is re-initialized from
/// ground truth. Init and skipped frames are excluded from the aggregates.
RunReport run_with_resets(SequenceTracker& tracker, const std::vector<Image>& frames, const Annotation& gt,
                          int reinit_gap = 5);

/// Fraction of evaluated frames with center error <= threshold (0 when none).
double precision_at(const RunReport& report, double threshold = 20.0);

/// frame, x1..y4, theta, scale, raw_score, fpe_score, low_confidence
std::string track_csv(const std::vector<FrameRecord>& records);
/// track columns followed by iou, center_error, status
std::string report_csv(const RunReport& report);
std::string report_summary(const RunReport& report, const std::string& name);

}  // namespace racf
