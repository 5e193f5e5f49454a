#pragma once

#include "racf/config.hpp"
#include "racf/geometry.hpp"
#include "racf/motion.hpp"

namespace racf {

struct TrackerState {
    Point center{0, 0};
    Size base_size;
    double scale = 1.0;
    double theta_k = 0.0;     // relative to the initial box orientation
    double base_angle = 0.0;  // orientation of the initial box
    MotionHistory motion;
    CorrelationFilter filter;
    SampleMemory memory;
    int frame_index = 0;

    SearchWindow window;
    Labels labels;
    RegWeights reg;

    Pose pose() const { return {center, scale, theta_k, base_angle}; }
    RotatedBox box() const;
};

struct FrameRecord {
    int frame = 0;
    RotatedBox box;
    double theta = 0.0;  // absolute box orientation, degrees
    double scale = 1.0;
    double raw_score = 0.0;
    double fpe_score = 0.0;
    bool low_confidence = false;
    bool filter_converged = true;
    Grid<double> score_grid;  // winning response, empty for the init frame
};

/// Search window for a target of the given size: square region of side
/// sqrt(padding * w * h), resampled onto an even number of cells.
SearchWindow make_search_window(const Size& target, double padding, int cell_size);

TrackerState init_tracker(const Image& frame, const RotatedBox& box, const RunConfig& cfg);

/// One tracking step; the state is advanced in place.
FrameRecord step_tracker(TrackerState& state, const Image& frame, const RunConfig& cfg);

/// Common interface for anything that can be run over an annotated sequence.
class SequenceTracker {
public:
    virtual ~SequenceTracker() = default;
    virtual FrameRecord init(const Image& frame, const RotatedBox& box) = 0;
    virtual FrameRecord step(const Image& frame) = 0;
};

class Tracker final : public SequenceTracker {
public:
    explicit Tracker(RunConfig cfg);

    FrameRecord init(const Image& frame, const RotatedBox& box) override;
    FrameRecord step(const Image& frame) override;

    const TrackerState& state() const { return state_; }
    const RunConfig& config() const { return cfg_; }

private:
    RunConfig cfg_;
    TrackerState state_;
};

}  // namespace racf
