#include "racf/tracker.hpp"

#include <algorithm>

namespace racf {

namespace {

constexpr double kMinScale = 0.1;
constexpr double kMaxScale = 10.0;

Image preprocess(const Image& frame, const RunConfig& cfg) {
    return cfg.ic ? illumination_correct(frame, cfg.ic_params()) : frame;
}

TrainOptions sweeps(const RunConfig& cfg, bool cold) {
    return {cold ? cfg.gs_sweeps_init : cfg.gs_sweeps, cfg.gs_tolerance};
}

}  // namespace

RotatedBox TrackerState::box() const {
    return {center, base_size.width * scale, base_size.height * scale, normalize_degrees(base_angle + theta_k)};
}

SearchWindow make_search_window(const Size& target, double padding, int cell_size) {
    require(target.width > 0 && target.height > 0, "search window: target must have positive size");
    const double side = std::sqrt(padding * target.width * target.height);
    const int cells = std::max(4, 2 * static_cast<int>(std::lround(side / (2.0 * cell_size))));
    SearchWindow win;
    win.region = {side, side};
    win.rows = win.cols = cells * cell_size;
    win.cell_size = cell_size;
    return win;
}

TrackerState init_tracker(const Image& frame, const RotatedBox& box, const RunConfig& cfg) {
    cfg.validate();
    if (!(box.width > 0 && box.height > 0)) throw ContractError("init: degenerate target box");
    TrackerState st;
    st.center = box.center;
    st.base_size = {box.width, box.height};
    st.base_angle = normalize_degrees(box.angle);
    st.window = make_search_window(st.base_size, cfg.padding, cfg.cell_size);

    const int M = st.window.rows / cfg.cell_size, N = st.window.cols / cfg.cell_size;
    const double cells_per_px = double(st.window.rows) / st.window.region.height / cfg.cell_size;
    const double target_rows = std::min(double(M), box.height * cells_per_px);
    const double target_cols = std::min(double(N), box.width * cells_per_px);
    st.labels = make_labels(M, N, std::sqrt(target_rows * target_cols) * cfg.sigma_factor);
    st.reg = make_reg_weights(M, N, target_rows, target_cols, cfg.w_min, cfg.w_scale, cfg.reg_kernel);

    const Image img = preprocess(frame, cfg);
    const FeatureMap x = oriented_features(img, st.pose(), st.window, st.scale, 0.0);
    st.memory.capacity = std::size_t(cfg.memory_capacity);
    st.memory = update_memory(std::move(st.memory), x, 0.0, cfg.learning_rate);
    st.filter = train(st.memory, st.labels, st.reg, std::nullopt, sweeps(cfg, true)).filter;
    st.motion.push(st.center);
    st.frame_index = 1;
    return st;
}

FrameRecord step_tracker(TrackerState& st, const Image& frame, const RunConfig& cfg) {
    const Image img = preprocess(frame, cfg);
    const DetectionResult det = detect(st.filter, img, st.pose(), st.window, cfg.search());
    ++st.frame_index;

    FrameRecord rec;
    rec.frame = st.frame_index;
    rec.raw_score = det.raw_score;
    rec.fpe_score = det.fpe_score;
    rec.score_grid = det.winner.s;
    rec.low_confidence = !(det.raw_score >= cfg.low_confidence) || !std::isfinite(det.fpe_score);

    if (!rec.low_confidence) {
        const Point raw = st.center + det.displacement;
        const Point next = smooth_update(st.motion, raw, cfg.effective_omega_d(), cfg.effective_omega_a());
        st.motion.push(next);
        st.center = next;
        st.scale = std::clamp(st.scale * det.scale_factor, kMinScale, kMaxScale);
        st.theta_k = normalize_degrees(det.theta);

        const FeatureMap x = oriented_features(img, st.pose(), st.window, st.scale, st.theta_k);
        st.memory = update_memory(std::move(st.memory), x, st.theta_k, cfg.learning_rate);
        const TrainResult tr = train(st.memory, st.labels, st.reg, st.filter, sweeps(cfg, false));
        st.filter = tr.filter;
        rec.filter_converged = tr.converged;
    }

    rec.box = st.box();
    rec.theta = rec.box.angle;
    rec.scale = st.scale;
    return rec;
}

Tracker::Tracker(RunConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

FrameRecord Tracker::init(const Image& frame, const RotatedBox& box) {
    state_ = init_tracker(frame, box, cfg_);
    FrameRecord rec;
    rec.frame = state_.frame_index;
    rec.box = state_.box();
    rec.theta = rec.box.angle;
    rec.scale = state_.scale;
    rec.raw_score = 1.0;
    rec.fpe_score = 1.0;
    return rec;
}

FrameRecord Tracker::step(const Image& frame) { return step_tracker(state_, frame, cfg_); }

}  // namespace racf
