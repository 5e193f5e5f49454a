#include "racf/eval.hpp"
#include "racf/synth.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

using namespace racf;
using namespace racf::testing;
namespace fs = std::filesystem;

namespace {

Quad square(double x, double y, double side = 1.0) {
    return RotatedBox{Point(x + side / 2, y + side / 2), side, side, 0.0}.corners();
}

// Replays a fixed list of boxes; init resets the cursor to the init frame.
class ScriptedTracker final : public SequenceTracker {
public:
    explicit ScriptedTracker(std::vector<RotatedBox> boxes, bool frozen = false)
        : boxes_(std::move(boxes)), frozen_(frozen) {}

    FrameRecord init(const Image&, const RotatedBox& box) override {
        held_ = box;
        cursor_ = find(box);
        ++inits;
        return record(box);
    }
    FrameRecord step(const Image&) override {
        ++cursor_;
        return record(frozen_ ? held_ : boxes_.at(cursor_));
    }

    int inits = 0;

private:
    std::size_t find(const RotatedBox& b) const {
        for (std::size_t i = 0; i < boxes_.size(); ++i)
            if ((boxes_[i].center - b.center).norm() < 1e-9) return i;
        return 0;
    }
    static FrameRecord record(const RotatedBox& b) {
        FrameRecord r;
        r.box = b;
        r.theta = b.angle;
        r.fpe_score = 0.5;
        return r;
    }

    std::vector<RotatedBox> boxes_;
    bool frozen_;
    RotatedBox held_;
    std::size_t cursor_ = 0;
};

std::vector<Image> blank_frames(std::size_t n) { return std::vector<Image>(n, Image(16, 16)); }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("racf_test_eval_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("polygon_iou examples") {
    CHECK(quad_iou(square(0, 0), square(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(quad_iou(square(0, 0), square(3, 0)) == 0.0);
    CHECK(std::abs(quad_iou(square(0, 0), square(0.5, 0)) - 1.0 / 3.0) <= 1e-9);

    const Quad flat = {Point(0, 0), Point(1, 0), Point(1, 0), Point(0, 0)};
    CHECK(quad_iou(flat, square(0, 0)) == 0.0);
    CHECK(quad_iou(square(0, 0), flat) == 0.0);

    // a box rotated 45 degrees inside a larger square
    const Quad diamond = RotatedBox{Point(1, 1), std::sqrt(2.0), std::sqrt(2.0), 45.0}.corners();
    CHECK(quad_iou(diamond, square(0, 0, 2.0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("polygon_iou is symmetric, rigid-invariant and agrees with a raster oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Quad a = rng.box(4.0).corners(), b = rng.box(4.0).corners();
        const double iou = quad_iou(a, b);
        CHECK(iou >= 0.0);
        CHECK(iou <= 1.0);
        CHECK(std::abs(iou - quad_iou(b, a)) <= 1e-12);

        const double angle = rng.uniform(-180, 180);
        const Point shift(rng.uniform(-50, 50), rng.uniform(-50, 50));
        Quad ra, rb;
        for (int i = 0; i < 4; ++i) {
            ra[i] = rotate_on_screen(a[i], angle) + shift;
            rb[i] = rotate_on_screen(b[i], angle) + shift;
        }
        CHECK(std::abs(quad_iou(ra, rb) - iou) <= 1e-9);
    }
    for (int trial = 0; trial < 30; ++trial) {
        const Quad a = rng.box(3.0).corners(), b = rng.box(3.0).corners();
        CHECK(std::abs(quad_iou(a, b) - raster_iou(a, b)) <= 0.01);
    }
}

TEST_CASE("RotatedBox corners round trip") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const RotatedBox b = rng.box(20.0);
        const RotatedBox r = RotatedBox::from_quad(b.corners());
        CHECK((r.center - b.center).norm() <= 1e-9);
        CHECK(std::abs(r.width - b.width) <= 1e-9);
        CHECK(std::abs(r.height - b.height) <= 1e-9);
        CHECK(std::abs(normalize_degrees(r.angle - b.angle)) <= 1e-9);
    }
}

TEST_CASE("groundtruth parsing") {
    const Annotation gt = parse_groundtruth("0,0,1,0,1,1,0,1\r\n\nabsent\nnan,nan,nan,nan,nan,nan,nan,nan\n2,2,3,2,3,3,2,3\n");
    REQUIRE(gt.size() == 4);
    REQUIRE(gt[0].has_value());
    CHECK((*gt[0])[2] == Point(1, 1));
    CHECK_FALSE(gt[1].has_value());
    CHECK_FALSE(gt[2].has_value());
    CHECK((*gt[3])[0] == Point(2, 2));

    CHECK_THROWS_AS(parse_groundtruth("1,2,3\n"), FormatError);
    CHECK_THROWS_AS(parse_groundtruth("1,2,3,4,5,6,7,x\n"), FormatError);
    CHECK_THROWS_AS(parse_groundtruth(""), FormatError);
    CHECK_THROWS_AS(read_groundtruth("/nonexistent/groundtruth.txt"), MissingGroundTruthError);
}

TEST_CASE("groundtruth write and read round trip exactly") {
    Rng rng(13);
    std::vector<Quad> polys;
    for (int i = 0; i < 20; ++i) polys.push_back(rng.box(100.0).corners());
    const fs::path dir = scratch("roundtrip");
    write_groundtruth(polys, dir / "groundtruth.txt");
    const Annotation back = read_groundtruth(dir / "groundtruth.txt");
    REQUIRE(back.size() == polys.size());
    for (std::size_t i = 0; i < polys.size(); ++i)
        for (int c = 0; c < 4; ++c) CHECK((*back[i])[c] == polys[i][c]);
}

TEST_CASE("load_sequence reads generated sequences and rejects mismatches") {
    const SceneSpec spec = make_scenario("translation", 4, 1);
    const fs::path dir = scratch("seq");
    generate(spec, dir);
    const Sequence seq = load_sequence(dir);
    CHECK(seq.name == dir.filename().string());
    CHECK(seq.frame_paths.size() == 4);
    CHECK(seq.groundtruth.size() == 4);
    CHECK(std::is_sorted(seq.frame_paths.begin(), seq.frame_paths.end()));
    CHECK(seq.load_frames().front().width() == spec.width);

    std::ofstream(dir / "groundtruth.txt", std::ios::app) << "0,0,1,0,1,1,0,1\n";
    CHECK_THROWS_AS(load_sequence(dir), FormatError);

    fs::remove(dir / "groundtruth.txt");
    CHECK_THROWS_AS(load_sequence(dir), MissingGroundTruthError);
}

TEST_CASE("a tracker fed ground truth scores perfectly") {
    std::vector<RotatedBox> boxes;
    Annotation gt;
    for (int k = 0; k < 12; ++k) {
        boxes.push_back({Point(20 + 3 * k, 30), 10, 6, 4.0 * k});
        gt.push_back(boxes.back().corners());
    }
    ScriptedTracker t(boxes);
    const RunReport rep = run_with_resets(t, blank_frames(12), gt);
    CHECK(rep.failures == 0);
    CHECK(rep.evaluated == 11);
    CHECK(rep.mean_iou == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(precision_at(rep) == 1.0);
    CHECK(rep.mean_fpe_score == doctest::Approx(0.5));
    CHECK(t.inits == 1);
}

TEST_CASE("a frozen tracker fails at the first zero-overlap frame and is reset") {
    // target leaves the initial box after a few frames
    std::vector<RotatedBox> boxes;
    Annotation gt;
    for (int k = 0; k < 20; ++k) {
        boxes.push_back({Point(10 + 4.0 * k, 10), 8, 8, 0});
        gt.push_back(boxes.back().corners());
    }
    ScriptedTracker t(boxes, true);
    const RunReport rep = run_with_resets(t, blank_frames(20), gt, 5);
    REQUIRE(rep.frames.size() == 20);
    // overlap is zero once the offset reaches the box width: frame 3 (k = 2)
    CHECK(rep.frames[1].iou > 0.0);
    CHECK(rep.frames[2].failure);
    for (int k = 3; k < 8; ++k) CHECK(rep.frames[k].skipped);
    CHECK(rep.frames[8].init);
    CHECK(rep.failures >= 1);
    CHECK(rep.failures <= int(rep.frames.size()));
    int init_frames = 0;
    for (const auto& f : rep.frames) init_frames += f.init;
    CHECK(t.inits == init_frames);
    CHECK(init_frames <= 1 + rep.failures);

    int evaluated = 0;
    for (const auto& f : rep.frames) evaluated += !(f.init || f.skipped || !f.has_groundtruth);
    CHECK(rep.evaluated == evaluated);

    const std::string csv = report_csv(rep);
    CHECK(csv.find(",failure\n") != std::string::npos);
    CHECK(csv.find(",skipped\n") != std::string::npos);
}

TEST_CASE("absent annotations are excluded and delay initialization") {
    std::vector<RotatedBox> boxes(6, RotatedBox{Point(8, 8), 4, 4, 0});
    Annotation gt(6, boxes[0].corners());
    gt[0] = std::nullopt;
    gt[3] = std::nullopt;
    ScriptedTracker t(boxes);
    const RunReport rep = run_with_resets(t, blank_frames(6), gt);
    CHECK(rep.frames[0].skipped);
    CHECK(rep.frames[1].init);
    CHECK_FALSE(rep.frames[3].has_groundtruth);
    CHECK(rep.evaluated == 3);
    CHECK(rep.failures == 0);
    CHECK_THROWS_AS(run_with_resets(t, blank_frames(5), gt), FormatError);
    CHECK_THROWS_AS(run_sequence(t, blank_frames(6), gt), FormatError);
}

TEST_CASE("precision_at examples") {
    RunReport rep;
    auto frame = [](double err) {
        FrameEval f;
        f.has_groundtruth = true;
        f.center_error = err;
        return f;
    };
    rep.frames = {frame(0), frame(0)};
    CHECK(precision_at(rep) == 1.0);
    rep.frames = {frame(5), frame(25)};
    CHECK(precision_at(rep, 20) == 0.5);
    rep.frames = {frame(20)};
    CHECK(precision_at(rep, 20) == 1.0);

    FrameEval skipped = frame(0);
    skipped.skipped = true;
    rep.frames = {skipped};
    CHECK(precision_at(rep) == 0.0);
}

TEST_CASE("track csv layout") {
    FrameRecord r;
    r.frame = 3;
    r.box = {Point(10, 20), 4, 2, 0};
    r.theta = 0;
    r.scale = 1.5;
    r.low_confidence = true;
    const std::string csv = track_csv({r});
    CHECK(csv.rfind("frame,x1,y1,x2,y2,x3,y3,x4,y4,theta,scale,raw_score,fpe_score,low_confidence\n", 0) == 0);
    CHECK(csv.find("\n3,8.0000,19.0000,12.0000,19.0000,12.0000,21.0000,8.0000,21.0000,") != std::string::npos);
    CHECK(csv.back() == '\n');
}
