#include "racf/synth.hpp"

#include "racf/config.hpp"
#include "racf/eval.hpp"
#include "racf/imaging.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace racf {

namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// uniform in [-1, 1]
double lattice(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(std::uint64_t(ix) * 0x632BE59BD9B4E019ULL ^
                                                         splitmix64(std::uint64_t(iy) + 0x85157AF5ULL)));
    return double(h >> 11) * (2.0 / double(1ULL << 53)) - 1.0;
}

double value_noise(std::uint64_t seed, double x, double y, double spacing) {
    const double gx = x / spacing, gy = y / spacing;
    const double fx = std::floor(gx), fy = std::floor(gy);
    const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
    auto smooth = [](double t) { return t * t * (3 - 2 * t); };
    const double tx = smooth(gx - fx), ty = smooth(gy - fy);
    const double a = lattice(seed, ix, iy), b = lattice(seed, ix + 1, iy);
    const double c = lattice(seed, ix, iy + 1), d = lattice(seed, ix + 1, iy + 1);
    return (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d);
}

// Deterministic stream of uniforms for trajectory jitter.
class Jitter {
public:
    explicit Jitter(std::uint64_t seed) : state_(splitmix64(seed ^ 0xA5A5A5A5ULL)) {}
    double uniform() {
        state_ = splitmix64(state_);
        return double(state_ >> 11) / double(1ULL << 53);
    }

private:
    std::uint64_t state_;
};

double ramp(int k, int n, double from, double to) { return n <= 1 ? from : from + (to - from) * double(k) / (n - 1); }

bool inside_target(const Point& p, const Point& center, const Size& size, double scale, double angle, Point& local) {
    local = rotate_on_screen<double>(p - center, -angle) / scale;
    return std::abs(local.x()) <= size.width / 2 && std::abs(local.y()) <= size.height / 2;
}

constexpr int kSupersample = 3;

}  // namespace

double target_texture(std::uint64_t seed, double x, double y) {
    const double checker = std::tanh(2.5 * std::sin(2 * kPi * x / 11.0) * std::sin(2 * kPi * y / 9.0));
    return 128.0 + 50.0 * value_noise(seed, x, y, 5.0) + 35.0 * checker;
}

double background_texture(std::uint64_t seed, double x, double y) {
    return 90.0 + 30.0 * value_noise(seed, x, y, 14.0) + 12.0 * value_noise(seed + 1, x, y, 5.0);
}

void SceneSpec::validate() const {
    require(width >= 8 && height >= 8, "SceneSpec: frame too small");
    require(!trajectory.empty(), "SceneSpec: empty trajectory");
    require(gain.size() == trajectory.size() && offset.size() == trajectory.size(),
            "SceneSpec: illumination ramp length must equal frame count");
    for (double g : gain) require(g > 0, "SceneSpec: gains must be positive");
    for (const auto& t : trajectory) {
        require(t.scale > 0, "SceneSpec: scale must be positive");
        require(t.center.x() >= 0 && t.center.x() <= width && t.center.y() >= 0 && t.center.y() <= height,
                "SceneSpec: target center outside the frame");
    }
}

SceneSpec make_scenario(const std::string& name, int frames, std::uint64_t seed) {
    require(frames >= 1, "make_scenario: need at least one frame");
    SceneSpec s;
    s.scenario = name;
    s.target_seed = seed * 2 + 101;
    s.background_seed = seed * 2 + 202;
    s.gain.assign(frames, 1.0);
    s.offset.assign(frames, 0.0);
    const Point mid(s.width / 2.0, s.height / 2.0);
    Jitter jit(seed);
    auto jitter = [&](double amp) { return Point(amp * (2 * jit.uniform() - 1), amp * (2 * jit.uniform() - 1)); };

    for (int k = 0; k < frames; ++k) {
        TrajectoryPoint t{mid, 1.0, 0.0};
        if (name == "rotation") {
            t.angle = 3.0 * k;
        } else if (name == "translation") {
            t.center = Point(45, 55) + Point(70, 45) * ramp(k, frames, 0, 1);
        } else if (name == "scale") {
            t.scale = ramp(k, frames, 1.0, 1.3);
        } else if (name == "illumination") {
            s.gain[k] = ramp(k, frames, 1.0, 0.4);
            t.center = mid + Point(8 * std::sin(2 * kPi * k / 40.0), 4 * std::sin(2 * kPi * k / 25.0));
        } else if (name == "fpe-twins") {
            t.center = Point(mid.x() + 10 * std::sin(2 * kPi * k / 50.0), 60) + jitter(0.5);
        } else if (name == "mixed") {
            t.angle = 3.0 * k;
            s.gain[k] = ramp(k, frames, 1.0, 0.5);
            t.center = mid + Point(6 * std::sin(2 * kPi * k / 45.0), 0) + jitter(1.5);
        } else {
            throw ContractError("unknown scenario: " + name);
        }
        t.angle = normalize_degrees(t.angle);
        s.trajectory.push_back(t);
    }
    if (name == "fpe-twins") s.duplicate_offset = Point(0, 34);
    s.validate();
    return s;
}

RenderedSequence render(const SceneSpec& spec) {
    spec.validate();
    RenderedSequence out;
    // the background is static, so sample it once
    Grid<double> bg(spec.height * kSupersample, spec.width * kSupersample);
    for (Eigen::Index i = 0; i < bg.rows(); ++i)
        for (Eigen::Index j = 0; j < bg.cols(); ++j)
            bg(i, j) = background_texture(spec.background_seed, (j + 0.5) / kSupersample, (i + 0.5) / kSupersample);

    for (int k = 0; k < spec.frame_count(); ++k) {
        const TrajectoryPoint& t = spec.trajectory[k];
        Image frame(spec.width, spec.height);
        for (int i = 0; i < spec.height; ++i)
            for (int j = 0; j < spec.width; ++j) {
                double acc = 0;
                for (int a = 0; a < kSupersample; ++a)
                    for (int b = 0; b < kSupersample; ++b) {
                        const Point p(j + (b + 0.5) / kSupersample, i + (a + 0.5) / kSupersample);
                        Point local;
                        double v = bg(i * kSupersample + a, j * kSupersample + b);
                        if (inside_target(p, t.center, spec.target_size, t.scale, t.angle, local)) {
                            v = target_texture(spec.target_seed, local.x(), local.y());
                        } else if (spec.duplicate_offset &&
                                   inside_target(p, t.center + *spec.duplicate_offset, spec.target_size, t.scale,
                                                 t.angle, local)) {
                            v = target_texture(spec.target_seed, local.x(), local.y());
                        }
                        acc += v;
                    }
                const double v = spec.gain[k] * acc / (kSupersample * kSupersample) + spec.offset[k];
                frame(i, j) = std::clamp(std::round(v), 0.0, 255.0);
            }
        out.frames.push_back(std::move(frame));
        const RotatedBox box{t.center, spec.target_size.width * t.scale, spec.target_size.height * t.scale, t.angle};
        out.groundtruth.push_back(box.corners());
    }
    return out;
}

std::string generate(const SceneSpec& spec, const fs::path& out_dir) {
    const RenderedSequence seq = render(spec);
    std::error_code ec;
    fs::create_directories(out_dir / "frames", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "frames").string() + ": " + ec.message());

    for (int k = 0; k < spec.frame_count(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "%08d.png", k + 1);
        save_png(seq.frames[k], out_dir / "frames" / name);
    }
    write_groundtruth(seq.groundtruth, out_dir / "groundtruth.txt");

    std::ostringstream m;
    m << "scenario=" << spec.scenario << '\n'
      << "frames=" << spec.frame_count() << '\n'
      << "width=" << spec.width << '\n'
      << "height=" << spec.height << '\n'
      << "target_width=" << format_double(spec.target_size.width) << '\n'
      << "target_height=" << format_double(spec.target_size.height) << '\n'
      << "target_seed=" << spec.target_seed << '\n'
      << "background_seed=" << spec.background_seed << '\n'
      << "gain_first=" << format_double(spec.gain.front()) << '\n'
      << "gain_last=" << format_double(spec.gain.back()) << '\n';
    if (spec.duplicate_offset)
        m << "duplicate_offset=" << format_double(spec.duplicate_offset->x()) << ','
          << format_double(spec.duplicate_offset->y()) << '\n';
    std::ofstream mf(out_dir / "manifest.txt");
    if (!mf) throw IoError("cannot write manifest in " + out_dir.string());
    mf << m.str();
    return m.str();
}

}  // namespace racf
