#pragma once

#include "racf/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace racf {

struct TrajectoryPoint {
    Point center{0, 0};
    double scale = 1.0;
    double angle = 0.0;  // degrees anticlockwise
};

struct SceneSpec {
    std::string scenario = "custom";
    int width = 160;
    int height = 160;
    Size target_size{40, 28};
    std::uint64_t target_seed = 1;
    std::uint64_t background_seed = 2;
    std::vector<TrajectoryPoint> trajectory;  // one per frame
    std::vector<double> gain;                 // one per frame, > 0
    std::vector<double> offset;               // one per frame
    std::optional<Point> duplicate_offset;    // identical second target, image-space offset

    int frame_count() const { return static_cast<int>(trajectory.size()); }
    void validate() const;
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"rotation", "translation", "scale", "illumination", "fpe-twins",
                                                   "mixed"};
    return names;
}

/// Builds one of the named scenarios; the seed drives textures and jitter.
SceneSpec make_scenario(const std::string& name, int frames, std::uint64_t seed);

struct RenderedSequence {
    std::vector<Image> frames;  // already quantized to 8 bit
    std::vector<Quad> groundtruth;
};

RenderedSequence render(const SceneSpec& spec);

/// Writes frames/00000001.png..., groundtruth.txt and manifest.txt under out_dir.
/// Returns the manifest text.
std::string generate(const SceneSpec& spec, const std::filesystem::path& out_dir);

/// Procedural target texture in target-local pixel coordinates (origin at the center).
double target_texture(std::uint64_t seed, double x, double y);
double background_texture(std::uint64_t seed, double x, double y);

}  // namespace racf
