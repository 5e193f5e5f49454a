#pragma once

#include "racf/types.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace racf {

template <typename Scalar>
using Polygon = std::vector<Vec2<Scalar>>;

using Quad = std::array<Point, 4>;

struct RotatedBox {
    Point center{0, 0};
    double width = 0.0;
    double height = 0.0;
    double angle = 0.0;  // degrees, anticlockwise on screen

    /// Corners in order (-w,-h), (w,-h), (w,h), (-w,h) (halved) rotated about the center.
    Quad corners() const {
        const std::array<Point, 4> local = {Point(-width / 2, -height / 2), Point(width / 2, -height / 2),
                                            Point(width / 2, height / 2), Point(-width / 2, height / 2)};
        Quad out;
        for (int i = 0; i < 4; ++i) out[i] = center + rotate_on_screen(local[i], angle);
        return out;
    }

    /// Inverse of corners() for a rectangle given in the same corner order.
    static RotatedBox from_quad(const Quad& q) {
        RotatedBox b;
        b.center = (q[0] + q[1] + q[2] + q[3]) / 4.0;
        const Point top = q[1] - q[0];
        b.width = top.norm();
        b.height = (q[2] - q[1]).norm();
        // rotate_on_screen maps +x to (c, -s)
        b.angle = normalize_degrees(rad2deg(std::atan2(-top.y(), top.x())));
        return b;
    }
};

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
    return a.x() * b.y() - a.y() * b.x();
}

/// Shoelace formula; positive for counter-clockwise order in a y-up frame.
template <typename Scalar>
Scalar signed_area(const Polygon<Scalar>& p) {
    Scalar acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += cross2(p[i], p[(i + 1) % p.size()]);
    return acc / Scalar(2);
}

template <typename Scalar>
Scalar area(const Polygon<Scalar>& p) {
    return std::abs(signed_area(p));
}

/// Intersection of a polygon with convex `clip` by successive half-plane clips.
template <typename Scalar>
Polygon<Scalar> clip_convex(Polygon<Scalar> subject, Polygon<Scalar> clip) {
    if (signed_area(clip) < 0) std::reverse(clip.begin(), clip.end());
    for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
        const Vec2<Scalar> a = clip[e], b = clip[(e + 1) % clip.size()];
        auto side = [&](const Vec2<Scalar>& p) { return cross2<Scalar>(b - a, p - a); };
        Polygon<Scalar> out;
        for (std::size_t i = 0; i < subject.size(); ++i) {
            const Vec2<Scalar>& cur = subject[i];
            const Vec2<Scalar>& nxt = subject[(i + 1) % subject.size()];
            const Scalar sc = side(cur), sn = side(nxt);
            if (sc >= 0) out.push_back(cur);
            if ((sc >= 0) != (sn >= 0)) out.push_back(cur + (nxt - cur) * (sc / (sc - sn)));
        }
        subject = std::move(out);
    }
    return subject;
}

/// Area of intersection over area of union for convex polygons; 0 if either is degenerate.
template <typename Scalar>
Scalar polygon_iou(const Polygon<Scalar>& p, const Polygon<Scalar>& q) {
    const Scalar ap = area(p), aq = area(q);
    if (!(ap > 0) || !(aq > 0)) return Scalar(0);
    const Polygon<Scalar> inter = clip_convex(p, q);
    const Scalar ai = inter.size() >= 3 ? area(inter) : Scalar(0);
    const Scalar iou = ai / (ap + aq - ai);
    return std::clamp(iou, Scalar(0), Scalar(1));
}

inline Polygon<double> to_polygon(const Quad& q) { return Polygon<double>(q.begin(), q.end()); }

inline double quad_iou(const Quad& a, const Quad& b) { return polygon_iou(to_polygon(a), to_polygon(b)); }

inline Point centroid(const Quad& q) { return (q[0] + q[1] + q[2] + q[3]) / 4.0; }

}  // namespace racf
