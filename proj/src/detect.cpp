#include "racf/detect.hpp"

#include "racf/patch.hpp"

#include <algorithm>
#include <limits>

namespace racf {

namespace {

using cplx = std::complex<double>;

struct AxisBasis {
    Eigen::VectorXcd e, de, d2e;
};

// e(m) = sum_k w_k exp(i 2pi k t / L) over the symmetric frequency set of index m.
AxisBasis axis_basis(Eigen::Index L, double t) {
    AxisBasis b{Eigen::VectorXcd(L), Eigen::VectorXcd(L), Eigen::VectorXcd(L)};
    auto add = [&](Eigen::Index m, double k, double weight) {
        const double omega = 2 * kPi * k / double(L);
        const cplx ph = weight * std::polar(1.0, omega * t);
        b.e[m] += ph;
        b.de[m] += cplx(0, omega) * ph;
        b.d2e[m] += -omega * omega * ph;
    };
    b.e.setZero();
    b.de.setZero();
    b.d2e.setZero();
    for (Eigen::Index m = 0; m < L; ++m) {
        if (2 * m < L) {
            add(m, double(m), 1.0);
        } else if (2 * m > L) {
            add(m, double(m - L), 1.0);
        } else {
            add(m, double(m), 0.5);
            add(m, -double(m), 0.5);
        }
    }
    return b;
}

cplx dotu(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a.array() * b.array()).sum(); }

constexpr double kEnergyTieTol = 1e-12;

}  // namespace

void SearchConfig::validate() const {
    require(scales >= 1 && scales % 2 == 1, "SearchConfig: scale count must be odd and >= 1");
    require(scale_step > 1, "SearchConfig: scale step must exceed 1");
    require(rot_halfcount >= 0, "SearchConfig: orientation half-count must be >= 0");
    require(rot_delta > 0, "SearchConfig: orientation step must be positive");
    require(rho > 0, "SearchConfig: rho must be positive");
    require(newton_iters >= 0, "SearchConfig: newton_iters must be >= 0");
}

std::vector<int> SearchConfig::scale_exponents() const {
    std::vector<int> r;
    const int lo = static_cast<int>(std::floor((1.0 - scales) / 2.0));
    const int hi = static_cast<int>(std::floor((scales - 1.0) / 2.0));
    for (int i = lo; i <= hi; ++i) r.push_back(i);
    return r;
}

std::vector<double> SearchConfig::orientations(double theta_k) const {
    std::vector<double> out;
    for (int a = -rot_halfcount; a <= rot_halfcount; ++a) out.push_back(normalize_degrees(theta_k + a * rot_delta));
    return out;
}

double fpe_denominator(const GridPoint& p, const GridPoint& prev, double rho, Eigen::Index rows, Eigen::Index cols) {
    require(rho > 0, "fpe_denominator: rho must be positive");
    const double du = wrap_offset(p.u - prev.u, double(rows));
    const double dv = wrap_offset(p.v - prev.v, double(cols));
    return std::sqrt(du * du + dv * dv + rho * rho);
}

ScoreSample interpolate_score(const ScoreMap& sm, double u, double v) {
    const Eigen::Index M = sm.s_hat.rows(), N = sm.s_hat.cols();
    const AxisBasis bu = axis_basis(M, u), bv = axis_basis(N, v);
    // row-vector forms: sum_m sum_n s_hat(m,n) a(m) b(n) = a^T S b
    const Eigen::VectorXcd Sv = sm.s_hat * bv.e;
    const Eigen::VectorXcd Sdv = sm.s_hat * bv.de;
    const Eigen::VectorXcd Sd2v = sm.s_hat * bv.d2e;
    const double inv = 1.0 / double(M * N);
    const cplx val = dotu(bu.e, Sv);
    const cplx gu = dotu(bu.de, Sv);
    const cplx gv = dotu(bu.e, Sdv);
    const cplx huu = dotu(bu.d2e, Sv);
    const cplx huv = dotu(bu.de, Sdv);
    const cplx hvv = dotu(bu.e, Sd2v);

    ScoreSample out;
    out.value = val.real() * inv;
    out.imag_residue = std::abs(val.imag()) * inv;
    out.gradient = Eigen::Vector2d(gu.real(), gv.real()) * inv;
    out.hessian << huu.real(), huv.real(), huv.real(), hvv.real();
    out.hessian *= inv;
    return out;
}

ScoreSample fpe_objective(const ScoreMap& sm, const GridPoint& p, const GridPoint& prev, double rho, bool fpe) {
    ScoreSample s = interpolate_score(sm, p.u, p.v);
    if (!fpe) return s;
    const Eigen::Vector2d delta(wrap_offset(p.u - prev.u, double(sm.s.rows())),
                                wrap_offset(p.v - prev.v, double(sm.s.cols())));
    const double D = std::sqrt(delta.squaredNorm() + rho * rho);
    const double q = 1.0 / D;
    const Eigen::Vector2d dq = -delta / (D * D * D);
    const Eigen::Matrix2d hq = -Eigen::Matrix2d::Identity() / (D * D * D) + 3.0 * delta * delta.transpose() / std::pow(D, 5);

    ScoreSample f;
    f.value = s.value * q;
    f.imag_residue = s.imag_residue * q;
    f.gradient = q * s.gradient + s.value * dq;
    f.hessian = q * s.hessian + s.gradient * dq.transpose() + dq * s.gradient.transpose() + s.value * hq;
    return f;
}

GridPeak fpe_grid_peak(const ScoreMap& sm, const GridPoint& prev, double rho, bool fpe) {
    GridPeak best{{0, 0}, -std::numeric_limits<double>::infinity()};
    for (Eigen::Index m = 0; m < sm.s.rows(); ++m)
        for (Eigen::Index n = 0; n < sm.s.cols(); ++n) {
            const GridPoint p{double(m), double(n)};
            const double D = fpe ? fpe_denominator(p, prev, rho, sm.s.rows(), sm.s.cols()) : 1.0;
            const double score = sm.s(m, n) / D;
            if (score > best.score) best = {p, score};
        }
    return best;
}

double orientation_energy(const ScoreMap& sm, const GridPoint& prev, double rho, bool fpe) {
    double e = 0;
    for (Eigen::Index m = 0; m < sm.s.rows(); ++m)
        for (Eigen::Index n = 0; n < sm.s.cols(); ++n) {
            const double D = fpe ? fpe_denominator({double(m), double(n)}, prev, rho, sm.s.rows(), sm.s.cols()) : 1.0;
            const double r = sm.s(m, n) / D;
            e += r * r;
        }
    return e;
}

double detect_orientation(const std::vector<ScoreMap>& responses, double theta_k, const GridPoint& prev, double rho,
                          bool fpe) {
    require(!responses.empty(), "detect_orientation: no candidate orientations");
    std::vector<double> energy;
    energy.reserve(responses.size());
    for (const auto& r : responses) energy.push_back(orientation_energy(r, prev, rho, fpe));
    const double top = *std::max_element(energy.begin(), energy.end());
    const double tol = kEnergyTieTol * std::max(1.0, std::abs(top));

    double best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < responses.size(); ++i) {
        if (energy[i] < top - tol) continue;
        const double theta = responses[i].theta;
        const double gap = std::abs(normalize_degrees(theta - theta_k));
        if (gap < best_gap || (gap == best_gap && theta < best)) {
            best = theta;
            best_gap = gap;
        }
    }
    return best;
}

Refinement newton_refine(const ScoreMap& sm, const GridPoint& start, const GridPoint& prev, double rho, int iters,
                         bool fpe) {
    const double M = double(sm.s.rows()), N = double(sm.s.cols());
    auto wrap = [&](GridPoint p) {
        p.u = std::fmod(p.u, M);
        if (p.u < 0) p.u += M;
        p.v = std::fmod(p.v, N);
        if (p.v < 0) p.v += N;
        if (p.u >= M) p.u = 0;
        if (p.v >= N) p.v = 0;
        return p;
    };

    GridPoint x = wrap(start);
    ScoreSample cur = fpe_objective(sm, x, prev, rho, fpe);
    for (int it = 0; it < iters; ++it) {
        if (cur.gradient.norm() < 1e-14) break;
        Eigen::Vector2d step;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cur.hessian);
        if (eig.eigenvalues().maxCoeff() < 0) {
            step = -cur.hessian.ldlt().solve(cur.gradient);
        } else {
            // not locally concave: gradient ascent scaled by the curvature magnitude
            const double curvature = eig.eigenvalues().cwiseAbs().maxCoeff();
            step = cur.gradient / std::max(curvature, 1e-3 * std::abs(cur.value) + 1e-12);
        }
        const double len = step.norm();
        if (len > 1.0) step /= len;

        bool accepted = false;
        for (int halving = 0; halving <= 10; ++halving) {
            const GridPoint trial = wrap({x.u + step.x(), x.v + step.y()});
            const ScoreSample next = fpe_objective(sm, trial, prev, rho, fpe);
            if (next.value >= cur.value) {
                x = trial;
                cur = next;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }

    Refinement out;
    out.at = x;
    out.fpe_score = cur.value;
    out.raw_score = fpe ? interpolate_score(sm, x.u, x.v).value : cur.value;
    return out;
}

FeatureMap oriented_features(const Image& frame, const Pose& pose, const SearchWindow& win, double scale,
                             double theta) {
    const Patch patch = extract_patch(frame, pose.center, win.region, scale, win.rows, win.cols);
    const double angle = pose.base_angle + theta;
    return extract_features(angle == 0.0 ? patch : rotate_patch(patch, -angle), win.cell_size);
}

DetectionResult detect(const CorrelationFilter& f, const Image& frame, const Pose& pose, const SearchWindow& win,
                       const SearchConfig& cfg) {
    cfg.validate();
    const GridPoint prev{0, 0};  // the search window is centered on the previous location

    struct Candidate {
        ScoreMap map;
        GridPeak peak;
        int r;
        double scale;
    };
    std::vector<Candidate> per_scale;
    const auto thetas = cfg.orientations(pose.theta);
    for (const int r : cfg.scale_exponents()) {
        const double scale = pose.scale * std::pow(cfg.scale_step, r);
        const Patch patch = extract_patch(frame, pose.center, win.region, scale, win.rows, win.cols);
        std::vector<ScoreMap> maps;
        for (const double theta : thetas) {
            const double angle = pose.base_angle + theta;
            const Patch oriented = angle == 0.0 ? patch : rotate_patch(patch, -angle);
            ScoreMap sm = response(f, extract_features(oriented, win.cell_size));
            sm.scale_index = r;
            sm.theta = theta;
            maps.push_back(std::move(sm));
        }
        const double theta = detect_orientation(maps, pose.theta, prev, cfg.rho, cfg.fpe);
        auto chosen = std::find_if(maps.begin(), maps.end(), [&](const ScoreMap& m) { return m.theta == theta; });
        GridPeak peak = fpe_grid_peak(*chosen, prev, cfg.rho, cfg.fpe);
        per_scale.push_back({std::move(*chosen), peak, r, scale});
    }

    // strict comparison keeps the first (smallest r) candidate on ties
    const Candidate* win_c = &per_scale.front();
    for (const auto& c : per_scale)
        if (c.peak.score > win_c->peak.score) win_c = &c;

    const Refinement ref = newton_refine(win_c->map, win_c->peak.at, prev, cfg.rho, cfg.newton_iters, cfg.fpe);
    const auto M = win_c->map.s.rows(), N = win_c->map.s.cols();

    DetectionResult res;
    res.u_star = ref.at.u;
    res.v_star = ref.at.v;
    res.scale_index = win_c->r;
    res.theta = win_c->map.theta;
    res.fpe_score = ref.fpe_score;
    res.raw_score = ref.raw_score;
    res.scale_factor = std::pow(cfg.scale_step, win_c->r);

    const Point canonical(wrap_offset(ref.at.v, double(N)) * win.cell_size, wrap_offset(ref.at.u, double(M)) * win.cell_size);
    const Point in_patch = rotate_on_screen(canonical, pose.base_angle + res.theta);
    res.displacement = {in_patch.x() * win.region.width * win_c->scale / win.cols,
                        in_patch.y() * win.region.height * win_c->scale / win.rows};
    res.low_confidence = !(res.raw_score >= kLowConfidenceScore) || !std::isfinite(res.fpe_score);
    res.winner = win_c->map;
    return res;
}

}  // namespace racf
