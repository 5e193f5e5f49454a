#pragma once

// Random generators and brute-force oracles shared by the unit and acceptance tests.
// Oracles deliberately avoid the library's FFT and solver code paths.

#include "racf/dcf.hpp"
#include "racf/geometry.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace racf::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(eng_); }
    bool coin() { return integer(0, 1) == 1; }

    Grid<double> grid(Eigen::Index rows, Eigen::Index cols, double lo = -1.0, double hi = 1.0) {
        Grid<double> g(rows, cols);
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = uniform(lo, hi);
        return g;
    }

    Image image(int width, int height, double lo = 0.0, double hi = 255.0) {
        Image img(width, height);
        img.pixels = grid(height, width, lo, hi);
        return img;
    }

    FeatureMap features(int depth, Eigen::Index rows, Eigen::Index cols) {
        FeatureMap x;
        for (int l = 0; l < depth; ++l) x.channels.push_back(grid(rows, cols));
        return x;
    }

    RotatedBox box(double extent = 10.0) {
        return {Point(uniform(-extent, extent), uniform(-extent, extent)), uniform(1.0, 12.0), uniform(1.0, 12.0),
                uniform(-180.0, 180.0)};
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

inline double relative_error(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

template <typename A, typename B>
double relative_error(const A& got, const B& want) {
    const double scale = std::max(want.norm(), 1e-300);
    return (got - want).norm() / scale;
}

// Plain O(M^2 N^2) circular convolution.
inline Grid<double> brute_convolve(const Grid<double>& a, const Grid<double>& b) {
    const Eigen::Index M = a.rows(), N = a.cols();
    Grid<double> out = Grid<double>::Zero(M, N);
    for (Eigen::Index u = 0; u < M; ++u)
        for (Eigen::Index v = 0; v < N; ++v)
            for (Eigen::Index p = 0; p < M; ++p)
                for (Eigen::Index q = 0; q < N; ++q) out(u, v) += a(p, q) * b(((u - p) % M + M) % M, ((v - q) % N + N) % N);
    return out;
}

// Direct O(M^2 N^2) DFT, unnormalized forward transform.
inline Spectrum<double> naive_dft(const Grid<double>& g) {
    const Eigen::Index M = g.rows(), N = g.cols();
    Spectrum<double> out = Spectrum<double>::Zero(M, N);
    for (Eigen::Index k = 0; k < M; ++k)
        for (Eigen::Index l = 0; l < N; ++l)
            for (Eigen::Index m = 0; m < M; ++m)
                for (Eigen::Index n = 0; n < N; ++n)
                    out(k, l) += g(m, n) * std::polar(1.0, -2 * kPi * (double(k * m) / M + double(l * n) / N));
    return out;
}

inline Grid<double> naive_idft_real(const Spectrum<double>& s) {
    const Eigen::Index M = s.rows(), N = s.cols();
    Grid<double> out = Grid<double>::Zero(M, N);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index n = 0; n < N; ++n) {
            std::complex<double> acc = 0;
            for (Eigen::Index k = 0; k < M; ++k)
                for (Eigen::Index l = 0; l < N; ++l)
                    acc += s(k, l) * std::polar(1.0, 2 * kPi * (double(k * m) / M + double(l * n) / N));
            out(m, n) = acc.real() / double(M * N);
        }
    return out;
}

// Spatial weights whose spectrum keeps only the K x K lowest frequencies of w.
inline Grid<double> truncated_weights(const Grid<double>& w, int kernel) {
    Spectrum<double> s = naive_dft(w);
    const int half = kernel / 2;
    for (Eigen::Index k = 0; k < s.rows(); ++k)
        for (Eigen::Index l = 0; l < s.cols(); ++l) {
            const auto wk = k < (s.rows() + 1) / 2 ? k : k - s.rows();
            const auto wl = l < (s.cols() + 1) / 2 ? l : l - s.cols();
            const bool keep_k = std::abs(wk) <= half && !(s.rows() % 2 == 0 && k == s.rows() / 2);
            const bool keep_l = std::abs(wl) <= half && !(s.cols() % 2 == 0 && l == s.cols() / 2);
            if (!(keep_k && keep_l)) s(k, l) = 0;
        }
    return naive_idft_real(s);
}

// Dense real least-squares solve of
//   min_f sum_k a_k || sum_l x_k^l (*) f^l - y ||^2 + sum_l || w (.) f^l ||^2
// through its normal equations, returning the spatial filter channels.
inline std::vector<Grid<double>> dense_filter_solve(const SampleMemory& mem, const Grid<double>& y,
                                                    const Grid<double>& w) {
    const Eigen::Index M = y.rows(), N = y.cols(), P = M * N;
    const int d = mem.samples.front().x.depth();
    auto idx = [N](Eigen::Index m, Eigen::Index n) { return m * N + n; };

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d * P, d * P);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d * P);
    Eigen::VectorXd yv(P);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index n = 0; n < N; ++n) yv[idx(m, n)] = y(m, n);

    for (const auto& smp : mem.samples) {
        // (X f)(u) = sum_l sum_q x^l(u - q) f^l(q)
        Eigen::MatrixXd X(P, d * P);
        for (int l = 0; l < d; ++l)
            for (Eigen::Index um = 0; um < M; ++um)
                for (Eigen::Index un = 0; un < N; ++un)
                    for (Eigen::Index qm = 0; qm < M; ++qm)
                        for (Eigen::Index qn = 0; qn < N; ++qn)
                            X(idx(um, un), l * P + idx(qm, qn)) =
                                smp.x.channels[l]((um - qm + M) % M, (un - qn + N) % N);
        H += smp.weight * X.transpose() * X;
        rhs += smp.weight * X.transpose() * yv;
    }
    for (int l = 0; l < d; ++l)
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index n = 0; n < N; ++n) H(l * P + idx(m, n), l * P + idx(m, n)) += w(m, n) * w(m, n);

    const Eigen::VectorXd f = H.ldlt().solve(rhs);
    std::vector<Grid<double>> out(d, Grid<double>(M, N));
    for (int l = 0; l < d; ++l)
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index n = 0; n < N; ++n) out[l](m, n) = f[l * P + idx(m, n)];
    return out;
}

// Real trigonometric interpolant of a sampled periodic grid, evaluated on an
// arbitrary lattice of (u, v) positions by separable matrix products.
class TrigInterpolant {
public:
    explicit TrigInterpolant(const Grid<double>& s) : M_(s.rows()), N_(s.cols()), coeff_(naive_dft(s)) {}

    Eigen::MatrixXd evaluate(const Eigen::VectorXd& us, const Eigen::VectorXd& vs) const {
        const Eigen::MatrixXcd Eu = basis(us, M_), Ev = basis(vs, N_);
        return (Eu * coeff_ * Ev.transpose()).real() / double(M_ * N_);
    }

    double at(double u, double v) const {
        return evaluate(Eigen::VectorXd::Constant(1, u), Eigen::VectorXd::Constant(1, v))(0, 0);
    }

private:
    // e^{i 2 pi k t / L} over symmetric frequencies; the Nyquist term of an even
    // axis is replaced by its real part (cosine) so the interpolant is real.
    static Eigen::MatrixXcd basis(const Eigen::VectorXd& t, Eigen::Index L) {
        Eigen::MatrixXcd E(t.size(), L);
        for (Eigen::Index i = 0; i < t.size(); ++i)
            for (Eigen::Index k = 0; k < L; ++k) {
                const double freq = k < (L + 1) / 2 ? double(k) : double(k - L);
                if (L % 2 == 0 && k == L / 2)
                    E(i, k) = std::cos(2 * kPi * double(k) * t[i] / double(L));
                else
                    E(i, k) = std::polar(1.0, 2 * kPi * freq * t[i] / double(L));
            }
        return E;
    }

    Eigen::Index M_, N_;
    Spectrum<double> coeff_;
};

inline double torus_offset(double a, double b, double period) {
    double d = std::fmod(a - b, period);
    if (d < -period / 2) d += period;
    if (d >= period / 2) d -= period;
    return d;
}

struct DensePeak {
    double u = 0, v = 0, value = 0;
};

// Argmax of s/D on a 50x oversampled lattice over the whole torus, followed by
// a second 50x pass on the cell of the first-stage maximum.
inline DensePeak dense_fpe_argmax(const Grid<double>& s, double prev_u, double prev_v, double rho, bool fpe) {
    const TrigInterpolant trig(s);
    const Eigen::Index M = s.rows(), N = s.cols();
    auto objective = [&](const Eigen::VectorXd& us, const Eigen::VectorXd& vs, DensePeak& best) {
        const Eigen::MatrixXd vals = trig.evaluate(us, vs);
        for (Eigen::Index i = 0; i < us.size(); ++i)
            for (Eigen::Index j = 0; j < vs.size(); ++j) {
                double F = vals(i, j);
                if (fpe) {
                    const double du = torus_offset(us[i], prev_u, double(M)), dv = torus_offset(vs[j], prev_v, double(N));
                    F /= std::sqrt(du * du + dv * dv + rho * rho);
                }
                if (F > best.value) best = {us[i], vs[j], F};
            }
    };
    constexpr int kOver = 50;
    DensePeak coarse{0, 0, -std::numeric_limits<double>::infinity()};
    objective(Eigen::VectorXd::LinSpaced(M * kOver, 0.0, double(M) - 1.0 / kOver),
              Eigen::VectorXd::LinSpaced(N * kOver, 0.0, double(N) - 1.0 / kOver), coarse);
    const double h = 1.0 / kOver;
    DensePeak fine = coarse;
    objective(Eigen::VectorXd::LinSpaced(2 * kOver + 1, coarse.u - h, coarse.u + h),
              Eigen::VectorXd::LinSpaced(2 * kOver + 1, coarse.v - h, coarse.v + h), fine);
    return fine;
}

// Overlap of two convex polygons measured on a res x res raster of their joint bounding box.
inline double raster_iou(const Quad& a, const Quad& b, int res = 500) {
    double x0 = a[0].x(), x1 = x0, y0 = a[0].y(), y1 = y0;
    for (const auto* q : {&a, &b})
        for (const Point& p : *q) {
            x0 = std::min(x0, p.x());
            x1 = std::max(x1, p.x());
            y0 = std::min(y0, p.y());
            y1 = std::max(y1, p.y());
        }
    auto inside = [](const Quad& q, double x, double y) {
        int sign = 0;
        for (int i = 0; i < 4; ++i) {
            const Point& p = q[i];
            const Point& r = q[(i + 1) % 4];
            const double c = (r.x() - p.x()) * (y - p.y()) - (r.y() - p.y()) * (x - p.x());
            const int s = c > 0 ? 1 : (c < 0 ? -1 : 0);
            if (s == 0) continue;
            if (sign == 0) sign = s;
            else if (s != sign) return false;
        }
        return true;
    };
    long both = 0, either = 0;
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
            const double x = x0 + (j + 0.5) * (x1 - x0) / res, y = y0 + (i + 0.5) * (y1 - y0) / res;
            const bool ia = inside(a, x, y), ib = inside(b, x, y);
            both += ia && ib;
            either += ia || ib;
        }
    return either ? double(both) / double(either) : 0.0;
}

// Sample memory over random features, weights drawn from the decay rule.
inline SampleMemory random_memory(Rng& rng, int count, int depth, Eigen::Index rows, Eigen::Index cols) {
    SampleMemory mem;
    for (int k = 0; k < count; ++k) mem = update_memory(std::move(mem), rng.features(depth, rows, cols), 0.0, 0.2);
    return mem;
}

}  // namespace racf::testing
