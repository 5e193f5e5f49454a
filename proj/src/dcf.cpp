#include "racf/dcf.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>

namespace racf {

namespace {

using cplx = std::complex<double>;

struct Offset {
    Eigen::Index dm, dn;
    cplx value;
};

void check_shape(const FeatureSpectrum& x, const CorrelationFilter& f) {
    require(!x.empty() && int(x.size()) == f.depth() && x.front().rows() == f.rows() && x.front().cols() == f.cols(),
            "correlation filter and features disagree in shape");
}

// Nonzero support of g = w_hat / (MN) as a list of torus offsets.
std::vector<Offset> regularizer_kernel(const RegWeights& reg) {
    const double scale = 1.0 / double(reg.w_hat.size());
    std::vector<Offset> g;
    for (Eigen::Index m = 0; m < reg.w_hat.rows(); ++m)
        for (Eigen::Index n = 0; n < reg.w_hat.cols(); ++n)
            if (reg.w_hat(m, n) != cplx(0)) g.push_back({m, n, reg.w_hat(m, n) * scale});
    return g;
}

// h(delta) = sum_s conj(g(s)) g(s + delta): the stencil of C^H C.
Spectrum<double> gram_stencil(const std::vector<Offset>& g, Eigen::Index M, Eigen::Index N) {
    Spectrum<double> h = Spectrum<double>::Zero(M, N);
    for (const auto& s : g)
        for (const auto& t : g) h(((t.dm - s.dm) % M + M) % M, ((t.dn - s.dn) % N + N) % N) += std::conj(s.value) * t.value;
    return h;
}

class NormalEquations {
public:
    NormalEquations(const SampleMemory& mem, const Labels& labels, const RegWeights& reg)
        : M_(labels.y.rows()), N_(labels.y.cols()) {
        require(!mem.samples.empty(), "train: empty sample memory");
        d_ = mem.samples.front().x.depth();
        for (const auto& smp : mem.samples)
            require(smp.x.depth() == d_ && smp.x.rows() == M_ && smp.x.cols() == N_,
                    "train: samples, labels and weights must share dimensions");
        require(reg.w.rows() == M_ && reg.w.cols() == N_, "train: regularizer shape mismatch");

        const Spectrum<double> h = gram_stencil(regularizer_kernel(reg), M_, N_);
        diag_ = h(0, 0);
        for (Eigen::Index m = 0; m < M_; ++m)
            for (Eigen::Index n = 0; n < N_; ++n)
                if ((m || n) && h(m, n) != cplx(0)) stencil_.push_back({m, n, h(m, n)});

        const Eigen::Index P = M_ * N_;
        blocks_.resize(P);
        rhs_.resize(P);
        for (Eigen::Index m = 0; m < M_; ++m)
            for (Eigen::Index n = 0; n < N_; ++n) {
                Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(d_, d_);
                Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d_);
                Eigen::VectorXcd a(d_);
                for (const auto& smp : mem.samples) {
                    for (int l = 0; l < d_; ++l) a[l] = smp.x_hat[l](m, n);
                    A.noalias() += smp.weight * a.conjugate() * a.transpose();
                    b.noalias() += smp.weight * labels.y_hat(m, n) * a.conjugate();
                }
                blocks_[index(m, n)] = A;
                rhs_[index(m, n)] = b;
            }
    }

    int depth() const { return d_; }

    // (A_p + h0 I) f_p + sum_delta h(delta) f_{p - delta}
    Eigen::VectorXcd apply_at(const CorrelationFilter& f, Eigen::Index m, Eigen::Index n) const {
        Eigen::VectorXcd out = (blocks_[index(m, n)] + diag_ * Eigen::MatrixXcd::Identity(d_, d_)) * gather(f, m, n);
        out += coupling(f, m, n);
        return out;
    }

    double residual_norm(const CorrelationFilter& f) const {
        double sq = 0;
        for (Eigen::Index m = 0; m < M_; ++m)
            for (Eigen::Index n = 0; n < N_; ++n) sq += (rhs_[index(m, n)] - apply_at(f, m, n)).squaredNorm();
        return std::sqrt(sq);
    }

    double rhs_norm() const {
        double sq = 0;
        for (const auto& b : rhs_) sq += b.squaredNorm();
        return std::sqrt(sq);
    }

    void sweep(CorrelationFilter& f) {
        if (solvers_.empty()) {
            solvers_.reserve(blocks_.size());
            for (const auto& A : blocks_) solvers_.emplace_back(A + diag_ * Eigen::MatrixXcd::Identity(d_, d_));
        }
        for (Eigen::Index m = 0; m < M_; ++m)
            for (Eigen::Index n = 0; n < N_; ++n) {
                const Eigen::VectorXcd x = solvers_[index(m, n)].solve(rhs_[index(m, n)] - coupling(f, m, n));
                for (int l = 0; l < d_; ++l) f.coeffs[l](m, n) = x[l];
            }
    }

private:
    Eigen::Index index(Eigen::Index m, Eigen::Index n) const { return m * N_ + n; }

    Eigen::VectorXcd gather(const CorrelationFilter& f, Eigen::Index m, Eigen::Index n) const {
        Eigen::VectorXcd v(d_);
        for (int l = 0; l < d_; ++l) v[l] = f.coeffs[l](m, n);
        return v;
    }

    Eigen::VectorXcd coupling(const CorrelationFilter& f, Eigen::Index m, Eigen::Index n) const {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(d_);
        for (const auto& o : stencil_) {
            const Eigen::Index qm = (m - o.dm + M_) % M_, qn = (n - o.dn + N_) % N_;
            for (int l = 0; l < d_; ++l) acc[l] += o.value * f.coeffs[l](qm, qn);
        }
        return acc;
    }

    Eigen::Index M_, N_;
    int d_ = 0;
    cplx diag_{0};
    std::vector<Offset> stencil_;
    std::vector<Eigen::MatrixXcd> blocks_;
    std::vector<Eigen::VectorXcd> rhs_;
    std::vector<Eigen::LLT<Eigen::MatrixXcd>> solvers_;
};

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T take(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw FormatError("truncated filter dump");
    return v;
}

constexpr char kDumpMagic[8] = {'R', 'A', 'C', 'F', 'F', 'L', 'T', '1'};

}  // namespace

FeatureSpectrum transform(const FeatureMap& x) {
    FeatureSpectrum out;
    out.reserve(x.channels.size());
    for (const auto& ch : x.channels) out.push_back(fft2(ch));
    return out;
}

CorrelationFilter CorrelationFilter::zeros(int depth, Eigen::Index rows, Eigen::Index cols) {
    CorrelationFilter f;
    f.coeffs.assign(depth, Spectrum<double>::Zero(rows, cols));
    return f;
}

std::vector<Grid<double>> CorrelationFilter::spatial() const {
    std::vector<Grid<double>> out;
    for (const auto& c : coeffs) out.push_back(ifft2_real(c));
    return out;
}

void write_filter_dump(const CorrelationFilter& f, std::ostream& out) {
    out.write(kDumpMagic, sizeof kDumpMagic);
    put<std::uint32_t>(out, std::uint32_t(f.depth()));
    put<std::uint32_t>(out, std::uint32_t(f.rows()));
    put<std::uint32_t>(out, std::uint32_t(f.cols()));
    for (const auto& c : f.coeffs)
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            put<double>(out, c.data()[i].real());
            put<double>(out, c.data()[i].imag());
        }
}

CorrelationFilter read_filter_dump(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kDumpMagic, sizeof magic) != 0) throw FormatError("not a filter dump");
    const auto d = take<std::uint32_t>(in), M = take<std::uint32_t>(in), N = take<std::uint32_t>(in);
    auto f = CorrelationFilter::zeros(int(d), M, N);
    for (auto& c : f.coeffs)
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            const double re = take<double>(in);
            c.data()[i] = {re, take<double>(in)};
        }
    return f;
}

Labels make_labels(int rows, int cols, double sigma) {
    require(sigma > 0, "make_labels: sigma must be positive");
    require(rows >= 1 && cols >= 1, "make_labels: empty grid");
    Labels lab;
    lab.y.resize(rows, cols);
    for (int m = 0; m < rows; ++m)
        for (int n = 0; n < cols; ++n) {
            const double dm = wrap_offset(m, rows), dn = wrap_offset(n, cols);
            lab.y(m, n) = std::exp(-(dm * dm + dn * dn) / (2 * sigma * sigma));
        }
    lab.y_hat = fft2(lab.y);
    return lab;
}

Grid<double> RegWeights::effective() const { return ifft2_real(w_hat); }

RegWeights make_reg_weights(int rows, int cols, double target_rows, double target_cols, double w_min,
                            double w_scale, int kernel) {
    require(w_min > 0 && w_scale > 0, "make_reg_weights: w_min and w_scale must be positive");
    require(target_rows > 0 && target_cols > 0 && target_rows <= rows && target_cols <= cols,
            "make_reg_weights: target must fit inside the grid");
    require(kernel == 0 || kernel % 2 == 1, "make_reg_weights: kernel size must be odd");
    RegWeights reg;
    reg.kernel = kernel;
    reg.w.resize(rows, cols);
    for (int m = 0; m < rows; ++m)
        for (int n = 0; n < cols; ++n) {
            const double dm = 2.0 * (m - rows / 2) / target_rows, dn = 2.0 * (n - cols / 2) / target_cols;
            reg.w(m, n) = w_min + w_scale * (dm * dm + dn * dn);
        }
    reg.w_hat = fft2(reg.w);
    if (kernel > 0) {
        const int half = kernel / 2;
        for (int m = 0; m < rows; ++m)
            for (int n = 0; n < cols; ++n)
                if (std::abs(wrap_offset(m, rows)) > half || std::abs(wrap_offset(n, cols)) > half) reg.w_hat(m, n) = 0.0;
    }
    return reg;
}

double SampleMemory::total_weight() const {
    double s = 0;
    for (const auto& smp : samples) s += smp.weight;
    return s;
}

SampleMemory update_memory(SampleMemory mem, const FeatureMap& x, double theta, double learning_rate) {
    require(learning_rate > 0 && learning_rate < 1, "update_memory: learning_rate must be in (0,1)");
    require(mem.capacity >= 1, "update_memory: capacity must be positive");
    const bool first = mem.samples.empty();
    for (auto& smp : mem.samples) smp.weight *= 1 - learning_rate;
    mem.samples.push_back({x, transform(x), theta, first ? 1.0 : learning_rate, mem.next_serial++});

    if (mem.samples.size() > mem.capacity) {
        // samples are kept in insertion order, so the first minimum found is the oldest
        auto victim = std::min_element(mem.samples.begin(), mem.samples.end(),
                                       [](const Sample& a, const Sample& b) { return a.weight < b.weight; });
        mem.samples.erase(victim);
        const double total = mem.total_weight();
        for (auto& smp : mem.samples) smp.weight /= total;
    }
    return mem;
}

TrainResult train(const SampleMemory& mem, const Labels& labels, const RegWeights& reg,
                  const std::optional<CorrelationFilter>& warm_start, const TrainOptions& opts) {
    NormalEquations eq(mem, labels, reg);
    const auto M = labels.y.rows(), N = labels.y.cols();

    TrainResult result;
    if (warm_start) {
        require(warm_start->depth() == eq.depth() && warm_start->rows() == M && warm_start->cols() == N,
                "train: warm start shape mismatch");
        result.filter = *warm_start;
    } else {
        result.filter = CorrelationFilter::zeros(eq.depth(), M, N);
    }

    const double bnorm = eq.rhs_norm();
    result.residual_history.push_back(eq.residual_norm(result.filter));
    for (int it = 0; it < opts.sweeps; ++it) {
        eq.sweep(result.filter);
        result.residual_history.push_back(eq.residual_norm(result.filter));
    }
    for (auto& c : result.filter.coeffs) c = hermitian_part(c);

    const double r = eq.residual_norm(result.filter);
    result.relative_residual = bnorm > 0 ? r / bnorm : r;
    result.converged = result.relative_residual <= opts.tolerance;
    return result;
}

Grid<double> circular_convolve(const Grid<double>& a, const Grid<double>& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "circular_convolve: shape mismatch");
    const auto M = a.rows(), N = a.cols();
    Grid<double> out = Grid<double>::Zero(M, N);
    for (Eigen::Index u = 0; u < M; ++u)
        for (Eigen::Index v = 0; v < N; ++v) {
            double acc = 0;
            for (Eigen::Index p = 0; p < M; ++p)
                for (Eigen::Index q = 0; q < N; ++q) acc += a(p, q) * b((u - p + M) % M, (v - q + N) % N);
            out(u, v) = acc;
        }
    return out;
}

double spatial_cost(const CorrelationFilter& f, const SampleMemory& mem, const Labels& labels,
                    const RegWeights& reg) {
    const auto filt = f.spatial();
    double cost = 0;
    for (const auto& smp : mem.samples) {
        Grid<double> s = Grid<double>::Zero(labels.y.rows(), labels.y.cols());
        for (int l = 0; l < f.depth(); ++l) s += circular_convolve(smp.x.channels[l], filt[l]);
        cost += smp.weight * (s - labels.y).squaredNorm();
    }
    const Grid<double> w = reg.effective();
    for (const auto& fl : filt) cost += w.cwiseProduct(fl).squaredNorm();
    return cost;
}

double fourier_cost(const CorrelationFilter& f, const SampleMemory& mem, const Labels& labels,
                    const RegWeights& reg) {
    const auto M = labels.y.rows(), N = labels.y.cols();
    double cost = 0;
    for (const auto& smp : mem.samples) {
        Spectrum<double> s = Spectrum<double>::Zero(M, N);
        for (int l = 0; l < f.depth(); ++l) s += smp.x_hat[l].cwiseProduct(f.coeffs[l]);
        cost += smp.weight * (s - labels.y_hat).squaredNorm();
    }
    const auto g = regularizer_kernel(reg);
    for (const auto& fl : f.coeffs) {
        Spectrum<double> conv = Spectrum<double>::Zero(M, N);
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index n = 0; n < N; ++n)
                for (const auto& o : g) conv(m, n) += o.value * fl((m - o.dm + M) % M, (n - o.dn + N) % N);
        cost += conv.squaredNorm();
    }
    return cost / double(M * N);
}

ScoreMap response(const CorrelationFilter& f, const FeatureSpectrum& x_hat) {
    check_shape(x_hat, f);
    ScoreMap sm;
    sm.s_hat = Spectrum<double>::Zero(f.rows(), f.cols());
    for (int l = 0; l < f.depth(); ++l) sm.s_hat += x_hat[l].cwiseProduct(f.coeffs[l]);
    sm.s = ifft2_real(sm.s_hat);
    return sm;
}

ScoreMap response(const CorrelationFilter& f, const FeatureMap& x) { return response(f, transform(x)); }

}  // namespace racf
