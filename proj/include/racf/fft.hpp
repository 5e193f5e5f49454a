#pragma once

#include "racf/types.hpp"

#include <unsupported/Eigen/FFT>

#include <vector>

namespace racf {

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
    thread_local Eigen::FFT<Scalar> engine;
    return engine;
}

template <typename Scalar>
void transform_axes(Spectrum<Scalar>& g, bool inverse) {
    auto& fft = fft_engine<Scalar>();
    fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    using C = std::complex<Scalar>;
    std::vector<C> in, out;

    in.resize(g.cols());
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.cols(); ++c) in[c] = g(r, c);
        if (inverse) fft.inv(out, in); else fft.fwd(out, in);
        for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = out[c];
    }
    in.resize(g.rows());
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
        for (Eigen::Index r = 0; r < g.rows(); ++r) in[r] = g(r, c);
        if (inverse) fft.inv(out, in); else fft.fwd(out, in);
        for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = out[r];
    }
}

}  // namespace detail

/// Unnormalized 2-D DFT: X(m,n) = sum x(p,q) exp(-i 2pi (mp/M + nq/N)).
template <typename Derived>
Spectrum<typename Derived::Scalar> fft2(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    Spectrum<Scalar> g = x.template cast<std::complex<Scalar>>();
    detail::transform_axes<Scalar>(g, false);
    return g;
}

template <typename Scalar>
Spectrum<Scalar> fft2(const Spectrum<Scalar>& x) {
    Spectrum<Scalar> g = x;
    detail::transform_axes<Scalar>(g, false);
    return g;
}

/// Inverse DFT including the 1/(MN) factor.
template <typename Scalar>
Spectrum<Scalar> ifft2(const Spectrum<Scalar>& x) {
    Spectrum<Scalar> g = x;
    detail::transform_axes<Scalar>(g, true);
    g /= Scalar(x.size());
    return g;
}

template <typename Scalar>
Grid<Scalar> ifft2_real(const Spectrum<Scalar>& x) {
    return ifft2(x).real();
}

/// Largest deviation from conjugate symmetry X(m,n) = conj(X(-m,-n)).
template <typename Scalar>
Scalar hermitian_defect(const Spectrum<Scalar>& x) {
    const Eigen::Index M = x.rows(), N = x.cols();
    Scalar worst = 0;
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index n = 0; n < N; ++n)
            worst = std::max(worst, std::abs(x(m, n) - std::conj(x((M - m) % M, (N - n) % N))));
    return worst;
}

/// Projects onto the conjugate-symmetric subspace (spectra of real signals).
template <typename Scalar>
Spectrum<Scalar> hermitian_part(const Spectrum<Scalar>& x) {
    const Eigen::Index M = x.rows(), N = x.cols();
    Spectrum<Scalar> out(M, N);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index n = 0; n < N; ++n)
            out(m, n) = Scalar(0.5) * (x(m, n) + std::conj(x((M - m) % M, (N - n) % N)));
    return out;
}

}  // namespace racf
