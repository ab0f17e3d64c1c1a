// SPDX-License-Identifier: Apache-2.0
//
// secisac - outage-constrained secure ISAC beamforming
// Copyright (C) 2026 The secisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SECISAC_NUMERICS_HPP
#define SECISAC_NUMERICS_HPP

#include "secisac/errors.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace secisac
{

using cplx = std::complex<double>;

// Complex column vector. Length is fixed by whoever builds it; all the
// helpers below check that operands agree.
using CVec = std::vector<cplx>;

// Gradients of a real function with respect to a complex vector use the
// convention g = df/dRe(x) + j df/dIm(x). With that convention the gradient
// of x^H Q x (Q Hermitian) is 2 Q x.
using CGrad = CVec;

namespace detail
{
inline void require_same_size(std::size_t a, std::size_t b, const char *what)
{
    if (a != b)
        throw dimension_error(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                              std::to_string(b) + ")");
}
} // namespace detail

inline double norm_sq(std::span<const cplx> x)
{
    double s = 0.0;
    for (const auto &v : x)
        s += std::norm(v);
    return s;
}

inline double norm(std::span<const cplx> x) { return std::sqrt(norm_sq(x)); }

// x^T y (no conjugation).
inline cplx dot_t(std::span<const cplx> x, std::span<const cplx> y)
{
    detail::require_same_size(x.size(), y.size(), "dot_t");
    cplx s{0.0, 0.0};
    for (std::size_t k = 0; k < x.size(); ++k)
        s += x[k] * y[k];
    return s;
}

// x^H y.
inline cplx dot_h(std::span<const cplx> x, std::span<const cplx> y)
{
    detail::require_same_size(x.size(), y.size(), "dot_h");
    cplx s{0.0, 0.0};
    for (std::size_t k = 0; k < x.size(); ++k)
        s += std::conj(x[k]) * y[k];
    return s;
}

inline CVec conj(std::span<const cplx> x)
{
    CVec out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        out[k] = std::conj(x[k]);
    return out;
}

// y += a * x
inline void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y)
{
    detail::require_same_size(x.size(), y.size(), "axpy");
    for (std::size_t k = 0; k < x.size(); ++k)
        y[k] += a * x[k];
}

inline CVec scaled(std::span<const cplx> x, cplx a)
{
    CVec out(x.begin(), x.end());
    for (auto &v : out)
        v *= a;
    return out;
}

// Dense N x N complex matrix, row-major.
class CMat
{
  public:
    CMat() = default;
    explicit CMat(std::size_t n) : n_(n), data_(n * n, cplx{0.0, 0.0}) {}

    std::size_t size() const { return n_; }
    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

    CVec apply(std::span<const cplx> x) const
    {
        detail::require_same_size(x.size(), n_, "CMat::apply");
        CVec y(n_, cplx{0.0, 0.0});
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t c = 0; c < n_; ++c)
                y[r] += data_[r * n_ + c] * x[c];
        return y;
    }

    cplx trace() const
    {
        cplx t{0.0, 0.0};
        for (std::size_t k = 0; k < n_; ++k)
            t += (*this)(k, k);
        return t;
    }

  private:
    std::size_t n_ = 0;
    std::vector<cplx> data_;
};

// Uniform linear array response, entry k = exp(j 2 pi k zeta sin(theta)).
inline CVec steering_vector(double theta, std::size_t n, double zeta = 0.5)
{
    if (n == 0)
        throw dimension_error("steering_vector: antenna count must be >= 1");
    if (!(zeta > 0.0))
        throw domain_error("steering_vector: element spacing must be positive");
    CVec a(n);
    const double step = 2.0 * std::numbers::pi * zeta * std::sin(theta);
    for (std::size_t k = 0; k < n; ++k)
        a[k] = std::polar(1.0, step * static_cast<double>(k));
    a[0] = cplx{1.0, 0.0};
    return a;
}

// Rank-one sensing channel A = beta a a^H kept in factored form so every
// product costs O(N).
struct RankOneChannel
{
    cplx beta{0.0, 0.0};
    CVec a;

    // A x
    CVec apply(std::span<const cplx> x) const { return scaled(a, beta * dot_h(a, x)); }
    // A^H x
    CVec apply_h(std::span<const cplx> x) const { return scaled(a, std::conj(beta) * dot_h(a, x)); }
    // u^T A x = beta (u^T a)(a^H x)
    cplx bilinear_t(std::span<const cplx> u, std::span<const cplx> x) const
    {
        return beta * dot_t(u, a) * dot_h(a, x);
    }

    CMat dense() const
    {
        CMat m(a.size());
        for (std::size_t r = 0; r < a.size(); ++r)
            for (std::size_t c = 0; c < a.size(); ++c)
                m(r, c) = beta * a[r] * std::conj(a[c]);
        return m;
    }
};

// P[Z > x] for a standard normal Z.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Inverse of q_function on (0, 1). Bisection on a fixed bracket with Newton
// steps accepted only when they stay inside the current bracket.
inline double q_inverse(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw domain_error("q_inverse: probability must lie in (0, 1), got " + std::to_string(p));
    double lo = -40.0, hi = 40.0; // q(lo) > p > q(hi)
    double x = 0.0;
    for (int it = 0; it < 200; ++it)
    {
        const double f = q_function(x) - p;
        if (f == 0.0)
            return x;
        if (f > 0.0)
            lo = x;
        else
            hi = x;
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        double next = (pdf > 0.0) ? x + f / pdf : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)))
            return next;
        x = next;
    }
    return x;
}

// Central-difference gradient oracle. f takes a real parameter vector.
template <class F>
std::vector<double> finite_diff_gradient(F &&f, std::span<const double> x, double h)
{
    if (!(h > 0.0))
        throw domain_error("finite_diff_gradient: step must be positive");
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> g(x.size(), 0.0);
    for (std::size_t k = 0; k < x.size(); ++k)
    {
        const double keep = probe[k];
        probe[k] = keep + h;
        const double fp = f(std::span<const double>(probe));
        probe[k] = keep - h;
        const double fm = f(std::span<const double>(probe));
        probe[k] = keep;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw numeric_error("finite_diff_gradient: non-finite function value at coordinate " +
                                std::to_string(k));
        g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Complex vectors <-> interleaved real coordinates (re0, im0, re1, im1, ...).
inline std::vector<double> flatten(std::span<const CVec> blocks)
{
    std::vector<double> out;
    for (const auto &b : blocks)
        for (const auto &v : b)
        {
            out.push_back(v.real());
            out.push_back(v.imag());
        }
    return out;
}

inline std::vector<double> flatten(std::span<const cplx> x)
{
    std::vector<double> out;
    out.reserve(2 * x.size());
    for (const auto &v : x)
    {
        out.push_back(v.real());
        out.push_back(v.imag());
    }
    return out;
}

// Inverse of flatten for a list of blocks with the given lengths.
inline std::vector<CVec> unflatten(std::span<const double> x, std::span<const std::size_t> lengths)
{
    std::vector<CVec> out;
    std::size_t pos = 0;
    for (auto n : lengths)
    {
        CVec b(n);
        for (std::size_t k = 0; k < n; ++k, pos += 2)
        {
            if (pos + 1 >= x.size())
                throw dimension_error("unflatten: not enough coordinates");
            b[k] = cplx{x[pos], x[pos + 1]};
        }
        out.push_back(std::move(b));
    }
    if (pos != x.size())
        throw dimension_error("unflatten: coordinate count does not match block lengths");
    return out;
}

// ||a - b|| / max(||a||, ||b||, floor)
inline double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-300)
{
    detail::require_same_size(a.size(), b.size(), "relative_error");
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
    {
        diff += (a[k] - b[k]) * (a[k] - b[k]);
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

} // namespace secisac

#endif
