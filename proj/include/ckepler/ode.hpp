/**
 * @brief Adaptive Dormand-Prince 5(4) integrator with continuous output.
 *
 * Fixed-size state vectors, error-per-step control in the max norm with a
 * mixed absolute/relative tolerance, FSAL stage reuse, and Hairer's fourth-order
 * dense interpolant on every accepted step. A step hook lets the caller veto
 * an accepted step (for instance on an invariant spike) or stop the
 * integration at an event.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ckepler/errors.hpp"

namespace ckepler::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Continuous extension over one accepted step [t0, t0 + h].
template <std::size_t N>
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<Vec<N>, 5> coeff{};

    double t1() const { return t0 + h; }

    Vec<N> operator()(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        Vec<N> y{};
        for (std::size_t i = 0; i < N; ++i)
            y[i] = coeff[0][i] +
                   th * (coeff[1][i] + th1 * (coeff[2][i] + th * (coeff[3][i] + th1 * coeff[4][i])));
        return y;
    }
};

enum class StepVerdict { accept, reject, stop };

enum class Termination { completed, stopped, step_underflow, max_steps };

struct Options {
    double tol = 1e-10;        ///< used as both relative and absolute tolerance
    double initial_step = 0.0; ///< 0 selects a step from the local scale of the problem
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
};

template <std::size_t N>
struct Solution {
    std::vector<double> t;
    std::vector<Vec<N>> y;
    std::vector<DenseSegment<N>> segments;
    Termination termination = Termination::completed;
    std::size_t rejected = 0;

    /// Dense value at time t inside [t.front(), t.back()].
    Vec<N> at(double tq) const {
        if (segments.empty() || tq < t.front() || tq > t.back())
            throw std::out_of_range("dense output queried outside the integrated interval");
        auto it = std::upper_bound(t.begin(), t.end(), tq);
        std::size_t idx = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
        idx = std::min(idx, segments.size() - 1);
        return segments[idx](tq);
    }
};

namespace tableau {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace tableau

namespace detail {

template <std::size_t N, class... Terms>
Vec<N> combine(const Vec<N>& y, double h, const Terms&... terms) {
    Vec<N> out = y;
    auto add = [&](const std::pair<double, const Vec<N>*>& term) {
        for (std::size_t i = 0; i < N; ++i) out[i] += h * term.first * (*term.second)[i];
    };
    (add(terms), ...);
    return out;
}

template <std::size_t N>
std::pair<double, const Vec<N>*> w(double a, const Vec<N>& k) {
    return {a, &k};
}

template <std::size_t N>
double rms(const Vec<N>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc / static_cast<double>(N));
}

}  // namespace detail

/**
 * Integrate y' = rhs(t, y) from t0 to t_end.
 *
 * rhs may throw DomainError for states outside its domain; the step is then
 * rejected and retried with a quarter of the step size. hook(t, y_old, y_new)
 * is called for every step that passed the error test.
 */
template <std::size_t N, class Rhs, class Hook>
Solution<N> integrate(Rhs&& rhs, double t0, const Vec<N>& y0, double t_end, const Options& opt,
                      Hook&& hook) {
    using namespace tableau;
    using detail::combine;
    using detail::w;

    if (!(opt.tol > 0)) throw std::invalid_argument("tolerance must be positive");
    if (!(t_end > t0)) throw std::invalid_argument("t_end must exceed t0");

    Solution<N> sol;
    sol.t.push_back(t0);
    sol.y.push_back(y0);

    double t = t0;
    Vec<N> y = y0;
    Vec<N> k1 = rhs(t, y);

    double h = opt.initial_step;
    if (!(h > 0)) {
        const double d0 = detail::rms(y);
        const double d1 = detail::rms(k1);
        h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6;
        h = std::min(h, 0.01 * (t_end - t0));
    }
    h = std::min(h, opt.max_step);

    const double eps = std::numeric_limits<double>::epsilon();
    bool last_rejected = false;

    for (std::size_t steps = 0;; ++steps) {
        if (steps >= opt.max_steps) {
            sol.termination = Termination::max_steps;
            break;
        }
        if (t + h > t_end) h = t_end - t;
        if (h < 16.0 * eps * std::max(1.0, std::abs(t))) {
            sol.termination = Termination::step_underflow;
            break;
        }

        Vec<N> k2, k3, k4, k5, k6, k7, y1;
        bool domain_failure = false;
        try {
            k2 = rhs(t + c2 * h, combine<N>(y, h, w(a21, k1)));
            k3 = rhs(t + c3 * h, combine<N>(y, h, w(a31, k1), w(a32, k2)));
            k4 = rhs(t + c4 * h, combine<N>(y, h, w(a41, k1), w(a42, k2), w(a43, k3)));
            k5 = rhs(t + c5 * h, combine<N>(y, h, w(a51, k1), w(a52, k2), w(a53, k3), w(a54, k4)));
            k6 = rhs(t + h,
                     combine<N>(y, h, w(a61, k1), w(a62, k2), w(a63, k3), w(a64, k4), w(a65, k5)));
            y1 = combine<N>(y, h, w(a71, k1), w(a73, k3), w(a74, k4), w(a75, k5), w(a76, k6));
            k7 = rhs(t + h, y1);
        } catch (const DomainError&) {
            domain_failure = true;
        }
        if (domain_failure) {
            ++sol.rejected;
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                  e7 * k7[i]);
            const double sc = opt.tol + opt.tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err = std::max(err, std::abs(e / sc));
        }
        if (!std::isfinite(err)) {
            ++sol.rejected;
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
        factor = std::clamp(factor, 0.2, 5.0);

        if (err > 1.0) {
            ++sol.rejected;
            h *= std::min(factor, 0.9);
            last_rejected = true;
            continue;
        }

        const StepVerdict verdict = hook(t + h, y, y1);
        if (verdict == StepVerdict::reject) {
            ++sol.rejected;
            h *= 0.5;
            last_rejected = true;
            continue;
        }

        DenseSegment<N> seg;
        seg.t0 = t;
        seg.h = h;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = y1[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            seg.coeff[0][i] = y[i];
            seg.coeff[1][i] = ydiff;
            seg.coeff[2][i] = bspl;
            seg.coeff[3][i] = ydiff - h * k7[i] - bspl;
            seg.coeff[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                   d7 * k7[i]);
        }
        sol.segments.push_back(seg);

        t = (t + h >= t_end) ? t_end : t + h;
        y = y1;
        k1 = k7;
        sol.t.push_back(t);
        sol.y.push_back(y);

        if (verdict == StepVerdict::stop) {
            sol.termination = Termination::stopped;
            break;
        }
        if (t >= t_end) break;

        if (last_rejected) factor = std::min(factor, 1.0);
        last_rejected = false;
        h = std::min(h * factor, opt.max_step);
    }
    return sol;
}

template <std::size_t N, class Rhs>
Solution<N> integrate(Rhs&& rhs, double t0, const Vec<N>& y0, double t_end, const Options& opt) {
    return integrate<N>(std::forward<Rhs>(rhs), t0, y0, t_end, opt,
                        [](double, const Vec<N>&, const Vec<N>&) { return StepVerdict::accept; });
}

}  // namespace ckepler::ode
