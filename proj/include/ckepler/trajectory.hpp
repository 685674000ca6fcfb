/**
 * @brief Numerical trajectories of the Kepler problem in curvature kappa.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ckepler/dynamics.hpp"
#include "ckepler/ode.hpp"

namespace ckepler {

enum class TrajectoryEvent { none, collision, step_underflow, max_steps };

inline const char* to_string(TrajectoryEvent e) {
    switch (e) {
        case TrajectoryEvent::none: return "none";
        case TrajectoryEvent::collision: return "collision";
        case TrajectoryEvent::step_underflow: return "step_underflow";
        case TrajectoryEvent::max_steps: return "max_steps";
    }
    return "?";
}

/// Radius below which the particle is considered to have hit the force center.
inline constexpr double collision_radius = 1e-10;

/// Immutable result of an integration: accepted steps plus dense output.
class Trajectory {
public:
    Trajectory(ode::Solution<4> sol, TrajectoryEvent event)
        : sol_(std::move(sol)), event_(event) {}

    std::size_t size() const { return sol_.t.size(); }
    double time(std::size_t i) const { return sol_.t[i]; }
    PhaseState state(std::size_t i) const { return unpack(sol_.y[i]); }
    const std::vector<double>& times() const { return sol_.t; }

    double t_begin() const { return sol_.t.front(); }
    double t_end() const { return sol_.t.back(); }

    /// Dense state at any t in [t_begin, t_end].
    PhaseState at(double t) const { return unpack(sol_.at(t)); }

    TrajectoryEvent event() const { return event_; }
    std::size_t rejected_steps() const { return sol_.rejected; }

    /**
     * Times in [t_begin, t_end] where g(state) changes sign in the requested
     * direction (+1 rising, -1 falling, 0 both), located by bisection on the
     * dense output.
     */
    std::vector<double> crossings(const std::function<double(const PhaseState&)>& g, int direction = 0) const {
        std::vector<double> out;
        for (const auto& seg : sol_.segments) {
            constexpr int sub = 4;
            double ta = seg.t0;
            double ga = g(unpack(seg(ta)));
            for (int j = 1; j <= sub; ++j) {
                const double tb = seg.t0 + seg.h * j / sub;
                const double gb = g(unpack(seg(tb)));
                const bool rising = ga < 0 && gb >= 0;
                const bool falling = ga > 0 && gb <= 0;
                if ((rising && direction >= 0) || (falling && direction <= 0)) {
                    double lo = ta, hi = tb, glo = ga;
                    for (int it = 0; it < 200; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (mid <= lo || mid >= hi) break;
                        const double gm = g(unpack(seg(mid)));
                        if ((gm < 0) == (glo < 0) && gm != 0) {
                            lo = mid;
                            glo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                    const double tc = 0.5 * (lo + hi);
                    if (out.empty() || tc > out.back()) out.push_back(tc);
                }
                ta = tb;
                ga = gb;
            }
        }
        return out;
    }

    static PhaseState unpack(const ode::Vec<4>& v) { return {v[0], v[1], v[2], v[3]}; }
    static ode::Vec<4> pack(const PhaseState& s) { return {s.r, s.phi, s.v_r, s.v_phi}; }

private:
    ode::Solution<4> sol_;
    TrajectoryEvent event_;
};

/**
 * Integrate the Kepler equations of motion from state0 over [0, t_end].
 *
 * Steps whose energy or angular-momentum change exceeds ten times the
 * tolerance (relative to the local energy scale) are rejected. The run ends
 * early with a collision event when r drops below collision_radius or when the
 * step size underflows close to the force center.
 */
inline Trajectory integrate(const PhaseState& state0, const KeplerParams& params, double t_end, double tol) {
    if (!(tol >= 1e-13 && tol <= 1e-6)) throw DomainError("tolerance must lie in [1e-13, 1e-6]");
    require_regular_radius(params.kappa, state0.r);
    if (!std::isfinite(state0.phi) || !std::isfinite(state0.v_r) || !std::isfinite(state0.v_phi))
        throw DomainError("initial state must be finite");
    if (!(t_end > 0)) throw DomainError("t_end must be positive");

    const KeplerPotential pot{params.k};
    const Curvature kappa = params.kappa;

    auto rhs = [&](double, const ode::Vec<4>& y) {
        const PhaseRate d = eom_rhs(Trajectory::unpack(y), kappa, pot);
        return ode::Vec<4>{d.dr, d.dphi, d.dv_r, d.dv_phi};
    };

    const double e0 = energy(state0, params);
    const double j0 = momenta(kappa, state0).j;
    const double e_scale =
        std::max(std::abs(e0), kinetic_energy(kappa, state0) + std::abs(pot.value(kappa, state0.r)));
    const double j_scale = std::max(std::abs(j0), 1e-300);
    const double spike = 10.0 * tol;
    bool collided = false;

    auto hook = [&](double, const ode::Vec<4>& y_old, const ode::Vec<4>& y_new) {
        const PhaseState a = Trajectory::unpack(y_old);
        const PhaseState b = Trajectory::unpack(y_new);
        if (b.r < collision_radius) {
            collided = true;
            return ode::StepVerdict::stop;
        }
        const double de = std::abs(energy(b, params) - energy(a, params)) / e_scale;
        const double dj = std::abs(momenta(kappa, b).j - momenta(kappa, a).j) / j_scale;
        if (de > spike || (j0 != 0.0 && dj > spike)) return ode::StepVerdict::reject;
        return ode::StepVerdict::accept;
    };

    ode::Options opt;
    opt.tol = tol;
    auto sol = ode::integrate<4>(rhs, 0.0, Trajectory::pack(state0), t_end, opt, hook);

    TrajectoryEvent ev = TrajectoryEvent::none;
    if (collided) {
        ev = TrajectoryEvent::collision;
    } else if (sol.termination == ode::Termination::step_underflow) {
        ev = sol.y.back()[0] < 1e-6 ? TrajectoryEvent::collision : TrajectoryEvent::step_underflow;
    } else if (sol.termination == ode::Termination::max_steps) {
        ev = TrajectoryEvent::max_steps;
    }
    return Trajectory(std::move(sol), ev);
}

}  // namespace ckepler
