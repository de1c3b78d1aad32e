/**
 * @file cartpole.hpp
 * @brief Deterministic cartpole physics with episode semantics.
 *
 * Standard cart-pole model with explicit Euler integration. Two actions:
 * 0 pushes the cart left, 1 pushes it right, both with a fixed force.
 * An episode ends when the pole angle or cart position leaves its limit,
 * or after max_steps steps.
 */

#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "sapsom/environment.hpp"

namespace sapsom {

struct EnvState {
    double x = 0.0;          ///< cart position (m)
    double x_dot = 0.0;      ///< cart velocity (m/s)
    double theta = 0.0;      ///< pole angle from vertical (rad)
    double theta_dot = 0.0;  ///< angular velocity (rad/s)

    Eigen::VectorXd vec() const {
        Eigen::VectorXd v(4);
        v << x, x_dot, theta, theta_dot;
        return v;
    }
    static EnvState from_vec(const Eigen::VectorXd& v) {
        if (v.size() != 4) throw std::invalid_argument("EnvState: expected 4 components");
        return {v[0], v[1], v[2], v[3]};
    }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(x_dot) && std::isfinite(theta) &&
               std::isfinite(theta_dot);
    }
};

struct EnvParams {
    double gravity = 9.8;
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double pole_half_length = 0.5;
    double force_mag = 10.0;
    double dt = 0.02;
    double theta_limit = 15.0 * std::numbers::pi / 180.0;
    double x_limit = 2.4;
    int max_steps = 200;
    double reset_range = 0.05;
};

/// One Euler step of the cart-pole dynamics. Pure function of (state, action).
inline EnvState cartpole_dynamics(const EnvState& s, int action, const EnvParams& p) {
    if (action != 0 && action != 1)
        throw std::invalid_argument("cartpole_dynamics: action must be 0 or 1");
    if (!s.finite()) throw std::invalid_argument("cartpole_dynamics: non-finite state");

    const double force = action == 0 ? -p.force_mag : p.force_mag;
    const double total_mass = p.cart_mass + p.pole_mass;
    const double ml = p.pole_mass * p.pole_half_length;
    const double sin_t = std::sin(s.theta);
    const double cos_t = std::cos(s.theta);

    const double temp = (force + ml * s.theta_dot * s.theta_dot * sin_t) / total_mass;
    const double theta_acc = (p.gravity * sin_t - cos_t * temp) /
                             (p.pole_half_length *
                              (4.0 / 3.0 - p.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - ml * theta_acc * cos_t / total_mass;

    EnvState n;
    n.x = s.x + p.dt * s.x_dot;
    n.x_dot = s.x_dot + p.dt * x_acc;
    n.theta = s.theta + p.dt * s.theta_dot;
    n.theta_dot = s.theta_dot + p.dt * theta_acc;
    return n;
}

class CartpoleEnv final : public Environment {
public:
    explicit CartpoleEnv(EnvParams params = {}) : params_(params) {
        if (params_.theta_limit >= std::numbers::pi / 2)
            throw std::invalid_argument("CartpoleEnv: theta_limit must be below pi/2");
    }

    int action_count() const override { return 2; }
    int state_dim() const override { return 4; }

    const EnvParams& params() const { return params_; }
    const EnvState& state() const { return state_; }
    int steps() const { return steps_; }

    Eigen::VectorXd reset(std::mt19937_64& rng) override {
        std::uniform_real_distribution<double> dist(-params_.reset_range, params_.reset_range);
        state_.x = dist(rng);
        state_.x_dot = dist(rng);
        state_.theta = dist(rng);
        state_.theta_dot = dist(rng);
        steps_ = 0;
        return state_.vec();
    }

    /// Overwrite the internal state without touching the step counter.
    void set_state(const EnvState& s) {
        if (!s.finite()) throw std::invalid_argument("set_state: non-finite state");
        state_ = s;
    }

    StepOutcome step(int action) override {
        state_ = cartpole_dynamics(state_, action, params_);
        ++steps_;
        StepOutcome out;
        out.next_state = state_.vec();
        if (std::abs(state_.theta) > params_.theta_limit) {
            out.reason = DoneReason::angle;
        } else if (std::abs(state_.x) > params_.x_limit) {
            out.reason = DoneReason::position;
        } else if (steps_ >= params_.max_steps) {
            out.reason = DoneReason::step_cap;
        }
        out.done = out.reason != DoneReason::none;
        return out;
    }

    Eigen::VectorXd observe() const override { return state_.vec(); }

private:
    EnvParams params_;
    EnvState state_;
    int steps_ = 0;
};

}  // namespace sapsom
