/**
 * @file environment.hpp
 * @brief Discrete-action environment contract.
 *
 * Any environment exposing reset/step/observe/action_count is trainable;
 * cartpole is the reference implementation.
 */

#pragma once

#include <random>

#include <Eigen/Dense>

namespace sapsom {

enum class DoneReason { none, angle, position, step_cap };

inline const char* to_string(DoneReason r) {
    switch (r) {
        case DoneReason::angle: return "angle";
        case DoneReason::position: return "position";
        case DoneReason::step_cap: return "step_cap";
        default: return "none";
    }
}

struct StepOutcome {
    Eigen::VectorXd next_state;
    bool done = false;
    DoneReason reason = DoneReason::none;
};

class Environment {
public:
    virtual ~Environment() = default;

    virtual int action_count() const = 0;
    virtual int state_dim() const = 0;

    /// Start a new episode; returns the initial observation.
    virtual Eigen::VectorXd reset(std::mt19937_64& rng) = 0;
    virtual StepOutcome step(int action) = 0;
    virtual Eigen::VectorXd observe() const = 0;
};

}  // namespace sapsom
