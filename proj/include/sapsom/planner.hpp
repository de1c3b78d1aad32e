/**
 * @file planner.hpp
 * @brief Goal extraction from a single demonstration, precision-weighted
 * distance, open-loop rollout, and tau-step greedy forward search.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sapsom/environment.hpp"
#include "sapsom/som.hpp"
#include "sapsom/transition.hpp"

namespace sapsom {

/// Target mean state plus per-component precisions in [0,1].
/// Zero precision means "don't care" about that component.
struct Goal {
    Vec mean;
    Vec precision;
};

struct PlanConfig {
    int tau = 1;                   ///< lookahead depth
    bool replan_every_step = true;
};

inline constexpr double kPrecisionFloor = 0.01;
inline constexpr std::int64_t kMaxPlanSequences = 1'000'000;

/// Goal from a demonstration trace: componentwise mean, precision = capped
/// inverse variance. Zero-variance components get the cap of 1; precisions
/// below the floor are omitted (set to 0).
inline Goal goal_from_demo(const std::vector<Vec>& states,
                           double precision_floor = kPrecisionFloor) {
    if (states.empty()) throw std::invalid_argument("goal_from_demo: empty demonstration");
    const auto dim = states.front().size();
    Vec mean = Vec::Zero(dim);
    for (const Vec& s : states) {
        if (s.size() != dim)
            throw std::invalid_argument("goal_from_demo: inconsistent state dimensions");
        mean += s;
    }
    mean /= double(states.size());

    Vec var = Vec::Zero(dim);
    for (const Vec& s : states) var += (s - mean).cwiseAbs2();
    var /= double(states.size());

    Vec precision(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        double p = var[i] > 0.0 ? 1.0 / var[i] : 1.0;
        if (p > 1.0) p = 1.0;
        if (p < precision_floor) p = 0.0;
        precision[i] = p;
    }
    return {mean, precision};
}

/// Precision-weighted squared distance sum_i pi_i (u_i - g_i)^2.
inline double goal_distance(const Vec& u, const Goal& goal) {
    return (goal.precision.array() * (u - goal.mean).array().square()).sum();
}

struct RolloutStep {
    int unit = 0;           ///< predicted map unit
    Vec state;              ///< decoded environmental state
    bool unlearned = false; ///< mode prediction fell back on an all-zero column
};

/// Open-loop mental simulation: winner of the current estimate, mode
/// prediction, decode; each next estimate feeds the next step. No
/// environment interaction.
inline std::vector<RolloutStep> rollout(const Vec& u0, const std::vector<int>& actions,
                                        const SomMap& map, const TransitionModel& model) {
    std::vector<RolloutStep> out;
    out.reserve(actions.size());
    Vec u = u0;
    for (int a : actions) {
        const int winner = find_winner(u, map);
        const auto mode = model.predict_mode(a, winner);
        RolloutStep step;
        step.unit = mode.unit;
        step.state = map.decode(mode.unit);
        step.unlearned = mode.unlearned;
        u = step.state;
        out.push_back(std::move(step));
    }
    return out;
}

/// Greedy forward search: enumerate all K^tau action sequences in
/// lexicographic order, score each by the distance of its predicted terminal
/// state to the goal, and return the first action of the best sequence.
/// Strict improvement keeps the lexicographically smallest sequence on ties.
inline int plan(const Vec& u0, const Goal& goal, int tau, const SomMap& map,
                const TransitionModel& model) {
    if (tau < 1) throw std::invalid_argument("plan: tau must be >= 1");
    const int actions = model.action_count();
    std::int64_t sequences = 1;
    for (int i = 0; i < tau; ++i) {
        sequences *= actions;
        if (sequences > kMaxPlanSequences)
            throw std::invalid_argument("plan: K^tau exceeds the enumeration guard");
    }

    std::vector<int> seq(tau, 0);
    double best_distance = std::numeric_limits<double>::infinity();
    int best_first = 0;
    for (std::int64_t n = 0; n < sequences; ++n) {
        // n in base K, most significant digit first = lexicographic order
        std::int64_t rem = n;
        for (int i = tau - 1; i >= 0; --i) {
            seq[i] = int(rem % actions);
            rem /= actions;
        }
        const auto predicted = rollout(u0, seq, map, model);
        const double d = goal_distance(predicted.back().state, goal);
        if (d < best_distance) {
            best_distance = d;
            best_first = seq.front();
        }
    }
    return best_first;
}

struct EpisodeTrace {
    std::vector<Vec> states;      ///< observed states, including the start state
    std::vector<int> actions;     ///< executed actions (one per step)
    std::vector<double> distances; ///< goal distance at each observed state
    DoneReason done_reason = DoneReason::none;
    int steps() const { return static_cast<int>(actions.size()); }
};

/// Closed-loop execution: observe, plan, execute the first planned action,
/// repeat until done or max_steps. With replanning enabled (the default)
/// exactly one environment step runs per planning call.
inline EpisodeTrace run_task(Environment& env, const Goal& goal, const PlanConfig& config,
                             const SomMap& map, const TransitionModel& model,
                             int max_steps) {
    EpisodeTrace trace;
    Vec u = env.observe();
    trace.states.push_back(u);
    trace.distances.push_back(goal_distance(u, goal));

    std::vector<int> pending;
    while (trace.steps() < max_steps) {
        int action;
        if (config.replan_every_step || pending.empty()) {
            action = plan(u, goal, config.tau, map, model);
            if (!config.replan_every_step) {
                // commit to the whole tau-sequence before replanning
                std::vector<int> best(config.tau, 0);
                double best_d = std::numeric_limits<double>::infinity();
                std::vector<int> seq(config.tau, 0);
                const int actions = model.action_count();
                std::int64_t total = 1;
                for (int i = 0; i < config.tau; ++i) total *= actions;
                for (std::int64_t n = 0; n < total; ++n) {
                    std::int64_t rem = n;
                    for (int i = config.tau - 1; i >= 0; --i) {
                        seq[i] = int(rem % actions);
                        rem /= actions;
                    }
                    const auto predicted = rollout(u, seq, map, model);
                    const double d = goal_distance(predicted.back().state, goal);
                    if (d < best_d) {
                        best_d = d;
                        best = seq;
                    }
                }
                pending.assign(best.begin() + 1, best.end());
                action = best.front();
            }
        } else {
            action = pending.front();
            pending.erase(pending.begin());
        }

        const StepOutcome out = env.step(action);
        u = out.next_state;
        trace.actions.push_back(action);
        trace.states.push_back(u);
        trace.distances.push_back(goal_distance(u, goal));
        if (out.done) {
            trace.done_reason = out.reason;
            break;
        }
    }
    return trace;
}

}  // namespace sapsom
