/**
 * @file experiments.hpp
 * @brief Evaluation pipelines: training, phase portrait, multi-step
 * prediction RMSE, balancing, controlled-tilt sweep, tilted-balancing sweep.
 *
 * Every report carries its per-run records; summary statistics are computed
 * from those records so they stay recomputable from the emitted CSVs.
 * Sweeps derive one sub-seed per (goal, repetition) cell, so results do not
 * depend on execution order.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sapsom/agent.hpp"
#include "sapsom/cartpole.hpp"
#include "sapsom/config.hpp"
#include "sapsom/csv.hpp"
#include "sapsom/model_io.hpp"
#include "sapsom/planner.hpp"

namespace sapsom {

/// splitmix64-style seed mixing for independent sub-streams.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Training

struct TrainResult {
    ModelArtifact artifact;
    std::vector<EpisodeMetrics> pretrain_metrics;
    std::vector<EpisodeMetrics> joint_metrics;
};

inline TrainResult train_model(const AppConfig& cfg, bool pretrain_only = false) {
    CartpoleEnv env(cfg.env);
    Agent agent(cfg.geometry, env.state_dim(), env.action_count(), cfg.training);
    std::mt19937_64 rng(cfg.training.seed);
    auto pre = agent.pretrain(env, rng);
    std::vector<EpisodeMetrics> joint;
    if (!pretrain_only) joint = agent.explore_and_learn(env, rng);
    ModelArtifact artifact(agent.map(), agent.model(), cfg.training, cfg.env,
                           cfg.training.seed);
    return {std::move(artifact), std::move(pre), std::move(joint)};
}

inline void write_metrics_csv(const TrainResult& result, const std::string& path) {
    CsvWriter csv(path, {"phase", "episode", "steps", "mean_quantization_error",
                         "mean_prediction_residual"});
    for (const auto& m : result.pretrain_metrics)
        csv.cell("pretrain").cell(m.episode).cell(m.steps)
            .cell(m.mean_quantization_error).cell(m.mean_prediction_residual)
            .end_row();
    for (const auto& m : result.joint_metrics)
        csv.cell("joint").cell(m.episode).cell(m.steps)
            .cell(m.mean_quantization_error).cell(m.mean_prediction_residual)
            .end_row();
}

// ---------------------------------------------------------------------------
// Phase portrait

struct PhasePortraitRow {
    double theta, theta_dot;       // phase point the arrows apply to
    double dtheta, dtheta_dot;     // true direction of motion
    double dtheta_hat, dtheta_dot_hat;  // predicted, for the executed action
    int action;
    double cf_dtheta_dot_hat_left;   // counterfactual prediction, push left
    double cf_dtheta_dot_hat_right;  // counterfactual prediction, push right
};

struct PhasePortraitSummary {
    double sign_agreement = 0.0;      ///< sign(dtheta_dot_hat) == sign(dtheta_dot)
    double mean_angle_error = 0.0;    ///< mean |dtheta_hat - dtheta|
    double left_up_fraction = 0.0;    ///< counterfactual left push: dtheta_dot_hat > 0
    double right_down_fraction = 0.0; ///< counterfactual right push: dtheta_dot_hat < 0
};

struct PhasePortraitReport {
    std::vector<PhasePortraitRow> rows;
    PhasePortraitSummary summary;
    std::uint64_t seed = 0;
};

inline PhasePortraitSummary summarize_phase_portrait(
    const std::vector<PhasePortraitRow>& rows) {
    PhasePortraitSummary s;
    if (rows.empty()) return s;
    int agree = 0, left_up = 0, right_down = 0;
    double angle_err = 0.0;
    for (const auto& r : rows) {
        if ((r.dtheta_dot_hat > 0) == (r.dtheta_dot > 0)) ++agree;
        if (r.cf_dtheta_dot_hat_left > 0) ++left_up;
        if (r.cf_dtheta_dot_hat_right < 0) ++right_down;
        angle_err += std::abs(r.dtheta_hat - r.dtheta);
    }
    const double n = double(rows.size());
    s.sign_agreement = agree / n;
    s.mean_angle_error = angle_err / n;
    s.left_up_fraction = left_up / n;
    s.right_down_fraction = right_down / n;
    return s;
}

/// One-step predicted successor of u under action a: winner, mode, decode.
inline Vec one_step_prediction(const Vec& u, int a, const SomMap& map,
                               const TransitionModel& model) {
    const int winner = find_winner(u, map);
    return map.decode(model.predict_mode(a, winner).unit);
}

inline PhasePortraitReport phase_portrait(const ModelArtifact& artifact, int episodes,
                                          std::uint64_t seed) {
    PhasePortraitReport report;
    report.seed = seed;
    CartpoleEnv env(artifact.env);
    for (int e = 0; e < episodes; ++e) {
        std::mt19937_64 rng(sub_seed(seed, std::uint64_t(e)));
        std::uniform_int_distribution<int> action_dist(0, env.action_count() - 1);
        Vec u = env.reset(rng);
        bool done = false;
        while (!done) {
            const int action = action_dist(rng);
            const Vec u_hat = one_step_prediction(u, action, artifact.map, artifact.model);
            const Vec cf_left = one_step_prediction(u, 0, artifact.map, artifact.model);
            const Vec cf_right = one_step_prediction(u, 1, artifact.map, artifact.model);
            const StepOutcome out = env.step(action);

            PhasePortraitRow row;
            row.theta = u[2];
            row.theta_dot = u[3];
            row.dtheta = out.next_state[2] - u[2];
            row.dtheta_dot = out.next_state[3] - u[3];
            row.dtheta_hat = u_hat[2] - u[2];
            row.dtheta_dot_hat = u_hat[3] - u[3];
            row.action = action;
            row.cf_dtheta_dot_hat_left = cf_left[3] - u[3];
            row.cf_dtheta_dot_hat_right = cf_right[3] - u[3];
            report.rows.push_back(row);

            u = out.next_state;
            done = out.done;
        }
    }
    report.summary = summarize_phase_portrait(report.rows);
    return report;
}

inline void write_phase_portrait_csv(const PhasePortraitReport& report,
                                     const std::string& path) {
    CsvWriter csv(path, {"theta", "theta_dot", "dtheta", "dtheta_dot", "dtheta_hat",
                         "dtheta_dot_hat", "action", "cf_dtheta_dot_hat_left",
                         "cf_dtheta_dot_hat_right"});
    for (const auto& r : report.rows)
        csv.cell(r.theta).cell(r.theta_dot).cell(r.dtheta).cell(r.dtheta_dot)
            .cell(r.dtheta_hat).cell(r.dtheta_dot_hat).cell(r.action)
            .cell(r.cf_dtheta_dot_hat_left).cell(r.cf_dtheta_dot_hat_right)
            .end_row();
}

// ---------------------------------------------------------------------------
// Multi-step prediction RMSE

struct RmseRow {
    int sequence;
    int t;             ///< steps into the future, 1-based
    double theta_true;
    double theta_pred;
};

struct RmseReport {
    std::vector<RmseRow> rows;
    std::vector<double> rmse;  ///< per horizon t = 1..horizon
    int horizon = 0;
    std::uint64_t seed = 0;
};

inline std::vector<double> summarize_rmse(const std::vector<RmseRow>& rows, int horizon) {
    std::vector<double> sum(horizon, 0.0);
    std::vector<int> count(horizon, 0);
    for (const auto& r : rows) {
        const double err = r.theta_pred - r.theta_true;
        sum[r.t - 1] += err * err;
        ++count[r.t - 1];
    }
    std::vector<double> rmse(horizon, 0.0);
    for (int t = 0; t < horizon; ++t)
        if (count[t] > 0) rmse[t] = std::sqrt(sum[t] / count[t]);
    return rmse;
}

/// Open-loop rollouts against the true dynamics under random action
/// sequences from random initializations. The true trajectory integrates
/// through done signals; only the prediction horizon matters here.
inline RmseReport prediction_rmse(const ModelArtifact& artifact, int n_sequences,
                                  int horizon, std::uint64_t seed) {
    RmseReport report;
    report.horizon = horizon;
    report.seed = seed;
    if (horizon < 1) return report;
    CartpoleEnv env(artifact.env);
    for (int n = 0; n < n_sequences; ++n) {
        std::mt19937_64 rng(sub_seed(seed, std::uint64_t(n)));
        std::uniform_int_distribution<int> action_dist(0, env.action_count() - 1);
        const Vec u0 = env.reset(rng);
        std::vector<int> actions(horizon);
        for (int t = 0; t < horizon; ++t) actions[t] = action_dist(rng);

        const auto predicted = rollout(u0, actions, artifact.map, artifact.model);
        EnvState s = EnvState::from_vec(u0);
        for (int t = 0; t < horizon; ++t) {
            s = cartpole_dynamics(s, actions[t], artifact.env);
            report.rows.push_back({n, t + 1, s.theta, predicted[t].state[2]});
        }
    }
    report.rmse = summarize_rmse(report.rows, horizon);
    return report;
}

inline void write_rmse_csv(const RmseReport& report, const std::string& path) {
    CsvWriter csv(path, {"sequence", "t", "theta_true", "theta_pred"});
    for (const auto& r : report.rows)
        csv.cell(r.sequence).cell(r.t).cell(r.theta_true).cell(r.theta_pred).end_row();
}

// ---------------------------------------------------------------------------
// Goals

inline Goal balancing_goal() {
    Vec mean = Vec::Zero(4);
    Vec precision(4);
    precision << 0, 0, 1, 1;
    return {mean, precision};
}

inline Goal tilt_goal(double theta_goal, double theta_dot_goal) {
    Vec mean(4);
    mean << 0, 0, theta_goal, theta_dot_goal;
    Vec precision(4);
    precision << 0, 0, 1, 1;
    return {mean, precision};
}

inline Goal goal_from_spec(const GoalSpec& spec) {
    if (spec.explicit_goal()) {
        if (spec.mean.size() != spec.precision.size() || spec.mean.empty())
            throw ConfigError("goal: mean and precision must have the same nonzero size");
        Goal g;
        g.mean = Eigen::Map<const Vec>(spec.mean.data(), Eigen::Index(spec.mean.size()));
        g.precision = Eigen::Map<const Vec>(spec.precision.data(),
                                            Eigen::Index(spec.precision.size()));
        return g;
    }
    if (spec.demo_csv.empty())
        throw ConfigError("goal: need either goal.mean/goal.precision or goal.demo_csv");
    const CsvTable table = read_csv(spec.demo_csv);
    const int cx = table.column("x"), cxd = table.column("x_dot");
    const int ct = table.column("theta"), ctd = table.column("theta_dot");
    std::vector<Vec> states;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        Vec u(4);
        u << table.number(i, cx), table.number(i, cxd), table.number(i, ct),
            table.number(i, ctd);
        states.push_back(u);
    }
    return goal_from_demo(states, spec.precision_floor);
}

// ---------------------------------------------------------------------------
// Balancing

struct BalanceRun {
    int episode;
    int steps;
    DoneReason reason;
};

struct BalanceReport {
    std::vector<BalanceRun> runs;
    int at_cap = 0;
    double mean_steps = 0.0;
    std::uint64_t seed = 0;
};

inline void summarize_balance(BalanceReport& report, int step_cap) {
    report.at_cap = 0;
    double total = 0.0;
    for (const auto& r : report.runs) {
        if (r.steps >= step_cap) ++report.at_cap;
        total += r.steps;
    }
    report.mean_steps = report.runs.empty() ? 0.0 : total / double(report.runs.size());
}

inline EpisodeTrace run_goal_episode(const ModelArtifact& artifact, const Goal& goal,
                                     const PlanConfig& plan_cfg, std::uint64_t run_seed) {
    CartpoleEnv env(artifact.env);
    std::mt19937_64 rng(run_seed);
    env.reset(rng);
    return run_task(env, goal, plan_cfg, artifact.map, artifact.model,
                    artifact.env.max_steps);
}

inline BalanceReport balance(const ModelArtifact& artifact, int episodes,
                             std::uint64_t seed, PlanConfig plan_cfg = {}) {
    BalanceReport report;
    report.seed = seed;
    const Goal goal = balancing_goal();
    for (int e = 0; e < episodes; ++e) {
        const auto trace =
            run_goal_episode(artifact, goal, plan_cfg, sub_seed(seed, std::uint64_t(e)));
        report.runs.push_back({e, trace.steps(), trace.done_reason});
    }
    summarize_balance(report, artifact.env.max_steps);
    return report;
}

inline void write_balance_csv(const BalanceReport& report, const std::string& path) {
    CsvWriter csv(path, {"episode", "steps", "done_reason"});
    for (const auto& r : report.runs)
        csv.cell(r.episode).cell(r.steps).cell(std::string(to_string(r.reason))).end_row();
}

// ---------------------------------------------------------------------------
// Controlled-tilt sweep

struct TiltRun {
    double goal_rate;
    int run;
    double final_theta;
    double final_theta_dot;
    int n_left, n_right;
    int steps;
};

struct TiltGoalSummary {
    double goal_rate;
    double mean_final_rate, sd_final_rate;
    double mean_action_excess;  ///< (n_left - n_right) / (n_left + n_right), averaged
    double mean_steps;
};

struct TiltSweepReport {
    std::vector<TiltRun> runs;
    std::vector<TiltGoalSummary> summary;
    std::uint64_t seed = 0;
};

inline std::vector<TiltGoalSummary> summarize_tilt_sweep(const std::vector<TiltRun>& runs) {
    std::vector<TiltGoalSummary> out;
    size_t i = 0;
    while (i < runs.size()) {
        const double goal = runs[i].goal_rate;
        double sum = 0, sum2 = 0, excess = 0, steps = 0;
        int n = 0;
        for (; i < runs.size() && runs[i].goal_rate == goal; ++i, ++n) {
            sum += runs[i].final_theta_dot;
            sum2 += runs[i].final_theta_dot * runs[i].final_theta_dot;
            const int total = runs[i].n_left + runs[i].n_right;
            if (total > 0) excess += double(runs[i].n_left - runs[i].n_right) / total;
            steps += runs[i].steps;
        }
        TiltGoalSummary s;
        s.goal_rate = goal;
        s.mean_final_rate = sum / n;
        s.sd_final_rate = std::sqrt(std::max(0.0, sum2 / n - s.mean_final_rate * s.mean_final_rate));
        s.mean_action_excess = excess / n;
        s.mean_steps = steps / n;
        out.push_back(s);
    }
    return out;
}

/// Goal angle fixed at +0.2 rad; goal angular velocity swept 0..5 in steps
/// of 0.25, 20 runs per goal. Records the state immediately after done.
inline TiltSweepReport tilt_sweep(const ModelArtifact& artifact, std::uint64_t seed,
                                  int runs_per_goal = 20, double goal_angle = 0.2,
                                  double rate_max = 5.0, double rate_step = 0.25,
                                  PlanConfig plan_cfg = {}) {
    TiltSweepReport report;
    report.seed = seed;
    const int goal_count = int(std::round(rate_max / rate_step)) + 1;
    for (int g = 0; g < goal_count; ++g) {
        const double rate = g * rate_step;
        const Goal goal = tilt_goal(goal_angle, rate);
        for (int r = 0; r < runs_per_goal; ++r) {
            const auto trace = run_goal_episode(artifact, goal, plan_cfg,
                                                sub_seed(seed, std::uint64_t(g),
                                                         std::uint64_t(r)));
            TiltRun run;
            run.goal_rate = rate;
            run.run = r;
            run.final_theta = trace.states.back()[2];
            run.final_theta_dot = trace.states.back()[3];
            run.n_left = int(std::count(trace.actions.begin(), trace.actions.end(), 0));
            run.n_right = int(trace.actions.size()) - run.n_left;
            run.steps = trace.steps();
            report.runs.push_back(run);
        }
    }
    report.summary = summarize_tilt_sweep(report.runs);
    return report;
}

inline void write_tilt_sweep_csv(const TiltSweepReport& report, const std::string& path) {
    CsvWriter csv(path, {"goal_rate", "run", "final_theta", "final_theta_dot", "n_left",
                         "n_right", "steps"});
    for (const auto& r : report.runs)
        csv.cell(r.goal_rate).cell(r.run).cell(r.final_theta).cell(r.final_theta_dot)
            .cell(r.n_left).cell(r.n_right).cell(r.steps).end_row();
}

// ---------------------------------------------------------------------------
// Tilted-balancing sweep

struct TiltedBalanceRun {
    double goal_angle;
    int run;
    double mean_tilt;  ///< mean angle over time steps 50-100 (truncated at episode end)
    int steps;
};

struct TiltedBalanceSummary {
    double goal_angle;
    double mean_tilt, sd_tilt;
    double mean_steps;
};

struct TiltedBalanceReport {
    std::vector<TiltedBalanceRun> runs;
    std::vector<TiltedBalanceSummary> summary;
    std::uint64_t seed = 0;
};

inline double mean_tilt_50_100(const std::vector<Vec>& states) {
    const int last = int(states.size()) - 1;
    const int lo = std::min(50, last);
    const int hi = std::min(100, last);
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) sum += states[i][2];
    return sum / double(hi - lo + 1);
}

inline std::vector<TiltedBalanceSummary> summarize_tilted_balance(
    const std::vector<TiltedBalanceRun>& runs) {
    std::vector<TiltedBalanceSummary> out;
    size_t i = 0;
    while (i < runs.size()) {
        const double goal = runs[i].goal_angle;
        double sum = 0, sum2 = 0, steps = 0;
        int n = 0;
        for (; i < runs.size() && runs[i].goal_angle == goal; ++i, ++n) {
            sum += runs[i].mean_tilt;
            sum2 += runs[i].mean_tilt * runs[i].mean_tilt;
            steps += runs[i].steps;
        }
        TiltedBalanceSummary s;
        s.goal_angle = goal;
        s.mean_tilt = sum / n;
        s.sd_tilt = std::sqrt(std::max(0.0, sum2 / n - s.mean_tilt * s.mean_tilt));
        s.mean_steps = steps / n;
        out.push_back(s);
    }
    return out;
}

/// Goal angular velocity fixed at 0; goal angle swept -0.2..0.2 in steps of
/// 0.025, 20 runs per goal.
inline TiltedBalanceReport tilted_balance_sweep(const ModelArtifact& artifact,
                                                std::uint64_t seed,
                                                int runs_per_goal = 20,
                                                double angle_max = 0.2,
                                                double angle_step = 0.025,
                                                PlanConfig plan_cfg = {}) {
    TiltedBalanceReport report;
    report.seed = seed;
    const int half = int(std::round(angle_max / angle_step));
    for (int g = -half; g <= half; ++g) {
        const double angle = g * angle_step;
        const Goal goal = tilt_goal(angle, 0.0);
        for (int r = 0; r < runs_per_goal; ++r) {
            const auto trace =
                run_goal_episode(artifact, goal, plan_cfg,
                                 sub_seed(seed, std::uint64_t(g + half), std::uint64_t(r)));
            TiltedBalanceRun run;
            run.goal_angle = angle;
            run.run = r;
            run.mean_tilt = mean_tilt_50_100(trace.states);
            run.steps = trace.steps();
            report.runs.push_back(run);
        }
    }
    report.summary = summarize_tilted_balance(report.runs);
    return report;
}

inline void write_tilted_balance_csv(const TiltedBalanceReport& report,
                                     const std::string& path) {
    CsvWriter csv(path, {"goal_angle", "run", "mean_tilt", "steps"});
    for (const auto& r : report.runs)
        csv.cell(r.goal_angle).cell(r.run).cell(r.mean_tilt).cell(r.steps).end_row();
}

// ---------------------------------------------------------------------------
// Episode traces

inline void write_trace_csv(const EpisodeTrace& trace, const std::string& path) {
    CsvWriter csv(path, {"t", "x", "x_dot", "theta", "theta_dot", "action", "distance",
                         "done"});
    for (size_t t = 0; t < trace.states.size(); ++t) {
        const Vec& u = trace.states[t];
        const bool last = t + 1 == trace.states.size();
        csv.cell(std::int64_t(t)).cell(u[0]).cell(u[1]).cell(u[2]).cell(u[3])
            .cell(t < trace.actions.size() ? std::to_string(trace.actions[t]) : "")
            .cell(trace.distances[t])
            .cell(last && trace.done_reason != DoneReason::none
                      ? std::string(to_string(trace.done_reason))
                      : "")
            .end_row();
    }
}

inline double pearson_correlation(const std::vector<double>& x,
                                  const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace sapsom
