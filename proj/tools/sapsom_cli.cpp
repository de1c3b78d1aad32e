// sapsom command-line tool: train a model on cartpole and reproduce the
// evaluation pipelines as CSV reports.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "sapsom/experiments.hpp"

namespace {

using namespace sapsom;

struct CommonOpts {
    std::string config_path;
    std::string model_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_model) {
    cmd->add_option("--config", o.config_path, "Key-value config file");
    auto* m = cmd->add_option("--model", o.model_path, "Model artifact path");
    if (needs_model) m->required();
    cmd->add_option("--out", o.out_path, "Output CSV path");
    cmd->add_option("--seed", o.seed, "RNG seed override")
        ->each([&o](const std::string&) { o.seed_set = true; });
}

AppConfig resolve_config(const CommonOpts& o) {
    AppConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    if (o.seed_set) {
        cfg.seed = o.seed;
        cfg.training.seed = o.seed;
    }
    return cfg;
}

std::uint64_t resolve_eval_seed(const CommonOpts& o, const AppConfig& cfg) {
    return o.seed_set ? o.seed : cfg.seed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SapSom: SOM world model + greedy planner on cartpole"};
    app.require_subcommand(1);

    CommonOpts train_o, phase_o, rmse_o, balance_o, tilt_o, tilted_o, imitate_o;

    auto* train_cmd = app.add_subcommand("train", "Train a model and save the artifact");
    add_common(train_cmd, train_o, false);
    bool pretrain_only = false;
    std::string metrics_path;
    train_cmd->add_flag("--pretrain-only", pretrain_only,
                        "Run only SOM pretraining (transition matrices stay zero)");
    train_cmd->add_option("--metrics", metrics_path, "Per-episode metrics CSV path");

    auto* phase_cmd =
        app.add_subcommand("phase-portrait", "Real vs predicted directions of motion");
    add_common(phase_cmd, phase_o, true);
    int phase_episodes = 5;
    phase_cmd->add_option("--episodes", phase_episodes, "Random episodes to analyze");

    auto* rmse_cmd =
        app.add_subcommand("predict-rmse", "Multi-step angle prediction RMSE");
    add_common(rmse_cmd, rmse_o, true);
    int n_sequences = 100, horizon = 7;
    rmse_cmd->add_option("--sequences", n_sequences, "Random action sequences");
    rmse_cmd->add_option("--horizon", horizon, "Prediction horizon (steps)");

    auto* balance_cmd = app.add_subcommand("balance", "Closed-loop balancing task");
    add_common(balance_cmd, balance_o, true);
    int balance_episodes = 100;
    balance_cmd->add_option("--episodes", balance_episodes, "Episodes to run");

    auto* tilt_cmd = app.add_subcommand("tilt-sweep", "Controlled-tilt goal sweep");
    add_common(tilt_cmd, tilt_o, true);

    auto* tilted_cmd =
        app.add_subcommand("tilted-balance", "Tilted-balancing goal sweep");
    add_common(tilted_cmd, tilted_o, true);

    auto* imitate_cmd =
        app.add_subcommand("imitate", "Run a task for a goal given in the config");
    add_common(imitate_cmd, imitate_o, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            const AppConfig cfg = resolve_config(train_o);
            const auto result = train_model(cfg, pretrain_only);
            const std::string model_path =
                train_o.model_path.empty() ? "sapsom_model.bin" : train_o.model_path;
            save_model(result.artifact, model_path);
            if (!metrics_path.empty()) write_metrics_csv(result, metrics_path);
            std::printf("trained: %d pretrain + %d joint episodes, model -> %s\n",
                        cfg.training.pretrain_episodes,
                        pretrain_only ? 0 : cfg.training.joint_episodes,
                        model_path.c_str());
        } else if (*phase_cmd) {
            const AppConfig cfg = resolve_config(phase_o);
            const auto artifact = load_model(phase_o.model_path);
            if (artifact.model.matrix(0).isZero(0.0))
                std::fprintf(stderr, "warning: transition matrices are all zero "
                                     "(untrained artifact)\n");
            const auto report =
                phase_portrait(artifact, phase_episodes, resolve_eval_seed(phase_o, cfg));
            if (!phase_o.out_path.empty()) write_phase_portrait_csv(report, phase_o.out_path);
            std::printf("states: %zu  sign_agreement: %.4f  mean_angle_error: %.4f  "
                        "left_up: %.4f  right_down: %.4f\n",
                        report.rows.size(), report.summary.sign_agreement,
                        report.summary.mean_angle_error, report.summary.left_up_fraction,
                        report.summary.right_down_fraction);
        } else if (*rmse_cmd) {
            const AppConfig cfg = resolve_config(rmse_o);
            const auto artifact = load_model(rmse_o.model_path);
            const auto report = prediction_rmse(artifact, n_sequences, horizon,
                                                resolve_eval_seed(rmse_o, cfg));
            if (!rmse_o.out_path.empty()) write_rmse_csv(report, rmse_o.out_path);
            for (int t = 0; t < report.horizon; ++t)
                std::printf("t=%d rmse=%.4f\n", t + 1, report.rmse[t]);
        } else if (*balance_cmd) {
            const AppConfig cfg = resolve_config(balance_o);
            const auto artifact = load_model(balance_o.model_path);
            const auto report = balance(artifact, balance_episodes,
                                        resolve_eval_seed(balance_o, cfg), cfg.plan);
            if (!balance_o.out_path.empty()) write_balance_csv(report, balance_o.out_path);
            std::printf("episodes: %zu  at_cap: %d  mean_steps: %.1f\n",
                        report.runs.size(), report.at_cap, report.mean_steps);
        } else if (*tilt_cmd) {
            const AppConfig cfg = resolve_config(tilt_o);
            const auto artifact = load_model(tilt_o.model_path);
            const auto report =
                tilt_sweep(artifact, resolve_eval_seed(tilt_o, cfg), 20, 0.2, 5.0, 0.25,
                           cfg.plan);
            if (!tilt_o.out_path.empty()) write_tilt_sweep_csv(report, tilt_o.out_path);
            for (const auto& s : report.summary)
                std::printf("goal_rate=%.2f mean_final=%.3f sd=%.3f excess=%.3f "
                            "steps=%.1f\n",
                            s.goal_rate, s.mean_final_rate, s.sd_final_rate,
                            s.mean_action_excess, s.mean_steps);
        } else if (*tilted_cmd) {
            const AppConfig cfg = resolve_config(tilted_o);
            const auto artifact = load_model(tilted_o.model_path);
            const auto report = tilted_balance_sweep(artifact,
                                                     resolve_eval_seed(tilted_o, cfg), 20,
                                                     0.2, 0.025, cfg.plan);
            if (!tilted_o.out_path.empty())
                write_tilted_balance_csv(report, tilted_o.out_path);
            for (const auto& s : report.summary)
                std::printf("goal_angle=%.3f mean_tilt=%.4f sd=%.4f steps=%.1f\n",
                            s.goal_angle, s.mean_tilt, s.sd_tilt, s.mean_steps);
        } else if (*imitate_cmd) {
            const AppConfig cfg = resolve_config(imitate_o);
            const auto artifact = load_model(imitate_o.model_path);
            const Goal goal = goal_from_spec(cfg.goal);
            const auto trace = run_goal_episode(artifact, goal, cfg.plan,
                                                resolve_eval_seed(imitate_o, cfg));
            if (!imitate_o.out_path.empty()) write_trace_csv(trace, imitate_o.out_path);
            std::printf("steps: %d  done: %s  final_distance: %.4f\n", trace.steps(),
                        to_string(trace.done_reason), trace.distances.back());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
