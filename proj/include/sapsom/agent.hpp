/**
 * @file agent.hpp
 * @brief Training orchestration: SOM pretraining with decaying schedules,
 * then joint representation + prediction learning under random exploration.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "sapsom/environment.hpp"
#include "sapsom/som.hpp"
#include "sapsom/transition.hpp"

namespace sapsom {

/// Exponential interpolation hitting both endpoints:
/// value(e) = start * (end/start)^(e / (total-1)).
struct DecaySchedule {
    double start = 1.0;
    double end = 1.0;
    int total_episodes = 1;

    double value(int episode) const {
        if (total_episodes <= 1) return start;
        const double t = double(episode) / double(total_episodes - 1);
        return start * std::pow(end / start, t);
    }
};

struct TrainingConfig {
    int pretrain_episodes = 1000;
    int joint_episodes = 3000;
    double pretrain_sigma_start = 8.0;
    double pretrain_sigma_end = 0.3;
    double pretrain_eta_start = 0.1;
    double pretrain_eta_end = 0.01;
    double joint_sigma0 = 4.0;
    double joint_eta0 = 0.05;
    double joint_gamma = 0.05;
    /// Base width for density computation during frozen evaluation,
    /// as a fraction of the map diameter.
    double eval_sigma0_fraction = 0.25;
    double codebook_init_range = 0.05;
    std::uint64_t seed = 1;
};

struct EpisodeMetrics {
    int episode = 0;
    int steps = 0;
    double mean_quantization_error = 0.0;
    double mean_prediction_residual = 0.0;  ///< ||p_next - T_a p_t|| before the update
};

/// Instrumentation hook for the joint-training step ordering.
enum class StepEvent { som_updated, action_executed, transition_updated };
using StepHook = std::function<void(StepEvent, int step)>;

class Agent {
public:
    Agent(MapGeometry geometry, int state_dim, int action_count, TrainingConfig config)
        : config_(config),
          map_(SomMap(geometry, state_dim)),
          model_(action_count, geometry.units()) {
        std::mt19937_64 init_rng(config.seed);
        map_ = SomMap::random_init(geometry, state_dim, config.codebook_init_range, init_rng);
    }

    Agent(SomMap map, TransitionModel model, TrainingConfig config)
        : config_(config), map_(std::move(map)), model_(std::move(model)) {
        if (map_.units() != model_.units())
            throw std::invalid_argument("Agent: map and transition model sizes differ");
    }

    const SomMap& map() const { return map_; }
    const TransitionModel& model() const { return model_; }
    const TrainingConfig& config() const { return config_; }

    bool frozen() const { return frozen_; }
    void freeze() { frozen_ = true; }
    void unfreeze() { frozen_ = false; }

    double joint_eta0() const { return frozen_ ? 0.0 : config_.joint_eta0; }
    double joint_gamma() const { return frozen_ ? 0.0 : config_.joint_gamma; }

    /// Base density width used during frozen evaluation.
    double eval_sigma0() const {
        return config_.eval_sigma0_fraction * map_.geometry().diameter();
    }

    Vec density(const Vec& u, double sigma0) const {
        return recognition_density(u, map_, sigma0);
    }

    /// SOM-only pretraining under uniform random actions. Per step: find the
    /// winner, apply the fixed-width neighborhood from the decayed schedule,
    /// update the codebooks with the decayed learning rate. No transition
    /// learning.
    std::vector<EpisodeMetrics> pretrain(Environment& env, std::mt19937_64& rng) {
        const DecaySchedule sigma_sched{config_.pretrain_sigma_start,
                                        config_.pretrain_sigma_end,
                                        config_.pretrain_episodes};
        const DecaySchedule eta_sched{config_.pretrain_eta_start, config_.pretrain_eta_end,
                                      config_.pretrain_episodes};
        std::uniform_int_distribution<int> action_dist(0, env.action_count() - 1);

        std::vector<EpisodeMetrics> metrics;
        metrics.reserve(config_.pretrain_episodes);
        for (int e = 0; e < config_.pretrain_episodes; ++e) {
            const double sigma = sigma_sched.value(e);
            const double eta = eta_sched.value(e);
            Vec u = env.reset(rng);
            EpisodeMetrics m{e, 0, 0.0, 0.0};
            bool done = false;
            while (!done) {
                const int winner = find_winner(u, map_);
                m.mean_quantization_error += quantization_error(u, map_);
                som_update(map_, u, eta, neighborhood(winner, sigma, map_.geometry()));
                const StepOutcome out = env.step(action_dist(rng));
                u = out.next_state;
                done = out.done;
                ++m.steps;
            }
            if (m.steps > 0) m.mean_quantization_error /= m.steps;
            metrics.push_back(m);
        }
        return metrics;
    }

    /// Joint representation + prediction learning under uniform random
    /// exploration. Per step, in this order: (1) winner and adaptive width,
    /// SOM update, density p_t; (2) sample and execute a random action;
    /// (3) observe the next state and compute p_next on the updated map,
    /// without a second SOM update; (4) update T_a.
    std::vector<EpisodeMetrics> explore_and_learn(Environment& env, std::mt19937_64& rng,
                                                  const StepHook& hook = nullptr) {
        std::uniform_int_distribution<int> action_dist(0, env.action_count() - 1);
        const double eta = joint_eta0();
        const double gamma = joint_gamma();

        std::vector<EpisodeMetrics> metrics;
        metrics.reserve(config_.joint_episodes);
        int global_step = 0;
        for (int e = 0; e < config_.joint_episodes; ++e) {
            Vec u = env.reset(rng);
            EpisodeMetrics m{e, 0, 0.0, 0.0};
            bool done = false;
            while (!done) {
                const int winner = find_winner(u, map_);
                const double sigma = adaptive_width(u, map_, config_.joint_sigma0);
                m.mean_quantization_error += quantization_error(u, map_);
                const Vec h = neighborhood(winner, sigma, map_.geometry());
                som_update(map_, u, eta, h);
                if (hook) hook(StepEvent::som_updated, global_step);

                // p_t on the just-updated map
                const Vec p_t = recognition_density(u, map_, config_.joint_sigma0);

                const int action = action_dist(rng);
                const StepOutcome out = env.step(action);
                if (hook) hook(StepEvent::action_executed, global_step);

                const Vec p_next =
                    recognition_density(out.next_state, map_, config_.joint_sigma0);
                m.mean_prediction_residual +=
                    (p_next - model_.predict_density(action, p_t)).norm();
                model_.learn(action, p_t, p_next, gamma);
                if (hook) hook(StepEvent::transition_updated, global_step);

                u = out.next_state;
                done = out.done;
                ++m.steps;
                ++global_step;
            }
            if (m.steps > 0) {
                m.mean_quantization_error /= m.steps;
                m.mean_prediction_residual /= m.steps;
            }
            metrics.push_back(m);
        }
        return metrics;
    }

    SomMap& mutable_map() { return map_; }
    TransitionModel& mutable_model() { return model_; }

private:
    TrainingConfig config_;
    SomMap map_;
    TransitionModel model_;
    bool frozen_ = false;
};

}  // namespace sapsom
