/**
 * @file config.hpp
 * @brief Flat key-value configuration covering environment, training,
 * planning, and goal definitions.
 *
 * File format: one `key = value` per line, `#` starts a comment. Vector
 * values are comma-separated.
 */

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sapsom/agent.hpp"
#include "sapsom/cartpole.hpp"
#include "sapsom/planner.hpp"

namespace sapsom {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using KeyValueMap = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline KeyValueMap parse_key_values(std::istream& in) {
    KeyValueMap kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value', got: " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline KeyValueMap load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    return parse_key_values(in);
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

/// Goal definition: either an explicit (mean, precision) pair or a path to a
/// demonstration-trace CSV fed to goal_from_demo.
struct GoalSpec {
    std::vector<double> mean;
    std::vector<double> precision;
    std::string demo_csv;
    double precision_floor = kPrecisionFloor;

    bool explicit_goal() const { return !mean.empty(); }
};

struct AppConfig {
    MapGeometry geometry;
    EnvParams env;
    TrainingConfig training;
    PlanConfig plan;
    GoalSpec goal;
    std::uint64_t seed = 1;
};

namespace detail {

class KvReader {
public:
    explicit KvReader(const KeyValueMap& kv) : kv_(kv) {}

    void get(const char* key, double& v) const {
        if (auto it = kv_.find(key); it != kv_.end()) v = std::stod(it->second);
    }
    void get(const char* key, int& v) const {
        if (auto it = kv_.find(key); it != kv_.end()) v = std::stoi(it->second);
    }
    void get(const char* key, std::uint64_t& v) const {
        if (auto it = kv_.find(key); it != kv_.end()) v = std::stoull(it->second);
    }
    void get(const char* key, bool& v) const {
        if (auto it = kv_.find(key); it != kv_.end())
            v = it->second == "1" || it->second == "true";
    }
    void get(const char* key, std::string& v) const {
        if (auto it = kv_.find(key); it != kv_.end()) v = it->second;
    }
    void get(const char* key, std::vector<double>& v) const {
        if (auto it = kv_.find(key); it != kv_.end()) v = parse_double_list(it->second);
    }

private:
    const KeyValueMap& kv_;
};

}  // namespace detail

inline AppConfig config_from_key_values(const KeyValueMap& kv) {
    AppConfig c;
    detail::KvReader r(kv);
    r.get("seed", c.seed);
    c.training.seed = c.seed;
    r.get("som.rows", c.geometry.rows);
    r.get("som.cols", c.geometry.cols);

    r.get("env.gravity", c.env.gravity);
    r.get("env.cart_mass", c.env.cart_mass);
    r.get("env.pole_mass", c.env.pole_mass);
    r.get("env.pole_half_length", c.env.pole_half_length);
    r.get("env.force_mag", c.env.force_mag);
    r.get("env.dt", c.env.dt);
    r.get("env.theta_limit", c.env.theta_limit);
    r.get("env.x_limit", c.env.x_limit);
    r.get("env.max_steps", c.env.max_steps);
    r.get("env.reset_range", c.env.reset_range);

    r.get("train.pretrain_episodes", c.training.pretrain_episodes);
    r.get("train.joint_episodes", c.training.joint_episodes);
    r.get("train.pretrain_sigma_start", c.training.pretrain_sigma_start);
    r.get("train.pretrain_sigma_end", c.training.pretrain_sigma_end);
    r.get("train.pretrain_eta_start", c.training.pretrain_eta_start);
    r.get("train.pretrain_eta_end", c.training.pretrain_eta_end);
    r.get("train.joint_sigma0", c.training.joint_sigma0);
    r.get("train.joint_eta0", c.training.joint_eta0);
    r.get("train.joint_gamma", c.training.joint_gamma);
    r.get("train.eval_sigma0_fraction", c.training.eval_sigma0_fraction);
    r.get("train.codebook_init_range", c.training.codebook_init_range);
    r.get("train.seed", c.training.seed);

    r.get("plan.tau", c.plan.tau);
    r.get("plan.replan_every_step", c.plan.replan_every_step);

    r.get("goal.mean", c.goal.mean);
    r.get("goal.precision", c.goal.precision);
    r.get("goal.demo_csv", c.goal.demo_csv);
    r.get("goal.precision_floor", c.goal.precision_floor);
    return c;
}

inline AppConfig load_config(const std::string& path) {
    return config_from_key_values(load_key_values(path));
}

inline KeyValueMap env_to_key_values(const EnvParams& e) {
    KeyValueMap kv;
    kv["env.gravity"] = format_double(e.gravity);
    kv["env.cart_mass"] = format_double(e.cart_mass);
    kv["env.pole_mass"] = format_double(e.pole_mass);
    kv["env.pole_half_length"] = format_double(e.pole_half_length);
    kv["env.force_mag"] = format_double(e.force_mag);
    kv["env.dt"] = format_double(e.dt);
    kv["env.theta_limit"] = format_double(e.theta_limit);
    kv["env.x_limit"] = format_double(e.x_limit);
    kv["env.max_steps"] = std::to_string(e.max_steps);
    kv["env.reset_range"] = format_double(e.reset_range);
    return kv;
}

inline KeyValueMap training_to_key_values(const TrainingConfig& t) {
    KeyValueMap kv;
    kv["train.pretrain_episodes"] = std::to_string(t.pretrain_episodes);
    kv["train.joint_episodes"] = std::to_string(t.joint_episodes);
    kv["train.pretrain_sigma_start"] = format_double(t.pretrain_sigma_start);
    kv["train.pretrain_sigma_end"] = format_double(t.pretrain_sigma_end);
    kv["train.pretrain_eta_start"] = format_double(t.pretrain_eta_start);
    kv["train.pretrain_eta_end"] = format_double(t.pretrain_eta_end);
    kv["train.joint_sigma0"] = format_double(t.joint_sigma0);
    kv["train.joint_eta0"] = format_double(t.joint_eta0);
    kv["train.joint_gamma"] = format_double(t.joint_gamma);
    kv["train.eval_sigma0_fraction"] = format_double(t.eval_sigma0_fraction);
    kv["train.codebook_init_range"] = format_double(t.codebook_init_range);
    kv["train.seed"] = std::to_string(t.seed);
    return kv;
}

}  // namespace sapsom
