/**
 * @file transition.hpp
 * @brief Action-conditioned state-transition matrices over map units.
 *
 * One real N x N matrix T_a per discrete action, trained by the least-squares
 * rule dT = gamma (p_next - T p_t) p_t^T. Entries are unconstrained reals;
 * mode prediction only needs the argmax of the winner's column.
 */

#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sapsom/som.hpp"

namespace sapsom {

class TransitionModel {
public:
    struct ModePrediction {
        int unit;        ///< predicted next unit (never the input winner)
        bool unlearned;  ///< true when the winner's column carries no signal
    };

    /// Matrices start at zero: early predictions are uninformative but unbiased.
    TransitionModel(int action_count, int unit_count)
        : matrices_(action_count, Eigen::MatrixXd::Zero(unit_count, unit_count)) {
        if (action_count < 1)
            throw std::invalid_argument("TransitionModel: need at least one action");
        if (unit_count < 1)
            throw std::invalid_argument("TransitionModel: need at least one unit");
    }

    int action_count() const { return static_cast<int>(matrices_.size()); }
    int units() const { return static_cast<int>(matrices_[0].rows()); }

    Eigen::MatrixXd& matrix(int a) { return matrices_.at(a); }
    const Eigen::MatrixXd& matrix(int a) const { return matrices_.at(a); }

    /// Predicted next density T_a p_t. Not renormalized.
    Vec predict_density(int a, const Vec& p_t) const {
        if (p_t.size() != units())
            throw std::invalid_argument("predict_density: density length mismatch");
        return matrices_.at(a) * p_t;
    }

    /// Least-squares update of T_a from an observed (p_t, p_next) pair.
    /// Only T_a changes; the other actions' matrices are untouched.
    void learn(int a, const Vec& p_t, const Vec& p_next, double gamma) {
        if (p_t.size() != units() || p_next.size() != units())
            throw std::invalid_argument("learn_transition: density length mismatch");
        Eigen::MatrixXd& T = matrices_.at(a);
        T += gamma * (p_next - T * p_t) * p_t.transpose();
    }

    /// Most likely next unit given the current winner: argmax over the
    /// winner's column of T_a with the winner itself excluded (deadlock
    /// suppression). Ties break to the lowest linear index. An all-zero
    /// column returns the lowest non-winner index, flagged as unlearned.
    ModePrediction predict_mode(int a, int winner) const {
        const Eigen::MatrixXd& T = matrices_.at(a);
        if (winner < 0 || winner >= units())
            throw std::out_of_range("predict_mode: winner out of grid");
        int best = -1;
        bool any_signal = false;
        for (int s = 0; s < units(); ++s) {
            if (s == winner) continue;
            if (T(s, winner) != 0.0) any_signal = true;
            if (best < 0 || T(s, winner) > T(best, winner)) best = s;
        }
        if (best < 0)  // 1x1 map: suppression leaves nothing, fall back to the sole unit
            return {winner, true};
        return {best, !any_signal};
    }

private:
    std::vector<Eigen::MatrixXd> matrices_;
};

}  // namespace sapsom
