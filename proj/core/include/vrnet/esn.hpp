#pragma once

// Echo state network used by each SBS to predict the utility of its actions
// from the strategy indices broadcast by all SBSs.

#include "vrnet/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vrnet {

struct EsnState {
    Eigen::MatrixXd w_in;   ///< N_w x B
    Eigen::VectorXd w_res;  ///< diagonal of the N_w x N_w reservoir matrix
    Eigen::MatrixXd w_out;  ///< |A| x (N_w + B)
    Eigen::VectorXd mu;     ///< reservoir state, N_w
    Eigen::VectorXd x;      ///< input of the last reservoir update, B
    Eigen::VectorXd bias;   ///< fixed reservoir bias, N_w (zero unless requested)

    [[nodiscard]] std::size_t n_w() const { return static_cast<std::size_t>(mu.size()); }
    [[nodiscard]] std::size_t n_inputs() const { return static_cast<std::size_t>(x.size()); }
    [[nodiscard]] std::size_t n_actions() const { return static_cast<std::size_t>(w_out.rows()); }
    /// concat(mu, x)
    [[nodiscard]] Eigen::VectorXd regressor() const;

    friend bool operator==(const EsnState& a, const EsnState& b);
};

/// W_in ~ U(-in_scale, in_scale), diag(W) ~ U(-res_scale, res_scale), W_out = 0, mu = 0.
/// bias ~ U(-bias_scale, bias_scale), drawn last; zero when bias_scale = 0.
EsnState init_esn(std::size_t n_w, std::size_t n_sbs, std::size_t n_actions, Rng& rng, double in_scale = 1.0,
                  double res_scale = 0.5, double bias_scale = 0.0);

/// mu <- tanh(W mu + W_in x + bias); remembers x for the regressor.
const Eigen::VectorXd& update_reservoir(EsnState& esn, const Eigen::VectorXd& x);

/// y = W_out concat(mu, x) with the stored reservoir state.
Eigen::VectorXd predict(const EsnState& esn, const Eigen::VectorXd& x);
/// Prediction at the stored (mu, x).
Eigen::VectorXd predict(const EsnState& esn);

/// W_out[action] += lambda (u - y[action]) concat(mu, x)^T at the stored state.
void train_step(EsnState& esn, std::size_t action, double actual_u, double lambda);

/// min over rows and distinct input pairs of |W_in_row (x - x')| >= 2.
/// nullopt when the inputs contain fewer than two distinct vectors.
std::optional<bool> check_unambiguity(const Eigen::MatrixXd& w_in, const std::vector<Eigen::VectorXd>& inputs);

/// Every input vector the learners can broadcast: x_b = i / |A_b| for i in 0..|A_b|.
std::vector<Eigen::VectorXd> strategy_input_grid(std::span<const std::size_t> action_counts);

/// Input weights meeting the unambiguity condition on the strategy grid by
/// construction: w_kb = m_k s_kb |A_b| 2 R_b with mixed radix R_0 = 1,
/// R_{b+1} = R_b (2 |A_b| + 1), random signs s and magnitudes m_k in [1.05, 2).
Eigen::MatrixXd unambiguous_input_weights(std::size_t n_w, std::span<const std::size_t> action_counts, Rng& rng);

/// lambda_t = lambda0 / t, t >= 1.
double robbins_monro_schedule(std::size_t t, double lambda0 = 0.03);

/// Bit-exact binary checkpoint.
void save_esn(const EsnState& esn, std::ostream& out);
EsnState load_esn(std::istream& in);

}  // namespace vrnet
