// Markov-chain model of the two-stage pipeline's buffer state.
//
// State x in [0, S) with S = beta*zeta + beta + 1 counts the D_l slots needed
// to clear the buffer. Each slot D_s fails with probability eps_s (IID); the
// transition structure is the one implemented by next_state().
#pragma once

#include "tascl/adaptive.hpp"

#include <optional>
#include <vector>

namespace tascl {

struct MarkovModel {
    int beta = 1;
    int zeta = 0;
    double eps_s = 0.0;
    int s_count = 0;
    OverflowPolicy policy = OverflowPolicy::DropInProgress;
    std::vector<double> matrix;  ///< row-major s_count x s_count

    double at(int from, int to) const
    {
        return matrix[static_cast<std::size_t>(from) * static_cast<std::size_t>(s_count) + static_cast<std::size_t>(to)];
    }
    /// First hazard state, beta*zeta + 2.
    int first_hazard() const { return beta * zeta + 2; }
};

MarkovModel build_matrix(int beta, int zeta, double eps_s,
                         OverflowPolicy policy = OverflowPolicy::DropInProgress);

struct SteadyState {
    std::vector<double> lambda;
    long iterations = 0;
    double residual = 0.0;  ///< ||lambda P - lambda||_1
};

/// Power iteration lambda <- lambda P from `initial` (default: all mass in
/// state 0) until the L1 change drops below `tol`. Throws
/// std::runtime_error if `max_iterations` is reached first.
SteadyState steady_state(const MarkovModel& model, double tol = 1e-12, long max_iterations = 10'000'000,
                         const std::optional<std::vector<double>>& initial = std::nullopt);

/// lambda P
std::vector<double> apply_transition(const MarkovModel& model, const std::vector<double>& lambda);

/// eps_s times the steady-state mass of the hazard states
/// beta*zeta+2 .. beta*zeta+beta. Zero when that range is empty.
double overflow_probability(const MarkovModel& model, const SteadyState& ss);

/// Convenience: build, solve and evaluate.
double overflow_probability(int beta, int zeta, double eps_s);

struct OverflowReport {
    double p_overflow = 0.0;
    double bler_lower = 0.0;
    double bler_upper = 0.0;
    /// p_overflow / eps_l * 100; empty when eps_l = 0 and p_overflow > 0.
    std::optional<double> performance_loss_bound;
};

/// eps_l <= BLER < eps_l + Pr(overflow).
OverflowReport bler_bounds(double p_overflow, double eps_l);

struct MonotonicitySweep {
    bool monotone = true;
    std::vector<std::pair<double, double>> table;  ///< (eps_s, Pr(overflow))
};

/// Evaluates Pr(overflow) over an ascending grid and checks it never
/// decreases by more than the solver tolerance.
MonotonicitySweep sweep_monotonicity(int beta, int zeta, const std::vector<double>& eps_grid);

}  // namespace tascl
