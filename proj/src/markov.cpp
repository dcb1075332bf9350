#include "tascl/markov.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tascl {

namespace {

constexpr double kSolverTol = 1e-12;

void check_probability(double p, const char* what)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

MarkovModel build_matrix(int beta, int zeta, double eps_s, OverflowPolicy policy)
{
    check_probability(eps_s, "eps_s");
    TaSclConfig cfg;
    cfg.beta = beta;
    cfg.zeta = zeta;
    cfg.l_small = cfg.l_large = 1;
    cfg.overflow_policy = policy;
    cfg.validate();

    MarkovModel m;
    m.beta = beta;
    m.zeta = zeta;
    m.eps_s = eps_s;
    m.policy = policy;
    m.s_count = cfg.state_count();
    const auto s = static_cast<std::size_t>(m.s_count);
    m.matrix.assign(s * s, 0.0);
    for (int x = 0; x < m.s_count; ++x) {
        const auto row = static_cast<std::size_t>(x) * s;
        m.matrix[row + static_cast<std::size_t>(next_state(x, false, cfg))] += 1.0 - eps_s;
        m.matrix[row + static_cast<std::size_t>(next_state(x, true, cfg))] += eps_s;
    }
    return m;
}

std::vector<double> apply_transition(const MarkovModel& model, const std::vector<double>& lambda)
{
    const auto s = static_cast<std::size_t>(model.s_count);
    if (lambda.size() != s)
        throw std::invalid_argument("distribution size does not match the model");
    std::vector<double> out(s, 0.0);
    for (std::size_t x = 0; x < s; ++x) {
        const double mass = lambda[x];
        if (mass == 0.0)
            continue;
        const double* row = model.matrix.data() + x * s;
        for (std::size_t y = 0; y < s; ++y)
            out[y] += mass * row[y];
    }
    return out;
}

SteadyState steady_state(const MarkovModel& model, double tol, long max_iterations,
                         const std::optional<std::vector<double>>& initial)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
    const auto s = static_cast<std::size_t>(model.s_count);

    // Each row has at most two nonzeros; iterate over those directly.
    std::vector<std::size_t> to_ok(s), to_fail(s);
    std::vector<double> p_ok(s), p_fail(s);
    for (std::size_t x = 0; x < s; ++x) {
        bool first = true;
        for (std::size_t y = 0; y < s; ++y) {
            const double p = model.matrix[x * s + y];
            if (p == 0.0)
                continue;
            (first ? to_ok[x] : to_fail[x]) = y;
            (first ? p_ok[x] : p_fail[x]) = p;
            first = false;
        }
        if (first)
            throw std::invalid_argument("transition matrix has an empty row");
        if (p_fail[x] == 0.0)
            to_fail[x] = to_ok[x];
    }

    SteadyState ss;
    if (initial) {
        if (initial->size() != s)
            throw std::invalid_argument("initial distribution has the wrong size");
        ss.lambda = *initial;
    } else {
        ss.lambda.assign(s, 0.0);
        ss.lambda[0] = 1.0;
    }

    std::vector<double> next(s);
    for (long it = 1; it <= max_iterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t x = 0; x < s; ++x) {
            next[to_ok[x]] += ss.lambda[x] * p_ok[x];
            next[to_fail[x]] += ss.lambda[x] * p_fail[x];
        }
        double change = 0.0;
        for (std::size_t y = 0; y < s; ++y)
            change += std::abs(next[y] - ss.lambda[y]);
        ss.lambda.swap(next);
        if (change < tol) {
            ss.iterations = it;
            const auto moved = apply_transition(model, ss.lambda);
            ss.residual = 0.0;
            for (std::size_t y = 0; y < s; ++y)
                ss.residual += std::abs(moved[y] - ss.lambda[y]);
            return ss;
        }
    }
    throw std::runtime_error("steady state did not converge within " + std::to_string(max_iterations) +
                             " iterations");
}

double overflow_probability(const MarkovModel& model, const SteadyState& ss)
{
    if (static_cast<int>(ss.lambda.size()) != model.s_count)
        throw std::invalid_argument("steady state does not match the model dimension");
    double hazard = 0.0;
    for (int x = model.first_hazard(); x <= model.beta * model.zeta + model.beta; ++x)
        hazard += ss.lambda[static_cast<std::size_t>(x)];
    return model.eps_s * hazard;
}

double overflow_probability(int beta, int zeta, double eps_s)
{
    const auto model = build_matrix(beta, zeta, eps_s);
    return overflow_probability(model, steady_state(model));
}

OverflowReport bler_bounds(double p_overflow, double eps_l)
{
    check_probability(p_overflow, "p_overflow");
    check_probability(eps_l, "eps_l");
    OverflowReport r;
    r.p_overflow = p_overflow;
    r.bler_lower = eps_l;
    r.bler_upper = eps_l + p_overflow;
    if (eps_l > 0.0)
        r.performance_loss_bound = p_overflow / eps_l * 100.0;
    else if (p_overflow == 0.0)
        r.performance_loss_bound = 0.0;
    return r;
}

MonotonicitySweep sweep_monotonicity(int beta, int zeta, const std::vector<double>& eps_grid)
{
    MonotonicitySweep sweep;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (i > 0 && !(eps_grid[i] > eps_grid[i - 1]))
            throw std::invalid_argument("eps grid must be strictly ascending");
        const double p = overflow_probability(beta, zeta, eps_grid[i]);
        if (!sweep.table.empty() && p < sweep.table.back().second - kSolverTol)
            sweep.monotone = false;
        sweep.table.emplace_back(eps_grid[i], p);
    }
    return sweep;
}

}  // namespace tascl
