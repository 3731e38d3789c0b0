#include "phasepack/engine.hpp"

#include <cmath>
#include <deque>

namespace phasepack {

namespace {

double real_inner(const ComplexVector& u, const ComplexVector& v) { return inner(u, v).real(); }

struct CurvaturePair {
    ComplexVector s;
    ComplexVector y;
    double rho;
};

ComplexVector lbfgs_direction(const ComplexVector& g, const std::deque<CurvaturePair>& memory) {
    ComplexVector q = g;
    std::vector<double> alpha(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
        alpha[k] = memory[k].rho * real_inner(memory[k].s, q);
        q -= alpha[k] * memory[k].y;
    }
    const auto& newest = memory.back();
    ComplexVector r = (real_inner(newest.s, newest.y) / newest.y.squaredNorm()) * q;
    for (std::size_t k = 0; k < memory.size(); ++k) {
        const double beta = memory[k].rho * real_inner(memory[k].y, r);
        r += (alpha[k] - beta) * memory[k].s;
    }
    return -r;
}

} // namespace

EngineSettings engine_settings(const SolverOptions& opts) {
    EngineSettings s;
    s.method = opts.search_method;
    s.max_iters = opts.max_iters;
    s.lbfgs_memory = opts.lbfgs_memory;
    s.shrink = opts.line_search_shrink;
    s.sufficient_decrease = opts.line_search_sufficient_decrease;
    return s;
}

EngineResult run_gradient_engine(const GradientSpec& spec, ComplexVector x0, const EngineSettings& settings,
                                 const EngineMonitor& monitor) {
    require_finite(x0, "gradient engine: x0");
    EngineResult result;
    ComplexVector x = std::move(x0);
    LossValue current = spec.evaluate(x);
    const double g0 = current.gradient.norm();
    auto relative = [g0](double gnorm) { return g0 > 0.0 ? gnorm / g0 : 0.0; };
    result.objective_trace.push_back(current.value);

    std::deque<CurvaturePair> memory;
    ComplexVector previous_gradient;
    ComplexVector previous_direction;
    ComplexVector last_s;
    ComplexVector last_y;
    double previous_tau = 0.0;
    double previous_slope = 0.0;
    bool have_step = false;
    bool have_direction = false;
    bool refreshed = false;

    for (int k = 0;; ++k) {
        if (k > 0 && spec.refresh && spec.refresh(x, k)) {
            current = spec.evaluate(x);
            memory.clear();
            have_direction = false;
            refreshed = true;
        }
        const ComplexVector& g = current.gradient;
        const double gnorm = g.norm();
        if (gnorm == 0.0) {
            ++result.iterations;
            const auto stop = monitor(x, 0.0, result.iterations);
            result.reason = stop.value_or(Termination::Stagnation);
            break;
        }

        ComplexVector d;
        switch (settings.method) {
        case SearchMethod::SteepestDescent: d = -g; break;
        case SearchMethod::NonlinearCG:
            if (have_direction) {
                const double beta =
                    std::max(0.0, real_inner(g, g - previous_gradient) / previous_gradient.squaredNorm());
                d = -g + beta * previous_direction;
            } else {
                d = -g;
            }
            break;
        case SearchMethod::LBFGS: d = memory.empty() ? ComplexVector(-g) : lbfgs_direction(g, memory); break;
        }
        double slope = 2.0 * real_inner(g, d);
        if (!(slope < 0.0)) {
            d = -g;
            slope = -2.0 * gnorm * gnorm;
            memory.clear();
        }

        double tau = 0.0;
        if (settings.method == SearchMethod::LBFGS && !memory.empty()) {
            tau = 1.0;
        } else if (have_step && settings.method == SearchMethod::NonlinearCG && have_direction) {
            tau = previous_tau * previous_slope / slope;
        } else if (have_step) {
            const double sy = real_inner(last_s, last_y);
            tau = sy > 0.0 ? last_s.squaredNorm() / sy : 2.0 * previous_tau;
            tau *= gnorm / d.norm();
        } else {
            const double xnorm = x.norm();
            tau = xnorm > 0.0 ? 0.1 * xnorm / d.norm() : 1.0 / d.norm();
        }
        if (!std::isfinite(tau) || tau <= 0.0) tau = 1.0 / d.norm();

        ComplexVector trial;
        bool accepted = false;
        for (int t = 0; t <= settings.max_backtracks; ++t) {
            trial = x + tau * d;
            const double f = spec.objective ? spec.objective(trial) : spec.evaluate(trial).value;
            if (std::isfinite(f) && f <= current.value + settings.sufficient_decrease * tau * slope) {
                accepted = true;
                break;
            }
            tau *= settings.shrink;
        }
        if (!accepted) {
            result.reason = Termination::Stagnation;
            break;
        }
        if (spec.project) spec.project(trial);

        LossValue next = spec.evaluate(trial);
        last_s = trial - x;
        last_y = next.gradient - g;
        if (settings.method == SearchMethod::LBFGS) {
            const double sy = real_inner(last_s, last_y);
            if (sy > 1e-16 * last_s.norm() * last_y.norm()) {
                memory.push_back({last_s, last_y, 1.0 / sy});
                while (static_cast<int>(memory.size()) > settings.lbfgs_memory) memory.pop_front();
            }
        }
        previous_gradient = g;
        previous_direction = d;
        previous_tau = tau;
        previous_slope = slope;
        have_step = true;
        have_direction = true;

        x = std::move(trial);
        current = std::move(next);
        result.objective_trace.push_back(current.value);
        result.refreshed.push_back(refreshed);
        refreshed = false;

        ++result.iterations;
        if (auto stop = monitor(x, relative(current.gradient.norm()), result.iterations)) {
            result.reason = *stop;
            break;
        }
        if (result.iterations >= settings.max_iters) {
            result.reason = Termination::MaxIterations;
            break;
        }
    }
    result.x = std::move(x);
    return result;
}

SolveOutputs gradient_descent_engine(const GradientSpec& spec, ComplexVector x0, const SolverOptions& opts,
                                     Recorder& recorder) {
    const auto result = run_gradient_engine(spec, std::move(x0), engine_settings(opts),
                                            [&](const ComplexVector& x, double residual, int) {
                                                return recorder.record(x, residual);
                                            });
    return recorder.finish(result.x, result.reason);
}

} // namespace phasepack
