#include "phasepack/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "phasepack/losses.hpp"
#include "phasepack/metrics.hpp"

namespace phasepack {

namespace {

// Measurement error, or ||Ax|| when b is identically zero.
double data_residual(const ComplexVector& ax, const RealVector& b) {
    return b.norm() > 0.0 ? measurement_error(ax, b) : ax.norm();
}

void check_start(const PhaseProblem& problem, const ComplexVector& x0) {
    require_length(x0, problem.n(), "x0");
    require_finite(x0, "x0");
}

SolveOutputs run_flow(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                      Recorder& recorder, GradientSpec spec) {
    check_start(problem, x0);
    return gradient_descent_engine(spec, x0, opts, recorder);
}

/// Weighted amplitude loss whose weights are recomputed every `period`
/// iterations by `reweight`.
template <class Reweight>
SolveOutputs reweighted_amplitude_flow(const PhaseProblem& problem, const ComplexVector& x0,
                                       const SolverOptions& opts, const char* name, int period,
                                       Reweight reweight) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    Recorder recorder(op, b, opts);
    auto weights = std::make_shared<RealVector>(reweight(x0, recorder));
    GradientSpec spec;
    spec.name = name;
    spec.evaluate = [&op, &b, weights](const ComplexVector& x) {
        return grad_weighted_amplitude(op, b, *weights, x);
    };
    spec.refresh = [&recorder, weights, period, reweight](const ComplexVector& x, int k) mutable {
        if (k % period != 0) return false;
        *weights = reweight(x, recorder);
        return true;
    };
    return run_flow(problem, x0, opts, recorder, std::move(spec));
}

} // namespace

SolveOutputs solve_wirtflow(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                            RandomSource&) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    Recorder recorder(op, b, opts);
    GradientSpec spec;
    spec.name = "wirtflow";
    spec.evaluate = [&op, &b](const ComplexVector& x) { return grad_intensity(op, b, x); };
    return run_flow(problem, x0, opts, recorder, std::move(spec));
}

SolveOutputs solve_amplitudeflow(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                                 RandomSource&) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    Recorder recorder(op, b, opts);
    GradientSpec spec;
    spec.name = "amplitudeflow";
    spec.evaluate = [&op, &b](const ComplexVector& x) { return grad_amplitude(op, b, x); };
    return run_flow(problem, x0, opts, recorder, std::move(spec));
}

SolveOutputs solve_twf(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                       RandomSource&) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    const TwfBounds bounds{opts.twf_alpha_lb, opts.twf_alpha_ub, opts.twf_alpha_h};
    Recorder recorder(op, b, opts);
    check_start(problem, x0);
    // The truncation set is re-derived at every accepted iterate and held
    // fixed inside the line search, so each step descends a fixed objective.
    auto keep = std::make_shared<std::vector<char>>(twf_truncation_set(op, b, x0, bounds));
    GradientSpec spec;
    spec.name = "twf";
    spec.evaluate = [&op, &b, keep](const ComplexVector& x) { return poisson_loss(op, b, *keep, x); };
    spec.refresh = [&op, &b, keep, bounds](const ComplexVector& x, int) {
        auto next = twf_truncation_set(op, b, x, bounds);
        if (next == *keep) return false;
        *keep = std::move(next);
        return true;
    };
    return run_flow(problem, x0, opts, recorder, std::move(spec));
}

SolveOutputs solve_rwf(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                       RandomSource&) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    const double eta = opts.eta;
    return reweighted_amplitude_flow(problem, x0, opts, "rwf", opts.reweight_period,
                                     [&op, &b, eta](const ComplexVector& x, Recorder&) {
                                         return weights_rwf(op, b, x, eta);
                                     });
}

SolveOutputs solve_taf(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                       RandomSource&) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    const double gamma = opts.gamma;
    return reweighted_amplitude_flow(problem, x0, opts, "taf", opts.truncation_period,
                                     [&op, &b, gamma](const ComplexVector& x, Recorder& recorder) {
                                         auto mask = truncation_taf(op, b, x, gamma);
                                         if (mask.fell_back) {
                                             recorder.warn("taf: truncation mask empty, using all measurements");
                                         }
                                         return mask.mask;
                                     });
}

SolveOutputs solve_raf(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                       RandomSource&) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    const double beta = opts.raf_beta;
    return reweighted_amplitude_flow(problem, x0, opts, "raf", opts.reweight_period,
                                     [&op, &b, beta](const ComplexVector& x, Recorder&) {
                                         return weights_raf(op, b, x, beta);
                                     });
}

SolveOutputs solve_gerchberg_saxton(const PhaseProblem& problem, const ComplexVector& x0,
                                    const SolverOptions& opts, RandomSource&) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    check_start(problem, x0);
    Recorder recorder(op, b, opts);
    ComplexVector x = x0;
    ComplexVector z = op.forward(x);
    for (;;) {
        const ComplexVector y = b.cast<Complex>().cwiseProduct(phase(z));
        x = least_squares_solve(op, y, opts.max_inner_iters, opts.inner_tol, &x);
        z = op.forward(x);
        if (auto stop = recorder.record(x, data_residual(z, b))) return recorder.finish(std::move(x), *stop);
    }
}

SolveOutputs solve_fienup(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                          RandomSource&) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    check_start(problem, x0);
    Recorder recorder(op, b, opts);
    const double beta = opts.fienup_tuning;
    ComplexVector x = x0;
    ComplexVector z = op.forward(x);
    ComplexVector y = z;
    for (;;) {
        y = (1.0 - beta) * y + beta * b.cast<Complex>().cwiseProduct(phase(z));
        x = least_squares_solve(op, y, opts.max_inner_iters, opts.inner_tol, &x);
        z = op.forward(x);
        if (auto stop = recorder.record(x, data_residual(z, b))) return recorder.finish(std::move(x), *stop);
    }
}

SolveOutputs solve_kaczmarz(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                            RandomSource& rng) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    check_start(problem, x0);
    if (!op.has_rows()) {
        fail(ErrorCode::Capability, "kaczmarz needs row access; build the problem with a dense operator");
    }
    Recorder recorder(op, b, opts);
    // (Ax)_i = M.row(i) x and a_i = conj(M.row(i)).
    const ComplexMatrix matrix = materialize(op);
    const RealVector& norms = op.row_norms_squared();
    const Index m = op.rows();
    ComplexVector x = x0;
    for (;;) {
        for (Index t = 0; t < m; ++t) {
            const Index i = opts.index_choice == IndexChoice::Random ? rng.uniform_index(m) : t;
            if (norms[i] == 0.0) continue;
            const Complex z = matrix.row(i).transpose().cwiseProduct(x).sum();
            const Complex step = (b[i] * phase(z) - z) / norms[i];
            x += step * matrix.row(i).adjoint();
        }
        if (auto stop = recorder.record(x, data_residual(op.forward(x), b))) {
            return recorder.finish(std::move(x), *stop);
        }
    }
}

std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
    const double a = c2 / c3;
    const double b = c1 / c3;
    const double c = c0 / c3;
    const double q = (a * a - 3.0 * b) / 9.0;
    const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    std::vector<double> roots;
    if (r * r < q * q * q) {
        const double theta = std::acos(std::clamp(r / std::sqrt(q * q * q), -1.0, 1.0));
        const double s = -2.0 * std::sqrt(q);
        for (double shift : {0.0, 2.0 * std::numbers::pi, -2.0 * std::numbers::pi}) {
            roots.push_back(s * std::cos((theta + shift) / 3.0) - a / 3.0);
        }
    } else {
        const double big = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q * q * q)), r);
        const double small = big != 0.0 ? q / big : 0.0;
        roots.push_back(big + small - a / 3.0);
    }
    for (double& t : roots) {
        for (int k = 0; k < 3; ++k) {
            const double p = ((t + a) * t + b) * t + c;
            const double dp = (3.0 * t + 2.0 * a) * t + b;
            if (dp == 0.0) break;
            const double next = t - p / dp;
            if (std::abs(((next + a) * next + b) * next + c) >= std::abs(p)) break;
            t = next;
        }
    }
    return roots;
}

SolveOutputs solve_coordinate_descent(const PhaseProblem& problem, const ComplexVector& x0,
                                      const SolverOptions& opts, RandomSource&) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    check_start(problem, x0);
    if (!op.has_rows()) {
        fail(ErrorCode::Capability, "coordinatedescent needs row access; build the problem with a dense operator");
    }
    Recorder recorder(op, b, opts);
    const Eigen::MatrixXcd columns = materialize(op);
    const RealVector b2 = b.cwiseAbs2();
    const bool real_mode = op.is_real() && x0.imag().isZero(0.0);
    std::vector<Complex> directions{Complex{1.0, 0.0}};
    if (!real_mode) directions.emplace_back(0.0, 1.0);

    ComplexVector x = x0;
    const Index m = op.rows();
    RealVector r(m), p(m), q(m);
    for (;;) {
        ComplexVector z = columns * x;
        for (Index j = 0; j < x.size(); ++j) {
            for (const Complex u : directions) {
                // Along x + t u e_j the residuals |z_i|^2 - b_i^2 become r + 2 p t + q t^2.
                const ComplexVector c = u * columns.col(j);
                double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;
                for (Index i = 0; i < m; ++i) {
                    r[i] = std::norm(z[i]) - b2[i];
                    p[i] = (std::conj(z[i]) * c[i]).real();
                    q[i] = std::norm(c[i]);
                    c3 += q[i] * q[i];
                    c2 += 3.0 * p[i] * q[i];
                    c1 += r[i] * q[i] + 2.0 * p[i] * p[i];
                    c0 += r[i] * p[i];
                }
                if (c3 == 0.0) continue;
                auto objective = [&](double t) {
                    double f = 0.0;
                    for (Index i = 0; i < m; ++i) {
                        const double e = r[i] + (2.0 * p[i] + q[i] * t) * t;
                        f += e * e;
                    }
                    return f;
                };
                double best_t = 0.0;
                double best_f = objective(0.0);
                for (double t : real_cubic_roots(c3, c2, c1, c0)) {
                    const double f = objective(t);
                    if (f < best_f) {
                        best_f = f;
                        best_t = t;
                    }
                }
                if (best_t == 0.0) continue;
                x[j] += best_t * u;
                z += best_t * c;
            }
        }
        if (auto stop = recorder.record(x, data_residual(columns * x, b))) {
            return recorder.finish(std::move(x), *stop);
        }
    }
}

namespace {

constexpr int kPenaltyStages = 10;  // rho = 1, 10, ..., 1e9; later stages reuse the last value
constexpr double kStageGradientTol = 1e-10;

/// Runs penalized PhaseMax from `anchor` on the shared recorder. One recorded
/// iteration is one continuation stage. Returns the recorder's stop reason,
/// or Stagnation once a stage at the final penalty no longer moves x.
Termination phasemax_rounds(const PhaseProblem& problem, const ComplexVector& anchor, const SolverOptions& opts,
                            Recorder& recorder, ComplexVector& x) {
    const auto& op = *problem.op;
    const auto& b = problem.b0;
    const double anchor_norm = anchor.norm();
    if (anchor_norm == 0.0) fail(ErrorCode::InvalidArgument, "phasemax: the anchor x0 must be nonzero");
    const ComplexVector u = anchor / anchor_norm;

    const double n = static_cast<double>(op.cols());
    const double row_sum = op.row_norms_squared().sum();
    const double row_scale = row_sum > 0.0 ? row_sum / n : 1.0;
    const double est = estimate_signal_norm(b);
    const double signal_scale = est > 0.0 ? est : 1.0;
    // estimate_signal_norm matches ||x|| only for unit-variance rows; the
    // second term rescales it by the actual row energy.
    const double cap = 10.0 * std::max(est, b.norm() / std::sqrt(row_scale));

    EngineSettings settings = engine_settings(opts);
    settings.max_iters = opts.max_fasta_iters;

    x = anchor;
    for (int stage = 0;; ++stage) {
        const double rho = std::pow(10.0, std::min(stage, kPenaltyStages - 1));
        const double weight = rho / (2.0 * signal_scale * row_scale);
        GradientSpec spec;
        spec.name = "phasemax";
        spec.evaluate = [&op, &b, &u, weight](const ComplexVector& v) {
            const ComplexVector z = op.forward(v);
            ComplexVector excess = ComplexVector::Zero(z.size());
            double penalty = 0.0;
            for (Index i = 0; i < z.size(); ++i) {
                const double e = std::abs(z[i]) - b[i];
                if (e <= 0.0) continue;
                penalty += e * e;
                excess[i] = e * phase(z[i]);
            }
            LossValue out;
            out.value = -inner(u, v).real() + weight * penalty;
            out.gradient = -0.5 * u + weight * op.adjoint(excess);
            return out;
        };
        if (cap > 0.0) {
            spec.project = [cap](ComplexVector& v) {
                const double norm = v.norm();
                if (norm <= cap) return false;
                v *= cap / norm;
                return true;
            };
        }
        const ComplexVector before = x;
        auto result = run_gradient_engine(spec, x, settings, [](const ComplexVector&, double residual, int) {
            return residual < kStageGradientTol ? std::optional<Termination>(Termination::ToleranceReached)
                                                : std::nullopt;
        });
        x = std::move(result.x);
        if (auto stop = recorder.record(x, data_residual(op.forward(x), b))) return *stop;
        if (stage >= kPenaltyStages - 1) {
            const double scale = std::max(x.norm(), 1e-300);
            if ((x - before).norm() / scale < opts.tol) return Termination::Stagnation;
        }
    }
}

} // namespace

SolveOutputs solve_phasemax(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                            RandomSource&) {
    check_start(problem, x0);
    Recorder recorder(*problem.op, problem.b0, opts);
    ComplexVector x;
    const Termination reason = phasemax_rounds(problem, x0, opts, recorder, x);
    return recorder.finish(std::move(x), reason);
}

SolveOutputs solve_phaselamp(const PhaseProblem& problem, const ComplexVector& x0, const SolverOptions& opts,
                             RandomSource&) {
    check_start(problem, x0);
    Recorder recorder(*problem.op, problem.b0, opts);
    const double est = estimate_signal_norm(problem.b0);
    ComplexVector anchor = x0;
    ComplexVector x;
    Termination reason = Termination::Stagnation;
    for (int round = 0; round < opts.phase_lamp_outer_iters; ++round) {
        reason = phasemax_rounds(problem, anchor, opts, recorder, x);
        if (reason != Termination::Stagnation) break;
        const bool last = round + 1 == opts.phase_lamp_outer_iters;
        if (last || x.norm() == 0.0) break;
        // Compare directions so the anchor's rescaling does not count as movement.
        if (recon_error(anchor / anchor.norm(), x / x.norm()) < opts.tol) {
            reason = Termination::ToleranceReached;
            break;
        }
        anchor = x * ((est > 0.0 ? est : x.norm()) / x.norm());
    }
    return recorder.finish(std::move(x), reason);
}

} // namespace phasepack
