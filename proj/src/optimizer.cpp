#include "aos/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "aos/rng.hpp"

namespace aos {

namespace {

struct BudgetExhausted {};

// Funnels every evaluation through the trace and enforces the global budget.
class Recorder {
  public:
    Recorder(const Objective& fn, std::vector<TracePoint>& trace, int max_evals)
        : fn_(fn), trace_(trace), max_evals_(max_evals) {}

    double operator()(const ParamVec& x) {
        if (static_cast<int>(trace_.size()) >= max_evals_) throw BudgetExhausted{};
        const double v = fn_(x);
        trace_.push_back(TracePoint{x, v});
        return v;
    }

    int evals() const { return static_cast<int>(trace_.size()); }

  private:
    const Objective& fn_;
    std::vector<TracePoint>& trace_;
    int max_evals_;
};

double scaled_dist(const Bounds& b, const ParamVec& a, const ParamVec& c) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = (a[i] - c[i]) / b.span(i);
        acc += d * d;
    }
    return std::sqrt(acc);
}

// --- small dense linear algebra for the 3-variable quadratic subproblem ---

using Mat = std::array<double, 9>;  // row-major symmetric

Mat identity() { return Mat{1, 0, 0, 0, 1, 0, 0, 0, 1}; }

ParamVec mat_apply(const Mat& m, const ParamVec& v) {
    return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
            m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

double vdot(const ParamVec& a, const ParamVec& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Solves A x = rhs for n <= 3 with partial pivoting; false when singular.
bool solve_dense(int n, double a[3][3], double rhs[3], double out[3]) {
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[piv]][col])) piv = r;
        std::swap(perm[col], perm[piv]);
        const double p = a[perm[col]][col];
        if (std::abs(p) < 1e-14) return false;
        for (int r = col + 1; r < n; ++r) {
            const double f = a[perm[r]][col] / p;
            for (int c = col; c < n; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
            rhs[perm[r]] -= f * rhs[perm[col]];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double s = rhs[perm[row]];
        for (int c = row + 1; c < n; ++c) s -= a[perm[row]][c] * out[c];
        out[row] = s / a[perm[row]][row];
    }
    return true;
}

// Minimizes 0.5 p'Bp + g'p subject to step_lo <= p <= step_hi by enumerating
// the 27 active-set configurations (3 variables); with B positive definite
// the KKT point is unique. Falls back to a projected gradient step.
ParamVec solve_box_qp(const Mat& B, const ParamVec& g, const ParamVec& step_lo,
                      const ParamVec& step_hi) {
    const double tol = 1e-10 * (1.0 + std::abs(g[0]) + std::abs(g[1]) + std::abs(g[2]));
    for (int config = 0; config < 27; ++config) {
        int state[3];  // 0 free, 1 at lower, 2 at upper
        state[0] = config % 3;
        state[1] = (config / 3) % 3;
        state[2] = config / 9;

        ParamVec p{};
        int free_idx[3];
        int n_free = 0;
        for (int i = 0; i < 3; ++i) {
            if (state[i] == 0) free_idx[n_free++] = i;
            else p[i] = (state[i] == 1) ? step_lo[i] : step_hi[i];
        }
        if (n_free > 0) {
            double a[3][3];
            double rhs[3];
            for (int r = 0; r < n_free; ++r) {
                const int i = free_idx[r];
                double s = g[i];
                for (int j = 0; j < 3; ++j)
                    if (state[j] != 0) s += B[i * 3 + j] * p[j];
                rhs[r] = -s;
                for (int c = 0; c < n_free; ++c) a[r][c] = B[i * 3 + free_idx[c]];
            }
            double sol[3];
            if (!solve_dense(n_free, a, rhs, sol)) continue;
            bool feasible = true;
            for (int r = 0; r < n_free; ++r) {
                const int i = free_idx[r];
                if (sol[r] < step_lo[i] - tol || sol[r] > step_hi[i] + tol) {
                    feasible = false;
                    break;
                }
                p[i] = std::clamp(sol[r], step_lo[i], step_hi[i]);
            }
            if (!feasible) continue;
        }
        // KKT multipliers on the active constraints.
        const ParamVec r = mat_apply(B, p);
        bool kkt = true;
        for (int i = 0; i < 3; ++i) {
            const double ri = r[i] + g[i];
            if (state[i] == 1 && ri < -tol) kkt = false;
            if (state[i] == 2 && ri > tol) kkt = false;
        }
        if (kkt) return p;
    }
    ParamVec p{};
    for (int i = 0; i < 3; ++i) p[i] = std::clamp(-g[i], step_lo[i], step_hi[i]);
    return p;
}

struct SqpOutcome {
    ParamVec x{};
    double fx = 0.0;  // maximization sense
    bool converged = false;
    std::vector<double> accepted;
};

// Minimizes -objective from x, spending at most eval_cap evaluations of its
// own (the recorder may additionally end the run via BudgetExhausted).
SqpOutcome sqp_impl(Recorder& ev, ParamVec x, const Bounds& bounds, const OptOptions& opts,
                    int eval_cap) {
    const int start_evals = ev.evals();
    auto local_budget_left = [&] { return eval_cap - (ev.evals() - start_evals); };
    auto g = [&](const ParamVec& p) { return -ev(p); };

    const ParamVec h = {opts.h_d, opts.h_ang, opts.h_ang};
    SqpOutcome out;
    out.x = x;

    double gx = g(x);
    out.fx = -gx;
    out.accepted.push_back(-gx);

    Mat B = identity();
    ParamVec grad{}, grad_prev{}, s_prev{};
    bool have_prev = false;

    try {
        for (int iter = 0; iter < 10000; ++iter) {
            if (local_budget_left() < 3) break;  // not converged, just out of budget

            // Central finite differences, one-sided at active bounds. A
            // variable whose box is narrower than the step is pinned.
            for (int i = 0; i < 3; ++i) {
                const bool up_ok = x[i] + h[i] <= bounds.upper[i];
                const bool dn_ok = x[i] - h[i] >= bounds.lower[i];
                ParamVec xp = x, xm = x;
                if (up_ok && dn_ok) {
                    xp[i] += h[i];
                    xm[i] -= h[i];
                    grad[i] = (g(xp) - g(xm)) / (2.0 * h[i]);
                } else if (up_ok) {
                    xp[i] += h[i];
                    grad[i] = (g(xp) - gx) / h[i];
                } else if (dn_ok) {
                    xm[i] -= h[i];
                    grad[i] = (gx - g(xm)) / h[i];
                } else {
                    grad[i] = 0.0;
                }
            }

            if (have_prev) {
                // Damped BFGS so B stays positive definite on nonconvex runs.
                ParamVec y = {grad[0] - grad_prev[0], grad[1] - grad_prev[1],
                              grad[2] - grad_prev[2]};
                const ParamVec Bs = mat_apply(B, s_prev);
                const double sBs = vdot(s_prev, Bs);
                double sy = vdot(s_prev, y);
                if (sBs > 1e-300) {
                    if (sy < 0.2 * sBs) {
                        const double theta = 0.8 * sBs / (sBs - sy);
                        for (int i = 0; i < 3; ++i) y[i] = theta * y[i] + (1.0 - theta) * Bs[i];
                        sy = vdot(s_prev, y);
                    }
                    if (sy > 1e-300) {
                        for (int r = 0; r < 3; ++r)
                            for (int c = 0; c < 3; ++c)
                                B[r * 3 + c] += y[r] * y[c] / sy - Bs[r] * Bs[c] / sBs;
                    }
                }
            }

            ParamVec step_lo, step_hi;
            for (int i = 0; i < 3; ++i) {
                step_lo[i] = bounds.lower[i] - x[i];
                step_hi[i] = bounds.upper[i] - x[i];
            }
            const ParamVec p = solve_box_qp(B, grad, step_lo, step_hi);
            const double gtp = vdot(grad, p);
            if (gtp >= -1e-300) {
                out.converged = true;
                break;
            }

            // Armijo backtracking on the negated objective.
            double t = 1.0;
            bool took_step = false;
            ParamVec x_new{};
            double g_new = 0.0;
            while (t >= 1e-7 && local_budget_left() > 0) {
                ParamVec xt;
                for (int i = 0; i < 3; ++i) xt[i] = x[i] + t * p[i];
                xt = bounds.clamp(xt);  // kills roundoff excursions only
                g_new = g(xt);
                if (g_new <= gx + 1e-4 * t * gtp) {
                    x_new = xt;
                    took_step = true;
                    break;
                }
                t *= 0.5;
            }
            if (!took_step) {
                // No improving point along the model direction at this
                // resolution: converged, unless the budget cut the search off.
                if (local_budget_left() > 0) out.converged = true;
                break;
            }

            ParamVec s;
            for (int i = 0; i < 3; ++i) s[i] = x_new[i] - x[i];
            const double improvement = gx - g_new;
            x = x_new;
            gx = g_new;
            out.accepted.push_back(-gx);
            grad_prev = grad;
            s_prev = s;
            have_prev = true;

            double rel_step = 0.0;
            for (int i = 0; i < 3; ++i)
                rel_step = std::max(rel_step, std::abs(s[i]) / bounds.span(i));
            if (rel_step < opts.eps_x || improvement < opts.eps_f) {
                out.converged = true;
                break;
            }
        }
    } catch (const BudgetExhausted&) {
        out.x = x;
        out.fx = -gx;
        throw;
    }
    out.x = x;
    out.fx = -gx;
    return out;
}

OptResult finalize(std::vector<TracePoint>&& trace, bool converged,
                   std::vector<double>&& accepted) {
    if (trace.empty()) throw std::runtime_error("optimizer: no evaluations performed");
    OptResult res;
    size_t best = 0;
    for (size_t i = 1; i < trace.size(); ++i)
        if (trace[i].value > trace[best].value) best = i;
    res.best_x = trace[best].x;
    res.best_value = trace[best].value;
    res.evals = static_cast<int>(trace.size());
    res.converged = converged;
    res.trace = std::move(trace);
    res.accepted_values = std::move(accepted);
    return res;
}

}  // namespace

OptResult grid_search(const Objective& objective, const Bounds& bounds,
                      const std::array<int, 3>& steps) {
    bounds.validate();
    for (int s : steps)
        if (s < 1) throw std::invalid_argument("grid_search: steps must be >= 1");

    auto lattice_value = [&](int i, int j) {
        if (steps[i] == 1) return 0.5 * (bounds.lower[i] + bounds.upper[i]);
        return bounds.lower[i] + j * (bounds.upper[i] - bounds.lower[i]) / (steps[i] - 1);
    };

    std::vector<TracePoint> trace;
    trace.reserve(static_cast<size_t>(steps[0]) * steps[1] * steps[2]);
    size_t best = 0;
    for (int i0 = 0; i0 < steps[0]; ++i0) {
        for (int i1 = 0; i1 < steps[1]; ++i1) {
            for (int i2 = 0; i2 < steps[2]; ++i2) {
                const ParamVec x = {lattice_value(0, i0), lattice_value(1, i1),
                                    lattice_value(2, i2)};
                trace.push_back(TracePoint{x, objective(x)});
                if (trace.back().value > trace[best].value) best = trace.size() - 1;
            }
        }
    }
    std::vector<double> accepted = {trace[best].value};
    return finalize(std::move(trace), true, std::move(accepted));
}

OptResult sqp_local(const Objective& objective, const ParamVec& x0, const Bounds& bounds,
                    const OptOptions& opts) {
    bounds.validate();
    opts.validate();
    if (!bounds.contains(x0)) throw std::invalid_argument("sqp_local: x0 outside bounds");

    std::vector<TracePoint> trace;
    trace.reserve(static_cast<size_t>(std::min(opts.max_evals, 4096)));
    Recorder rec(objective, trace, opts.max_evals);
    bool converged = false;
    std::vector<double> accepted;
    try {
        SqpOutcome out = sqp_impl(rec, x0, bounds, opts, opts.max_evals);
        converged = out.converged;
        accepted = std::move(out.accepted);
    } catch (const BudgetExhausted&) {
        converged = false;
    }
    return finalize(std::move(trace), converged, std::move(accepted));
}

OptResult scatter_search(const Objective& objective, const Bounds& bounds,
                         const OptOptions& opts) {
    bounds.validate();
    opts.validate();

    std::vector<TracePoint> trace;
    trace.reserve(static_cast<size_t>(std::min(opts.max_evals, 8192)));
    Recorder rec(objective, trace, opts.max_evals);
    SplitMix64 rng(opts.seed);

    const int pop_size = opts.population;
    const int ref_size = std::min(opts.ref_set, pop_size);
    bool converged = false;
    std::vector<double> accepted;
    TracePoint incumbent{};

    try {
        // Latin hypercube diverse set: one stratum per point and variable.
        std::array<std::vector<int>, 3> perms;
        for (int i = 0; i < 3; ++i) {
            perms[i].resize(static_cast<size_t>(pop_size));
            for (int k = 0; k < pop_size; ++k) perms[i][static_cast<size_t>(k)] = k;
            for (int k = pop_size - 1; k > 0; --k)
                std::swap(perms[i][static_cast<size_t>(k)],
                          perms[i][static_cast<size_t>(rng.below(static_cast<uint64_t>(k + 1)))]);
        }
        std::vector<TracePoint> pop;
        pop.reserve(static_cast<size_t>(pop_size));
        for (int k = 0; k < pop_size; ++k) {
            ParamVec x;
            for (int i = 0; i < 3; ++i) {
                const double stratum = perms[i][static_cast<size_t>(k)] + rng.uniform01();
                x[i] = bounds.lower[i] + stratum * bounds.span(i) / pop_size;
            }
            pop.push_back(TracePoint{x, rec(x)});
        }

        std::sort(pop.begin(), pop.end(),
                  [](const TracePoint& a, const TracePoint& b) { return a.value > b.value; });
        incumbent = pop.front();
        accepted.push_back(incumbent.value);

        // Reference set: best half by quality, then max-min-distance fill.
        std::vector<TracePoint> refset;
        const int quality = std::min((ref_size + 1) / 2, pop_size);
        refset.assign(pop.begin(), pop.begin() + quality);
        std::vector<TracePoint> remaining(pop.begin() + quality, pop.end());
        while (static_cast<int>(refset.size()) < ref_size && !remaining.empty()) {
            size_t pick = 0;
            double best_d = -1.0;
            for (size_t k = 0; k < remaining.size(); ++k) {
                double dmin = 1e300;
                for (const auto& r : refset)
                    dmin = std::min(dmin, scaled_dist(bounds, remaining[k].x, r.x));
                if (dmin > best_d) {
                    best_d = dmin;
                    pick = k;
                }
            }
            refset.push_back(remaining[pick]);
            remaining.erase(remaining.begin() + static_cast<long>(pick));
        }

        constexpr std::array<double, 4> kCoeffs = {-0.25, 0.25, 0.5, 0.75};
        for (int round = 0; round < 10000; ++round) {
            const double before = incumbent.value;
            std::sort(refset.begin(), refset.end(),
                      [](const TracePoint& a, const TracePoint& b) { return a.value > b.value; });

            std::vector<TracePoint> candidates = refset;
            for (size_t i = 0; i < refset.size(); ++i) {
                for (size_t j = i + 1; j < refset.size(); ++j) {
                    for (const double lambda : kCoeffs) {
                        ParamVec x;
                        for (int v = 0; v < 3; ++v)
                            x[v] = refset[i].x[v] + lambda * (refset[j].x[v] - refset[i].x[v]);
                        x = bounds.clamp(x);
                        const TracePoint tp{x, rec(x)};
                        candidates.push_back(tp);
                        if (tp.value > incumbent.value) {
                            incumbent = tp;
                            accepted.push_back(incumbent.value);
                        }
                    }
                }
            }

            // Gradient-based refinement of the incumbent.
            const SqpOutcome refined =
                sqp_impl(rec, incumbent.x, bounds, opts, opts.refine_evals);
            if (refined.fx > incumbent.value) {
                incumbent = TracePoint{refined.x, refined.fx};
                accepted.push_back(incumbent.value);
            }
            candidates.push_back(TracePoint{refined.x, refined.fx});

            // Reference set update by quality (exact duplicates dropped).
            std::sort(candidates.begin(), candidates.end(),
                      [](const TracePoint& a, const TracePoint& b) { return a.value > b.value; });
            refset.clear();
            for (const auto& c : candidates) {
                bool dup = false;
                for (const auto& r : refset)
                    if (r.x == c.x) {
                        dup = true;
                        break;
                    }
                if (!dup) refset.push_back(c);
                if (static_cast<int>(refset.size()) == ref_size) break;
            }
            if (refset.size() < 2) {
                converged = true;
                break;
            }

            if (incumbent.value - before <= opts.eps_f) {
                converged = true;
                break;
            }
        }
    } catch (const BudgetExhausted&) {
        converged = false;
    }
    return finalize(std::move(trace), converged, std::move(accepted));
}

}  // namespace aos
