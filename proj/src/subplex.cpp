#include "seqjde/subplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace seqjde::opt {
namespace {

double spread(const std::vector<std::vector<double>>& simplex) {
    double s = 0.0;
    for (std::size_t v = 1; v < simplex.size(); ++v)
        for (std::size_t i = 0; i < simplex[0].size(); ++i)
            s = std::max(s, std::abs(simplex[v][i] - simplex[0][i]));
    return s;
}

// Splits coordinates into subspaces of min_size..max_size, most-moved
// first, choosing each cut where the mean |dx| inside the subspace most
// exceeds the mean of what is left.
std::vector<std::vector<std::size_t>> partition(const std::vector<double>& dx, std::size_t min_size,
                                                std::size_t max_size) {
    const std::size_t n = dx.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(dx[a]) > std::abs(dx[b]); });
    std::vector<std::vector<std::size_t>> parts;
    std::size_t pos = 0;
    while (pos < n) {
        const std::size_t left = n - pos;
        double total = 0.0;
        for (std::size_t i = pos; i < n; ++i) total += std::abs(dx[perm[i]]);
        std::size_t best = 0;
        double best_gap = -std::numeric_limits<double>::infinity();
        double inside = 0.0;
        for (std::size_t ns = 1; ns <= std::min(max_size, left); ++ns) {
            inside += std::abs(dx[perm[pos + ns - 1]]);
            const std::size_t rest = left - ns;
            if (ns < min_size || (rest > 0 && rest < min_size)) continue;
            const double gap = rest > 0 ? inside / double(ns) - (total - inside) / double(rest)
                                        : inside / double(ns);
            if (gap > best_gap) {
                best_gap = gap;
                best = ns;
            }
        }
        if (best == 0) best = left;  // only when n < min_size
        parts.emplace_back(perm.begin() + pos, perm.begin() + pos + best);
        pos += best;
    }
    return parts;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> step,
                             const NelderMeadOptions& o) {
    const std::size_t n = x0.size();
    NelderMeadResult res;
    std::size_t evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    fv[0] = eval(x0);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += step[i];
        fv[i + 1] = eval(pts[i + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    bool converged = false;
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        {
            std::vector<std::vector<double>> p2;
            std::vector<double> f2;
            for (auto i : order) {
                p2.push_back(std::move(pts[i]));
                f2.push_back(fv[i]);
            }
            pts = std::move(p2);
            fv = std::move(f2);
        }
        if (fv[0] <= o.f_target) {
            res.reached_target = true;
            break;
        }
        if (spread(pts) <= o.x_tol || (std::isfinite(fv[n]) && fv[n] - fv[0] <= o.f_tol)) {
            converged = true;
            break;
        }
        if (evals + 2 > o.max_evals) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[v][i] / static_cast<double>(n);

        for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + o.reflect * (centroid[i] - pts[n][i]);
        const double fr = eval(xr);
        if (fr < fv[0]) {
            for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + o.expand * (xr[i] - centroid[i]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[n] = xe;
                fv[n] = fe;
            } else {
                pts[n] = xr;
                fv[n] = fr;
            }
            continue;
        }
        if (fr < fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
            continue;
        }
        // Outside contraction when the reflected point beats the worst, else inside.
        const bool outside = fr < fv[n];
        for (std::size_t i = 0; i < n; ++i) {
            const double from = outside ? xr[i] : pts[n][i];
            xc[i] = centroid[i] + o.contract * (from - centroid[i]);
        }
        const double fc = eval(xc);
        if (fc < std::min(fr, fv[n])) {
            pts[n] = xc;
            fv[n] = fc;
            continue;
        }
        if (evals + n > o.max_evals) break;
        for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i)
                pts[v][i] = pts[0][i] + o.shrink * (pts[v][i] - pts[0][i]);
            fv[v] = eval(pts[v]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = pts[best];
    res.f = fv[best];
    res.evals = evals;
    res.converged = converged;
    res.reached_target = res.reached_target || res.f <= o.f_target;
    return res;
}

SubplexResult subplex(const Objective& f, std::vector<double> x0, std::vector<double> step,
                      const SubplexOptions& o) {
    const std::size_t n = x0.size();
    SubplexResult res;
    res.x = std::move(x0);
    res.f = f(res.x);
    res.evals = 1;
    res.trace.push_back({0, res.f, res.evals});

    const std::size_t block = std::max<std::size_t>(1, o.block_size);
    std::vector<std::vector<std::size_t>> parts;
    if (!o.adaptive_subspaces) {
        for (std::size_t lo = 0; lo < n; lo += block) {
            parts.emplace_back();
            for (std::size_t i = lo; i < std::min(n, lo + block); ++i) parts.back().push_back(i);
        }
    } else {
        parts = partition(step, std::min(o.min_block_size, n), std::max(block, std::min(o.min_block_size, n)));
    }

    std::size_t cycle = 0, stalled = 0;
    while (res.evals < o.max_evals) {
        ++cycle;
        const std::vector<double> x_prev = res.x;
        const double f_prev = res.f;
        for (std::size_t b = 0; b < parts.size() && res.evals < o.max_evals; ++b) {
            const auto& idx = parts[b];
            std::vector<double> sub, sub_step;
            for (std::size_t i : idx) {
                sub.push_back(res.x[i]);
                sub_step.push_back(step[i]);
            }
            std::vector<double> full = res.x;
            Objective restricted = [&](std::span<const double> s) {
                for (std::size_t j = 0; j < idx.size(); ++j) full[idx[j]] = s[j];
                return f(full);
            };
            NelderMeadOptions nm;
            double step_size = 0.0;
            for (double s : sub_step) step_size = std::max(step_size, std::abs(s));
            nm.x_tol = o.psi * step_size;
            nm.max_evals = o.max_evals - res.evals;
            nm.f_target = o.f_target;
            auto r = nelder_mead(restricted, sub, sub_step, nm);
            res.evals += r.evals;
            if (r.f <= res.f) {
                for (std::size_t j = 0; j < idx.size(); ++j) res.x[idx[j]] = r.x[j];
                res.f = r.f;
            }
            if (res.f <= o.f_target) break;
        }
        res.trace.push_back({cycle, res.f, res.evals});
        if (res.f <= o.f_target) {
            res.reached_target = true;
            return res;
        }

        std::vector<double> dx(n);
        double dx_norm = 0.0, step_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dx[i] = res.x[i] - x_prev[i];
            dx_norm += std::abs(dx[i]);
            step_norm += std::abs(step[i]);
        }

        bool done = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double moved = std::max(std::abs(dx[i]), o.psi * std::abs(step[i]));
            if (moved > o.x_tol_rel * std::abs(res.x[i]) + o.x_tol_abs) done = false;
        }
        stalled = (f_prev - res.f <= o.f_tol_rel * std::abs(res.f)) ? stalled + 1 : 0;
        if (done || (o.f_tol_rel > 0.0 && stalled >= o.stall_cycles)) {
            res.converged = true;
            break;
        }

        double scale = parts.size() > 1 ? dx_norm / step_norm : o.psi;
        scale = std::clamp(scale, o.omega, 1.0 / o.omega);
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::abs(step[i]) * scale;
            step[i] = dx[i] == 0.0 ? -std::copysign(mag, step[i]) : std::copysign(mag, dx[i]);
        }
        if (o.adaptive_subspaces) parts = partition(dx, std::min(o.min_block_size, n), std::max(block, std::min(o.min_block_size, n)));
    }

    if (o.polish && res.converged) {
        std::vector<double> pstep(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::max(std::abs(step[i]), 1e-2 * std::abs(res.x[i]));
            pstep[i] = mag > 0.0 ? std::copysign(mag, step[i]) : 1e-3;
        }
        NelderMeadOptions nm;
        nm.x_tol = o.x_tol_abs;
        nm.max_evals = o.polish_max_evals;
        auto r = nelder_mead(f, res.x, pstep, nm);
        res.evals += r.evals;
        if (r.f <= res.f) {
            res.x = r.x;
            res.f = r.f;
        }
        res.trace.push_back({cycle + 1, res.f, res.evals});
    }
    return res;
}

}  // namespace seqjde::opt
