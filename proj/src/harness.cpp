#include "loewner/harness.hpp"

#include <algorithm>
#include <cmath>

#include "loewner/chordal.hpp"
#include "loewner/errors.hpp"
#include "loewner/geometry.hpp"
#include "loewner/parallel.hpp"
#include "loewner/rng.hpp"

namespace loewner {

WilsonInterval wilson_ci(std::size_t hits, std::size_t n, double z) {
    if (n == 0) throw OutOfRange("Wilson interval needs n >= 1");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    WilsonInterval ci;
    ci.lo = std::max(0.0, center - half);
    ci.hi = std::min(1.0, center + half);
    return ci;
}

double default_event_horizon(const RareEvent& ev) {
    if (std::holds_alternative<ConeEvent>(ev)) return 1.0;
    if (std::holds_alternative<TargetBallEvent>(ev)) return 1.0;
    const auto& r = std::get<ReturnEvent>(ev);
    return r.mode == Mode::chordal
               ? static_cast<double>(r.N) * static_cast<double>(r.N)
               : static_cast<double>(r.N) + 3.0;
}

namespace {

Mode event_mode(const RareEvent& ev) {
    if (std::holds_alternative<ConeEvent>(ev)) return Mode::chordal;
    if (std::holds_alternative<TargetBallEvent>(ev)) return Mode::radial;
    return std::get<ReturnEvent>(ev).mode;
}

// 0 = miss, 1 = hit, 2 = not-yet (return event never armed by the horizon)
int evaluate_event(const RareEvent& ev, const Trace& g) {
    if (const auto* cone = std::get_if<ConeEvent>(&ev)) {
        for (std::size_t k = 1; k < g.points.size(); ++k) {
            const Complex z = g.points[k];
            if (std::abs(z) == 0.0) continue;
            const double arg = std::atan2(z.imag(), z.real());
            if (arg < cone->theta || arg > M_PI - cone->theta) return 1;
        }
        return 0;
    }
    if (const auto* ball = std::get_if<TargetBallEvent>(&ev)) {
        for (std::size_t k = 0; k + 1 < g.points.size(); ++k) {
            const Complex a = g.points[k], b = g.points[k + 1];
            const Complex d = b - a;
            const double len2 = std::norm(d);
            double t = len2 == 0.0 ? 0.0
                                   : -(a.real() * d.real() + a.imag() * d.imag()) /
                                         len2;
            t = std::clamp(t, 0.0, 1.0);
            if (std::abs(a + t * d) <= ball->r) return 1;
        }
        return 0;
    }
    const auto& rev = std::get<ReturnEvent>(ev);
    ReturnEventSpec spec{rev.n, rev.N, rev.mode};
    const ReturnEventResult res = return_event_hit(g, spec);
    if (res.hit()) return 1;
    if (res.status == ReturnEventResult::Status::not_yet_entered) return 2;
    return 0;
}

RateCell summarize_cell(double kappa, const std::vector<int>& outcomes) {
    RateCell cell;
    cell.kappa = kappa;
    cell.samples = outcomes.size();
    for (int o : outcomes) {
        if (o == 1) ++cell.hits;
        if (o == 2) ++cell.not_yet;
    }
    cell.p_hat = static_cast<double>(cell.hits) /
                 static_cast<double>(cell.samples);
    const WilsonInterval ci = wilson_ci(cell.hits, cell.samples);
    cell.ci_lo = ci.lo;
    cell.ci_hi = ci.hi;
    if (cell.hits == 0) {
        cell.flag = "zero-hits";
        cell.klogp = 0.0;
    } else {
        cell.flag = "ok";
        cell.klogp = kappa * std::log(cell.p_hat);
    }
    return cell;
}

} // namespace

std::vector<RateCell> rate_experiment(const RareEvent& ev,
                                      const RateConfig& cfg) {
    if (cfg.kappa_grid.empty()) throw OutOfRange("empty kappa grid");
    for (std::size_t i = 0; i < cfg.kappa_grid.size(); ++i) {
        if (!(cfg.kappa_grid[i] > 0.0))
            throw OutOfRange("kappa grid must be positive");
        if (i > 0 && cfg.kappa_grid[i] >= cfg.kappa_grid[i - 1])
            throw OutOfRange("kappa grid must be decreasing");
    }
    const Mode mode = event_mode(ev);
    const double T = cfg.horizon_override > 0.0 ? cfg.horizon_override
                                                : default_event_horizon(ev);
    std::vector<RateCell> cells;
    for (std::size_t ci = 0; ci < cfg.kappa_grid.size(); ++ci) {
        const double kappa = cfg.kappa_grid[ci];
        std::vector<int> outcomes(cfg.samples, 0);
        parallel_for(cfg.samples, cfg.workers, [&](std::size_t s) {
            const std::uint64_t sub = hash_combine(
                hash_combine(cfg.seed, cfg.cell_offset + ci), s);
            const Driver d =
                sample_brownian_driver(kappa, T, cfg.n_steps, sub, mode);
            const Trace g =
                mode == Mode::chordal ? chordal_forward(d) : radial_forward(d);
            outcomes[s] = evaluate_event(ev, g);
        });
        cells.push_back(summarize_cell(kappa, outcomes));
    }
    return cells;
}

RateExtrapolation extrapolate_rate(const std::vector<RateCell>& cells) {
    RateExtrapolation fit;
    std::vector<double> xs, ys;
    for (const auto& c : cells)
        if (c.hits > 0) {
            xs.push_back(c.kappa);
            ys.push_back(c.klogp);
        }
    if (xs.size() < 2) return fit;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    fit.slope = num / den;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < xs.size(); ++i)
        fit.residuals.push_back(fit.intercept + fit.slope * xs[i] - ys[i]);
    fit.valid = true;
    return fit;
}

ReturnProbResult return_prob_experiment(Mode mode, int n,
                                        const std::vector<int>& N_list,
                                        double kappa, std::size_t samples,
                                        double horizon_T, std::size_t n_steps,
                                        std::uint64_t seed, double slack,
                                        std::size_t workers,
                                        std::size_t cell_offset) {
    if (N_list.empty()) throw OutOfRange("empty N list");
    for (int N : N_list)
        if (N <= n) throw OutOfRange("return events require N > n");

    ReturnProbResult result;
    for (std::size_t ci = 0; ci < N_list.size(); ++ci) {
        const int N = N_list[ci];
        const RareEvent ev = ReturnEvent{n, N, mode};
        RateConfig cfg;
        cfg.kappa_grid = {kappa};
        cfg.samples = samples;
        cfg.n_steps = n_steps;
        cfg.seed = seed;
        cfg.horizon_override =
            horizon_T > 0.0 ? horizon_T : default_event_horizon(ev);
        cfg.workers = workers;
        cfg.cell_offset = cell_offset + ci;
        const RateCell cell = rate_experiment(ev, cfg).front();
        ReturnProbRow row;
        row.kappa = kappa;
        row.n = n;
        row.N = N;
        row.samples = cell.samples;
        row.hits = cell.hits;
        row.not_yet = cell.not_yet;
        row.p_hat = cell.p_hat;
        row.ci_lo = cell.ci_lo;
        row.ci_hi = cell.ci_hi;
        result.rows.push_back(row);
    }

    // Least-squares slope of log p against log(N/n). Zero-hit cells stay
    // flagged in the table; for the one-sided slope bound they enter through
    // their Wilson upper limit, which can only make the fitted slope less
    // negative (a conservative surrogate for log 0).
    std::vector<double> xs, ys;
    for (const auto& row : result.rows) {
        const double p_for_fit = row.hits > 0 ? row.p_hat : row.ci_hi;
        if (p_for_fit <= 0.0) continue;
        xs.push_back(
            std::log(static_cast<double>(row.N) / static_cast<double>(n)));
        ys.push_back(std::log(p_for_fit));
    }
    result.slope_bound = -(8.0 / kappa - 1.0) + slack;
    if (xs.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= xs.size();
        my /= ys.size();
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        result.slope = num / den;
        result.slope_valid = true;
        result.pass = result.slope <= result.slope_bound;
    }
    return result;
}

RnCheckResult rn_martingale_check(double kappa, double T, double delta,
                                  std::size_t samples, std::uint64_t seed,
                                  std::size_t path_steps, std::size_t workers) {
    if (!(delta > 0.0 && delta < 1.0)) throw OutOfRange("delta in (0,1)");
    if (!(T > 0.0) || T == HUGE_VAL) throw OutOfRange("need finite T > 0");
    RnCheckResult result;
    result.rows.resize(samples);
    parallel_for(samples, workers, [&](std::size_t s) {
        const std::uint64_t sub = hash_combine(seed, s);
        const ThetaPath path = simulate_theta(kappa, T, path_steps, delta, sub,
                                              ThetaLaw::chordal);
        const double t_eval =
            path.tau_delta ? std::min(*path.tau_delta, T) : T;
        const RNWeight w = rn_weight(path, kappa, t_eval, delta);
        RnCheckRow row;
        row.sample = s;
        row.t = t_eval;
        row.tau_delta = path.tau_delta ? *path.tau_delta : -1.0;
        row.weight = w.value;
        result.rows[s] = row;
    });
    double sum = 0.0;
    for (const auto& row : result.rows) sum += row.weight;
    result.mean = sum / static_cast<double>(samples);
    double sq = 0.0;
    for (const auto& row : result.rows)
        sq += (row.weight - result.mean) * (row.weight - result.mean);
    result.stddev = std::sqrt(sq / static_cast<double>(samples - 1));
    result.std_error = result.stddev / std::sqrt(static_cast<double>(samples));
    result.pass = std::abs(result.mean - 1.0) <= 3.0 * result.std_error;
    return result;
}

std::vector<TightnessRow> tightness_experiment(
    const std::vector<double>& kappa_grid, const std::vector<int>& n_list,
    const TightnessConstants& consts, std::size_t samples, std::uint64_t seed,
    bool eval_L, std::size_t n_steps, std::size_t workers,
    std::size_t cell_offset) {
    std::vector<TightnessRow> rows;
    std::size_t cell = cell_offset;
    for (double kappa : kappa_grid) {
        for (int n : n_list) {
            const std::size_t steps =
                n_steps > 0 ? n_steps
                            : std::max<std::size_t>(
                                  256, 4 * static_cast<std::size_t>(n));
            std::vector<int> h_viol(samples, 0), l_viol(samples, 0);
            parallel_for(samples, workers, [&](std::size_t s) {
                const std::uint64_t sub = hash_combine(hash_combine(seed, cell), s);
                const Driver d = sample_brownian_driver(kappa, 1.0, steps, sub);
                const TightnessReport h = modulus_membership_H(d, n, consts.c3);
                h_viol[s] = h.in_H ? 0 : 1;
                if (eval_L) {
                    const TightnessReport l = membership_L(
                        d, n, consts.c1, consts.c2, consts.beta, 8, 17);
                    l_viol[s] = l.in_L == TightnessReport::LStatus::no ? 1 : 0;
                }
            });
            TightnessRow row;
            row.kappa = kappa;
            row.n = n;
            row.samples = samples;
            for (int v : h_viol) row.h_violations += v;
            row.freq_h = static_cast<double>(row.h_violations) /
                         static_cast<double>(samples);
            if (eval_L) {
                long lv = 0;
                for (int v : l_viol) lv += v;
                row.l_violations = lv;
                row.freq_l = static_cast<double>(lv) /
                             static_cast<double>(samples);
            }
            row.asymptotic_bound_c1 = std::pow(static_cast<double>(n) / 2.0,
                                          1.0 - 1.0 / (2.0 * kappa));
            rows.push_back(row);
            ++cell;
        }
    }
    return rows;
}

} // namespace loewner
