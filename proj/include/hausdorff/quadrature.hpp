#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite and infinite ranges,
// iterated n-D integration and the improper-integral probe that separates
// convergent from divergent nonnegative integrals.

#include <hausdorff/errors.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

namespace hausdorff {

enum class Status { Converged, Divergent, Inconclusive };
enum class Growth { None, Log, Power, Unknown };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Converged: return "Converged";
        case Status::Divergent: return "Divergent";
        case Status::Inconclusive: return "Inconclusive";
    }
    return "?";
}

inline const char* to_string(Growth g) {
    switch (g) {
        case Growth::None: return "None";
        case Growth::Log: return "Log";
        case Growth::Power: return "Power";
        case Growth::Unknown: return "Unknown";
    }
    return "?";
}

// Worse of two statuses for composed computations.
inline Status combine(Status a, Status b) {
    if (a == Status::Divergent || b == Status::Divergent) return Status::Divergent;
    if (a == Status::Inconclusive || b == Status::Inconclusive) return Status::Inconclusive;
    return Status::Converged;
}

struct ProbeEvidence {
    std::vector<double> sequence;  // truncated integrals I_j
    std::vector<double> inner;     // contribution from (eps_j, eps_0)
    std::vector<double> outer;     // contribution from (R_0, R_j)
    Growth growth = Growth::None;
    double power = 0.0;            // exponent for Growth::Power
    std::string end;               // "inner" or "outer" for divergent probes
};

struct QuadratureResult {
    double value = 0.0;
    double err_est = 0.0;
    Status status = Status::Converged;
    ProbeEvidence evidence;
    long evaluations = 0;
    std::string note;

    bool converged() const noexcept { return status == Status::Converged; }
};

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_panels = 4000;
    int max_depth = 2000;
};

namespace detail {

struct Kronrod15 {
    static constexpr double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

struct PanelResult {
    double value;
    double err;
    bool finite;
};

template <class G>
PanelResult gk15(G& g, double a, double b) {
    using K = Kronrod15;
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = g(center);
    double resg = fc * K::wg[3];
    double resk = fc * K::wgk[7];
    double resabs = std::fabs(resk);
    double fv1[7];
    double fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * K::xgk[j];
        const double f1 = g(center - dx);
        const double f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += K::wgk[j] * (f1 + f2);
        resabs += K::wgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += K::wg[j / 2] * (f1 + f2);
    }
    const double reskh = 0.5 * resk;
    double resasc = K::wgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j) resasc += K::wgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));

    const double ah = std::fabs(half);
    const double value = resk * half;
    resabs *= ah;
    resasc *= ah;
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {value, err, std::isfinite(value) && std::isfinite(err)};
}

struct Panel {
    double a, b, value, err;
    int depth;
    bool operator<(const Panel& o) const {
        if (err != o.err) return err < o.err;
        return a > o.a;  // deterministic tie-break
    }
};

// Global adaptive bisection on [ua, ub] of the already-transformed integrand.
template <class G>
QuadratureResult adapt(G& g, std::span<const double> breaks, const QuadOptions& opt) {
    QuadratureResult out;
    std::priority_queue<Panel> heap;
    std::vector<Panel> frozen;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const auto r = gk15(g, breaks[i], breaks[i + 1]);
        if (!r.finite) {
            out.status = Status::Inconclusive;
            out.note = "non-finite integrand values";
            out.value = std::numeric_limits<double>::quiet_NaN();
            out.err_est = std::numeric_limits<double>::infinity();
            return out;
        }
        heap.push({breaks[i], breaks[i + 1], r.value, r.err, 0});
        total += r.value;
        total_err += r.err;
    }
    int panels = static_cast<int>(heap.size());

    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::fabs(total)); };

    bool reached = false;
    while (!heap.empty()) {
        if (total_err <= target()) {
            reached = true;
            break;
        }
        if (panels >= opt.max_panels) {
            out.note = "panel budget exhausted";
            break;
        }
        Panel p = heap.top();
        heap.pop();
        if (p.depth >= opt.max_depth) {
            frozen.push_back(p);
            continue;
        }
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) {
            frozen.push_back(p);
            continue;
        }
        const auto l = gk15(g, p.a, mid);
        const auto r = gk15(g, mid, p.b);
        if (!l.finite || !r.finite) {
            out.status = Status::Inconclusive;
            out.note = "non-finite integrand values";
            out.value = std::numeric_limits<double>::quiet_NaN();
            out.err_est = std::numeric_limits<double>::infinity();
            return out;
        }
        total += l.value + r.value - p.value;
        total_err += l.err + r.err - p.err;
        heap.push({p.a, mid, l.value, l.err, p.depth + 1});
        heap.push({mid, p.b, r.value, r.err, p.depth + 1});
        ++panels;
    }

    // Re-sum in position order so the result does not depend on heap history.
    std::vector<Panel> all = std::move(frozen);
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    total = 0.0;
    total_err = 0.0;
    for (const auto& p : all) {
        total += p.value;
        total_err += p.err;
    }
    out.value = total;
    out.err_est = total_err;
    if (reached || total_err <= target()) {
        out.status = Status::Converged;
    } else {
        out.status = Status::Inconclusive;
        if (out.note.empty()) out.note = "maximum subdivision depth exceeded";
    }
    return out;
}

}  // namespace detail

// Integral of f over (a, b); either end may be infinite. Infinite ends use
// t = c + u / (1 - u^2).
template <class F>
QuadratureResult integrate_line(F&& f, double a, double b, const QuadOptions& opt) {
    if (std::isnan(a) || std::isnan(b)) throw Error("integrate_line: NaN endpoint");
    if (!(opt.abs_tol > 0.0) && !(opt.rel_tol > 0.0)) throw Error("integrate_line: tolerance must be positive");
    if (a == b) return {};
    if (a > b) {
        auto r = integrate_line(f, b, a, opt);
        r.value = -r.value;
        return r;
    }
    long evals = 0;
    const bool ainf = std::isinf(a);
    const bool binf = std::isinf(b);
    QuadratureResult r;
    if (!ainf && !binf) {
        auto g = [&](double t) {
            ++evals;
            return static_cast<double>(f(t));
        };
        const double breaks[] = {a, b};
        r = detail::adapt(g, breaks, opt);
    } else {
        // Shift the map origin to the finite end (or 0 for the full line).
        const double c = ainf && binf ? 0.0 : (ainf ? b : a);
        auto g = [&](double u) {
            ++evals;
            const double d = 1.0 - u * u;
            const double t = c + u / d;
            const double v = f(t);
            if (v == 0.0) return 0.0;
            return v * (1.0 + u * u) / (d * d);
        };
        if (ainf && binf) {
            const double breaks[] = {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
            r = detail::adapt(g, breaks, opt);
        } else if (binf) {
            const double breaks[] = {0.0, 0.25, 0.5, 0.75, 1.0};
            r = detail::adapt(g, breaks, opt);
        } else {
            const double breaks[] = {-1.0, -0.75, -0.5, -0.25, 0.0};
            r = detail::adapt(g, breaks, opt);
        }
    }
    r.evaluations = evals;
    return r;
}

template <class F>
QuadratureResult integrate_line(F&& f, double a, double b, double tol) {
    QuadOptions opt;
    opt.abs_tol = tol;
    return integrate_line(std::forward<F>(f), a, b, opt);
}

inline constexpr int kMaxSpaceDim = 4;

// Iterated integral over the box prod_l (lower_l, upper_l); bounds may be
// infinite. Each level runs to tol / n.
template <class F>
QuadratureResult integrate_box(F&& f, std::span<const double> lower, std::span<const double> upper, double tol) {
    const int n = static_cast<int>(lower.size());
    if (n < 1 || upper.size() != lower.size()) throw Error("integrate_box: bad bounds");
    if (n > kMaxSpaceDim) {
        throw DimensionTooLarge("dimension " + std::to_string(n) + " exceeds " + std::to_string(kMaxSpaceDim));
    }
    const double level_tol = tol / n;
    std::vector<double> x(static_cast<std::size_t>(n));
    Status worst = Status::Converged;
    long evals = 0;

    std::function<double(int)> level = [&](int d) -> double {
        QuadOptions opt;
        opt.abs_tol = level_tol;
        auto inner = [&](double t) {
            x[static_cast<std::size_t>(d)] = t;
            if (d + 1 == n) {
                ++evals;
                return static_cast<double>(f(std::span<const double>(x)));
            }
            return level(d + 1);
        };
        const auto r = integrate_line(inner, lower[static_cast<std::size_t>(d)], upper[static_cast<std::size_t>(d)], opt);
        if (d > 0) worst = combine(worst, r.status);
        if (d == 0) {
            worst = combine(worst, r.status);
        }
        return r.value;
    };

    QuadOptions top;
    top.abs_tol = level_tol;
    auto outer = [&](double t) {
        x[0] = t;
        if (n == 1) {
            ++evals;
            return static_cast<double>(f(std::span<const double>(x)));
        }
        return level(1);
    };
    QuadratureResult r = integrate_line(outer, lower[0], upper[0], top);
    r.status = combine(r.status, worst);
    r.err_est += (n - 1) * level_tol;
    r.evaluations = evals;
    if (r.status != Status::Converged && r.note.empty()) r.note = "an inner integral did not converge";
    return r;
}

// Integral over all of R^n.
template <class F>
QuadratureResult integrate_space(F&& f, int n, double tol) {
    if (n < 1) throw Error("integrate_space: dimension must be positive");
    if (n > kMaxSpaceDim) {
        throw DimensionTooLarge("dimension " + std::to_string(n) + " exceeds " + std::to_string(kMaxSpaceDim));
    }
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> lo(static_cast<std::size_t>(n), -inf);
    const std::vector<double> hi(static_cast<std::size_t>(n), inf);
    return integrate_box(std::forward<F>(f), lo, hi, tol);
}

struct ProbeSchedule {
    std::vector<double> inner;  // eps_j decreasing to 0
    std::vector<double> outer;  // R_j increasing to infinity

    // eps_j = ratio^-j, R_j = ratio^j for j = 0..steps.
    static ProbeSchedule geometric(double ratio = 2.0, int steps = 20) {
        ProbeSchedule s;
        for (int j = 0; j <= steps; ++j) {
            s.inner.push_back(std::pow(ratio, -j));
            s.outer.push_back(std::pow(ratio, j));
        }
        return s;
    }

    std::size_t size() const noexcept { return outer.size(); }
};

inline constexpr double kProbeDivergenceRatio = 1.5;
inline constexpr int kProbeWindow = 5;
inline constexpr double kNegativeSlack = 1e-12;

namespace detail {

// Growth law of the tail increments of a divergent sequence.
inline void fit_growth(ProbeEvidence& ev, const std::vector<double>& seq, double step_ratio) {
    const std::size_t n = seq.size();
    if (n < 3 || step_ratio <= 1.0) {
        ev.growth = Growth::Unknown;
        return;
    }
    const std::size_t first = n > static_cast<std::size_t>(kProbeWindow) ? n - kProbeWindow : 1;
    double log_ratio_sum = 0.0;
    int count = 0;
    for (std::size_t j = std::max<std::size_t>(first + 1, 2); j < n; ++j) {
        const double d_prev = seq[j - 1] - seq[j - 2];
        const double d = seq[j] - seq[j - 1];
        if (d_prev <= 0.0 || d <= 0.0) {
            ev.growth = Growth::Unknown;
            return;
        }
        log_ratio_sum += std::log(d / d_prev);
        ++count;
    }
    if (count == 0) {
        ev.growth = Growth::Unknown;
        return;
    }
    const double p = (log_ratio_sum / count) / std::log(step_ratio);
    if (std::fabs(p) < 0.15) {
        ev.growth = Growth::Log;
    } else if (p > 0.0) {
        ev.growth = Growth::Power;
        ev.power = p;
    } else {
        ev.growth = Growth::Unknown;
    }
}

}  // namespace detail

// Classifies the improper integral of a nonnegative f over (lo, hi) with
// 0 <= lo < hi <= inf from the truncations I_j = int over (a_j, b_j), where
// a_j = eps_j when lo = 0 and lo otherwise, b_j = R_j when hi = inf and hi
// otherwise.
template <class F>
QuadratureResult improper_probe(F&& f, double lo, double hi, const ProbeSchedule& schedule, double tol) {
    if (schedule.inner.size() != schedule.outer.size() || schedule.size() < 2) {
        throw Error("improper_probe: schedules must have equal length >= 2");
    }
    if (!(lo >= 0.0) || !(hi > lo)) throw Error("improper_probe: need 0 <= lo < hi");

    long evals = 0;
    auto checked = [&](double t) {
        ++evals;
        const double v = f(t);
        if (v < -kNegativeSlack) {
            throw NegativeValueDetected("integrand is negative (" + std::to_string(v) + ") at " + std::to_string(t));
        }
        return v;
    };

    QuadOptions piece;
    piece.abs_tol = tol;
    piece.rel_tol = 1e-12;

    QuadratureResult out;
    ProbeEvidence& ev = out.evidence;
    Status worst = Status::Converged;
    double inner_acc = 0.0;
    double outer_acc = 0.0;
    double core = 0.0;
    double prev_a = 0.0;
    double prev_b = 0.0;
    bool have_prev = false;
    double piece_err = 0.0;

    auto integrate = [&](double a, double b) {
        if (!(b > a)) return 0.0;
        const auto r = integrate_line(checked, a, b, piece);
        worst = combine(worst, r.status);
        piece_err += r.err_est;
        return r.value;
    };

    for (std::size_t j = 0; j < schedule.size(); ++j) {
        // Only 0 and infinity are improper ends.
        const double a = lo > 0.0 ? lo : schedule.inner[j];
        const double b = std::isinf(hi) ? schedule.outer[j] : hi;
        if (b > a) {
            if (!have_prev) {
                core = integrate(a, b);
                prev_a = a;
                prev_b = b;
                have_prev = true;
            } else {
                inner_acc += integrate(a, prev_a);
                outer_acc += integrate(prev_b, b);
                prev_a = std::min(prev_a, a);
                prev_b = std::max(prev_b, b);
            }
        }
        ev.sequence.push_back(core + inner_acc + outer_acc);
        ev.inner.push_back(inner_acc);
        ev.outer.push_back(outer_acc);
    }

    const auto& seq = ev.sequence;
    const std::size_t n = seq.size();
    out.evaluations = evals;

    if (worst != Status::Converged) {
        out.status = Status::Inconclusive;
        out.value = seq.back();
        out.err_est = std::numeric_limits<double>::infinity();
        out.note = "a truncated integral did not converge";
        return out;
    }

    // Divergence: I_j / I_{j/2} >= 1.5 over the last window, and strictly
    // increasing beyond the midpoint.
    bool divergent = n >= static_cast<std::size_t>(kProbeWindow) + 1;
    for (std::size_t j = n - std::min<std::size_t>(n, kProbeWindow); divergent && j < n; ++j) {
        const double base = seq[j / 2];
        divergent = base > 0.0 ? seq[j] / base >= kProbeDivergenceRatio : seq[j] > 0.0;
    }
    for (std::size_t j = n / 2 + 1; divergent && j < n; ++j) divergent = seq[j] > seq[j - 1];

    if (divergent) {
        const std::size_t w0 = n - std::min<std::size_t>(n, kProbeWindow + 1);
        const double inner_growth = ev.inner.back() - ev.inner[w0];
        const double outer_growth = ev.outer.back() - ev.outer[w0];
        const bool inner_end = inner_growth > outer_growth;
        ev.end = inner_end ? "inner" : "outer";
        const auto& part = inner_end ? ev.inner : ev.outer;
        const double ratio = inner_end ? schedule.inner[n - 2] / schedule.inner[n - 1]
                                       : schedule.outer[n - 1] / schedule.outer[n - 2];
        detail::fit_growth(ev, part, ratio);
        out.status = Status::Divergent;
        out.value = seq.back();
        out.err_est = piece_err;
        out.note = "truncated integrals grow without bound";
        return out;
    }

    // Convergence: tail increments vanish or decay geometrically.
    bool settles = seq[n - 1] - seq[n - 2] <= tol;
    if (!settles && n >= static_cast<std::size_t>(kProbeWindow) + 1) {
        settles = true;
        for (std::size_t j = n - kProbeWindow + 1; settles && j < n; ++j) {
            const double d_prev = seq[j - 1] - seq[j - 2];
            const double d = seq[j] - seq[j - 1];
            settles = d_prev > 0.0 && d <= 0.9 * d_prev;
        }
    }
    if (!settles) {
        out.status = Status::Inconclusive;
        out.value = seq.back();
        out.err_est = std::numeric_limits<double>::infinity();
        out.note = "truncated integrals neither settle nor diverge";
        return out;
    }

    QuadOptions full = piece;
    auto r = integrate_line(checked, lo, hi, full);
    r.evidence = std::move(ev);
    r.evaluations = evals;
    if (!r.converged()) {
        r.status = Status::Inconclusive;
        r.note = "probe settles but the full-range integral did not converge";
    }
    return r;
}

template <class F>
QuadratureResult improper_probe(F&& f, double lo, double hi, double tol) {
    return improper_probe(std::forward<F>(f), lo, hi, ProbeSchedule::geometric(), tol);
}

}  // namespace hausdorff
