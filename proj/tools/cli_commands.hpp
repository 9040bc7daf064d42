#pragma once

#include <hausdorff/classical.hpp>
#include <hausdorff/config.hpp>
#include <hausdorff/hausdorff.hpp>
#include <hausdorff/matrix.hpp>
#include <hausdorff/sobolev.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace hausdorff::cli {

using nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

struct Options {
    std::string command;
    std::string config;
    std::string out;
    std::string csv;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<int> k;
    bool timings = false;
};

struct Outcome {
    int code = kExitOk;
    ordered_json report;
    std::string csv;
};

inline ordered_json num(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline ordered_json num_array(const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

inline ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["n"] = c.n;
    if (c.has_kernel) j["kernel"] = {{"expr", c.kernel.expr}, {"support", c.kernel.support}, {"nonneg", c.kernel.nonneg}};
    ordered_json m;
    m["variant"] = c.matrix.variant;
    if (c.matrix.variant == "constant") m["value"] = num_array(c.matrix.value);
    if (c.matrix.variant == "expr") m["entries"] = c.matrix.entries;
    if (c.matrix.variant == "decomposed") {
        m["lambda"] = num_array(c.matrix.lambda);
        m["q"] = num_array(c.matrix.q);
        m["inner"] = c.matrix.inner;
        if (c.matrix.inner == "expr") m["inner_entries"] = c.matrix.inner_entries;
    }
    j["matrix"] = m;
    ordered_json f;
    f["preset"] = c.function.preset;
    if (c.function.preset == "Gm") f["m"] = c.function.m;
    if (!c.function.shifts.empty()) f["shifts"] = num_array(c.function.shifts);
    f["dilation"] = num(c.function.dilation);
    j["function"] = f;
    ordered_json r;
    r["k"] = c.run.k;
    r["tol"] = num(c.run.tol);
    r["seed"] = c.run.seed;
    const auto s = build_schedule(c);
    r["inner_schedule"] = num_array(s.inner);
    r["outer_schedule"] = num_array(s.outer);
    r["eta_floor"] = num(c.run.eta_floor);
    r["samples"] = c.run.samples;
    j["run"] = r;
    if (!c.apply.points.empty()) j["apply"] = {{"points", num_array(c.apply.points)}};
    if (!c.derivative.alpha.empty()) {
        j["derivative"] = {{"alpha", c.derivative.alpha},
                           {"lower", num_array(c.derivative.lower)},
                           {"upper", num_array(c.derivative.upper)},
                           {"h", num(c.derivative.h)},
                           {"pass_tol", num(c.derivative.pass_tol)}};
    }
    if (!c.witness.radii.empty()) j["witness"] = {{"radii", num_array(c.witness.radii)}};
    j["hardy"] = {{"k_max", c.hardy.k_max}, {"points", num_array(c.hardy.points)}};
    j["cone"] = {{"dims", c.cone.dims}, {"matrices", c.cone.matrices}, {"samples", c.cone.samples}, {"eta_min", num(c.cone.eta_min)}};
    return j;
}

inline ordered_json to_json(const QuadratureResult& q) {
    ordered_json j;
    j["value"] = num(q.value);
    j["err_est"] = num(q.err_est);
    j["status"] = to_string(q.status);
    if (!q.note.empty()) j["note"] = q.note;
    const auto& ev = q.evidence;
    if (!ev.sequence.empty()) {
        ordered_json e;
        e["sequence"] = num_array(ev.sequence);
        e["growth"] = to_string(ev.growth);
        if (ev.growth == Growth::Power) e["power"] = num(ev.power);
        if (!ev.end.empty()) e["end"] = ev.end;
        j["evidence"] = e;
    }
    return j;
}

inline ordered_json to_json(const ConditionReport& c) {
    ordered_json j;
    j["k"] = c.k;
    j["C_k"] = to_json(c.quad);
    ordered_json b = ordered_json::array();
    for (const auto& q : c.breakdown) b.push_back(to_json(q));
    j["breakdown"] = b;
    return j;
}

inline ordered_json to_json(const Certificate& c) {
    ordered_json j;
    j["verdict"] = to_string(c.verdict);
    j["k"] = c.k;
    if (c.verdict == Verdict::Bounded) j["constant"] = num(c.constant);
    if (!c.reason.empty()) j["reason"] = c.reason;
    j["preconditions"] = {{"nonneg_checked", c.preconditions.nonneg_checked},
                          {"min_kernel_value", num(c.preconditions.min_kernel_value)},
                          {"eta_margin", num(c.preconditions.eta_margin)},
                          {"min_inner_entry", num(c.preconditions.min_inner_entry)},
                          {"samples_used", c.preconditions.samples_used}};
    if (!c.condition.breakdown.empty()) j["condition"] = to_json(c.condition);
    return j;
}

inline ordered_json to_json(const SobolevNorm& s) {
    ordered_json j;
    j["k"] = s.k;
    j["total"] = num(s.total);
    j["status"] = to_string(s.status);
    ordered_json parts = ordered_json::array();
    for (std::size_t i = 0; i < s.alphas.size(); ++i) {
        parts.push_back({{"alpha", s.alphas[i]}, {"l1", num(s.parts[i].value)}, {"status", to_string(s.parts[i].status)}});
    }
    j["parts"] = parts;
    return j;
}

inline CertifyOptions certify_options(const RunConfig& c) {
    CertifyOptions o;
    o.eta_floor = c.run.eta_floor;
    o.tol = c.run.tol;
    o.samples = c.run.samples;
    o.seed = c.run.seed;
    o.schedule = build_schedule(c);
    return o;
}

inline Outcome cmd_certify(const RunConfig& c) {
    Outcome o;
    const auto cert = certify(build_kernel(c), build_family(c), c.run.k, certify_options(c));
    o.report["results"] = to_json(cert);
    if (!cert.condition.breakdown.empty()) o.report["evidence"] = to_json(cert.condition.quad);
    o.code = cert.verdict == Verdict::Inconclusive ? kExitInconclusive : kExitOk;
    return o;
}

inline Outcome cmd_apply(const RunConfig& c) {
    Outcome o;
    const HausdorffOperator op(build_kernel(c), build_family(c));
    const auto f = build_function(c);
    std::vector<double> pts = c.apply.points;
    if (pts.empty()) pts.assign(static_cast<std::size_t>(c.n), 1.0);
    ordered_json rows = ordered_json::array();
    const auto n = static_cast<std::size_t>(c.n);
    for (std::size_t i = 0; i < pts.size(); i += n) {
        const std::span<const double> x(pts.data() + i, n);
        const auto r = op.apply(f, x, c.run.tol);
        auto row = to_json(r);
        row["x"] = num_array(std::vector<double>(x.begin(), x.end()));
        if (r.status != Status::Converged) o.code = kExitInconclusive;
        rows.push_back(row);
    }
    o.report["results"] = {{"function", f.describe()}, {"points", rows}};
    return o;
}

inline Outcome cmd_wnorm(const RunConfig& c) {
    Outcome o;
    const auto f = build_function(c);
    const int k = c.run.k;
    const double tol = std::max(c.run.tol, 1e-9);
    const auto fn = wk1_norm(f, k, tol);
    ordered_json res;
    res["function"] = f.describe();
    res["f_norm"] = to_json(fn);
    if (fn.status != Status::Converged) o.code = kExitInconclusive;
    if (c.has_kernel) {
        const HausdorffOperator op(build_kernel(c), build_family(c));
        const auto cond = op.condition(k, c.run.tol, build_schedule(c));
        res["condition"] = to_json(cond);
        if (cond.converged()) {
            const auto img = wk1_norm_operator_image(op, f, k, tol, cond);
            const double kap = kappa(c.n, k);
            const double bound = kap * cond.quad.value * fn.total;
            res["image_norm"] = to_json(img);
            res["kappa"] = num(kap);
            res["bound"] = num(bound);
            res["ratio_to_bound"] = num(img.total / bound);
            res["inequality_holds"] = img.total <= bound;
            if (img.status != Status::Converged) o.code = kExitInconclusive;
        } else {
            res["image_norm"] = nullptr;
            res["reason"] = std::string("condition integral is ") + to_string(cond.quad.status);
            o.code = kExitInconclusive;
        }
    }
    o.report["results"] = res;
    return o;
}

inline Outcome cmd_verify_derivative(const RunConfig& c) {
    Outcome o;
    const HausdorffOperator op(build_kernel(c), build_family(c));
    const auto f = build_function(c);
    const auto& d = c.derivative;
    std::vector<int> alpha = d.alpha;
    if (alpha.empty()) alpha.assign(static_cast<std::size_t>(c.n), 0);
    if (alpha.size() != static_cast<std::size_t>(c.n)) throw ConfigError(c.path, 0, "[derivative] alpha needs n entries");
    GridSpec g;
    g.lower = d.lower.empty() ? std::vector<double>(static_cast<std::size_t>(c.n), -2.0) : d.lower;
    g.upper = d.upper.empty() ? std::vector<double>(static_cast<std::size_t>(c.n), 2.0) : d.upper;
    if (g.lower.size() != alpha.size() || g.upper.size() != alpha.size()) {
        throw ConfigError(c.path, 0, "[derivative] lower/upper need n entries");
    }
    g.h = d.h;
    const int order = order_of(alpha);
    const auto cond = op.condition(order, c.run.tol, build_schedule(c));
    ordered_json res;
    res["alpha"] = alpha;
    res["condition"] = to_json(cond);
    if (!cond.converged()) {
        res["reason"] = std::string("condition integral C_") + std::to_string(order) + " is " + to_string(cond.quad.status);
        o.report["results"] = res;
        o.code = kExitInconclusive;
        return o;
    }
    const auto rep = verify_interchange(op, f, alpha, g, d.pass_tol, cond);
    res["max_abs_discrepancy"] = num(rep.max_abs_discrepancy);
    res["pass_tol"] = num(d.pass_tol);
    res["pass"] = rep.pass;
    res["nodes"] = rep.nodes;
    res["worst_point"] = num_array(rep.worst_point);
    res["quadrature"] = to_string(rep.quadrature);
    o.report["results"] = res;
    if (rep.quadrature != Status::Converged) {
        o.code = kExitInconclusive;
    } else if (!rep.pass) {
        o.code = kExitError;
    }
    return o;
}

inline Outcome cmd_witness(const RunConfig& c) {
    Outcome o;
    std::vector<double> radii = c.witness.radii;
    if (radii.empty()) {
        for (int j = 0; j <= 8; ++j) radii.push_back(std::ldexp(1.0, j));
    }
    const auto kernel = build_kernel(c);
    const auto family = build_family(c);
    const auto t = blowup_witness(kernel, family, c.run.k, radii, c.run.tol);
    ordered_json rows = ordered_json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "R,S,W,ratio,status\n";
    bool all_ok = true;
    for (const auto& r : t.rows) {
        rows.push_back({{"R", num(r.radius)}, {"S", num(r.s)}, {"W", num(r.w)}, {"ratio", num(r.ratio)}, {"status", to_string(r.status)}});
        csv << r.radius << ',' << r.s << ',' << r.w << ',';
        if (std::isnan(r.ratio)) {
            csv << "nan";
        } else {
            csv << r.ratio;
        }
        csv << ',' << to_string(r.status) << '\n';
        all_ok = all_ok && r.status == Status::Converged;
    }
    ordered_json res;
    res["k"] = t.k;
    res["table"] = rows;
    res["fit"] = {{"window", t.fit_window},
                  {"log_offset", num(t.log_offset)},
                  {"log_residual", num(t.log_residual)},
                  {"slope", num(t.slope)},
                  {"intercept", num(t.intercept)},
                  {"growth", to_string(t.growth)}};
    res["w_increasing"] = t.w_increasing;
    res["ratio_band"] = {num(t.ratio_min), num(t.ratio_max)};
    o.report["results"] = res;
    const auto cert = certify(kernel, family, c.run.k, certify_options(c));
    o.report["evidence"] = to_json(cert);
    o.csv = csv.str();
    o.code = all_ok ? kExitOk : kExitInconclusive;
    return o;
}

inline Outcome cmd_hardy_report(const RunConfig& c) {
    Outcome o;
    const auto rows = proposition_report(c.hardy.k_max, certify_options(c));
    ordered_json table = ordered_json::array();
    bool inconclusive = false;
    for (const auto& r : rows) {
        auto j = to_json(r.certificate);
        j["operator"] = to_string(r.which);
        table.push_back(j);
        inconclusive = inconclusive || r.certificate.verdict == Verdict::Inconclusive;
    }
    const auto g = preset_gauss(1);
    ordered_json eq;
    eq["points"] = num_array(c.hardy.points);
    eq["H"] = num(hausdorff_equivalence_check(Classical::Hardy, g, c.hardy.points, 1e-9));
    eq["H*"] = num(hausdorff_equivalence_check(Classical::AdjointHardy, g, c.hardy.points, 1e-9));
    o.report["results"] = {{"k_max", c.hardy.k_max}, {"verdicts", table}};
    o.report["evidence"] = {{"equivalence_gauss", eq}};
    o.code = inconclusive ? kExitInconclusive : kExitOk;
    return o;
}

// Seeded random matrices with entries N(0,1), kept when eta_ratio > eta_min.
inline std::vector<Matrix> random_matrices(int n, int count, double eta_min, std::uint64_t seed) {
    std::vector<Matrix> out;
    const CounterRng rng{seed ^ (0x9e37ULL * static_cast<std::uint64_t>(n))};
    for (std::uint64_t draw = 0; static_cast<int>(out.size()) < count; ++draw) {
        Matrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.normal(draw, static_cast<std::uint64_t>(i * n + j));
        if (eta_ratio(m) > eta_min) out.push_back(std::move(m));
        if (draw > 1000000) throw Error("could not draw matrices above the eta floor");
    }
    return out;
}

inline Outcome cmd_cone_measure(const RunConfig& c) {
    Outcome o;
    ordered_json rows = ordered_json::array();
    int passed = 0;
    int total = 0;
    std::ostringstream csv;
    csv.precision(17);
    csv << "n,index,eta,estimate,std_error,lower_bound,pass\n";
    for (int n : c.cone.dims) {
        const auto mats = random_matrices(n, c.cone.matrices, c.cone.eta_min, c.run.seed);
        for (std::size_t i = 0; i < mats.size(); ++i) {
            const auto& m = mats[i];
            const auto cm = cone_measure(m, c.cone.samples, c.run.seed + i, 1);
            const double lb = cone_lower_bound(m);
            const bool ok = cm.estimate + 3.0 * cm.std_error >= lb;
            passed += ok ? 1 : 0;
            ++total;
            rows.push_back({{"n", n},
                            {"eta", num(eta_ratio(m))},
                            {"estimate", num(cm.estimate)},
                            {"std_error", num(cm.std_error)},
                            {"lower_bound", num(lb)},
                            {"pass", ok}});
            csv << n << ',' << i << ',' << eta_ratio(m) << ',' << cm.estimate << ',' << cm.std_error << ',' << lb << ','
                << (ok ? 1 : 0) << '\n';
        }
    }
    o.report["results"] = {{"passed", passed}, {"total", total}};
    o.report["evidence"] = {{"matrices", rows}};
    o.csv = csv.str();
    o.code = passed == total ? kExitOk : kExitError;
    return o;
}

inline const std::vector<std::pair<std::string, std::string>>& commands() {
    static const std::vector<std::pair<std::string, std::string>> names{
        {"certify", "Bounded/Unbounded/Inconclusive verdict for W^{k,1}"},
        {"apply", "evaluate H f at the [apply] points"},
        {"wnorm", "W^{k,1} norms of f and H f against the bound"},
        {"verify-derivative", "finite differences of H f against the derivative formula"},
        {"witness", "truncated-kernel growth table (JSON and CSV)"},
        {"hardy-report", "verdicts for the Hardy operator and its adjoint"},
        {"cone-measure", "Monte Carlo cone measures against the determinant bound"},
    };
    return names;
}

inline RunConfig resolve_config(const Options& opt) {
    RunConfig c;
    if (!opt.config.empty()) {
        c = load_config(opt.config);
    } else if (opt.command != "hardy-report" && opt.command != "cone-measure") {
        throw ConfigError("<none>", 0, "command '" + opt.command + "' needs --config");
    }
    if (opt.tol) c.run.tol = *opt.tol;
    if (opt.seed) c.run.seed = *opt.seed;
    if (opt.k) {
        c.run.k = *opt.k;
        c.hardy.k_max = *opt.k;
    }
    if (!opt.out.empty()) c.output = opt.out;
    c.run.timings = c.run.timings || opt.timings;
    if (c.run.k < 0 || c.hardy.k_max < 0) throw ConfigError(c.path, 0, "k must be non-negative");
    if (!(c.run.tol > 0.0)) throw ConfigError(c.path, 0, "tol must be positive");
    return c;
}

inline std::string csv_path(const Options& opt, const RunConfig& c) {
    if (!opt.csv.empty()) return opt.csv;
    if (c.output.empty()) return {};
    const auto dot = c.output.find_last_of('.');
    const auto slash = c.output.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? c.output.substr(0, dot) : c.output) + ".csv";
}

// Runs one command; writes the report to the configured output or `out`.
inline int run(const Options& opt, std::ostream& out, std::ostream& err) {
    ordered_json report;
    report["command"] = opt.command;
    int code = kExitOk;
    std::string csv;
    RunConfig cfg;
    try {
        cfg = resolve_config(opt);
        report["config"] = to_json(cfg);
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        if (opt.command == "certify") {
            o = cmd_certify(cfg);
        } else if (opt.command == "apply") {
            o = cmd_apply(cfg);
        } else if (opt.command == "wnorm") {
            o = cmd_wnorm(cfg);
        } else if (opt.command == "verify-derivative") {
            o = cmd_verify_derivative(cfg);
        } else if (opt.command == "witness") {
            o = cmd_witness(cfg);
        } else if (opt.command == "hardy-report") {
            o = cmd_hardy_report(cfg);
        } else if (opt.command == "cone-measure") {
            o = cmd_cone_measure(cfg);
        } else {
            throw Error("unknown command '" + opt.command + "'");
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto& [key, value] : o.report.items()) report[key] = value;
        if (cfg.run.timings) report["timings"] = {{"seconds", secs}};
        code = o.code;
        csv = std::move(o.csv);
    } catch (const std::exception& e) {
        report["error"] = e.what();
        err << "error: " << e.what() << '\n';
        code = kExitError;
    }
    report["exit_code"] = code;

    const std::string text = report.dump(2) + "\n";
    if (cfg.output.empty()) {
        out << text;
    } else {
        std::ofstream f(cfg.output, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << cfg.output << '\n';
            return kExitError;
        }
        f << text;
    }
    if (!csv.empty()) {
        const auto path = csv_path(opt, cfg);
        if (!path.empty()) {
            std::ofstream f(path, std::ios::binary);
            if (!f) {
                err << "error: cannot write " << path << '\n';
                return kExitError;
            }
            f << csv;
        }
    }
    return code;
}

}  // namespace hausdorff::cli
