#pragma once

// Run configuration read from a small TOML subset:
//   # comment
//   n = 2
//   [section]
//   key = "string" | 1.5 | -3 | inf | true | [1, 2, "x"]
// Arrays are flat and may span several lines.

#include <hausdorff/classical.hpp>
#include <hausdorff/errors.hpp>
#include <hausdorff/hausdorff.hpp>
#include <hausdorff/kernel.hpp>
#include <hausdorff/matrix_family.hpp>
#include <hausdorff/quadrature.hpp>
#include <hausdorff/test_function.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <type_traits>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace hausdorff {

struct TomlValue {
    enum class Type { String, Number, Bool, Array };
    Type type = Type::Number;
    std::string str;
    double num = 0.0;
    bool flag = false;
    std::vector<TomlValue> items;
    std::size_t line = 0;
};

struct TomlDocument {
    std::string path;
    // section ("" for top level) -> key -> value
    std::map<std::string, std::map<std::string, TomlValue>> sections;
    std::map<std::string, std::size_t> section_lines;
};

namespace detail {

class TomlReader {
public:
    TomlReader(std::string path, std::string_view text) : path_(std::move(path)), text_(text) {}

    TomlDocument run() {
        TomlDocument doc;
        doc.path = path_;
        std::string section;
        doc.sections[section];
        while (pos_ < text_.size()) {
            skip_blank();
            if (pos_ >= text_.size()) break;
            const char c = text_[pos_];
            if (c == '\n') {
                ++pos_;
                ++line_;
                continue;
            }
            if (c == '#') {
                skip_comment();
                continue;
            }
            if (c == '[') {
                const std::size_t section_line = line_;
                ++pos_;
                skip_blank();
                section = bare_key();
                skip_blank();
                if (peek() != ']') fail("expected ']' after section name");
                ++pos_;
                end_of_line();
                if (doc.section_lines.count(section)) fail("duplicate section [" + section + "]", section_line);
                doc.section_lines[section] = section_line;
                doc.sections[section];
                continue;
            }
            const std::size_t key_line = line_;
            const std::string key = bare_key();
            skip_blank();
            if (peek() != '=') fail("expected '=' after key '" + key + "'");
            ++pos_;
            skip_blank();
            TomlValue v = value();
            v.line = key_line;
            end_of_line();
            auto& sec = doc.sections[section];
            if (sec.count(key)) fail("duplicate key '" + key + "'", key_line);
            sec.emplace(key, std::move(v));
        }
        return doc;
    }

private:
    [[noreturn]] void fail(const std::string& what, std::size_t line = 0) const {
        throw ConfigError(path_, line ? line : line_, what);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_blank() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
    }

    void skip_comment() {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

    // Blank lines and comments inside arrays.
    void skip_space_multiline() {
        for (;;) {
            skip_blank();
            if (peek() == '#') {
                skip_comment();
            } else if (peek() == '\n') {
                ++pos_;
                ++line_;
            } else {
                return;
            }
        }
    }

    void end_of_line() {
        skip_blank();
        if (peek() == '#') skip_comment();
        if (pos_ < text_.size()) {
            if (text_[pos_] != '\n') fail("unexpected text after value");
            ++pos_;
            ++line_;
        }
    }

    std::string bare_key() {
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                ++pos_;
            } else {
                break;
            }
        }
        if (pos_ == start) fail("expected a key");
        return std::string(text_.substr(start, pos_ - start));
    }

    TomlValue value() {
        TomlValue v;
        const char c = peek();
        if (c == '"') {
            v.type = TomlValue::Type::String;
            v.str = string_literal();
        } else if (c == '[') {
            ++pos_;
            v.type = TomlValue::Type::Array;
            skip_space_multiline();
            while (peek() != ']') {
                if (pos_ >= text_.size()) fail("unterminated array");
                if (peek() == '[') fail("nested arrays are not supported");
                v.items.push_back(value());
                v.items.back().line = line_;
                skip_space_multiline();
                if (peek() == ',') {
                    ++pos_;
                    skip_space_multiline();
                } else if (peek() != ']') {
                    fail("expected ',' or ']' in array");
                }
            }
            ++pos_;
        } else if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            v.type = TomlValue::Type::Bool;
            v.flag = true;
        } else if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            v.type = TomlValue::Type::Bool;
            v.flag = false;
        } else {
            v.type = TomlValue::Type::Number;
            v.num = number();
        }
        return v;
    }

    std::string string_literal() {
        ++pos_;
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_++];
            if (c == '\n') fail("newline in string");
            if (c == '\\') {
                if (pos_ >= text_.size()) break;
                const char e = text_[pos_++];
                switch (e) {
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    default: fail(std::string("unknown escape \\") + e);
                }
            }
            out.push_back(c);
        }
        if (peek() != '"') fail("unterminated string");
        ++pos_;
        return out;
    }

    double number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
                ++pos_;
            } else {
                break;
            }
        }
        std::string tok(text_.substr(start, pos_ - start));
        std::erase(tok, '_');
        if (tok.empty()) fail("expected a value");
        if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
        if (tok == "-inf") return -std::numeric_limits<double>::infinity();
        const char* b = tok.data();
        if (*b == '+') ++b;
        double v = 0.0;
        auto res = std::from_chars(b, tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) fail("bad number '" + tok + "'");
        return v;
    }

    std::string path_;
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace detail

inline TomlDocument parse_toml(std::string_view text, const std::string& path = "<string>") {
    return detail::TomlReader(path, text).run();
}

inline TomlDocument load_toml(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, 0, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str(), path);
}

struct KernelConfig {
    std::string expr;
    std::string support = "all";
    bool nonneg = true;
};

struct MatrixConfig {
    std::string variant = "diag-inverse-norm";  // | constant | expr | decomposed
    std::vector<double> value;                  // constant, row-major
    std::vector<std::string> entries;           // expr, row-major
    std::vector<double> lambda;                 // decomposed
    std::vector<double> q;
    std::string inner = "diag-inverse-norm";    // P for decomposed: diag-inverse-norm | expr
    std::vector<std::string> inner_entries;
};

struct FunctionConfig {
    std::string preset = "gauss";  // gauss | G1 | Gm
    int m = 1;
    std::vector<double> shifts;
    double dilation = 1.0;
};

struct RunSettings {
    int k = 0;
    double tol = 1e-10;
    std::uint64_t seed = 1;
    std::vector<double> inner_schedule;
    std::vector<double> outer_schedule;
    double eta_floor = 1e-6;
    int samples = 1000;
    bool timings = false;
};

struct ApplySettings {
    std::vector<double> points;  // flattened, n per point
};

struct DerivativeSettings {
    std::vector<int> alpha;
    std::vector<double> lower;
    std::vector<double> upper;
    double h = 1e-2;
    double pass_tol = 1e-4;
};

struct WitnessSettings {
    std::vector<double> radii;
};

struct HardySettings {
    int k_max = 2;
    std::vector<double> points{0.5, 1.0, 2.0, 5.0};
};

struct ConeSettings {
    std::vector<int> dims{2, 3};
    int matrices = 100;
    std::uint64_t samples = 1000000;
    double eta_min = 0.1;
};

struct RunConfig {
    std::string path;
    int n = 1;
    KernelConfig kernel;
    MatrixConfig matrix;
    FunctionConfig function;
    RunSettings run;
    ApplySettings apply;
    DerivativeSettings derivative;
    WitnessSettings witness;
    HardySettings hardy;
    ConeSettings cone;
    std::string output;
    bool has_kernel = false;
};

namespace detail {

class ConfigBinder {
public:
    explicit ConfigBinder(const TomlDocument& doc) : doc_(doc) {}

    void check_unknown(const std::map<std::string, std::set<std::string>>& schema) const {
        for (const auto& [sec, keys] : doc_.sections) {
            auto it = schema.find(sec);
            if (it == schema.end()) {
                const auto line = doc_.section_lines.count(sec) ? doc_.section_lines.at(sec) : 0;
                throw ConfigError(doc_.path, line, "unknown section [" + sec + "]");
            }
            for (const auto& [key, v] : keys) {
                if (!it->second.count(key)) {
                    throw ConfigError(doc_.path, v.line, "unknown key '" + key + "'" + (sec.empty() ? "" : " in [" + sec + "]"));
                }
            }
        }
    }

    const TomlValue* find(const std::string& sec, const std::string& key) const {
        auto s = doc_.sections.find(sec);
        if (s == doc_.sections.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    bool has_section(const std::string& sec) const { return doc_.sections.count(sec) > 0; }

    [[noreturn]] void fail(const TomlValue& v, const std::string& what) const { throw ConfigError(doc_.path, v.line, what); }

    void get(const std::string& sec, const std::string& key, std::string& out) const {
        if (const auto* v = find(sec, key)) {
            if (v->type != TomlValue::Type::String) fail(*v, "'" + key + "' must be a string");
            out = v->str;
        }
    }

    void get(const std::string& sec, const std::string& key, double& out) const {
        if (const auto* v = find(sec, key)) {
            if (v->type != TomlValue::Type::Number) fail(*v, "'" + key + "' must be a number");
            out = v->num;
        }
    }

    void get(const std::string& sec, const std::string& key, bool& out) const {
        if (const auto* v = find(sec, key)) {
            if (v->type != TomlValue::Type::Bool) fail(*v, "'" + key + "' must be true or false");
            out = v->flag;
        }
    }

    template <class Int>
        requires std::is_integral_v<Int>
    void get(const std::string& sec, const std::string& key, Int& out) const {
        if (const auto* v = find(sec, key)) out = integer<Int>(*v, key);
    }

    void get(const std::string& sec, const std::string& key, std::vector<double>& out) const {
        if (const auto* v = find(sec, key)) {
            if (v->type != TomlValue::Type::Array) fail(*v, "'" + key + "' must be an array");
            out.clear();
            for (const auto& it : v->items) {
                if (it.type != TomlValue::Type::Number) fail(*v, "'" + key + "' must contain numbers");
                out.push_back(it.num);
            }
        }
    }

    void get(const std::string& sec, const std::string& key, std::vector<int>& out) const {
        if (const auto* v = find(sec, key)) {
            if (v->type != TomlValue::Type::Array) fail(*v, "'" + key + "' must be an array");
            out.clear();
            for (const auto& it : v->items) out.push_back(integer<int>(it, key));
        }
    }

    void get(const std::string& sec, const std::string& key, std::vector<std::string>& out) const {
        if (const auto* v = find(sec, key)) {
            if (v->type != TomlValue::Type::Array) fail(*v, "'" + key + "' must be an array");
            out.clear();
            for (const auto& it : v->items) {
                if (it.type != TomlValue::Type::String) fail(*v, "'" + key + "' must contain strings");
                out.push_back(it.str);
            }
        }
    }

    std::size_t line_of(const std::string& sec, const std::string& key) const {
        if (const auto* v = find(sec, key)) return v->line;
        return doc_.section_lines.count(sec) ? doc_.section_lines.at(sec) : 0;
    }

private:
    template <class Int>
    Int integer(const TomlValue& v, const std::string& key) const {
        if (v.type != TomlValue::Type::Number || v.num != std::floor(v.num) || !std::isfinite(v.num)) {
            fail(v, "'" + key + "' must be an integer");
        }
        if (v.num < static_cast<double>(std::numeric_limits<Int>::min()) ||
            v.num > static_cast<double>(std::numeric_limits<Int>::max())) {
            fail(v, "'" + key + "' is out of range");
        }
        return static_cast<Int>(v.num);
    }

    const TomlDocument& doc_;
};

}  // namespace detail

inline RunConfig bind_config(const TomlDocument& doc) {
    const detail::ConfigBinder b(doc);
    b.check_unknown({
        {"", {"n", "output"}},
        {"kernel", {"expr", "support", "nonneg"}},
        {"matrix", {"variant", "value", "entries", "lambda", "q", "inner", "inner_entries"}},
        {"function", {"preset", "m", "shifts", "dilation"}},
        {"run", {"k", "tol", "seed", "inner_schedule", "outer_schedule", "eta_floor", "samples", "timings"}},
        {"apply", {"points"}},
        {"derivative", {"alpha", "lower", "upper", "h", "pass_tol"}},
        {"witness", {"radii"}},
        {"hardy", {"k_max", "points"}},
        {"cone", {"dims", "matrices", "samples", "eta_min"}},
    });
    RunConfig c;
    c.path = doc.path;
    b.get("", "n", c.n);
    b.get("", "output", c.output);
    c.has_kernel = b.has_section("kernel");
    b.get("kernel", "expr", c.kernel.expr);
    b.get("kernel", "support", c.kernel.support);
    b.get("kernel", "nonneg", c.kernel.nonneg);
    b.get("matrix", "variant", c.matrix.variant);
    b.get("matrix", "value", c.matrix.value);
    b.get("matrix", "entries", c.matrix.entries);
    b.get("matrix", "lambda", c.matrix.lambda);
    b.get("matrix", "q", c.matrix.q);
    b.get("matrix", "inner", c.matrix.inner);
    b.get("matrix", "inner_entries", c.matrix.inner_entries);
    b.get("function", "preset", c.function.preset);
    b.get("function", "m", c.function.m);
    b.get("function", "shifts", c.function.shifts);
    b.get("function", "dilation", c.function.dilation);
    b.get("run", "k", c.run.k);
    b.get("run", "tol", c.run.tol);
    b.get("run", "seed", c.run.seed);
    b.get("run", "inner_schedule", c.run.inner_schedule);
    b.get("run", "outer_schedule", c.run.outer_schedule);
    b.get("run", "eta_floor", c.run.eta_floor);
    b.get("run", "samples", c.run.samples);
    b.get("run", "timings", c.run.timings);
    b.get("apply", "points", c.apply.points);
    b.get("derivative", "alpha", c.derivative.alpha);
    b.get("derivative", "lower", c.derivative.lower);
    b.get("derivative", "upper", c.derivative.upper);
    b.get("derivative", "h", c.derivative.h);
    b.get("derivative", "pass_tol", c.derivative.pass_tol);
    b.get("witness", "radii", c.witness.radii);
    b.get("hardy", "k_max", c.hardy.k_max);
    b.get("hardy", "points", c.hardy.points);
    b.get("cone", "dims", c.cone.dims);
    b.get("cone", "matrices", c.cone.matrices);
    b.get("cone", "samples", c.cone.samples);
    b.get("cone", "eta_min", c.cone.eta_min);

    auto bad = [&](const std::string& sec, const std::string& key, const std::string& what) {
        throw ConfigError(doc.path, b.line_of(sec, key), what);
    };
    if (c.n < 1 || c.n > kMaxSpaceDim) bad("", "n", "n must be in 1.." + std::to_string(kMaxSpaceDim));
    if (c.run.k < 0) bad("run", "k", "k must be non-negative");
    if (!(c.run.tol > 0.0)) bad("run", "tol", "tol must be positive");
    if (c.run.samples < 1) bad("run", "samples", "samples must be positive");
    if (c.run.inner_schedule.size() != c.run.outer_schedule.size()) {
        bad("run", "outer_schedule", "inner_schedule and outer_schedule must have equal length");
    }
    static const std::set<std::string> variants{"diag-inverse-norm", "constant", "expr", "decomposed"};
    if (!variants.count(c.matrix.variant)) bad("matrix", "variant", "unknown matrix variant '" + c.matrix.variant + "'");
    static const std::set<std::string> presets{"gauss", "G1", "Gm"};
    if (!presets.count(c.function.preset)) bad("function", "preset", "unknown preset '" + c.function.preset + "'");
    if (!c.function.shifts.empty() && c.function.shifts.size() != static_cast<std::size_t>(c.n)) {
        bad("function", "shifts", "shifts must have n entries");
    }
    if (!(c.function.dilation > 0.0)) bad("function", "dilation", "dilation must be positive");
    if (!c.apply.points.empty() && c.apply.points.size() % static_cast<std::size_t>(c.n) != 0) {
        bad("apply", "points", "points must hold a multiple of n coordinates");
    }
    return c;
}

inline RunConfig load_config(const std::string& path) { return bind_config(load_toml(path)); }

inline RunConfig parse_config(std::string_view text, const std::string& path = "<string>") {
    return bind_config(parse_toml(text, path));
}

inline KernelSpec build_kernel(const RunConfig& c) {
    if (!c.has_kernel || c.kernel.expr.empty()) throw ConfigError(c.path, 0, "[kernel] expr is required");
    try {
        return make_kernel(c.kernel.expr, c.kernel.support, c.n, c.kernel.nonneg);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(c.path, 0, std::string("[kernel]: ") + e.what());
    }
}

inline MatrixFamily build_family(const RunConfig& c) {
    const int n = c.n;
    const auto nn = static_cast<std::size_t>(n * n);
    auto square = [&](const std::vector<double>& v, const char* key) {
        if (v.size() != nn) {
            throw ConfigError(c.path, 0, std::string("[matrix] ") + key + " needs " + std::to_string(nn) + " entries");
        }
        return Matrix::from_row_major(n, v);
    };
    auto simple = [&](const std::string& variant, const std::vector<std::string>& entries) {
        if (variant == "diag-inverse-norm") return MatrixFamily::diagonal_inverse_norm(n);
        if (variant == "expr") return MatrixFamily::expression_entries(n, entries);
        throw ConfigError(c.path, 0, "[matrix] unsupported inner variant '" + variant + "'");
    };
    try {
        const auto& m = c.matrix;
        if (m.variant == "constant") return MatrixFamily::constant(square(m.value, "value"));
        if (m.variant == "decomposed") {
            return MatrixFamily::decomposed(square(m.lambda, "lambda"), simple(m.inner, m.inner_entries), square(m.q, "q"));
        }
        return simple(m.variant, m.entries);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(c.path, 0, std::string("[matrix]: ") + e.what());
    }
}

inline TestFunction build_function(const RunConfig& c) {
    const auto& f = c.function;
    try {
        TestFunction base;
        if (f.preset == "gauss") {
            base = f.shifts.empty() ? preset_gauss(c.n) : gauss_product(c.n, f.shifts, 1.0);
        } else if (f.preset == "G1") {
            base = preset_g1(c.n);
        } else {
            base = preset_gm(f.m, c.n);
        }
        return f.dilation == 1.0 ? base : dilate(base, f.dilation);
    } catch (const Error& e) {
        throw ConfigError(c.path, 0, std::string("[function]: ") + e.what());
    }
}

inline ProbeSchedule build_schedule(const RunConfig& c) {
    if (c.run.inner_schedule.empty()) return ProbeSchedule::geometric();
    ProbeSchedule s;
    s.inner = c.run.inner_schedule;
    s.outer = c.run.outer_schedule;
    return s;
}

}  // namespace hausdorff
