#include "reglab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace reglab {

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    ConfigDocument run() {
        ConfigDocument doc;
        std::string prefix;
        for (;;) {
            skip_blank_lines();
            if (at_end()) break;
            if (peek() == '[') {
                ++pos_;
                skip_inline_space();
                const std::string name = key();
                skip_inline_space();
                expect(']');
                end_of_line();
                prefix = name + ".";
                continue;
            }
            const std::string k = prefix + key();
            skip_inline_space();
            expect('=');
            skip_inline_space();
            ConfigValue v = value();
            end_of_line();
            if (doc.count(k)) fail("duplicate key '" + k + "'");
            doc.emplace(k, std::move(v));
        }
        return doc;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("config line " + std::to_string(line_) + ": " + what);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_inline_space() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
    }

    void skip_comment() {
        if (peek() == '#')
            while (!at_end() && peek() != '\n') ++pos_;
    }

    // Whitespace, newlines and comments; used between lines and inside arrays.
    void skip_blank_lines() {
        for (;;) {
            skip_inline_space();
            skip_comment();
            if (peek() != '\n') return;
            ++pos_;
            ++line_;
        }
    }

    void end_of_line() {
        skip_inline_space();
        skip_comment();
        if (at_end()) return;
        if (peek() != '\n') fail("unexpected text after value");
        ++pos_;
        ++line_;
    }

    std::string key() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-' ||
                             peek() == '.'))
            ++pos_;
        if (pos_ == start) fail("expected a key");
        return s_.substr(start, pos_ - start);
    }

    ConfigValue value() {
        ConfigValue v;
        const char c = peek();
        if (c == '"') {
            v.kind = ConfigValue::Kind::string;
            v.text = quoted();
        } else if (c == '[') {
            ++pos_;
            v.kind = ConfigValue::Kind::array;
            for (;;) {
                skip_blank_lines();
                if (peek() == ']') {
                    ++pos_;
                    break;
                }
                v.items.push_back(value());
                skip_blank_lines();
                if (peek() == ',') {
                    ++pos_;
                } else if (peek() != ']') {
                    fail("expected ',' or ']' in array");
                }
            }
        } else {
            const std::size_t start = pos_;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                                 peek() == '.' || peek() == '_'))
                ++pos_;
            std::string word = s_.substr(start, pos_ - start);
            if (word.empty()) fail("expected a value");
            if (word == "true" || word == "false") {
                v.kind = ConfigValue::Kind::boolean;
                v.boolean = word == "true";
                return v;
            }
            std::erase(word, '_');
            v.kind = ConfigValue::Kind::number;
            if (word == "inf" || word == "+inf") {
                v.number = std::numeric_limits<double>::infinity();
            } else if (word == "-inf") {
                v.number = -std::numeric_limits<double>::infinity();
            } else {
                char* end = nullptr;
                v.number = std::strtod(word.c_str(), &end);
                if (end != word.c_str() + word.size() || !std::isfinite(v.number)) fail("invalid value '" + word + "'");
            }
        }
        return v;
    }

    std::string quoted() {
        expect('"');
        std::string out;
        for (;;) {
            if (at_end() || peek() == '\n') fail("unterminated string");
            const char c = s_[pos_++];
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (at_end()) fail("unterminated string");
            switch (s_[pos_++]) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            default: fail("unsupported escape in string");
            }
        }
    }
};

enum class Type { number, integer, string, boolean, numbers, integers, lorentz_s };

struct KeySpec {
    const char* key;
    Type type;
    const char* help;
};

const KeySpec kSchema[] = {
    {"seed", Type::integer, "master seed (non-negative integer)"},
    {"out", Type::string, "output directory"},
    {"jobs", Type::integer, "concurrent instances (>= 1)"},
    {"problem.id", Type::string, "instance label"},
    {"problem.grid", Type::integer, "cells per side of the unit square"},
    {"problem.p", Type::number, "growth exponent p > 1"},
    {"problem.gamma", Type::number, "power-weight exponent, weight |x - (0.5,0.5)|^gamma"},
    {"problem.coefficient", Type::string, "constant | x1_layers | x2_osc"},
    {"problem.obstacles", Type::string, "inactive | active | pinched"},
    {"problem.domain", Type::string, "square | reifenberg"},
    {"problem.mask", Type::string, "path to a mask file; overrides problem.domain"},
    {"problem.delta", Type::number, "flatness of the rough domain, in [0, 1/2)"},
    {"problem.r0", Type::number, "flatness scale of the rough domain"},
    {"problem.F_amplitude", Type::number, "amplitude of the vector datum F"},
    {"problem.g_value", Type::number, "constant value of the scalar datum g"},
    {"solver.tol", Type::number, "stationarity tolerance"},
    {"solver.max_iter", Type::integer, "iteration cap per regularization stage"},
    {"solver.mu", Type::number, "final regularization for p != 2"},
    {"operator.alpha", Type::number, "fractional order of the maximal function, in [0, 2)"},
    {"operator.beta", Type::number, "Riesz potential order, in (0, 2)"},
    {"operator.mode", Type::string, "fast | brute"},
    {"operator.input", Type::string, "path to an input field file"},
    {"norm.q", Type::number, "Lorentz exponent q"},
    {"norm.s", Type::lorentz_s, "Lorentz exponent s (number or inf)"},
    {"norm.phi", Type::string, "none | power | power_log"},
    {"norm.phi_p", Type::number, "exponent of the Young function"},
    {"goodlambda.alphas", Type::numbers, "fractional orders"},
    {"goodlambda.epsilons", Type::numbers, "epsilon values in (0, 1)"},
    {"goodlambda.lambda_knots", Type::integer, "log-spaced lambda knots"},
    {"goodlambda.sigma_powers", Type::integers, "sigma candidates epsilon^k times the datum scale"},
    {"goodlambda.margin", Type::number, "factor applied to the exponent a"},
    {"experiment.grids", Type::integers, "refinement pair, coarse first"},
    {"experiment.t", Type::number, "power t of the pointwise experiment"},
    {"experiment.sample_points", Type::integer, "sample points of the pointwise experiment"},
    {"experiment.ball_radius", Type::number, "ball radius of the comparison chain"},
    {"bmo.radius", Type::number, "largest probe radius of the partial BMO seminorm"},
    {"bmo.probes", Type::integer, "probe directions of the partial BMO seminorm"},
    {"weight.subsets", Type::integer, "random subsets per ball in the A_infinity fit"},
};

const KeySpec* find_key(const std::string& key) {
    for (const KeySpec& k : kSchema)
        if (key == k.key) return &k;
    return nullptr;
}

bool is_integer(const ConfigValue& v) {
    return v.kind == ConfigValue::Kind::number && std::isfinite(v.number) && v.number == std::floor(v.number);
}

bool matches(const ConfigValue& v, Type t) {
    using K = ConfigValue::Kind;
    switch (t) {
    case Type::number: return v.kind == K::number && std::isfinite(v.number);
    case Type::integer: return is_integer(v);
    case Type::string: return v.kind == K::string;
    case Type::boolean: return v.kind == K::boolean;
    case Type::lorentz_s: return v.kind == K::number && v.number > 0.0;
    case Type::numbers:
    case Type::integers:
        if (v.kind != K::array) return false;
        for (const ConfigValue& item : v.items)
            if (!matches(item, t == Type::numbers ? Type::number : Type::integer)) return false;
        return true;
    }
    return false;
}

const char* type_name(Type t) {
    switch (t) {
    case Type::number: return "a finite number";
    case Type::integer: return "an integer";
    case Type::string: return "a string";
    case Type::boolean: return "a boolean";
    case Type::numbers: return "an array of numbers";
    case Type::integers: return "an array of integers";
    case Type::lorentz_s: return "a positive number or inf";
    }
    return "?";
}

class Reader {
public:
    explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

    template <class T>
    void number(const char* key, T& out) const {
        if (const auto it = doc_.find(key); it != doc_.end()) out = static_cast<T>(it->second.number);
    }
    void text(const char* key, std::string& out) const {
        if (const auto it = doc_.find(key); it != doc_.end()) out = it->second.text;
    }
    void text(const char* key, std::optional<std::string>& out) const {
        if (const auto it = doc_.find(key); it != doc_.end()) out = it->second.text;
    }
    template <class T>
    void list(const char* key, std::vector<T>& out) const {
        if (const auto it = doc_.find(key); it != doc_.end()) {
            out.clear();
            for (const ConfigValue& v : it->second.items) out.push_back(static_cast<T>(v.number));
        }
    }
    std::string word(const char* key) const {
        const auto it = doc_.find(key);
        return it == doc_.end() ? std::string() : it->second.text;
    }
    bool has(const char* key) const { return doc_.count(key) != 0; }

private:
    const ConfigDocument& doc_;
};

void check(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("config key '" + key + "': " + what);
}

} // namespace

ConfigDocument parse_toml(const std::string& text) { return Parser(text).run(); }

ConfigDocument load_toml(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_toml(ss.str());
}

void validate(const ConfigDocument& doc) {
    for (const auto& [key, value] : doc) {
        const KeySpec* spec = find_key(key);
        if (!spec) throw ConfigError("unknown config key '" + key + "'");
        check(matches(value, spec->type), key, std::string("expected ") + type_name(spec->type));
    }
}

RunConfig build_run_config(const ConfigDocument& doc, std::span<const std::string> required) {
    validate(doc);
    for (const std::string& key : required)
        if (!doc.count(key)) throw ConfigError("missing config key '" + key + "'");

    const Reader r(doc);
    RunConfig c;
    if (r.has("seed")) check(doc.at("seed").number >= 0.0, "seed", "must be non-negative");
    r.number("seed", c.seed);
    r.text("out", c.out);
    r.number("jobs", c.jobs);
    check(c.jobs >= 1, "jobs", "must be >= 1");

    InstanceSpec& s = c.instance;
    r.text("problem.id", s.id);
    r.number("problem.grid", s.grid);
    r.number("problem.p", s.p);
    r.number("problem.gamma", s.gamma);
    r.number("problem.delta", s.delta);
    r.number("problem.r0", s.r0);
    r.number("problem.F_amplitude", s.F_amplitude);
    r.number("problem.g_value", s.g_value);
    s.seed = c.seed;
    try {
        if (r.has("problem.coefficient")) s.coefficient = parse_coefficient(r.word("problem.coefficient"));
        if (r.has("problem.obstacles")) s.obstacles = parse_obstacles(r.word("problem.obstacles"));
        if (r.has("problem.domain")) s.domain = parse_domain(r.word("problem.domain"));
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    r.text("problem.mask", c.mask_path);
    check(s.grid >= 4, "problem.grid", "must be >= 4");
    check(s.p > 1.0, "problem.p", "must exceed 1");

    r.number("solver.tol", c.solver.tol);
    r.number("solver.max_iter", c.solver.max_iter);
    r.number("solver.mu", c.solver.mu);
    check(c.solver.tol > 0.0, "solver.tol", "must be positive");

    r.number("operator.alpha", c.alpha);
    r.number("operator.beta", c.beta);
    check(c.alpha >= 0.0 && c.alpha < 2.0, "operator.alpha", "must lie in [0, 2)");
    check(c.beta > 0.0 && c.beta < 2.0, "operator.beta", "must lie in (0, 2)");
    if (const std::string word = r.word("operator.mode"); !word.empty()) {
        check(word == "fast" || word == "brute", "operator.mode", "expected fast or brute");
        c.mode = word == "fast" ? MaximalMode::fast : MaximalMode::brute;
    }
    r.text("operator.input", c.input_field);

    r.number("norm.q", c.lorentz.q);
    r.number("norm.s", c.lorentz.s);
    check(c.lorentz.q > 0.0 && std::isfinite(c.lorentz.q), "norm.q", "must be positive");
    double phi_p = 2.0;
    r.number("norm.phi_p", phi_p);
    check(phi_p > 1.0, "norm.phi_p", "must exceed 1");
    const std::string word = r.word("norm.phi");
    if (word == "power") {
        c.phi = YoungFunction::power(phi_p);
    } else if (word == "power_log") {
        c.phi = YoungFunction::power_log(phi_p);
    } else {
        check(word.empty() || word == "none", "norm.phi", "expected none, power or power_log");
    }

    GoodLambdaConfig& g = c.good_lambda;
    r.list("goodlambda.alphas", g.alphas);
    r.list("goodlambda.epsilons", g.epsilons);
    r.number("goodlambda.lambda_knots", g.lambda_knots);
    r.list("goodlambda.sigma_powers", g.sigma_powers);
    r.number("goodlambda.margin", g.margin);
    check(!g.alphas.empty() && !g.epsilons.empty() && !g.sigma_powers.empty(), "goodlambda",
          "alphas, epsilons and sigma_powers must be non-empty");
    check(g.lambda_knots >= 2, "goodlambda.lambda_knots", "must be >= 2");

    r.list("experiment.grids", c.grids);
    check(!c.grids.empty(), "experiment.grids", "must be non-empty");
    for (int n : c.grids) check(n >= 4, "experiment.grids", "entries must be >= 4");
    r.number("experiment.t", c.t);
    r.number("experiment.sample_points", c.sample_points);
    r.number("experiment.ball_radius", c.ball_radius);
    check(c.t > 0.0, "experiment.t", "must be positive");
    check(c.sample_points >= 1, "experiment.sample_points", "must be >= 1");
    check(c.ball_radius > 0.0, "experiment.ball_radius", "must be positive");

    r.number("bmo.radius", c.bmo_radius);
    r.number("bmo.probes", c.bmo_probes);
    r.number("weight.subsets", c.ainf_subsets);
    check(c.bmo_probes >= 1, "bmo.probes", "must be >= 1");
    check(c.ainf_subsets >= 1, "weight.subsets", "must be >= 1");

    g.grids = c.grids;
    g.solver = c.solver;
    g.jobs = c.jobs;
    return c;
}

const std::vector<std::pair<std::string, std::string>>& config_schema() {
    static const std::vector<std::pair<std::string, std::string>> out = [] {
        std::vector<std::pair<std::string, std::string>> v;
        for (const KeySpec& k : kSchema) v.emplace_back(k.key, k.help);
        return v;
    }();
    return out;
}

} // namespace reglab
