/**
 *  @file qbl/harness/config.hpp
 *  @brief Experiment configuration and its `key = value` text format.
 *
 *  One key per line, `#` starts a comment. `space` may repeat; every other
 *  key is scalar or a comma-separated list. Doubles are written with 17
 *  significant digits so format/parse round-trips exactly.
 *
 *      experiment = volume
 *      seed = 7
 *      method = monte-carlo
 *      samples = 1000000
 *      space = lp dim=3 p=0.5
 *      space = polytope half=1,0;0,1;1,1
 */

#ifndef QBL_HARNESS_CONFIG_HPP
#define QBL_HARNESS_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qbl/randsigns.hpp"
#include "qbl/spaces.hpp"

namespace qbl {

/// Bad configuration text or values. Maps to exit code 2.
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string &what) : Error(what) {}
};

namespace detail {

inline std::string format_double(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

inline double parse_double(std::string_view s, std::string_view what) {
    const std::string t(trim(s));
    char *end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || std::isnan(v))
        throw ConfigError("config: bad number '" + t + "' for " + std::string(what));
    return v;
}

inline std::uint64_t parse_uint(std::string_view s, std::string_view what) {
    const std::string t(trim(s));
    char *end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || t[0] == '-' || end != t.c_str() + t.size())
        throw ConfigError("config: bad integer '" + t + "' for " + std::string(what));
    return v;
}

inline Vector parse_doubles(std::string_view s, std::string_view what) {
    Vector out;
    for (std::string_view item : split(s, ','))
        out.push_back(parse_double(item, what));
    return out;
}

inline std::vector<Vector> parse_points(std::string_view s, std::string_view what) {
    std::vector<Vector> out;
    for (std::string_view item : split(s, ';'))
        out.push_back(parse_doubles(item, what));
    return out;
}

inline std::string join(const Vector &v, char sep = ',') {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += sep;
        s += format_double(v[i]);
    }
    return s;
}

inline std::string join_points(const std::vector<Vector> &pts) {
    std::string s;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i)
            s += ';';
        s += join(pts[i]);
    }
    return s;
}

} // namespace detail

/// One space in text form, e.g. `lp dim=3 p=0.5 weights=1,2,1`.
struct SpaceSpec {
    enum class Kind { lp, schatten, polytope, atoms };

    Kind kind = Kind::lp;
    double p = 2.0;            // lp, schatten
    Vector weights;            // lp
    std::size_t rows = 0;      // schatten
    std::size_t cols = 0;      // schatten
    std::vector<Vector> points; // polytope vertices (full symmetric list) or atoms
    double r = 1.0;            // atoms

    bool operator==(const SpaceSpec &) const = default;

    std::size_t dim() const {
        switch (kind) {
        case Kind::lp:
            return weights.size();
        case Kind::schatten:
            return rows * cols;
        default:
            return points.empty() ? 0 : points.front().size();
        }
    }

    bool unweighted_lp() const {
        return kind == Kind::lp && std::all_of(weights.begin(), weights.end(), [](double w) { return w == 1.0; });
    }

    QuasiNormedSpace build() const {
        switch (kind) {
        case Kind::lp:
            return QuasiNormedSpace::weighted_lp(p, weights);
        case Kind::schatten:
            return QuasiNormedSpace::schatten(p, rows, cols);
        case Kind::polytope:
            return QuasiNormedSpace::polytope(points);
        default:
            return QuasiNormedSpace::r_convex_atoms(points, r);
        }
    }

    std::string format() const {
        using detail::format_double;
        switch (kind) {
        case Kind::lp: {
            std::string s = "lp dim=" + std::to_string(weights.size()) + " p=" + format_double(p);
            if (!unweighted_lp())
                s += " weights=" + detail::join(weights);
            return s;
        }
        case Kind::schatten:
            return "schatten rows=" + std::to_string(rows) + " cols=" + std::to_string(cols) +
                   " p=" + format_double(p);
        case Kind::polytope:
            return "polytope dim=" + std::to_string(dim()) + " vertices=" + detail::join_points(points);
        default:
            return "atoms dim=" + std::to_string(dim()) + " r=" + format_double(r) +
                   " atoms=" + detail::join_points(points);
        }
    }

    /// Kinds: lp (dim, p, weights), schatten (rows, cols, p),
    /// polytope (vertices or half, rows separated by ';'), atoms (r, atoms).
    static SpaceSpec parse(std::string_view text) {
        std::vector<std::string_view> tokens;
        {
            std::size_t i = 0;
            text = detail::trim(text);
            while (i < text.size()) {
                const auto e = text.find_first_of(" \t", i);
                const std::string_view tok = text.substr(i, e - i);
                if (!tok.empty())
                    tokens.push_back(tok);
                if (e == std::string_view::npos)
                    break;
                i = e + 1;
            }
        }
        if (tokens.empty())
            throw ConfigError("space: empty specification");
        SpaceSpec s;
        const std::string_view kind = tokens.front();
        if (kind == "lp")
            s.kind = Kind::lp;
        else if (kind == "schatten")
            s.kind = Kind::schatten;
        else if (kind == "polytope")
            s.kind = Kind::polytope;
        else if (kind == "atoms")
            s.kind = Kind::atoms;
        else
            throw ConfigError("space: unknown kind '" + std::string(kind) + "'");

        std::optional<std::size_t> dim;
        bool have_p = false, have_points = false, half = false;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            const auto eq = tokens[i].find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("space: expected key=value, got '" + std::string(tokens[i]) + "'");
            const std::string_view key = tokens[i].substr(0, eq), val = tokens[i].substr(eq + 1);
            if (key == "dim") {
                dim = detail::parse_uint(val, "dim");
            } else if (key == "p" && (s.kind == Kind::lp || s.kind == Kind::schatten)) {
                s.p = detail::parse_double(val, "p");
                have_p = true;
            } else if (key == "weights" && s.kind == Kind::lp) {
                s.weights = detail::parse_doubles(val, "weights");
            } else if (key == "rows" && s.kind == Kind::schatten) {
                s.rows = detail::parse_uint(val, "rows");
            } else if (key == "cols" && s.kind == Kind::schatten) {
                s.cols = detail::parse_uint(val, "cols");
            } else if ((key == "vertices" || key == "half") && s.kind == Kind::polytope) {
                s.points = detail::parse_points(val, key);
                half = key == "half";
                have_points = true;
            } else if (key == "atoms" && s.kind == Kind::atoms) {
                s.points = detail::parse_points(val, "atoms");
                have_points = true;
            } else if (key == "r" && s.kind == Kind::atoms) {
                s.r = detail::parse_double(val, "r");
            } else {
                throw ConfigError("space: unexpected key '" + std::string(key) + "' for " + std::string(kind));
            }
        }
        switch (s.kind) {
        case Kind::lp:
            if (!have_p)
                throw ConfigError("space: lp needs p");
            if (s.weights.empty()) {
                if (!dim || *dim == 0)
                    throw ConfigError("space: lp needs dim or weights");
                s.weights.assign(*dim, 1.0);
            }
            break;
        case Kind::schatten:
            if (!have_p || s.rows == 0 || s.cols == 0)
                throw ConfigError("space: schatten needs rows, cols and p");
            break;
        default:
            if (!have_points)
                throw ConfigError("space: polytope/atoms need a point list");
            if (half) {
                const std::size_t n = s.points.size();
                for (std::size_t i = 0; i < n; ++i)
                    s.points.push_back(scaled(s.points[i], -1.0));
            }
        }
        if (dim && *dim != s.dim())
            throw ConfigError("space: dim does not match the data");
        for (const Vector &v : s.points)
            if (v.size() != s.dim())
                throw ConfigError("space: ragged point list");
        return s;
    }
};

/// Everything a harness run needs. Unset optionals take per-experiment defaults.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::vector<std::size_t> dims;
    std::vector<double> exponents;
    std::optional<std::uint64_t> samples;
    std::optional<std::size_t> trials;
    std::optional<double> tolerance;
    std::optional<double> theta;
    std::optional<SearchBudget> budget;
    std::string method;
    unsigned threads = 1;
    std::string output;
    std::vector<SpaceSpec> spaces;

    bool operator==(const ExperimentConfig &o) const {
        auto same_budget = [](const std::optional<SearchBudget> &a, const std::optional<SearchBudget> &b) {
            if (a.has_value() != b.has_value())
                return false;
            return !a || (a->random_starts == b->random_starts && a->refine_evals == b->refine_evals);
        };
        return experiment == o.experiment && seed == o.seed && dims == o.dims && exponents == o.exponents &&
               samples == o.samples && trials == o.trials && tolerance == o.tolerance && theta == o.theta &&
               same_budget(budget, o.budget) && method == o.method && threads == o.threads &&
               output == o.output && spaces == o.spaces;
    }
};

/// Sets one key. Used by the file parser and by command-line overrides.
inline void set_config_value(ExperimentConfig &c, std::string_view key, std::string_view value) {
    using namespace detail;
    value = trim(value);
    if (key == "experiment") {
        c.experiment = std::string(value);
    } else if (key == "seed") {
        c.seed = parse_uint(value, key);
    } else if (key == "dims" || key == "dim") {
        c.dims.clear();
        for (std::string_view item : split(value, ','))
            c.dims.push_back(parse_uint(item, key));
    } else if (key == "exponents") {
        c.exponents = parse_doubles(value, key);
    } else if (key == "samples") {
        c.samples = parse_uint(value, key);
    } else if (key == "trials") {
        c.trials = parse_uint(value, key);
    } else if (key == "tolerance") {
        c.tolerance = parse_double(value, key);
    } else if (key == "theta") {
        c.theta = parse_double(value, key);
    } else if (key == "budget") {
        const auto parts = split(value, ',');
        if (parts.size() != 2)
            throw ConfigError("config: budget is 'random_starts,refine_evals'");
        c.budget = SearchBudget{static_cast<std::size_t>(parse_uint(parts[0], key)),
                                static_cast<std::size_t>(parse_uint(parts[1], key))};
    } else if (key == "method") {
        c.method = std::string(value);
    } else if (key == "threads") {
        c.threads = static_cast<unsigned>(parse_uint(value, key));
    } else if (key == "output") {
        c.output = std::string(value);
    } else if (key == "space") {
        c.spaces.push_back(SpaceSpec::parse(value));
    } else {
        throw ConfigError("config: unknown key '" + std::string(key) + "'");
    }
}

/// Applies the text on top of `base`. A `space` line in the text replaces
/// the base's space list rather than appending to it.
inline ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {}) {
    bool spaces_seen = false;
    std::size_t line_no = 0;
    for (std::string_view line : detail::split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string_view key = detail::trim(line.substr(0, eq));
        if (key == "space" && !spaces_seen) {
            base.spaces.clear();
            spaces_seen = true;
        }
        try {
            set_config_value(base, key, line.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

inline ExperimentConfig load_config(const std::string &path, ExperimentConfig base = {}) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

inline std::string format_config(const ExperimentConfig &c) {
    using detail::format_double;
    std::string s;
    auto line = [&](std::string_view k, const std::string &v) { s.append(k).append(" = ").append(v).append("\n"); };
    line("experiment", c.experiment);
    line("seed", std::to_string(c.seed));
    if (!c.dims.empty()) {
        std::string v;
        for (std::size_t i = 0; i < c.dims.size(); ++i)
            v += (i ? "," : "") + std::to_string(c.dims[i]);
        line("dims", v);
    }
    if (!c.exponents.empty())
        line("exponents", detail::join(c.exponents));
    if (c.samples)
        line("samples", std::to_string(*c.samples));
    if (c.trials)
        line("trials", std::to_string(*c.trials));
    if (c.tolerance)
        line("tolerance", format_double(*c.tolerance));
    if (c.theta)
        line("theta", format_double(*c.theta));
    if (c.budget)
        line("budget", std::to_string(c.budget->random_starts) + "," + std::to_string(c.budget->refine_evals));
    if (!c.method.empty())
        line("method", c.method);
    line("threads", std::to_string(c.threads));
    if (!c.output.empty())
        line("output", c.output);
    for (const SpaceSpec &sp : c.spaces)
        line("space", sp.format());
    return s;
}

/// Checks that do not depend on the experiment table.
inline void validate_config(const ExperimentConfig &c) {
    if (c.experiment.empty())
        throw ConfigError("config: no experiment given");
    if (c.threads == 0)
        throw ConfigError("config: threads must be positive");
    if (c.tolerance && !(*c.tolerance > 0.0))
        throw ConfigError("config: tolerance must be positive");
    if (c.theta && !(*c.theta > 0.0 && *c.theta < 1.0))
        throw ConfigError("config: theta must lie in (0, 1)");
    if (c.trials && *c.trials == 0)
        throw ConfigError("config: trials must be positive");
    for (std::size_t d : c.dims)
        if (d == 0)
            throw ConfigError("config: dimensions must be positive");
    for (double e : c.exponents)
        if (!(e > 0.0))
            throw ConfigError("config: exponents must be positive");
}

} // namespace qbl

#endif // QBL_HARNESS_CONFIG_HPP
