#include "stochctl/cli/config.hpp"

#include "stochctl/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stochctl::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* want)
{
    throw InvalidInput("config key '" + key + "': expected " + want + ", got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& s)
{
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
        bad(key, s, "a finite number");
    }
    return v;
}

} // namespace

const std::vector<KeySpec>& known_keys()
{
    static const std::vector<KeySpec> keys = {
        {"run.seed", "base seed of every random stream"},
        {"run.paths", "Monte Carlo paths per point"},
        {"run.workers", "worker threads"},
        {"dynamics.beta", "inverse temperature (required)"},
        {"dynamics.mu", "mobility"},
        {"dynamics.tau", "momentum relaxation time"},
        {"dynamics.mass", "particle mass"},
        {"dynamics.dim", "position dimension"},
        {"dynamics.model", "overdamped|underdamped (hjb-value)"},
        {"grid.t_start", "first time node"},
        {"grid.t_end", "last time node"},
        {"grid.step", "time step"},
        {"potential.kind", "zero|quadratic|quartic_shift|double_well|monomial_grad|tabulated|network"},
        {"potential.stiffness", "quadratic stiffness: one value (isotropic) or d*d row-major values"},
        {"potential.file", "drift table CSV (t,q,drift,potential) for kind=tabulated"},
        {"potential.checkpoint", "training checkpoint for kind=network"},
        {"points.min", "lower end of the evaluation interval"},
        {"points.max", "upper end of the evaluation interval"},
        {"points.count", "number of evaluation points"},
        {"points.p_min", "lower end of the momentum interval"},
        {"points.p_max", "upper end of the momentum interval"},
        {"points.p_count", "number of momentum values"},
        {"points.list", "explicit points: components separated by ',' and points by ';'"},
        {"eval.time", "evaluation time"},
        {"initial.kind", "gaussian|gibbs"},
        {"initial.mean", "initial mean (one value or d values)"},
        {"initial.variance", "initial isotropic variance"},
        {"initial.potential", "potential kind of a Gibbs initial density"},
        {"initial.lo", "Gibbs normalization interval, lower end"},
        {"initial.hi", "Gibbs normalization interval, upper end"},
        {"initial.nodes", "Gibbs normalization nodes"},
        {"initial.momentum", "underdamped momentum law: maxwell|gaussian"},
        {"initial.momentum_variance", "momentum variance for initial.momentum=gaussian"},
        {"terminal.constant", "phi = c + sum linear_i x_i + sum quadratic_i x_i^2"},
        {"terminal.linear", "linear terminal coefficients"},
        {"terminal.quadratic", "quadratic terminal coefficients"},
        {"terminal.running_cost", "none|bridge"},
        {"gradient.direction", "momentum|position"},
        {"gradient.vector", "direction vector v"},
        {"smoothing.half_width", "box filter half width for 1-D density grids (0 disables)"},
        {"bridge.initial", "gibbs:<potential> or gaussian:<mean>:<variance>"},
        {"bridge.final", "gibbs:<potential> or gaussian:<mean>:<variance>"},
        {"bridge.z_lo", "normalization interval, lower end"},
        {"bridge.z_hi", "normalization interval, upper end"},
        {"bridge.z_nodes", "normalization nodes"},
        {"bridge.iters", "half-bridge iterations"},
        {"bridge.axis_min", "spatial grid, lower end"},
        {"bridge.axis_max", "spatial grid, upper end"},
        {"bridge.axis_count", "spatial grid points"},
        {"bridge.stride", "write every n-th spatial point of the factor table"},
        {"train.schedule", "iters:updates:sgd|adam:gamma1:gamma2 phases separated by ';'"},
        {"train.paths_fp", "paths per density estimate"},
        {"train.paths_bel", "paths per gradient estimate"},
        {"train.batch", "sample points per iteration"},
        {"train.minibatch", "rows per parameter update"},
        {"train.sample_min", "sampling interval, lower end"},
        {"train.sample_max", "sampling interval, upper end"},
        {"train.kl_paths", "paths for the KL cost diagnostic"},
        {"train.checkpoint", "checkpoint file written after every iteration"},
        {"train.resume", "checkpoint to resume from"},
        {"train.eval_paths", "paths per point for the final density"},
        {"oracle.only", "run a single acceptance criterion"},
    };
    return keys;
}

Config Config::from_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw InvalidInput("config key 'config': cannot read " + path.string());
    }
    std::stringstream s;
    s << f.rdbuf();
    return from_text(s.str());
}

Config Config::from_text(const std::string& text)
{
    Config c;
    const std::string t = trim(text);
    if (!t.empty() && t.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(t);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(std::string("config key 'config': ") + e.what());
        }
        if (!j.contains("config") || !j["config"].is_object()) {
            throw InvalidInput("config key 'config': JSON input must hold a \"config\" object");
        }
        for (const auto& [k, v] : j["config"].items()) {
            c.set(k, v.is_string() ? v.get<std::string>() : v.dump());
        }
        return c;
    }
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidInput("config line " + std::to_string(n) + ": expected key=value");
        }
        c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
}

void Config::set(const std::string& key, const std::string& value)
{
    const auto& keys = known_keys();
    if (std::none_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return key == k.key; })) {
        throw InvalidInput("config key '" + key + "': unknown key");
    }
    values_[key] = value;
}

std::string Config::text(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw InvalidInput("config key '" + key + "': required but missing");
    }
    return it->second;
}

std::string Config::text(const std::string& key, const std::string& fallback) const
{
    return has(key) ? text(key) : fallback;
}

double Config::number(const std::string& key) const { return parse_double(key, text(key)); }

double Config::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

std::size_t Config::count(const std::string& key) const
{
    const std::string s = text(key);
    std::size_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        bad(key, s, "a non-negative integer");
    }
    return v;
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const
{
    return has(key) ? count(key) : fallback;
}

std::uint64_t Config::seed(const std::string& key, std::uint64_t fallback) const
{
    if (!has(key)) {
        return fallback;
    }
    const std::string s = text(key);
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        bad(key, s, "an unsigned 64-bit integer");
    }
    return v;
}

std::vector<double> Config::numbers(const std::string& key) const
{
    std::vector<double> out;
    std::stringstream s(text(key));
    std::string item;
    while (std::getline(s, item, ',')) {
        out.push_back(parse_double(key, trim(item)));
    }
    if (out.empty()) {
        bad(key, text(key), "a list of numbers");
    }
    return out;
}

std::vector<double> Config::numbers(const std::string& key, std::vector<double> fallback) const
{
    return has(key) ? numbers(key) : fallback;
}

} // namespace stochctl::cli
