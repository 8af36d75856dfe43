#include "stochctl/bridge/checkpoint.hpp"

#include "stochctl/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace stochctl::bridge {

namespace {

using nlohmann::json;

std::string hex(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
    return std::string(buf, r.ptr);
}

double unhex(const json& j)
{
    const std::string s = j.get<std::string>();
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw InvalidInput("checkpoint: bad number '" + s + "'");
    }
    return v;
}

json hex_array(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v) {
        a.push_back(hex(x));
    }
    return a;
}

std::vector<double> unhex_array(const json& a)
{
    std::vector<double> out;
    for (const auto& x : a) {
        out.push_back(unhex(x));
    }
    return out;
}

} // namespace

std::string checkpoint_to_string(const TrainState& state, std::uint64_t seed)
{
    json j;
    j["version"] = checkpoint_version;
    j["seed"] = seed;
    const auto& w = state.network.widths();
    j["network"]["dim"] = state.network.dim();
    j["network"]["hidden"] = std::vector<std::size_t>(w.begin() + 1, w.end() - 1);
    j["network"]["params"] = hex_array(state.network.params());
    j["lambda"]["lo"] = hex(state.lambda.lo());
    j["lambda"]["hi"] = hex(state.lambda.hi());
    j["lambda"]["chebyshev"] = hex_array(state.lambda.coefficients());
    j["optimizer"]["kind"] = state.optimizer.kind() == OptimizerKind::sgd ? "sgd" : "adam";
    j["optimizer"]["steps"] = state.optimizer.steps();
    j["optimizer"]["m"] = hex_array(state.optimizer.first_moment());
    j["optimizer"]["v"] = hex_array(state.optimizer.second_moment());
    j["phase"] = state.phase;
    j["phase_iteration"] = state.phase_iteration;
    j["iteration"] = state.iteration;
    j["initial_gap"] = hex(state.initial_gap);
    json h = json::array();
    for (const auto& d : state.history) {
        h.push_back({{"iteration", d.iteration},
                     {"phase", d.phase},
                     {"l1_gap", hex(d.l1_gap)},
                     {"stationarity_residual", hex(d.stationarity_residual)},
                     {"mean_loss", hex(d.mean_loss)},
                     {"kl_cost", hex(d.kl_cost)}});
    }
    j["history"] = h;
    return j.dump(1);
}

TrainState checkpoint_from_string(const std::string& text, std::uint64_t* seed)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("checkpoint: ") + e.what());
    }
    try {
        if (j.at("version").get<int>() != checkpoint_version) {
            throw InvalidInput("checkpoint: unsupported version " + j.at("version").dump());
        }
        if (seed) {
            *seed = j.at("seed").get<std::uint64_t>();
        }
        const auto& n = j.at("network");
        DriftNetwork net(n.at("dim").get<std::size_t>(), n.at("hidden").get<std::vector<std::size_t>>());
        auto params = unhex_array(n.at("params"));
        if (params.size() != net.n_params()) {
            throw InvalidInput("checkpoint: network parameter count does not match its layout");
        }
        net.params() = std::move(params);
        const auto& l = j.at("lambda");
        LagrangeMultiplier lambda(unhex(l.at("lo")), unhex(l.at("hi")), unhex_array(l.at("chebyshev")));
        const auto& o = j.at("optimizer");
        const std::string kind = o.at("kind").get<std::string>();
        if (kind != "sgd" && kind != "adam") {
            throw InvalidInput("checkpoint: unknown optimizer '" + kind + "'");
        }
        Optimizer opt(kind == "sgd" ? OptimizerKind::sgd : OptimizerKind::adam, net.n_params());
        opt.restore(o.at("steps").get<std::uint64_t>(), unhex_array(o.at("m")), unhex_array(o.at("v")));
        TrainState s(std::move(net), std::move(lambda), std::move(opt));
        s.phase = j.at("phase").get<std::size_t>();
        s.phase_iteration = j.at("phase_iteration").get<std::size_t>();
        s.iteration = j.at("iteration").get<std::size_t>();
        s.initial_gap = unhex(j.at("initial_gap"));
        for (const auto& d : j.at("history")) {
            s.history.push_back({d.at("iteration").get<std::size_t>(), d.at("phase").get<std::size_t>(),
                                 unhex(d.at("l1_gap")), unhex(d.at("stationarity_residual")),
                                 unhex(d.at("mean_loss")), unhex(d.at("kl_cost"))});
        }
        return s;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const TrainState& state, std::uint64_t seed)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw InvalidInput("cannot write checkpoint " + path.string());
    }
    f << checkpoint_to_string(state, seed) << '\n';
}

TrainState load_checkpoint(const std::filesystem::path& path, std::uint64_t* seed)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw InvalidInput("cannot read checkpoint " + path.string());
    }
    std::stringstream s;
    s << f.rdbuf();
    return checkpoint_from_string(s.str(), seed);
}

} // namespace stochctl::bridge
