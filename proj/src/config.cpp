#include "smoothrl/config.hpp"

#include "smoothrl/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace smoothrl {

using nlohmann::json;

namespace {

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first `"key":` in the text; 0 if not found.
int line_of_key(std::string_view text, const std::string& key) {
    const std::string quoted = "\"" + key + "\"";
    std::size_t pos = 0;
    while ((pos = text.find(quoted, pos)) != std::string_view::npos) {
        std::size_t after = pos + quoted.size();
        while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
        if (after < text.size() && text[after] == ':') return line_of_offset(text, pos);
        pos = after;
    }
    return 0;
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        const std::string leaf = path.substr(path.rfind('.') == std::string::npos ? 0 : path.rfind('.') + 1);
        const int line = line_of_key(text_, leaf);
        std::string msg = "config error";
        if (line > 0) msg += " at line " + std::to_string(line);
        msg += ", key '" + path + "': " + what;
        throw ConfigError(msg, path, line);
    }

    void only_keys(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) const {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
                fail(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown key");
            }
        }
    }

    const json& object(const json& parent, const char* key, const std::string& path) const {
        const json& v = parent.at(key);
        if (!v.is_object()) fail(path, "expected an object");
        return v;
    }

    double number(const json& v, const std::string& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(path, "must be finite");
        return d;
    }

    std::string string(const json& v, const std::string& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const json& v, const std::string& path) const {
        if (!v.is_boolean()) fail(path, "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const json& v, const std::string& path) const {
        if (!v.is_array()) fail(path, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], path + "[" + std::to_string(k) + "]"));
        return out;
    }

private:
    std::string_view text_;
};

json grid_json(const SweepGrid& g) { return json{{"k1", g.k1}, {"k2", g.k2}, {"k3", g.k3}}; }

} // namespace

RunConfig default_run_config(std::string_view scenario) {
    RunConfig c;
    c.scenario = default_scenario_config(scenario);
    return c;
}

void validate_run_config(const RunConfig& c) {
    const auto& info = find_scenario(c.scenario.scenario);
    if (std::find(info.variants.begin(), info.variants.end(), c.scenario.variant) == info.variants.end()) {
        throw InvalidParameters("scenario '" + info.name + "' has no '" + std::string(to_string(c.scenario.variant)) +
                                "' variant");
    }
    for (const auto& [key, value] : c.scenario.parameters) {
        if (!info.parameters.contains(key)) {
            throw InvalidParameters("scenario '" + info.name + "' has no parameter '" + key + "'");
        }
        if (!std::isfinite(value)) throw InvalidParameters("parameter '" + key + "' must be finite");
    }
    c.scenario.solver.validate();
    if (c.scenario.variant == Variant::conventional && !(c.scenario.solver.h_ctrl > 0.0)) {
        throw InvalidParameters("the conventional limiter needs a control period h_ctrl > 0");
    }
    if (c.jobs < 1) throw InvalidParameters("jobs must be >= 1");
    if (c.output_dir.empty()) throw InvalidParameters("output_dir must not be empty");
}

RunConfig parse_run_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const int line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError("config syntax error at line " + std::to_string(line) + ": " + e.what(), {}, line);
    }
    const Reader r(text);
    if (!doc.is_object()) r.fail("<root>", "expected a JSON object");
    r.only_keys(doc, "", {"scenario", "variant", "parameters", "solver", "output_dir", "analyses", "sweep", "jobs"});
    if (!doc.contains("scenario")) throw ConfigError("config error: missing required key 'scenario'", "scenario", 0);

    RunConfig c;
    const std::string name = r.string(doc["scenario"], "scenario");
    try {
        c.scenario = default_scenario_config(name);
    } catch (const InvalidParameters& e) {
        r.fail("scenario", e.what());
    }
    const auto& info = find_scenario(name);

    if (doc.contains("variant")) {
        try {
            c.scenario.variant = parse_variant(r.string(doc["variant"], "variant"));
        } catch (const InvalidParameters& e) {
            r.fail("variant", e.what());
        }
    }
    if (doc.contains("parameters")) {
        const json& p = r.object(doc, "parameters", "parameters");
        for (auto it = p.begin(); it != p.end(); ++it) {
            const std::string path = "parameters." + it.key();
            if (!info.parameters.contains(it.key())) r.fail(path, "unknown parameter for scenario '" + name + "'");
            c.scenario.parameters[it.key()] = r.number(it.value(), path);
        }
    }
    if (doc.contains("solver")) {
        const json& s = r.object(doc, "solver", "solver");
        r.only_keys(s, "solver", {"method", "horizon", "h", "rtol", "atol", "h_ctrl", "sample_interval"});
        auto& sv = c.scenario.solver;
        if (s.contains("method")) {
            try {
                sv.method = parse_method(r.string(s["method"], "solver.method"));
            } catch (const InvalidParameters& e) {
                r.fail("solver.method", e.what());
            }
        }
        const std::pair<const char*, double*> fields[] = {{"horizon", &sv.horizon}, {"h", &sv.h},
                                                          {"rtol", &sv.rtol},       {"atol", &sv.atol},
                                                          {"h_ctrl", &sv.h_ctrl},   {"sample_interval", &sv.sample_interval}};
        for (const auto& [key, dst] : fields) {
            if (s.contains(key)) *dst = r.number(s[key], std::string("solver.") + key);
        }
    }
    if (doc.contains("output_dir")) c.output_dir = r.string(doc["output_dir"], "output_dir");
    if (doc.contains("analyses")) {
        const json& a = r.object(doc, "analyses", "analyses");
        r.only_keys(a, "analyses", {"trace", "linearize", "sweep"});
        if (a.contains("trace")) c.analyses.trace = r.boolean(a["trace"], "analyses.trace");
        if (a.contains("linearize")) c.analyses.linearize = r.boolean(a["linearize"], "analyses.linearize");
        if (a.contains("sweep")) c.analyses.sweep = r.boolean(a["sweep"], "analyses.sweep");
    }
    if (doc.contains("sweep")) {
        const json& g = r.object(doc, "sweep", "sweep");
        r.only_keys(g, "sweep", {"k1", "k2", "k3"});
        if (g.contains("k1")) c.sweep.k1 = r.numbers(g["k1"], "sweep.k1");
        if (g.contains("k2")) c.sweep.k2 = r.numbers(g["k2"], "sweep.k2");
        if (g.contains("k3")) c.sweep.k3 = r.numbers(g["k3"], "sweep.k3");
    }
    if (doc.contains("jobs")) {
        const json& j = doc["jobs"];
        if (!j.is_number_integer() || j.get<long long>() < 1 || j.get<long long>() > 1024) {
            r.fail("jobs", "expected an integer in [1, 1024]");
        }
        c.jobs = static_cast<unsigned>(j.get<long long>());
    }

    try {
        validate_run_config(c);
    } catch (const InvalidParameters& e) {
        const std::string msg = e.what();
        std::string key = "solver." + msg.substr(0, msg.find(' '));
        if (msg.find("control period") != std::string::npos) key = "solver.h_ctrl";
        if (msg.find("variant") != std::string::npos) key = "variant";
        if (msg.find("jobs") != std::string::npos) key = "jobs";
        if (msg.find("output_dir") != std::string::npos) key = "output_dir";
        r.fail(key, msg);
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& c) {
    const auto& s = c.scenario.solver;
    json params = json::object();
    for (const auto& [k, v] : c.scenario.parameters) params[k] = v;
    const json doc = {
        {"scenario", c.scenario.scenario},
        {"variant", std::string(to_string(c.scenario.variant))},
        {"parameters", params},
        {"solver",
         {{"method", std::string(to_string(s.method))},
          {"horizon", s.horizon},
          {"h", s.h},
          {"rtol", s.rtol},
          {"atol", s.atol},
          {"h_ctrl", s.h_ctrl},
          {"sample_interval", s.sample_interval}}},
        {"output_dir", c.output_dir},
        {"analyses", {{"trace", c.analyses.trace}, {"linearize", c.analyses.linearize}, {"sweep", c.analyses.sweep}}},
        {"sweep", grid_json(c.sweep)},
        {"jobs", c.jobs},
    };
    return doc.dump(2) + "\n";
}

} // namespace smoothrl
