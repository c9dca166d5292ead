#include "condasian/job.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "condasian/errors.hpp"

namespace condasian {

namespace {

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{"r",        "sigma",    "x",     "b",     "strike", "maturity",
                                            "gs_terms", "tolerance", "z_step", "z_max", "s",      "paths",
                                            "steps",    "seed",     "threads", "output"};
    return keys;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string normalize_key(std::string k)
{
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

template <class T>
T parse_number(const std::string& key, const Assignment& a)
{
    T v{};
    const char* first = a.value.data();
    const char* last = first + a.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ConfigError("cannot read '" + a.value + "' as a value for " + key, a.line);
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) throw ConfigError(key + " must be finite", a.line);
    }
    return v;
}

void require(bool ok, const std::string& what)
{
    if (!ok) throw ConfigError(what);
}

}  // namespace

Command parse_command(const std::string& name)
{
    if (name == "price") return Command::price;
    if (name == "delta") return Command::delta;
    if (name == "curve") return Command::curve;
    if (name == "moments") return Command::moments;
    if (name == "validate") return Command::validate;
    if (name == "table2") return Command::table2;
    throw ConfigError("unknown command '" + name + "'");
}

OutputFormat parse_output(const std::string& name)
{
    if (name == "text") return OutputFormat::text;
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ConfigError("output must be one of text, csv, json (got '" + name + "')");
}

const char* to_string(Command c)
{
    switch (c) {
    case Command::price: return "price";
    case Command::delta: return "delta";
    case Command::curve: return "curve";
    case Command::moments: return "moments";
    case Command::validate: return "validate";
    case Command::table2: return "table2";
    }
    return "?";
}

Assignments parse_key_values(const std::string& text)
{
    Assignments out;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string raw = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + line + "'", line_no);
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", line_no);
        if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'", line_no);
        if (value.empty()) throw ConfigError("missing value for " + key, line_no);
        if (out.count(key))
            throw ConfigError(key + " repeats line " + std::to_string(out.at(key).line), line_no);
        out[key] = {value, line_no};
    }
    return out;
}

JobConfig make_job(Command command, const Assignments& file, const Assignments& flags)
{
    Assignments all = file;
    for (const auto& [k, v] : flags) {
        const std::string key = normalize_key(k);
        if (!known_keys().count(key)) throw ConfigError("unknown option '" + k + "'");
        all[key] = v;
    }

    JobConfig job;
    job.command = command;
    auto real = [&](const char* key, double& dst) {
        if (auto it = all.find(key); it != all.end()) dst = parse_number<double>(key, it->second);
    };
    auto integer = [&](const char* key, auto& dst) {
        using T = std::remove_reference_t<decltype(dst)>;
        if (auto it = all.find(key); it != all.end()) dst = parse_number<T>(key, it->second);
    };
    real("r", job.market.r);
    real("sigma", job.market.sigma);
    real("x", job.market.x);
    real("b", job.market.b);
    real("strike", job.market.strike);
    real("maturity", job.market.maturity);
    integer("gs_terms", job.inversion.gs_terms);
    real("tolerance", job.inversion.target_abs_tol);
    real("z_step", job.z_step);
    real("z_max", job.z_max);
    real("s", job.s);
    integer("threads", job.threads);
    if (auto it = all.find("output"); it != all.end()) {
        try {
            job.output = parse_output(it->second.value);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), it->second.line);
        }
    }
    if (all.count("paths") || all.count("steps") || all.count("seed")) {
        McConfig mc;
        integer("paths", mc.n_paths);
        integer("steps", mc.n_steps);
        integer("seed", mc.seed);
        mc.threads = job.threads;
        require(mc.n_paths > 0, "paths > 0");
        require(mc.n_steps >= 0, "steps >= 0");
        job.mc = mc;
    }

    if (command == Command::price || command == Command::delta || command == Command::curve)
        job.market.validate_conditional();
    else
        job.market.validate();
    job.inversion.validate();
    require(job.z_step > 0.0, "z_step > 0");
    require(job.z_max >= 0.0, "z_max >= 0");
    require(job.s > 0.0, "s > 0");
    require(job.threads >= 0, "threads >= 0");
    if (command == Command::price || command == Command::delta)
        require(std::abs(job.market.strike / job.z_step - std::round(job.market.strike / job.z_step)) < 1e-9,
                "z_step must divide strike");
    return job;
}

}  // namespace condasian
