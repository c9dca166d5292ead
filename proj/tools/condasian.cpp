#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "condasian/errors.hpp"
#include "condasian/job.hpp"
#include "condasian/mc_oracle.hpp"
#include "condasian/moments.hpp"
#include "condasian/pricer.hpp"
#include "condasian/validation.hpp"

using namespace condasian;

namespace {

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c)
{
    return std::holds_alternative<double>(c) ? fmt(std::get<double>(c)) : std::get<std::string>(c);
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void write_csv(const Table& t, std::ostream& os)
{
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
        os << "\r\n";
    };
    line(t.columns);
    for (const auto& r : t.rows) {
        std::vector<std::string> f;
        for (const Cell& c : r) f.push_back(cell_text(c));
        line(f);
    }
}

void write_text(const Table& t, std::ostream& os)
{
    std::vector<std::size_t> width(t.columns.size());
    for (std::size_t j = 0; j < t.columns.size(); ++j) width[j] = t.columns[j].size();
    for (const auto& r : t.rows)
        for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], cell_text(r[j]).size());
    auto line = [&](const std::vector<std::string>& f) {
        std::string s;
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (j) s += "  ";
            s += f[j];
            if (j + 1 < f.size()) s.append(width[j] - f[j].size(), ' ');
        }
        os << s << "\n";
    };
    line(t.columns);
    for (const auto& r : t.rows) {
        std::vector<std::string> f;
        for (const Cell& c : r) f.push_back(cell_text(c));
        line(f);
    }
}

void write_json(const std::string& command, const Table& t, std::ostream& os)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json o;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (std::holds_alternative<double>(r[j]))
                o[t.columns[j]] = std::strtod(fmt(std::get<double>(r[j])).c_str(), nullptr);
            else
                o[t.columns[j]] = std::get<std::string>(r[j]);
        }
        rows.push_back(std::move(o));
    }
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << "\n";
}

std::function<void(std::size_t, std::size_t)> progress(const std::string& stage)
{
    return [stage](std::size_t done, std::size_t total) {
        std::fprintf(stderr, "[%s] %zu/%zu\n", stage.c_str(), done, total);
    };
}

PricerOptions pricer_options(const JobConfig& job, const std::string& stage)
{
    PricerOptions o;
    o.inv = job.inversion;
    o.z_step = job.z_step;
    o.threads = job.threads;
    o.progress = progress(stage);
    return o;
}

Table run_price(const JobConfig& job)
{
    const PriceBreakdown p = value_conditional_put(job.market, pricer_options(job, "price"), false).price;
    return {{"ap0", "spread", "ap_b", "ratio"}, {{p.ap0, p.spread, p.ap_b, p.ap_b / p.ap0}}};
}

Table run_delta(const JobConfig& job)
{
    const DeltaBreakdown d = value_conditional_put(job.market, pricer_options(job, "delta"), true).delta;
    return {{"delta0", "delta_spread", "delta_b", "ratio"}, {{d.delta0, d.delta_spread, d.delta_b, d.delta_b / d.delta0}}};
}

Table run_curve(const JobConfig& job)
{
    const double z_max = job.z_max > 0.0 ? job.z_max : 2.0 * std::max(job.market.x, job.market.strike);
    std::vector<double> grid;
    for (int i = 1;; ++i) {
        const double z = i * job.z_step;
        if (z > z_max * (1.0 + 1e-12)) break;
        grid.push_back(z);
    }
    const DistributionCurve c =
        g_curve(job.market, job.market.maturity, grid, job.inversion, job.threads, progress("curve"));
    Table t{{"z", "G0", "Gb", "D"}, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) t.rows.push_back({grid[i], c.g0[i], c.gb[i], c.d[i]});
    return t;
}

Table run_moments(const JobConfig& job)
{
    McConfig cfg = job.mc.value_or(McConfig{});
    cfg.threads = job.threads;
    const MomentSet m = mean_uv(job.market, job.s);
    const auto [u, v] = mc_moments_exponential(job.market, job.s, cfg);
    return {{"quantity", "analytic", "mc", "std_error"},
            {{std::string("E[U]"), m.mean_u, u.mean, u.std_error}, {std::string("E[V]"), m.mean_v, v.mean, v.std_error}}};
}

Table run_table2(const JobConfig& job)
{
    Table t{{"sigma", "ap_b", "ap0", "price_ratio", "delta_b", "delta0", "delta_ratio"}, {}};
    for (const ReferenceRow& ref : reference_rows()) {
        MarketParams p = job.market;
        p.sigma = ref.sigma;
        const Valuation v = value_conditional_put(p, pricer_options(job, "sigma=" + fmt(ref.sigma)), true);
        t.rows.push_back({ref.sigma, v.price.ap_b, v.price.ap0, v.price.ap_b / v.price.ap0, v.delta.delta_b,
                          v.delta.delta0, v.delta.delta_b / v.delta.delta0});
    }
    return t;
}

Table run_validate(const JobConfig& job, bool& all_pass)
{
    ValidationOptions opts;
    opts.threads = job.threads;
    if (job.mc) opts.seed = job.mc->seed;
    opts.progress = [](const std::string& stage, std::size_t done, std::size_t total) {
        std::fprintf(stderr, "[%s] %zu/%zu\n", stage.c_str(), done, total);
    };
    Validator v(opts);
    Table t{{"check", "status", "detail"}, {}};
    all_pass = true;
    for (int id = 1; id <= 5; ++id) {
        const CriterionReport rep = v.run(id);
        for (const Check& c : rep.checks)
            t.rows.push_back({std::to_string(id) + "." + c.name, std::string(c.pass ? "pass" : "fail"), c.detail});
        all_pass = all_pass && rep.pass();
    }
    return t;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Conditional Asian option pricer"};
    app.set_version_flag("--version", "condasian 1.0");
    std::string command, config;
    app.add_option("command", command, "price | delta | curve | moments | validate | table2")->required();
    app.add_option("--config", config, "key=value configuration file")->required();

    const char* keys[] = {"r",     "sigma", "x",     "b",    "strike",  "maturity", "gs-terms",
                          "z-step", "paths", "steps", "seed", "threads", "output"};
    std::map<std::string, std::optional<std::string>> flags;
    for (const char* k : keys) flags[k];
    for (auto& [k, v] : flags) app.add_option("--" + k, v);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const Command cmd = parse_command(command);
        Assignments cli;
        for (const auto& [k, v] : flags)
            if (v) cli[k] = {*v, 0};
        const JobConfig job = make_job(cmd, parse_key_values(read_file(config)), cli);

        bool ok = true;
        Table t;
        switch (cmd) {
        case Command::price: t = run_price(job); break;
        case Command::delta: t = run_delta(job); break;
        case Command::curve: t = run_curve(job); break;
        case Command::moments: t = run_moments(job); break;
        case Command::table2: t = run_table2(job); break;
        case Command::validate: t = run_validate(job, ok); break;
        }
        switch (job.output) {
        case OutputFormat::text: write_text(t, std::cout); break;
        case OutputFormat::csv: write_csv(t, std::cout); break;
        case OutputFormat::json: write_json(to_string(cmd), t, std::cout); break;
        }
        std::cout.flush();
        return ok ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
