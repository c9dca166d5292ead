#pragma once

#include <map>
#include <optional>
#include <string>

#include "condasian/inversion.hpp"
#include "condasian/mc_oracle.hpp"
#include "condasian/model.hpp"

namespace condasian {

enum class Command { price, delta, curve, moments, validate, table2 };
enum class OutputFormat { text, csv, json };

Command parse_command(const std::string& name);
OutputFormat parse_output(const std::string& name);
const char* to_string(Command c);

struct JobConfig {
    Command command = Command::price;
    MarketParams market;
    InversionSpec inversion;
    double z_step = 0.1;
    double z_max = 0.0;  // curve grid end; 0 picks 2 max(x, strike)
    double s = 1.0;      // rate of the exponential horizon for moments
    std::optional<McConfig> mc;
    OutputFormat output = OutputFormat::text;
    int threads = 0;
};

// Raw key=value assignments, each remembering its source line (0 for flags).
struct Assignment {
    std::string value;
    int line = 0;
};
using Assignments = std::map<std::string, Assignment>;

// Parses key=value lines. Blank lines and lines starting with '#' are skipped.
// Keys may use '-' or '_'. Throws ConfigError with the line number on malformed
// lines, unknown keys and repeated keys.
Assignments parse_key_values(const std::string& text);

// Builds and validates a job from file assignments overridden by flag assignments.
JobConfig make_job(Command command, const Assignments& file, const Assignments& flags);

}  // namespace condasian
