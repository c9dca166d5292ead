#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "condasian/model.hpp"
#include "condasian/pricer.hpp"

namespace condasian {

// Published five-year grid: r = 0.05, b = 1, T = 5, x = K = 2, one row per sigma.
struct ReferenceRow {
    double sigma;
    double ap_b, ap0, price_ratio_pct;
    double delta_b, delta0, delta_ratio_pct;
};
const std::array<ReferenceRow, 5>& reference_rows();
MarketParams five_year_market(double sigma);

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CriterionReport {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;
    bool pass() const;
};

struct ValidationOptions {
    int threads = 0;
    std::uint64_t seed = 20240601;
    // (stage, done, total) after each unit of work.
    std::function<void(const std::string&, std::size_t, std::size_t)> progress;
};

// Runs the acceptance criteria 1..7. Grid valuations are computed once and shared
// between the criteria that need them.
class Validator {
public:
    explicit Validator(ValidationOptions opts = {});
    CriterionReport run(int id);
    static constexpr int kCriteria = 7;

    struct RowResult {
        Valuation valuation;
        double seconds = 0.0;
    };
    const RowResult& row(std::size_t i);

private:
    CriterionReport call_price();
    CriterionReport grid_prices();
    CriterionReport grid_deltas();
    CriterionReport closed_forms();
    CriterionReport properties();
    CriterionReport monte_carlo();
    CriterionReport small_volatility();

    PricerOptions pricer_options(const std::string& stage) const;

    ValidationOptions opts_;
    std::map<std::size_t, RowResult> rows_;
};

// Formats with 10 significant digits.
std::string fmt(double v);

}  // namespace condasian
