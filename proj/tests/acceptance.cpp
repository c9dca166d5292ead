// One PASS/FAIL line per acceptance criterion on stdout; per-check detail on stderr.
// Usage: acceptance [criterion ...]   (default: all)

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "condasian/validation.hpp"

using namespace condasian;

namespace {

// Checks that fail for reasons recorded in the decisions ledger. They still print FAIL;
// they only do not turn the exit status nonzero. Anything else failing does.
//   2: the printed sigma = 0.4 and 0.2 conditional prices disagree with this pricer and
//      with 1e6-path Monte Carlo, which agree with each other.
//   5: Gaver-Stehfest with M = 5 cannot reach 1e-5 on 1/(s+1) and 1/s^2.
const std::set<std::pair<int, std::string>> kKnownFailures{
    {2, "sigma=0.4.ap_b"},        {2, "sigma=0.4.ratio_pct"},  {2, "sigma=0.2.ap_b"},
    {2, "sigma=0.2.ratio_pct"},   {5, "gs_inversion.1/(s+1)"}, {5, "gs_inversion.1/s^2"},
};

}  // namespace

int main(int argc, char** argv)
{
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    if (ids.empty())
        for (int i = 1; i <= Validator::kCriteria; ++i) ids.push_back(i);

    ValidationOptions opts;
    std::size_t last = 0;
    opts.progress = [&last](const std::string& stage, std::size_t done, std::size_t total) {
        if (done == total || done - last >= 10 || done < last) {
            std::fprintf(stderr, "  [%s] %zu/%zu\n", stage.c_str(), done, total);
            last = done;
        }
    };
    Validator v(opts);

    int unexpected = 0;
    for (int id : ids) {
        CriterionReport rep;
        try {
            rep = v.run(id);
        } catch (const std::exception& e) {
            rep.id = id;
            rep.title = "aborted";
            rep.checks.push_back({"exception", false, e.what()});
        }
        bool only_known = true;
        for (const Check& c : rep.checks) {
            const bool known = kKnownFailures.count({id, c.name}) > 0;
            if (!c.pass && !known) only_known = false;
            std::fprintf(stderr, "  %-4s %s: %s%s\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.detail.c_str(),
                         !c.pass && known ? "  [known]" : "");
        }
        std::printf("criterion %d: %s  %s (%.1f s)%s\n", id, rep.pass() ? "PASS" : "FAIL", rep.title.c_str(),
                    rep.seconds, rep.pass() || !only_known ? "" : "  [known deviations only]");
        std::fflush(stdout);
        if (!only_known) ++unexpected;
    }
    return unexpected == 0 ? 0 : 1;
}
