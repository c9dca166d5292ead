#include <gtest/gtest.h>

#include "condasian/errors.hpp"
#include "condasian/job.hpp"

using namespace condasian;

namespace {

int error_line(const std::string& text)
{
    try {
        parse_key_values(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST(ConfigFile, ParsesCommentsAndBlankLines)
{
    const Assignments a = parse_key_values("# grid\n\nsigma = 0.3\r\n  gs-terms=6\nx=2.5");
    ASSERT_EQ(a.size(), 3u);
    EXPECT_EQ(a.at("sigma").value, "0.3");
    EXPECT_EQ(a.at("sigma").line, 3);
    EXPECT_EQ(a.at("gs_terms").value, "6");
    EXPECT_EQ(a.at("x").line, 5);
}

TEST(ConfigFile, RejectsWithLineNumber)
{
    EXPECT_EQ(error_line("r=0.05\nvolatility=0.2\n"), 2);
    EXPECT_EQ(error_line("r=0.05\n\nsigma\n"), 3);
    EXPECT_EQ(error_line("sigma=\n"), 1);
    EXPECT_EQ(error_line("r=0.05\nr=0.06\n"), 2);
    EXPECT_EQ(error_line("=1\n"), 1);
}

TEST(MakeJob, FlagsOverrideFile)
{
    const Assignments file = parse_key_values("sigma=0.3\nstrike=2\npaths=5000\n");
    const JobConfig job = make_job(Command::price, file, {{"sigma", {"0.6", 0}}, {"output", {"csv", 0}}});
    EXPECT_DOUBLE_EQ(job.market.sigma, 0.6);
    EXPECT_EQ(job.output, OutputFormat::csv);
    ASSERT_TRUE(job.mc.has_value());
    EXPECT_EQ(job.mc->n_paths, 5000);
}

TEST(MakeJob, DefaultsDescribeFiveYearGrid)
{
    const JobConfig job = make_job(Command::table2, {}, {});
    EXPECT_DOUBLE_EQ(job.market.r, 0.05);
    EXPECT_DOUBLE_EQ(job.market.b, 1.0);
    EXPECT_DOUBLE_EQ(job.market.maturity, 5.0);
    EXPECT_EQ(job.inversion.gs_terms, 5);
    EXPECT_FALSE(job.mc.has_value());
}

TEST(MakeJob, RejectsBadValues)
{
    EXPECT_THROW(make_job(Command::price, parse_key_values("sigma=abc\n"), {}), ConfigError);
    EXPECT_THROW(make_job(Command::price, parse_key_values("sigma=-1\n"), {}), ConfigError);
    EXPECT_THROW(make_job(Command::price, {}, {{"z-step", {"0.3", 0}}}), ConfigError);
    EXPECT_THROW(make_job(Command::price, parse_key_values("b=2.5\n"), {}), ConfigError);
    EXPECT_THROW(make_job(Command::price, {}, {{"output", {"xml", 0}}}), ConfigError);
    EXPECT_THROW(make_job(Command::price, {}, {{"gs-terms", {"1.5", 0}}}), ConfigError);
    try {
        make_job(Command::price, parse_key_values("r=0.05\nsigma=nan\n"), {});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 2);
    }
}

TEST(Command, RoundTrip)
{
    for (const char* n : {"price", "delta", "curve", "moments", "validate", "table2"})
        EXPECT_STREQ(to_string(parse_command(n)), n);
    EXPECT_THROW(parse_command("greeks"), ConfigError);
}
