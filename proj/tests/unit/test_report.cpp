#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nleq/errors.hpp"
#include "nleq/report.hpp"

using namespace nleq;
using nlohmann::json;

namespace {

GridReport small_grid() {
    const ProblemSpec p = make_problem("simple2");
    return run_grid(p, {"xstart1", p.start("xstart1")}, {RootMethod::newton},
                    {GlobalStrategy::cline, GlobalStrategy::none});
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Report, GridTableHeaderAndCsvColumnsAgree) {
    const GridReport g = small_grid();
    const auto table = lines(format_grid(g, OutputFormat::table));
    ASSERT_EQ(table.size(), 3u);
    std::istringstream head(table[0]);
    std::vector<std::string> cols;
    for (std::string c; head >> c;) cols.push_back(c);
    EXPECT_EQ(cols, (std::vector<std::string>{"Method", "Global", "termcd", "Fcnt", "Jcnt", "Iter", "Message", "Fnorm"}));
    const auto csv = lines(format_grid(g, OutputFormat::csv));
    EXPECT_EQ(csv[0], "Method,Global,termcd,Fcnt,Jcnt,Iter,Message,Fnorm");
    EXPECT_EQ(csv.size(), 3u);
}

TEST(Report, GridJsonNaNBecomesNull) {
    ProblemSpec p = make_problem("simple2");
    p.residual = [](const Vector& x, const Vector&) -> Vector {
        if (x[0] < 1.9) throw std::runtime_error("injected");
        return simple2_residual(x);
    };
    const GridReport g = run_grid(p, {"xstart1", p.start("xstart1")}, {RootMethod::newton}, {GlobalStrategy::cline});
    const json j = json::parse(format_grid(g, OutputFormat::json));
    EXPECT_EQ(j["kind"], "grid");
    ASSERT_EQ(j["rows"].size(), 1u);
    EXPECT_EQ(j["rows"][0]["termcd"], -1);
    EXPECT_TRUE(j["rows"][0]["fnorm"].is_null());
    EXPECT_EQ(j["rows"][0]["message"], "injected");
}

TEST(Report, NumbersKeepTenSignificantDigits) {
    const std::string t = format_grid(small_grid(), OutputFormat::table);
    // scientific with 12 digits after the point
    EXPECT_NE(t.find("e-"), std::string::npos);
    const auto row = lines(t)[1];
    const std::string fnorm = row.substr(row.rfind(' ') + 1);
    EXPECT_GE(fnorm.find('e') - fnorm.find('.') - 1, 10u);
}

TEST(Report, JsonRoundTripReproducesSumsq) {
    const ProblemSpec p = make_problem("dgv-reduced:0121a");
    const ComparisonTable t = run_comparison({p}, {"x0"}, {SolverConfig::make(SolverFamily::lsq)});
    const json j = json::parse(format_comparison(t, OutputFormat::json));
    const Vector x = j["rows"][0]["x"].get<Vector>();
    const double reported = j["rows"][0]["sumsq"].get<double>();
    const double again = sumsq(p, x);
    EXPECT_NEAR(again, reported, 1e-15 * std::max(1.0, reported) + 1e-300);
    EXPECT_EQ(j["rows"][0]["detail"]["singvals"].size(), 6u);
}

TEST(Report, CascadeJsonHasWinner) {
    const ProblemSpec p = make_problem("simple2");
    const CascadeResult c = run_cascade(p, {"xstart2", p.start("xstart2")}, {RootMethod::newton},
                                        {GlobalStrategy::qline});
    const json j = json::parse(format_cascade(c, OutputFormat::json));
    EXPECT_EQ(j["winner"]["method"], "Newton");
    EXPECT_EQ(j["winner"]["global"], "qline");
    EXPECT_LE(j["sumsq"].get<double>(), 1e-16);
}

TEST(Report, CsvQuotesCommas) {
    ComparisonTable t;
    ComparisonRow r;
    r.problem = "p";
    r.start = "s";
    r.solver = "x";
    r.message = "a, \"b\"";
    t.rows.push_back(r);
    const auto csv = lines(format_comparison(t, OutputFormat::csv));
    EXPECT_NE(csv[1].find("\"a, \"\"b\"\"\""), std::string::npos);
}

TEST(Report, CatalogFormats) {
    const auto cat = problem_catalog();
    const json j = json::parse(format_catalog(cat, OutputFormat::json));
    EXPECT_EQ(j["problems"].size(), cat.size());
    EXPECT_EQ(lines(format_catalog(cat, OutputFormat::csv)).size(), cat.size() + 1);
    EXPECT_THROW(parse_output_format("xml"), InputError);
}
