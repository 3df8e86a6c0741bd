#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "symconj/symconj.hpp"

using namespace symconj;

namespace {

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(TableJson, RoundTripIsBitExact) {
    for (const auto& t : {build_T_table(2, 3), expand_R_table(2, 2), triple_jump_table(2, 2, true), basic_table(2)}) {
        const auto back = table_from_json(table_to_json(t));
        EXPECT_EQ(back.kind, t.kind);
        EXPECT_EQ(back.n, t.n);
        EXPECT_EQ(back.k, t.k);
        EXPECT_EQ(back.conjugate_closure, t.conjugate_closure);
        ASSERT_EQ(back.rows.size(), t.rows.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            EXPECT_EQ(back.rows[i].coefficients, t.rows[i].coefficients);
            EXPECT_EQ(back.rows[i].weight, t.rows[i].weight);
        }
        EXPECT_LT(order_condition_sums(back, 2).max_magnitude, 1e-12);
    }
}

TEST(TableJson, OrderConditionsBlock) {
    const auto t = build_T_table(2, 2);
    const auto rep = order_condition_sums(t, 2);
    const auto doc = nlohmann::json::parse(table_to_json(t, &rep));
    ASSERT_TRUE(doc.contains("order_conditions"));
    EXPECT_EQ(doc["order_conditions"]["sums"].size(), 3u);
    EXPECT_EQ(doc["order_conditions"]["sums"][0]["label"], "c_{5,1}");
    EXPECT_TRUE(doc["order_conditions"]["sums"][1]["required"].get<bool>());
    EXPECT_FALSE(doc["order_conditions"]["sums"][2]["required"].get<bool>());
    EXPECT_LT(doc["order_conditions"]["max_magnitude"].get<double>(), 1e-13);
}

TEST(TableJson, RejectsMalformedInput) {
    EXPECT_THROW(table_from_json("{"), TableFormatError);
    EXPECT_THROW(table_from_json(R"({"kind":"T","n":2,"k":1,"rows":[]})"), TableFormatError);
    EXPECT_THROW(table_from_json(R"({"kind":"Q","n":2,"k":1,"conjugate_closure":true,"rows":[]})"), TableFormatError);
    EXPECT_THROW(
        table_from_json(
            R"({"kind":"T","n":2,"k":1,"conjugate_closure":true,"rows":[{"weight_num":1,"weight_den":3,"coeffs":[[1,0]]}]})"),
        TableFormatError);
    EXPECT_THROW(
        table_from_json(
            R"({"kind":"T","n":2,"k":1,"conjugate_closure":true,"rows":[{"weight_num":1,"weight_den":2,"coeffs":[[1]]}]})"),
        TableFormatError);
}

TEST(RecordsCsv, HeaderAndEmptyFields) {
    WorkPrecisionRecord r;
    r.method = "T2";
    r.kind = "T";
    r.n = 2;
    r.k = 2;
    r.h = 0.125;
    r.steps = 8;
    r.serial_evals = 128;
    r.effective_evals = 32;
    r.log2_threads = 2;
    r.final_state_rel = 1.5e-9;
    r.status = "failed: a, b";
    std::ostringstream os;
    write_records_csv(os, {r}, {"symconj test", "config {}"});
    const auto l = lines(os.str());
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "# symconj test");
    EXPECT_EQ(l[1], "# config {}");
    EXPECT_EQ(l[2], kRecordHeader);
    EXPECT_EQ(l[3], "T2,T,2,2,0.125,8,128,32,2,,1.5e-09,,,failed: a; b");
}

TEST(RecordsCsv, NumbersRoundTrip) {
    const double v = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_g17(v)), v);
}

TEST(EnergySeriesCsv, StrideKeepsLastPoint) {
    const EnergySeries s{"T1", 0.5, {-0.5, -0.5 * (1 + 1e-9), -0.5, -0.5 * (1 - 2e-9), -0.5}};
    std::ostringstream os;
    write_energy_series_csv(os, {s}, -0.5, 2);
    const auto l = lines(os.str());
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "method,t,energy_rel_error");
    EXPECT_EQ(l[1].substr(0, 6), "T1,1,1");
    EXPECT_EQ(l[2].substr(0, 6), "T1,2,2");
    EXPECT_EQ(l[3], "T1,2.5,0");
}

TEST(GridCsv, Columns) {
    std::ostringstream os;
    const std::vector<double> x{0.0, 0.5};
    const ComplexState u{Complex{1.0, 0.0}, Complex{-2.0, 0.25}};
    write_grid_csv(os, x, u);
    const auto l = lines(os.str());
    ASSERT_EQ(l.size(), 3u);
    EXPECT_EQ(l[0], "x,re,im");
    EXPECT_EQ(l[2], "0.5,-2,0.25");
}

TEST(Verify, SuitePassesAndDetectsFault) {
    const auto ok = run_verification({});
    EXPECT_TRUE(all_passed(ok)) << format_report(ok);
    VerifyOptions bad;
    bad.perturb_t2 = 1e-6;
    const auto res = run_verification(bad);
    EXPECT_FALSE(all_passed(res));
    bool consistency_or_c5 = false;
    for (const auto& r : res)
        if (!r.passed && (r.name == "row consistency (sum = 1)" || r.name == "order conditions T2")) consistency_or_c5 = true;
    EXPECT_TRUE(consistency_or_c5);
}

TEST(Verify, SameSeedSameReport) {
    VerifyOptions o;
    o.seed = 42;
    EXPECT_EQ(format_report(run_verification(o)), format_report(run_verification(o)));
}
