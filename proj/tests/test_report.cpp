#include <catch2/catch_amalgamated.hpp>

#include "fep/parser.hpp"
#include "fep/report.hpp"
#include "fep/tree_edit.hpp"

#include "helpers.hpp"

using namespace fep;

namespace {

FixPattern pattern_of(const std::string& buggy, const std::string& fixed,
                      const std::string& fn) {
    SourceUnit b = test::load_corpus(buggy);
    SourceUnit f = test::load_corpus(fixed);
    return classify_fix_pattern(statement_script(test::fn_of(b, fn), test::fn_of(f, fn)));
}

VerdictRecord rec(const std::string& fault, std::vector<std::string> flags, bool detectable,
                  Mode mode = Mode::Unit) {
    VerdictRecord r;
    r.fault_id = fault;
    r.input_id = "i";
    r.mode = mode;
    r.verdicts = std::move(flags);
    r.detectable = detectable;
    r.infected = detectable || !r.verdicts.empty();
    return r;
}

}  // namespace

TEST_CASE("fix patterns on the corpus pairs") {
    CHECK(pattern_of("guard_throw_buggy.mlang", "guard_throw_fixed.mlang", "safe_div") ==
          FixPattern::AddIfReturn);
    CHECK(pattern_of("clamp_fix_buggy.mlang", "clamp_fix_fixed.mlang", "clamp_high") ==
          FixPattern::AddIfReturn);
    CHECK(pattern_of("checksum_buggy.mlang", "checksum_fixed.mlang", "checksum") ==
          FixPattern::ChangeReturn);
    CHECK(pattern_of("midpoint_buggy.mlang", "midpoint_fixed.mlang", "midpoint") ==
          FixPattern::ChangeReturn);
    CHECK(pattern_of("fig3_a.mlang", "fig3_b.mlang", "test") == FixPattern::Other);
    CHECK(pattern_of("loop_weight_buggy.mlang", "loop_weight_fixed.mlang", "weighted_ss") ==
          FixPattern::Other);
}

TEST_CASE("an all-keep script is Other") {
    SourceUnit a = test::load_corpus("fig3_a.mlang");
    StatementScript s = statement_script(test::fn_of(a, "test"), test::fn_of(a, "test"));
    CHECK(classify_fix_pattern(s) == FixPattern::Other);
}

TEST_CASE("a rewritten return wins over an added guard") {
    SourceUnit b = parse(
        "fn both(x: int)->int {\n"
        "  let y: int = x;\n"
        "  return y;\n"
        "}\n");
    SourceUnit f = parse(
        "fn both(x: int)->int {\n"
        "  if (x < 0) {\n"
        "    return 0;\n"
        "  }\n"
        "  let y: int = x;\n"
        "  return y + 1;\n"
        "}\n");
    StatementScript s = statement_script(test::fn_of(b, "both"), test::fn_of(f, "both"));
    CHECK(classify_fix_pattern(s) == FixPattern::ChangeReturn);
}

TEST_CASE("aggregation counts, proportions and totals") {
    std::vector<VerdictRecord> records = {
        rec("A", {}, true),
        rec("A", {"intFEP", "extFEP"}, false),
        rec("A", {}, false),
        rec("B", {"extFEP"}, false),
        rec("B", {}, true),
    };
    AggregateReport agg = aggregate(records);
    REQUIRE(agg.faults.size() == 2);
    const FaultReport& a = agg.faults[0];
    CHECK(a.fault_id == "A");
    CHECK(a.executions == 3);
    CHECK(a.externally_detectable == 1);
    CHECK(a.int_fep.count == 1);
    CHECK(a.ext_fep.count == 1);
    CHECK(a.int_fep.proportion == Catch::Approx(1.0 / 3));
    CHECK(a.int_fep.ci.low <= 1.0 / 3);
    CHECK(a.int_fep.ci.high >= 1.0 / 3);

    CHECK(agg.totals.executions == 5);
    CHECK(agg.totals.externally_detectable == 2);
    CHECK(agg.totals.int_fep.count == 1);
    CHECK(agg.totals.ext_fep.count == 2);
    // column sums match the per-fault rows
    int64_t sum_exec = 0, sum_int = 0, sum_ext = 0;
    for (const auto& r : agg.faults) {
        sum_exec += r.executions;
        sum_int += r.int_fep.count;
        sum_ext += r.ext_fep.count;
        CHECK(r.int_fep.count <= r.ext_fep.count);
    }
    CHECK(sum_exec == agg.totals.executions);
    CHECK(sum_int == agg.totals.int_fep.count);
    CHECK(sum_ext == agg.totals.ext_fep.count);
}

TEST_CASE("empty input aggregates to an empty report") {
    AggregateReport agg = aggregate({});
    CHECK(agg.faults.empty());
    CHECK_FALSE(agg.has_totals);
}

TEST_CASE("all-clean group reports zero proportions") {
    AggregateReport agg = aggregate({rec("A", {}, false), rec("A", {}, false)});
    CHECK(agg.faults[0].int_fep.proportion == 0.0);
    CHECK(agg.faults[0].int_fep.ci.low == 0.0);
}

TEST_CASE("mixed modes cannot be aggregated") {
    CHECK_THROWS_AS(aggregate({rec("A", {}, false), rec("B", {}, false, Mode::Sys)}),
                    MixedMode);
}

TEST_CASE("csv mirrors the tabular shape") {
    std::vector<VerdictRecord> records = {
        rec("A", {"intFEP", "extFEP"}, false),
        rec("A", {}, true),
    };
    AggregateReport agg = aggregate(records);
    std::string csv = to_csv(agg);
    CHECK(csv.find("fault_id,executions,externally_detectable,int_fep,ext_fep,") == 0);
    CHECK(csv.find("A,2,1,1,1,0.5000,0.5000,Other\n") != std::string::npos);
    CHECK(csv.find("total,2,1,1,1,") != std::string::npos);

    std::vector<VerdictRecord> sys_records = {
        rec("S", {"sysFEP"}, false, Mode::Sys),
    };
    std::string sys_csv = to_csv(aggregate(sys_records));
    CHECK(sys_csv.find("fault_id,executions,externally_detectable,sys_fep,int_fep,ext_fep,") ==
          0);
}

TEST_CASE("rounding helper keeps four decimals") {
    CHECK(round4(0.11363636) == "0.1136");
    CHECK(round4(0.0) == "0.0000");
    CHECK(round4(1.0) == "1.0000");
}
