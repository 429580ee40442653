#include <catch2/catch_amalgamated.hpp>

#include "fep/classify.hpp"
#include "fep/parser.hpp"

#include "helpers.hpp"

using namespace fep;

namespace {

struct Bench {
    SourceUnit buggy;
    SourceUnit fixed;
    std::string fn;
    AlignedInstrumentation align;

    Bench(const std::string& b, const std::string& f, std::string fn_name)
        : buggy(test::load_corpus(b)), fixed(test::load_corpus(f)), fn(std::move(fn_name)) {
        StatementScript s = statement_script(test::fn_of(buggy, fn), test::fn_of(fixed, fn));
        align = instrument_pair(test::fn_of(buggy, fn), test::fn_of(fixed, fn), s);
    }

    PairedExecution unit_pair(Value arg) {
        InputVector in;
        in.args = {std::move(arg)};
        PairedExecution pe;
        pe.mode = Mode::Unit;
        pe.buggy = execute_unit(buggy, fn, in, align.buggy_plan());
        pe.fixed = execute_unit(fixed, fn, in, align.fixed_plan());
        pe.alignment = align;
        return pe;
    }
};

}  // namespace

TEST_CASE("closure of each flag") {
    CHECK(close_flag(FepFlag::IntFep, Mode::Sys).flags ==
          std::set<FepFlag>{FepFlag::IntFep, FepFlag::ExtFep, FepFlag::SysFep});
    CHECK(close_flag(FepFlag::IntFep, Mode::Unit).flags ==
          std::set<FepFlag>{FepFlag::IntFep, FepFlag::ExtFep});
    CHECK(close_flag(FepFlag::ExtFep, Mode::Unit).flags == std::set<FepFlag>{FepFlag::ExtFep});
    CHECK(close_flag(FepFlag::ExtFep, Mode::Sys).flags ==
          std::set<FepFlag>{FepFlag::ExtFep, FepFlag::SysFep});
    CHECK(close_flag(FepFlag::SysFep, Mode::Sys).flags == std::set<FepFlag>{FepFlag::SysFep});
    CHECK_THROWS_AS(close_flag(FepFlag::SysFep, Mode::Unit), DomainError);
}

TEST_CASE("detected fault is no FEP") {
    Bench bench("fig1_int_buggy.mlang", "fig1_int_fixed.mlang", "f");
    VerdictSet v = classify(bench.unit_pair(int64_t{4}));
    CHECK(v.no_fep());
    CHECK(v.detectable);
    CHECK(v.infected);
}

TEST_CASE("masked state divergence is internal and external FEP") {
    Bench bench("fig1_int_buggy.mlang", "fig1_int_fixed.mlang", "f");
    VerdictSet v = classify(bench.unit_pair(int64_t{5}));
    CHECK(v.flags == std::set<FepFlag>{FepFlag::IntFep, FepFlag::ExtFep});
    CHECK_FALSE(v.detectable);
    CHECK(v.infected);
}

TEST_CASE("return-point divergence without interior divergence is external only") {
    Bench bench("fig1_bool_buggy.mlang", "fig1_bool_fixed.mlang", "f");
    VerdictSet v = classify(bench.unit_pair(int64_t{4}));
    CHECK(v.flags == std::set<FepFlag>{FepFlag::ExtFep});
    CHECK_FALSE(v.detectable);
    CHECK(v.infected);
}

TEST_CASE("identical executions are clean noFEP") {
    Bench bench("fig3_a.mlang", "fig3_a.mlang", "test");
    VerdictSet v = classify(bench.unit_pair(int64_t{7}));
    CHECK(v.no_fep());
    CHECK_FALSE(v.detectable);
    CHECK_FALSE(v.infected);
}

TEST_CASE("unaligned points are skipped during comparison") {
    Bench bench("fig3_a.mlang", "fig3_d.mlang", "test");
    // y = (x+1) % 2 equals x+1 exactly on {-2,-1,0}: nothing observable differs
    VerdictSet masked = classify(bench.unit_pair(int64_t{-1}));
    CHECK(masked.no_fep());
    CHECK_FALSE(masked.infected);
    VerdictSet seen = classify(bench.unit_pair(int64_t{3}));
    CHECK(seen.no_fep());
    CHECK(seen.detectable);
}

TEST_CASE("different branches with equal states count as internal FEP") {
    SourceUnit buggy = parse(
        "fn p(x: int)->int { let r: int = 0; if (x > 0) { r = 1; } else { r = 1; } return r; }");
    SourceUnit fixed = parse(
        "fn p(x: int)->int { let r: int = 0; if (x >= 0) { r = 1; } else { r = 1; } return r; }");
    StatementScript s = statement_script(test::fn_of(buggy, "p"), test::fn_of(fixed, "p"));
    AlignedInstrumentation align =
        instrument_pair(test::fn_of(buggy, "p"), test::fn_of(fixed, "p"), s);
    InputVector in;
    in.args = {int64_t{0}};
    PairedExecution pe;
    pe.mode = Mode::Unit;
    pe.buggy = execute_unit(buggy, "p", in, align.buggy_plan());
    pe.fixed = execute_unit(fixed, "p", in, align.fixed_plan());
    pe.alignment = align;
    VerdictSet v = classify(pe);
    CHECK(v.flags == std::set<FepFlag>{FepFlag::IntFep, FepFlag::ExtFep});
    CHECK_FALSE(v.detectable);
}

TEST_CASE("system-level branches of the decision procedure") {
    SourceUnit buggy = test::load_corpus("pipeline_buggy.mlang");
    SourceUnit fixed = test::load_corpus("pipeline_fixed.mlang");
    StatementScript s =
        statement_script(test::fn_of(buggy, "scale"), test::fn_of(fixed, "scale"));
    AlignedInstrumentation align =
        instrument_pair(test::fn_of(buggy, "scale"), test::fn_of(fixed, "scale"), s);

    auto pair_for = [&](int64_t x) {
        InputVector in;
        in.args = {Value{IntArray{x}}};
        SystemRun rb = execute_system(buggy, in, "scale", align.buggy_plan());
        SystemRun rf = execute_system(fixed, in, "scale", align.fixed_plan());
        REQUIRE(rb.invocations.size() == 1);
        REQUIRE(rf.invocations.size() == 1);
        PairedExecution pe;
        pe.mode = Mode::Sys;
        pe.buggy = rb.invocations[0];
        pe.fixed = rf.invocations[0];
        pe.alignment = align;
        pe.sys_out = {rb.system.out, rf.system.out};
        return pe;
    };

    // parity keeps the output equal while the unit result differs
    VerdictSet sys_only = classify(pair_for(2));
    CHECK(sys_only.flags == std::set<FepFlag>{FepFlag::SysFep});
    CHECK_FALSE(sys_only.detectable);

    // interior squeeze closes all the way up the chain
    VerdictSet full = classify(pair_for(5));
    CHECK(full.flags ==
          std::set<FepFlag>{FepFlag::IntFep, FepFlag::ExtFep, FepFlag::SysFep});

    // output differs: detected, no FEP
    VerdictSet detected = classify(pair_for(-1));
    CHECK(detected.no_fep());
    CHECK(detected.detectable);

    // identical behaviour end to end
    VerdictSet clean = classify(pair_for(1));
    CHECK(clean.no_fep());
    CHECK_FALSE(clean.infected);
}

TEST_CASE("detection wins even when interior states differ") {
    // for x = 4 the interior state differs (12 vs 6) but so does the result
    Bench bench("fig1_int_buggy.mlang", "fig1_int_fixed.mlang", "f");
    VerdictSet v = classify(bench.unit_pair(int64_t{4}));
    CHECK(v.no_fep());
    CHECK(v.detectable);
}

TEST_CASE("missing system output pair is rejected in sys mode") {
    Bench bench("fig1_int_buggy.mlang", "fig1_int_fixed.mlang", "f");
    PairedExecution pe = bench.unit_pair(int64_t{4});
    pe.mode = Mode::Sys;
    CHECK_THROWS_AS(classify(pe), AlignmentMismatch);
}

TEST_CASE("traces outside the instrumentation are rejected") {
    Bench bench("fig1_int_buggy.mlang", "fig1_int_fixed.mlang", "f");
    PairedExecution pe = bench.unit_pair(int64_t{4});
    pe.buggy.trace.push_back(StateSnapshot{99, {}});
    CHECK_THROWS_AS(classify(pe), AlignmentMismatch);
}

TEST_CASE("diverging invocation counts force detection") {
    Bench bench("fig1_int_buggy.mlang", "fig1_int_fixed.mlang", "f");
    PairedExecution pe = bench.unit_pair(int64_t{5});  // would otherwise be intFEP
    pe.mode = Mode::Sys;
    pe.sys_out = {{}, {}};
    pe.control_divergent = true;
    VerdictSet v = classify(pe);
    CHECK(v.no_fep());
    CHECK(v.detectable);
}
