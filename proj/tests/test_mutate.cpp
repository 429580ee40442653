#include <catch2/catch_amalgamated.hpp>

#include "fep/mutate.hpp"
#include "fep/parser.hpp"
#include "fep/pretty.hpp"
#include "fep/tree_edit.hpp"

#include "helpers.hpp"

using namespace fep;

namespace {

InputPool pool_of(std::vector<InputVector> inputs) {
    InputPool p;
    int i = 0;
    for (auto& in : inputs) p.inputs.emplace_back("i" + std::to_string(i++), std::move(in));
    return p;
}

InputVector one_int(int64_t v) {
    InputVector in;
    in.args = {v};
    return in;
}

// Counts what the generator should produce for the three-statement body,
// walking the AST with its own rules.
int expected_fig3a_mutants(const SourceUnit& u) {
    int arith_binops = 0, int_literals = 0, int_expr_nodes = 0, deletable = 0;
    const FunctionDef& fn = *u.find_function("test");
    std::function<void(const AstNode&, const AstNode*, size_t)> walk =
        [&](const AstNode& n, const AstNode* parent, size_t idx) {
            bool lvalue = parent && parent->kind == NodeKind::Assign && idx == 0;
            if (n.kind == NodeKind::BinOp) ++arith_binops;
            if (n.kind == NodeKind::Literal) ++int_literals;
            bool is_expr = n.kind == NodeKind::BinOp || n.kind == NodeKind::VarRef ||
                           n.kind == NodeKind::Literal;
            if (is_expr && !lvalue) ++int_expr_nodes;
            if (parent && parent->kind == NodeKind::Block && n.kind == NodeKind::Assign)
                ++deletable;
            for (size_t i = 0; i < n.children.size(); ++i) walk(*n.children[i], &n, i);
        };
    walk(*fn.body, nullptr, 0);
    // + and % each swap to the four other arithmetic operators
    int aor = arith_binops * 4;
    // literal 1 -> {0, 2, -1}; literal 2 -> {0, 1, 3, -2}
    int crp = 3 + 4;
    REQUIRE(int_literals == 2);
    // every int expression accepts exactly the arithmetic negation
    int uoi = int_expr_nodes;
    return aor + crp + uoi + deletable;
}

}  // namespace

TEST_CASE("arithmetic replacement includes the classic example") {
    SourceUnit u = parse("fn m(x: int)->int { x = 2 + x; return x; }");
    auto mutants = generate_mutants(u, "m");
    bool found = false;
    for (const auto& m : mutants)
        if (pretty(m.mutated).find("x = 2 * x;") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("single-statement functions are rejected") {
    SourceUnit u = parse("fn r(y: int)->int { return y; }");
    CHECK_THROWS_AS(generate_mutants(u, "r"), DomainError);
}

TEST_CASE("mutant count matches an independent enumeration of loci") {
    SourceUnit u = test::load_corpus("fig3_a.mlang");
    auto mutants = generate_mutants(u, "test");
    CHECK(static_cast<int>(mutants.size()) == expected_fig3a_mutants(u));
    CHECK(mutants.size() == 23);
}

TEST_CASE("every mutant validates and differs in exactly one statement") {
    SourceUnit u = test::load_corpus("fig3_a.mlang");
    for (const auto& m : generate_mutants(u, "test")) {
        CHECK_NOTHROW(validate(m.mutated));
        CHECK_FALSE(structurally_equal(m.mutated, u));
        StatementScript s = statement_script(*m.mutated.find_function("test"),
                                             *m.parent.find_function("test"));
        int non_keep = 0;
        for (const auto& op : s.ops) non_keep += op.kind != EditKind::Keep;
        CHECK(non_keep == 1);
        // re-parse of the pretty-printed mutant round-trips
        CHECK(structurally_equal(parse(pretty(m.mutated)), m.mutated));
    }
}

TEST_CASE("strong kill on a value-changing mutant") {
    SourceUnit u = parse("fn m(x: int)->int { x = 2 + x; return x; }");
    auto mutants = generate_mutants(u, "m");
    const Mutant* star = nullptr;
    for (const auto& m : mutants)
        if (m.operator_id == "aor:+->*") star = &m;
    REQUIRE(star != nullptr);
    KillabilityResult r = strong_kill_filter(*star, "m", pool_of({one_int(3)}), {2});
    CHECK(r.killed);  // 5 vs 6
    REQUIRE(r.killing_inputs.size() == 1);
    CHECK(r.killing_inputs[0] == "i0");
}

TEST_CASE("behaviourally equivalent mutants stay unkilled") {
    SourceUnit u = parse("fn e(x: int)->int { let y: int = x + 0; return y; }");
    auto mutants = generate_mutants(u, "e");
    const Mutant* equiv = nullptr;
    for (const auto& m : mutants)
        if (m.operator_id == "aor:+->-") equiv = &m;  // x - 0 == x + 0 for all x
    REQUIRE(equiv != nullptr);
    KillabilityResult r =
        strong_kill_filter(*equiv, "e", pool_of({one_int(-7), one_int(0), one_int(42)}), {2});
    CHECK_FALSE(r.killed);
    CHECK(r.killing_inputs.empty());
    CHECK(r.executions == 3);
}

TEST_CASE("a looping mutant is killed through the error token") {
    SourceUnit u = parse(
        "fn t(n: int)->int { let i: int = 0; while (i < n) { i = i + 2; } return i; }");
    auto mutants = generate_mutants(u, "t");
    const Mutant* looper = nullptr;
    for (const auto& m : mutants)
        if (m.operator_id == "ror:<->!=") looper = &m;
    REQUIRE(looper != nullptr);
    ExecLimits limits;
    limits.max_steps = 10000;
    KillabilityResult r = strong_kill_filter(*looper, "t", pool_of({one_int(5)}), {3}, limits);
    CHECK(r.killed);  // odd bound never hits equality; budget error vs normal return
}

TEST_CASE("a pool that misses the locus is reported") {
    SourceUnit u = parse(
        "fn nc(x: int)->int {\n"
        "  let r: int = 0;\n"
        "  if (x > 1000) {\n"
        "    r = x / 2;\n"
        "  }\n"
        "  return r;\n"
        "}\n");
    auto mutants = generate_mutants(u, "nc");
    const Mutant* inner = nullptr;
    for (const auto& m : mutants)
        if (m.operator_id == "aor:/->+") inner = &m;
    REQUIRE(inner != nullptr);
    CHECK(inner->locus_span.line == 4);
    CHECK_THROWS_AS(strong_kill_filter(*inner, "nc", pool_of({one_int(1)}),
                                       {inner->locus_span.line}),
                    NoCoveringInput);
}
