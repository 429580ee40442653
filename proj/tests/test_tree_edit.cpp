#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "fep/tree_edit.hpp"

#include "helpers.hpp"

using namespace fep;

namespace {

std::vector<std::string> op_kinds(const StatementScript& s) {
    std::vector<std::string> out;
    for (const auto& op : s.ops) out.push_back(edit_kind_name(op.kind));
    return out;
}

StatementScript corpus_script(const std::string& buggy, const std::string& fixed,
                              const std::string& fn) {
    static std::map<std::string, SourceUnit> cache;
    if (!cache.count(buggy)) cache[buggy] = test::load_corpus(buggy);
    if (!cache.count(fixed)) cache[fixed] = test::load_corpus(fixed);
    return statement_script(test::fn_of(cache[buggy], fn), test::fn_of(cache[fixed], fn));
}

}  // namespace

TEST_CASE("identical trees cost zero and keep everything") {
    SourceUnit u = test::load_corpus("fig3_a.mlang");
    EditScript s = tree_edit_distance(*u.functions[0].body, *u.functions[0].body);
    CHECK(s.cost == 0);
    for (const auto& op : s.ops) CHECK(op.kind == EditKind::Keep);
}

TEST_CASE("changed statement produces keep, change, keep") {
    StatementScript s = corpus_script("fig3_a.mlang", "fig3_b.mlang", "test");
    REQUIRE(op_kinds(s) == std::vector<std::string>{"KEEP", "CHANGE", "KEEP"});
    CHECK(s.ops[0].source_text == "let y: int = x + 1;");
    CHECK(s.ops[1].source_text == "y = y % 2;");
    CHECK(s.ops[1].target_text == "y = y % 3;");
    CHECK(s.ops[2].source_text == "return y;");
    CHECK(s.cost == 1);
}

TEST_CASE("inserted statement lands between the kept ones") {
    StatementScript s = corpus_script("fig3_a.mlang", "fig3_c.mlang", "test");
    REQUIRE(op_kinds(s) == std::vector<std::string>{"KEEP", "INSERT", "KEEP", "KEEP"});
    CHECK(s.ops[1].target_text == "y = y * 3;");
    CHECK(s.cost == 1);
}

TEST_CASE("deleted statement produces keep, delete, keep") {
    StatementScript s = corpus_script("fig3_a.mlang", "fig3_d.mlang", "test");
    REQUIRE(op_kinds(s) == std::vector<std::string>{"KEEP", "DELETE", "KEEP"});
    CHECK(s.ops[1].source_text == "y = y % 2;");
    CHECK(s.cost == 1);
}

TEST_CASE("node-level costs for the figure pairs") {
    SourceUnit a = test::load_corpus("fig3_a.mlang");
    SourceUnit b = test::load_corpus("fig3_b.mlang");
    SourceUnit c = test::load_corpus("fig3_c.mlang");
    CHECK(tree_edit_distance(*a.functions[0].body, *b.functions[0].body).cost == 1);
    // inserted `y = y * 3;` is five nodes
    CHECK(tree_edit_distance(*a.functions[0].body, *c.functions[0].body).cost == 5);
}

TEST_CASE("every node appears in exactly one op") {
    std::mt19937_64 rng(7);
    std::vector<std::string> alphabet{"a", "b", "c"};
    for (int round = 0; round < 100; ++round) {
        auto ta = test::random_labeled_tree(rng, 8, alphabet);
        auto tb = test::random_labeled_tree(rng, 8, alphabet);
        test::number_tree(*ta);
        test::number_tree(*tb);
        EditScript s = tree_edit_distance(*ta, *tb);
        std::set<int> src, dst;
        int non_keep = 0;
        for (const auto& op : s.ops) {
            if (op.source_node >= 0) CHECK(src.insert(op.source_node).second);
            if (op.target_node >= 0) CHECK(dst.insert(op.target_node).second);
            if (op.kind != EditKind::Keep) ++non_keep;
        }
        size_t na = 0, nb = 0;
        walk_preorder(*ta, [&](const AstNode&) { ++na; });
        walk_preorder(*tb, [&](const AstNode&) { ++nb; });
        CHECK(src.size() == na);
        CHECK(dst.size() == nb);
        CHECK(s.cost == non_keep);
    }
}

TEST_CASE("cost is symmetric with insert/delete swapped") {
    std::mt19937_64 rng(11);
    std::vector<std::string> alphabet{"a", "b", "c"};
    for (int round = 0; round < 60; ++round) {
        auto ta = test::random_labeled_tree(rng, 7, alphabet);
        auto tb = test::random_labeled_tree(rng, 7, alphabet);
        EditScript ab = tree_edit_distance(*ta, *tb);
        EditScript ba = tree_edit_distance(*tb, *ta);
        CHECK(ab.cost == ba.cost);
        int ins_ab = 0, del_ab = 0, ins_ba = 0, del_ba = 0;
        for (const auto& op : ab.ops) {
            ins_ab += op.kind == EditKind::Insert;
            del_ab += op.kind == EditKind::Delete;
        }
        for (const auto& op : ba.ops) {
            ins_ba += op.kind == EditKind::Insert;
            del_ba += op.kind == EditKind::Delete;
        }
        CHECK(ins_ab == del_ba);
        CHECK(del_ab == ins_ba);
    }
}

TEST_CASE("identity and triangle inequality") {
    std::mt19937_64 rng(13);
    std::vector<std::string> alphabet{"a", "b", "c"};
    for (int round = 0; round < 40; ++round) {
        auto ta = test::random_labeled_tree(rng, 6, alphabet);
        auto tb = test::random_labeled_tree(rng, 6, alphabet);
        auto tc = test::random_labeled_tree(rng, 6, alphabet);
        CHECK(tree_edit_distance(*ta, *ta).cost == 0);
        int ab = tree_edit_distance(*ta, *tb).cost;
        int bc = tree_edit_distance(*tb, *tc).cost;
        int ac = tree_edit_distance(*ta, *tc).cost;
        CHECK(ac <= ab + bc);
    }
}

TEST_CASE("matches the exhaustive mapping search on small pairs") {
    std::vector<std::string> alphabet{"a", "b", "c"};
    // exhaustive for combined size <= 5; the acceptance suite pushes further
    for (int na = 1; na <= 4; ++na) {
        auto as = test::all_labeled_trees(na, alphabet);
        for (int nb = 1; na + nb <= 5; ++nb) {
            auto bs = test::all_labeled_trees(nb, alphabet);
            for (const auto& ta : as) {
                for (const auto& tb : bs) {
                    int zs = tree_edit_distance(*ta, *tb).cost;
                    int ref = test::brute_force_ted(*ta, *tb);
                    REQUIRE(zs == ref);
                }
            }
        }
    }
}

TEST_CASE("matches the exhaustive search on random pairs up to six nodes") {
    std::mt19937_64 rng(17);
    std::vector<std::string> alphabet{"a", "b", "c"};
    for (int round = 0; round < 300; ++round) {
        auto ta = test::random_labeled_tree(rng, 6, alphabet);
        auto tb = test::random_labeled_tree(rng, 6, alphabet);
        int zs = tree_edit_distance(*ta, *tb).cost;
        int ref = test::brute_force_ted(*ta, *tb);
        REQUIRE(zs == ref);
    }
}

TEST_CASE("change inside a loop keeps the loop as one opaque statement") {
    StatementScript s = corpus_script("loop_weight_buggy.mlang", "loop_weight_fixed.mlang",
                                      "weighted_ss");
    std::vector<std::string> kinds = op_kinds(s);
    REQUIRE(kinds == std::vector<std::string>{"KEEP", "KEEP", "CHANGE", "KEEP"});
    CHECK(s.ops[2].source_kind == NodeKind::While);
}
