#include <gtest/gtest.h>

#include <chrono>

#include "logiq/dnnf.hpp"
#include "support.hpp"

using namespace logiq;

namespace {

// The four-variable circuit (b1∧b2)∨(b2∧b3)∨(b3∧b4), built gate by gate over ((b1 b2)(b3 b4)).
StructuredDnnf hand_built_example() {
    DnnfBuilder b(Vtree::parse("((1 2) (3 4))"));
    auto lit = [&](Vertex v) { return b.raw(Gate{GateKind::Lit, v, true, {}, -1}); };
    auto gate = [&](GateKind k, std::vector<int> in, int node) { return b.raw(Gate{k, -1, true, std::move(in), node}); };
    int b1 = lit(0), b2 = lit(1), b3 = lit(2), b4 = lit(3);
    int top = b.raw(Gate{});
    int left = gate(GateKind::Or, {gate(GateKind::And, {b1, b2}, 1)}, 1);
    int right = gate(GateKind::Or, {gate(GateKind::And, {b3, b4}, 4)}, 4);
    int root = gate(GateKind::Or, {gate(GateKind::And, {left, top}, 0), gate(GateKind::And, {b2, b3}, 0), gate(GateKind::And, {top, right}, 0)}, 0);
    return b.finish(root);
}

bool h(const VertexSet& u) {
    auto in = [&](Vertex v) { return contains(u, v); };
    return (in(0) && in(1)) || (in(1) && in(2)) || (in(2) && in(3));
}

VertexSet mask_set(unsigned m, const VertexSet& vars) {
    VertexSet s;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (m >> i & 1) s.push_back(vars[i]);
    return s;
}

// D(U) iff some pair accepts (U ∩ side1, U ∩ side2).
bool split_agrees(const StructuredDnnf& d, const SeparatorSplit& s) {
    const VertexSet vars = d.vtree().variables();
    for (unsigned m = 0; m < (1u << vars.size()); ++m) {
        VertexSet u = mask_set(m, vars);
        VertexSet a = set_intersection(u, s.side1), b = set_intersection(u, s.side2);
        bool any = false;
        for (const auto& p : s.pairs) any = any || (p.first.evaluate(a) && p.second.evaluate(b));
        if (any != d.evaluate(u)) return false;
    }
    return true;
}

// A random DNF over the vtree's variables, built with apply.
StructuredDnnf random_dnf(testsupport::Rng& rng, const Vtree& vt) {
    const VertexSet vars = vt.variables();
    StructuredDnnf acc = constant_circuit(vt, false);
    int terms = testsupport::uniform(rng, 1, 4);
    for (int t = 0; t < terms; ++t) {
        StructuredDnnf term = constant_circuit(vt, true);
        for (Vertex v : vars) {
            int pick = testsupport::uniform(rng, 0, 2);
            if (pick == 2) continue;
            DnnfBuilder b(vt);
            term = apply(ApplyOp::And, term, b.finish(b.literal(v, pick == 1)));
        }
        acc = apply(ApplyOp::Or, acc, term);
    }
    return acc;
}

} // namespace

TEST(Vtree, ParsePrintAndRestructure) {
    Vtree t = Vtree::parse("((1 2) (3 (4 5)))");
    EXPECT_EQ(t.to_string(), "((1 2) (3 (4 5)))");
    EXPECT_EQ(t.leaf_count(), 5);
    EXPECT_EQ(t.variables(), (VertexSet{0, 1, 2, 3, 4}));
    int right = t.right(t.root());
    EXPECT_EQ(t.subtree(right).to_string(), "(3 (4 5))");
    EXPECT_EQ(t.without_subtree(right).to_string(), "(1 2)");
    EXPECT_EQ(t.without_subtree(t.left(t.root())).to_string(), "(3 (4 5))");
    EXPECT_EQ(t.lca(t.leaf_of(0), t.leaf_of(1)), t.left(t.root()));
    EXPECT_THROW(Vtree::parse("((1 2)"), ParseError);
    EXPECT_THROW(Vtree::parse("(1 1)"), ParseError);
}

TEST(Dnnf, HandBuiltExampleMatchesTheFormula) {
    StructuredDnnf d = hand_built_example();
    EXPECT_TRUE(d.check_structured().empty());
    int models = 0;
    for (unsigned m = 0; m < 16; ++m) {
        VertexSet u = mask_set(m, {0, 1, 2, 3});
        EXPECT_EQ(d.evaluate(u), h(u));
        models += h(u);
    }
    EXPECT_EQ(models, 8);
    EXPECT_EQ(d.enumerate_models().size(), 8u);
    EXPECT_EQ(d.width(), 3);
}

TEST(Dnnf, RejectsCircuitsThatIgnoreTheVtree) {
    Vtree vt = Vtree::parse("((1 2) (3 4))");
    // AND of b1 and b2 claimed at the root: both inputs sit in the left subtree.
    std::vector<Gate> gates{{GateKind::Lit, 0, true, {}, 2}, {GateKind::Lit, 1, true, {}, 3}, {GateKind::And, -1, true, {0, 1}, 0}};
    EXPECT_THROW(StructuredDnnf(vt, gates), InvalidArgument);
    DnnfBuilder b(vt);
    EXPECT_THROW(b.conjoin(b.literal(0), b.literal(0)), InvalidArgument);
}

TEST(Dnnf, TextRoundTrip) {
    StructuredDnnf d = hand_built_example();
    StructuredDnnf back = StructuredDnnf::parse(d.to_text());
    EXPECT_EQ(back.to_text(), d.to_text());
    EXPECT_THROW(StructuredDnnf::parse("nnf 1 1\nV 1\nX\n"), ParseError);
}

TEST(Dnnf, BuilderFoldsConstants) {
    DnnfBuilder b(Vtree::parse("(1 2)"));
    int x = b.literal(0);
    EXPECT_EQ(b.conjoin(x, b.top()), x);
    EXPECT_TRUE(b.is_false(b.conjoin(x, b.bottom())));
    EXPECT_TRUE(b.is_true(b.disjoin({x, b.top()})));
    EXPECT_EQ(b.disjoin({x, b.bottom(), x}), x);
}

TEST(Dnnf, ExampleSplitHasThreePairs) {
    StructuredDnnf d = hand_built_example();
    const Vtree& vt = d.vtree();
    SeparatorSplit s = split(d, {vt.root(), vt.left(vt.root())});
    EXPECT_EQ(s.side1, (VertexSet{0, 1}));
    EXPECT_EQ(s.pairs.size(), 3u);
    EXPECT_TRUE(split_agrees(d, s));
    for (const auto& p : s.pairs) {
        EXPECT_LE(p.first.width(), d.width());
        EXPECT_LE(p.second.width(), d.width());
    }
}

TEST(Dnnf, SplitBiconditionalOnRandomCircuits) {
    testsupport::Rng rng(99);
    for (int t = 0; t < 150; ++t) {
        Vtree vt = testsupport::random_vtree(rng, testsupport::uniform(rng, 2, 6));
        StructuredDnnf d = random_dnf(rng, vt);
        ASSERT_TRUE(d.check_structured().empty());
        for (int u = 1; u < vt.size(); ++u) {
            SeparatorSplit s = split(d, {vt.parent(u), u});
            EXPECT_TRUE(split_agrees(d, s)) << d.to_text();
            for (const auto& p : s.pairs) {
                EXPECT_LE(p.first.width(), d.width());
                EXPECT_LE(p.second.width(), d.width());
                EXPECT_TRUE(p.first.check_structured().empty());
                EXPECT_TRUE(p.second.check_structured().empty());
            }
        }
    }
}

TEST(Dnnf, ApplyIsPointwise) {
    testsupport::Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        Vtree vt = testsupport::random_vtree(rng, testsupport::uniform(rng, 1, 5));
        StructuredDnnf x = random_dnf(rng, vt), y = random_dnf(rng, vt);
        StructuredDnnf both = apply(ApplyOp::And, x, y), either = apply(ApplyOp::Or, x, y);
        const VertexSet vars = vt.variables();
        for (unsigned m = 0; m < (1u << vars.size()); ++m) {
            VertexSet u = mask_set(m, vars);
            EXPECT_EQ(both.evaluate(u), x.evaluate(u) && y.evaluate(u));
            EXPECT_EQ(either.evaluate(u), x.evaluate(u) || y.evaluate(u));
        }
    }
}

TEST(Dnnf, ModelEnumerationMatchesEvaluation) {
    testsupport::Rng rng(8);
    for (int t = 0; t < 60; ++t) {
        Vtree vt = testsupport::random_vtree(rng, testsupport::uniform(rng, 1, 7));
        StructuredDnnf d = random_dnf(rng, vt);
        std::vector<VertexSet> expect;
        const VertexSet vars = vt.variables();
        for (unsigned m = 0; m < (1u << vars.size()); ++m)
            if (d.evaluate(mask_set(m, vars))) expect.push_back(mask_set(m, vars));
        std::sort(expect.begin(), expect.end());
        EXPECT_EQ(d.enumerate_models(), expect);
    }
}

TEST(LeafSeparator, BalancedOnRandomVtrees) {
    testsupport::Rng rng(2024);
    for (int t = 0; t < 300; ++t) {
        int n = testsupport::uniform(rng, 2, 300);
        Vtree vt = testsupport::random_vtree(rng, n);
        VtreeEdge e = leaf_separator(vt);
        int a = vt.leaf_count(e.child), larger = std::max(a, n - a);
        EXPECT_LE(larger, (2 * n + 2) / 3) << vt.to_string();
    }
    EXPECT_THROW(leaf_separator(Vtree::leaf(0)), InvalidArgument);
}
