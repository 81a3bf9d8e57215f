#include "generators.hpp"

#include <gtest/gtest.h>

using namespace qnet;

namespace {

FaultMask faulty(std::set<EdgeId> edges) { return FaultMask{std::move(edges), {}}; }

/// Taint by brute force: an edge is tainted iff perturbing the faulty inputs changes it.
std::set<EdgeId> taintByPerturbation(const Network& net, const InputMap& in, const FaultMask& mask) {
  const auto base = propagate(net, in);
  InputMap moved = in;
  for (const auto& e : mask.faulty) {
    auto v = std::get<Vec>(moved.at(e)).v;
    moved[e] = Vec{v.array() + 1.0};
  }
  const auto pert = propagate(net, moved);
  std::set<EdgeId> out;
  for (const auto& [e, c] : base.edgeColour)
    if (distance(c, pert.at(e)) > 1e-12) out.insert(e);
  return out;
}

}  // namespace

TEST(Taint, EmptyMask) {
  EXPECT_TRUE(taintPropagate(fixtures::schemeA(), FaultMask{}).empty());
}

TEST(Taint, SchemeAStreamOne) {
  EXPECT_EQ(taintPropagate(fixtures::schemeA(), faulty({"1"})), (std::set<EdgeId>{"1", "1'", "a", "b", "c"}));
}

TEST(Taint, SchemeBStreamOneSparesProcessZero) {
  const auto t = taintPropagate(fixtures::schemeB(), faulty({"1"}));
  EXPECT_EQ(t, (std::set<EdgeId>{"1", "c", "c'", "bbar"}));
  EXPECT_EQ(t.count("abar"), 0u);
}

TEST(Taint, MatchesPerturbationOnLinearNetworks) {
  Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = gen::randomNetwork(rng, QuandloidKind::Vector, 2, 4, 5, 0.3);
    ASSERT_TRUE(s);
    const auto initial = s->net.initialEdges();
    const FaultMask mask = faulty({initial[static_cast<std::size_t>(gen::pick(rng, static_cast<int>(initial.size())))]});
    const auto structural = taintPropagate(s->net, mask);
    const auto numeric = taintByPerturbation(s->net, s->inputs, mask);
    // numeric dependence implies structural taint; weights in (0.05, 0.9) keep every path live
    EXPECT_EQ(numeric, structural);
  }
}

TEST(Taint, MonotoneInMask) {
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = gen::randomNetwork(rng, QuandloidKind::Vector, 1, 5, 6);
    ASSERT_TRUE(s);
    std::set<EdgeId> small, large;
    for (const auto& e : s->net.initialEdges()) {
      const int r = gen::pick(rng, 3);
      if (r == 0) small.insert(e);
      if (r <= 1) large.insert(e);
    }
    const auto ts = taintPropagate(s->net, faulty(small));
    const auto tl = taintPropagate(s->net, faulty(large));
    EXPECT_TRUE(std::includes(tl.begin(), tl.end(), ts.begin(), ts.end()));
    RegionSpec everything;
    for (const auto& [id, e] : s->net.edges) everything.memberEdges.insert(id);
    EXPECT_LE(taintCount(s->net, faulty(small), everything), taintCount(s->net, faulty(large), everything));
  }
}

TEST(Region, InteractionsCoverIncidentEdges) {
  const auto net = fixtures::harness();
  EXPECT_EQ(regionEdges(net, fixtures::harnessRegion()), (std::set<EdgeId>{"p3", "q3", "p4", "q4", "p5", "q5"}));
  EXPECT_EQ(regionEdges(net, RegionSpec{{"p3", "nope"}, {}}), (std::set<EdgeId>{"p3"}));
}

TEST(SlideIsolate, SchemeAStreamOneMovesToSchemeB) {
  const auto net = fixtures::schemeA();
  const auto col = propagate(net, fixtures::schemeInputs());
  const auto r = slideIsolate(net, col, faulty({"1"}), RegionSpec{{"a"}, {}}, 1);
  EXPECT_TRUE(r.report.achieved);
  EXPECT_EQ(r.report.taintBefore, 1);
  EXPECT_EQ(r.report.taintAfter, 0);
  ASSERT_EQ(r.report.moves.size(), 1u);
  EXPECT_EQ(canonicalKey(r.net), canonicalKey(fixtures::schemeB()));
}

TEST(SlideIsolate, EmptyMaskReturnsInput) {
  const auto net = fixtures::harness();
  const auto col = propagate(net, fixtures::harnessInputs());
  const auto r = slideIsolate(net, col, FaultMask{}, fixtures::harnessRegion(), 6);
  EXPECT_TRUE(r.report.achieved);
  EXPECT_TRUE(r.report.moves.empty());
  EXPECT_EQ(anchoredKey(r.net), anchoredKey(net));
}

TEST(SlideIsolate, AllInputsFaultyCannotBeIsolated) {
  const auto net = fixtures::harness();
  const auto col = propagate(net, fixtures::harnessInputs());
  FaultMask all;
  for (const auto& e : net.initialEdges()) all.faulty.insert(e);
  const auto r = slideIsolate(net, col, all, fixtures::harnessRegion(), 6);
  EXPECT_FALSE(r.report.achieved);
  EXPECT_LE(r.report.taintAfter, r.report.taintBefore);
}

TEST(SlideIsolate, HarnessFaultCodes) {
  const auto net = fixtures::harness();
  const auto col = propagate(net, fixtures::harnessInputs());
  const std::map<std::string, std::size_t> expectedMoves{
      {"00X", 2}, {"0X0", 4}, {"X00", 6}, {"X0X", 6}, {"0XX", 4}};
  for (const auto& [code, moves] : expectedMoves) {
    const auto mask = parseFaultCodes(code, fixtures::harnessFaultOrder()).at(0).mask;
    const auto r = slideIsolate(net, col, mask, fixtures::harnessRegion(), 6);
    EXPECT_TRUE(r.report.achieved) << code;
    EXPECT_EQ(r.report.moves.size(), moves) << code;
    EXPECT_LT(terminalDiscrepancy(terminalColoursByEndpoint(net, col), terminalColoursByEndpoint(r.net, r.col)), 1e-7);
  }
}

TEST(SlideIsolate, NeverIncreasesTaint) {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = gen::r3Network(rng, QuandloidKind::Vector, 1);
    ASSERT_TRUE(s);
    const auto initial = s->net.initialEdges();
    const FaultMask mask = faulty({initial[static_cast<std::size_t>(gen::pick(rng, static_cast<int>(initial.size())))]});
    RegionSpec region;
    for (const auto& [id, e] : s->net.edges)
      if (gen::pick(rng, 3) == 0) region.memberEdges.insert(id);
    const auto r = slideIsolate(s->net, s->col, mask, region, 3);
    EXPECT_LE(r.report.taintAfter, r.report.taintBefore);
  }
}

TEST(AdaptiveRun, AlternatesBetweenSchemes) {
  const auto net = fixtures::schemeA();
  const auto tl = parseFaultCodes("000,0X0,000", {"0", "1", "2"});
  const auto trace = adaptiveRun(net, fixtures::schemeInputs(), tl, RegionSpec{{"a"}, {}}, Objective{}, 2);
  ASSERT_EQ(trace.steps.size(), 3u);
  EXPECT_EQ(trace.steps[0].key, trace.steps[2].key);
  EXPECT_NE(trace.steps[0].key, trace.steps[1].key);
  for (const auto& s : trace.steps) {
    EXPECT_TRUE(s.error.empty()) << s.error;
    EXPECT_TRUE(s.conserved);
    EXPECT_EQ(s.taintInRegion, 0);
  }
  EXPECT_LT(terminalDiscrepancy(trace.steps[0].terminals, trace.steps[1].terminals), 1e-7);
}

TEST(AdaptiveRun, SingleCleanStepEqualsOptimizer) {
  const auto net = fixtures::schemeA();
  const auto in = fixtures::schemeInputs();
  const auto trace = adaptiveRun(net, in, {TimelineStep{0, {}}}, RegionSpec{}, Objective{}, 2);
  const auto opt = optimizeParams(net, in, allInteractions(net), SearchMethod::Grid);
  ASSERT_EQ(trace.steps.size(), 1u);
  for (const auto& [id, op] : opt.ops) EXPECT_EQ(trace.steps[0].ops.at(id), op);
  ASSERT_TRUE(trace.steps[0].globalObjective);
  EXPECT_NEAR(*trace.steps[0].globalObjective, opt.value, 1e-12);
  EXPECT_EQ(trace.steps[0].key, canonicalKey(withOps(net, opt.ops)));
}

TEST(AdaptiveRun, OverridesModelInconsistentStream) {
  const auto net = fixtures::schemeA();
  FaultMask mask = faulty({"1"});
  mask.overrides["1"] = GaussianEstimate{Vector::Zero(1), Matrix::Constant(1, 1, 0.25)};
  AdaptiveOptions opts;
  opts.optimize = false;
  Objective obj;
  const auto trace = adaptiveRun(net, fixtures::schemeInputs(), {TimelineStep{0, mask}}, RegionSpec{{"a"}, {}}, obj, 1, opts);
  ASSERT_EQ(trace.steps.size(), 1u);
  EXPECT_TRUE(trace.steps[0].isolated);
  EXPECT_EQ(trace.steps[0].key, canonicalKey(fixtures::schemeB()));
}

TEST(AdaptiveRun, TraceLines) {
  const auto net = fixtures::harness();
  const auto order = fixtures::harnessFaultOrder();
  AdaptiveOptions opts;
  opts.optimize = false;
  const auto trace = adaptiveRun(net, fixtures::harnessInputs(), parseFaultCodes("fig4", order), fixtures::harnessRegion(),
                                 Objective{}, 6, opts);
  const auto text = traceToJsonLines(trace, order);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  const auto first = Json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(first["mask"], "000");
  EXPECT_EQ(first["taint"], 0);
  EXPECT_TRUE(first["conserved"].get<bool>());
  for (const auto& s : trace.steps) EXPECT_TRUE(s.isolated);
}

TEST(AdaptiveRun, RejectsNonIncreasingSteps) {
  const Timeline tl{TimelineStep{1, {}}, TimelineStep{1, {}}};
  EXPECT_THROW(adaptiveRun(fixtures::schemeA(), fixtures::schemeInputs(), tl, RegionSpec{}, Objective{}, 1), Error);
}
