// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "generators.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace qnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int failures = 0;

void run(int id, const char* name, double timeLimit, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (timeLimit > 0 && secs >= timeLimit) {
    o.pass = false;
    o.detail += fmt(" (over time limit %.0f s)", timeLimit);
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

Colour ci(double m, double c) { return GaussianEstimate{Vector::Constant(1, m), Matrix::Constant(1, 1, c)}; }

double drift(const Network& a, const Colouring& ca, const Network& b, const Colouring& cb) {
  return terminalDiscrepancy(terminalColoursByEndpoint(a, ca), terminalColoursByEndpoint(b, cb));
}

Outcome axiomSuite() {
  const std::pair<QuandloidKind, double> cases[] = {
      {QuandloidKind::Vector, 1e-9},
      {QuandloidKind::LogLinearGaussian, 1e-7},
      {QuandloidKind::CovarianceIntersection, 1e-7},
      {QuandloidKind::Fisher, 1e-7},
      {QuandloidKind::Entropy, 1e-9},
  };
  Outcome o{true, ""};
  for (const auto& [kind, tol] : cases) {
    const auto r = checkAxioms(kind, 1000, 20240 + static_cast<int>(kind));
    o.pass = o.pass && r.passed(tol);
    o.detail += std::string(to_string(kind)) + fmt("=%.1e ", r.worst());
  }
  o.detail += "(limits 1e-7 matrix, 1e-9 scalar/vector)";
  return o;
}

Outcome ciProjection() {
  Rng rng(77);
  double worst = 0.0;
  int pairs = 0;
  for (const auto& [count, dim] : {std::pair{200, 1}, std::pair{50, 3}}) {
    const auto h = ciHomomorphism(dim);
    for (int i = 0; i < count; ++i, ++pairs) {
      const Colour p = sample::colour(QuandloidKind::LogLinearGaussian, dim, rng);
      const Colour q = sample::colour(QuandloidKind::LogLinearGaussian, dim, rng);
      for (int k = 1; k <= 9; ++k) {
        const OpParam s(0.1 * k);
        const auto lhs = std::get<GaussianEstimate>(h.mapColour(fuse(p, s, q)));
        const auto rhs = std::get<GaussianEstimate>(fuse(h.mapColour(p), s, h.mapColour(q)));
        const Matrix dp = lhs.cov.inverse() - rhs.cov.inverse();
        worst = std::max({worst, (lhs.mean - rhs.mean).cwiseAbs().maxCoeff(), dp.cwiseAbs().maxCoeff()});
      }
    }
  }
  return {worst < 1e-7, fmt("%.0f pairs x 9 weights, max mean/precision discrepancy %.2e (limit 1e-7)", static_cast<double>(pairs), worst)};
}

Outcome schemeEquivalence() {
  Rng rng(99);
  double worst = 0.0;
  const int inputs = 500;
  for (int i = 0; i < inputs; ++i) {
    InputMap in;
    for (const char* e : {"0", "1", "2"}) in.emplace(e, sample::colour(QuandloidKind::CovarianceIntersection, 2, rng));
    for (int a = 1; a <= 9; a += 2) {
      for (int b = 1; b <= 9; b += 2) {
        const double s = 0.1 * a, t = 0.1 * b;
        const auto na = fixtures::schemeA(s, t, QuandloidKind::CovarianceIntersection, 2);
        const auto nb = fixtures::schemeB(s, t, QuandloidKind::CovarianceIntersection, 2);
        worst = std::max(worst, drift(na, propagate(na, in), nb, propagate(nb, in)));
      }
    }
  }
  return {worst < 1e-7, fmt("%.0f inputs x 25 (s,t), max terminal discrepancy %.2e (limit 1e-7)", inputs, worst)};
}

Outcome consistencyAsymmetry() {
  const auto a = fixtures::schemeA();
  const auto b = fixtures::schemeB();
  Objective obj;
  obj.kind = ObjectiveKind::ConsistencyMargin;
  obj.trueCov = Matrix::Identity(1, 1);

  // stream 1 claims cov 0.25 against a true covariance of 1
  FaultMask bad;
  bad.faulty = {"1"};
  bad.overrides["1"] = ci(0.0, 0.25);
  const InputMap in1 = applyOverrides({{"0", ci(0, 1.5)}, {"1", ci(0, 1)}, {"2", ci(0, 1.5)}}, bad);
  const auto ca = propagate(a, in1), cb = propagate(b, in1);
  const double ma = -localObjective(a, ca, obj), mb = -localObjective(b, cb, obj);
  const bool pick1 = canonicalKey(selectBest({{a, ca}, {b, cb}}, obj).first) == canonicalKey(b);

  // stream 1 very conservative, streams 0 and 2 barely consistent
  const InputMap in2{{"0", ci(0, 1.05)}, {"1", ci(0, 10)}, {"2", ci(0, 1.05)}};
  const auto ca2 = propagate(a, in2), cb2 = propagate(b, in2);
  const bool pick2 = canonicalKey(selectBest({{a, ca2}, {b, cb2}}, obj).first) == canonicalKey(a);

  const bool pass = ma < 0 && mb >= 0 && pick1 && pick2;
  return {pass, fmt("inconsistent stream: min margin A %.3f, B %.3f", ma, mb) +
                    (pick1 ? ", selects B" : ", does NOT select B") +
                    (pick2 ? "; conservative stream: selects A" : "; conservative stream: does NOT select A")};
}

struct MoveStats {
  int sites = 0;
  double worst = 0.0;
  int roundTripFailures = 0;
};

Outcome reidemeister() {
  Rng rng(2024);
  const int target = 200;
  std::map<MoveKind, MoveStats> stats;
  auto kindFor = [&](int i) {
    return i % 2 ? QuandloidKind::CovarianceIntersection : QuandloidKind::LogLinearGaussian;
  };

  // R1 and R2 introductions, each undone by the matching elimination
  for (auto intro : {MoveKind::R1Intro, MoveKind::R2Intro}) {
    const auto elim = intro == MoveKind::R1Intro ? MoveKind::R1Elim : MoveKind::R2Elim;
    for (int guard = 0; stats[intro].sites < target && guard < 20 * target; ++guard) {
      auto s = gen::randomNetwork(rng, kindFor(guard), 2, 3, 3);
      if (!s) continue;
      std::vector<EdgeId> edges;
      for (const auto& [id, e] : s->net.edges) edges.push_back(id);
      const auto pickEdge = [&] { return edges[static_cast<std::size_t>(gen::pick(rng, static_cast<int>(edges.size())))]; };
      MoveSite site;
      site.kind = intro;
      site.op = OpParam(gen::weight(rng));
      site.mode = gen::pick(rng, 2) ? PatientMode::Discount : PatientMode::Update;
      site.ids = {pickEdge()};
      if (intro == MoveKind::R2Intro) {
        site.ids.push_back(pickEdge());
        if (site.ids[0] == site.ids[1]) continue;
      }
      std::pair<Network, Colouring> mid;
      try {
        mid = applyMove(s->net, s->col, site);
      } catch (const Error&) {
        continue;  // cyclic routing or undefined discount: not an applicable site
      }
      auto& st = stats[intro];
      ++st.sites;
      st.worst = std::max(st.worst, drift(s->net, s->col, mid.first, mid.second));
      const auto fresh = gen::newInteractions(s->net, mid.first);
      const auto ids = intro == MoveKind::R1Intro ? std::vector<std::string>{fresh.at(0)} : fresh;
      const auto back = gen::findSite(findMoves(mid.first, mid.second, {elim}), elim, ids);
      if (!back) {
        ++st.roundTripFailures;
        continue;
      }
      const auto restored = applyMove(mid.first, mid.second, *back);
      auto& se = stats[elim];
      if (se.sites < target) {
        ++se.sites;
        se.worst = std::max(se.worst, drift(mid.first, mid.second, restored.first, restored.second));
      }
      if (canonicalKey(restored.first) != canonicalKey(s->net)) ++st.roundTripFailures;
    }
  }

  // eliminations of pre-existing self-updates
  for (int guard = 0; guard < 20 * target && stats[MoveKind::R1Elim].sites < 2 * target; ++guard) {
    auto s = gen::r1Network(rng, kindFor(guard), 2);
    if (!s) continue;
    for (const auto& site : findMoves(s->net, s->col, {MoveKind::R1Elim})) {
      const auto moved = applyMove(s->net, s->col, site);
      auto& st = stats[MoveKind::R1Elim];
      ++st.sites;
      st.worst = std::max(st.worst, drift(s->net, s->col, moved.first, moved.second));
    }
  }

  // R3 in both directions
  for (int guard = 0; guard < 20 * target && (stats[MoveKind::R3Left].sites < target || stats[MoveKind::R3Right].sites < target); ++guard) {
    auto s = gen::r3Network(rng, kindFor(guard), 2);
    if (!s) continue;
    for (const auto& site : findMoves(s->net, s->col, {MoveKind::R3Left})) {
      std::pair<Network, Colouring> moved;
      try {
        moved = applyMove(s->net, s->col, site);
      } catch (const Error&) {
        continue;
      }
      auto& sl = stats[MoveKind::R3Left];
      ++sl.sites;
      sl.worst = std::max(sl.worst, drift(s->net, s->col, moved.first, moved.second));
      for (const auto& back : findMoves(moved.first, moved.second, {MoveKind::R3Right})) {
        std::pair<Network, Colouring> again;
        try {
          again = applyMove(moved.first, moved.second, back);
        } catch (const Error&) {
          continue;
        }
        auto& sr = stats[MoveKind::R3Right];
        ++sr.sites;
        sr.worst = std::max(sr.worst, drift(moved.first, moved.second, again.first, again.second));
      }
    }
  }

  Outcome o{true, ""};
  for (auto k : {MoveKind::R1Intro, MoveKind::R1Elim, MoveKind::R2Intro, MoveKind::R2Elim, MoveKind::R3Left, MoveKind::R3Right}) {
    const auto& st = stats[k];
    const bool ok = st.sites >= target && st.worst < 1e-7 && st.roundTripFailures == 0;
    o.pass = o.pass && ok;
    o.detail += std::string(to_string(k)) + fmt(" n=%.0f drift=%.1e", st.sites, st.worst);
    if (st.roundTripFailures) o.detail += fmt(" roundtrip-fail=%.0f", st.roundTripFailures);
    o.detail += "; ";
  }
  o.detail += "(limit 1e-7, 200 sites each, round trips restore canonicalKey)";
  return o;
}

Outcome chernoff() {
  const double halfLog2Pi = 0.5 * std::log(2 * std::numbers::pi);
  Outcome o{true, ""};
  for (double theta : {1.0, 2.0, 4.0}) {
    gen::Builder b(QuandloidKind::CovarianceIntersection, 1, 2);
    b.act(1, {{0, PatientMode::Update}}, 0.5);
    const Network net = b.finish();
    const InputMap in{{"s0", ci(0, 1)}, {"s1", ci(theta, 1)}};
    const auto grid = optimizeParams(net, in, {"v0"}, SearchMethod::Grid, 0.05);
    const auto coord = optimizeParams(net, in, {"v0"}, SearchMethod::Coordinate);
    const double sg = grid.ops.at("v0").s(), sc = coord.ops.at("v0").s();
    const double closed = -sc * (1 - sc) * theta * theta / 2 + halfLog2Pi;

    // Simpson quadrature of the fused density at the coordinate optimum
    const double m = sc * theta;
    const double logScale = -sc * (1 - sc) * theta * theta / 2;
    const double lo = m - 14, hi = m + 14;
    const int n = 4000;
    const double h = (hi - lo) / n;
    auto f = [&](double x) {
      return std::exp((1 - sc) * (-0.5 * x * x) + sc * (-0.5 * (x - theta) * (x - theta)) - logScale);
    };
    double sum = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    const double quad = logScale + std::log(sum * h / 3);

    const bool ok = std::abs(sg - 0.5) <= 1e-3 && std::abs(sc - 0.5) <= 1e-5 && std::abs(coord.value - closed) < 1e-9 &&
                    std::abs(quad - closed) < 1e-6;
    o.pass = o.pass && ok;
    o.detail += fmt("theta=%.0f grid s*=%.4f coord s*=%.7f ", theta, sg, sc) +
                fmt("|J-closed|=%.1e |quad-closed|=%.1e; ", std::abs(coord.value - closed), std::abs(quad - closed));
  }
  return o;
}

Outcome faultHarness() {
  const auto net = fixtures::harness();
  const auto col = propagate(net, fixtures::harnessInputs());
  const auto order = fixtures::harnessFaultOrder();
  Outcome o{true, ""};
  for (const std::string code : {"000", "00X", "0X0", "X00", "X0X", "0XX"}) {
    const auto mask = parseFaultCodes(code, order).at(0).mask;
    const auto r = slideIsolate(net, col, mask, fixtures::harnessRegion(), 6);
    bool ok = r.report.achieved && r.report.moves.size() <= 6 && drift(net, col, r.net, r.col) < 1e-7;
    if (code == "000") ok = ok && anchoredKey(r.net) == anchoredKey(net) && r.report.moves.empty();
    o.pass = o.pass && ok;
    o.detail += code + fmt(": taint %.0f->%.0f in %.0f moves; ", r.report.taintBefore, r.report.taintAfter,
                           static_cast<double>(r.report.moves.size()));
  }
  return o;
}

Outcome homomorphismLaws() {
  const auto entropy = verifyHomomorphism(entropyHomomorphism(16), 500, 808);
  Rng rng(809);
  const auto prior = std::get<UnnormalizedGaussian>(sample::colour(QuandloidKind::LogLinearGaussian, 3, rng));
  const auto fisher = verifyHomomorphism(fisherHomomorphism(prior), 500, 810);
  const bool pass = entropy.maxViolation < 1e-9 && fisher.maxViolation < 1e-9 && entropy.undefined == 0 && fisher.undefined == 0;
  return {pass, fmt("entropy max violation %.2e, fisher max violation %.2e (limit 1e-9, 500 samples each)",
                    entropy.maxViolation, fisher.maxViolation)};
}

}  // namespace

int main() {
  run(1, "quandloid axiom suite", 10.0, axiomSuite);
  run(2, "log-linear fuse projects to CI fuse", 0, ciProjection);
  run(3, "scheme A and scheme B terminal equivalence", 0, schemeEquivalence);
  run(4, "consistency asymmetry between schemes", 0, consistencyAsymmetry);
  run(5, "Reidemeister conservation and round trips", 0, reidemeister);
  run(6, "Chernoff optimization", 5.0, chernoff);
  run(7, "fault isolation on the harness network", 30.0, faultHarness);
  run(8, "entropy and Fisher homomorphism laws", 0, homomorphismLaws);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
