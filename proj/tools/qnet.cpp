// qnet: command-line front end for fusion networks.
//
// Exit codes: 0 success, 1 domain failure (invalid network, undefined
// fusion, failed check), 2 usage or parse error.

#include "qnet/qnet.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace qnet;

namespace {

int logLevel() {
  const char* v = std::getenv("QNET_LOG");
  return v ? std::atoi(v) : 0;
}

void logInfo(const std::string& msg) {
  if (logLevel() >= 1) std::cerr << "[qnet] " << msg << "\n";
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

MoveKinds parseKinds(const std::string& s) {
  if (s.empty()) return reducingMoveKinds();
  if (s == "all") return allMoveKinds();
  MoveKinds k;
  for (const auto& item : splitList(s)) k.insert(moveKindFromString(item));
  return k;
}

std::vector<OpParam> parseWeights(const std::string& s) {
  std::vector<OpParam> out;
  for (const auto& item : splitList(s)) out.emplace_back(std::stod(item));
  return out;
}

/// Column names for one colour of the network's kind, matrices row-major.
std::vector<std::string> csvColumns(QuandloidKind kind, Eigen::Index n) {
  std::vector<std::string> cols;
  auto vec = [&](const std::string& name) {
    for (Eigen::Index i = 0; i < n; ++i) cols.push_back(name + "_" + std::to_string(i));
  };
  auto mat = [&](const std::string& name) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) cols.push_back(name + "_" + std::to_string(i) + "_" + std::to_string(j));
  };
  switch (kind) {
    case QuandloidKind::CovarianceIntersection: vec("mean"); mat("cov"); break;
    case QuandloidKind::LogLinearGaussian: vec("mean"); mat("cov"); cols.push_back("logScale"); break;
    case QuandloidKind::Fisher: mat("info"); break;
    case QuandloidKind::Entropy: cols.push_back("bits"); break;
    case QuandloidKind::Vector: vec("v"); break;
    case QuandloidKind::LogLinearScalar: cols.push_back("value"); break;
  }
  return cols;
}

std::vector<double> csvValues(const Colour& c) {
  std::vector<double> out;
  auto vec = [&](const Vector& v) { for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i)); };
  auto mat = [&](const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GaussianEstimate>) { vec(x.mean); mat(x.cov); }
        else if constexpr (std::is_same_v<T, UnnormalizedGaussian>) { vec(x.mean); mat(x.cov); out.push_back(x.logScale); }
        else if constexpr (std::is_same_v<T, InfoMatrix>) { mat(x.mat); }
        else if constexpr (std::is_same_v<T, EntropyVal>) { out.push_back(x.bits); }
        else if constexpr (std::is_same_v<T, Vec>) { vec(x.v); }
        else { out.push_back(x.value); }
      },
      c);
  return out;
}

std::string csvNumber(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Common {
  std::string path;
  std::string region;
  std::string regionInteractions;
};

NetworkFile load(const Common& c) {
  logInfo("loading " + c.path);
  NetworkFile f = loadNetworkFile(c.path);
  if (!c.region.empty() || !c.regionInteractions.empty()) {
    RegionSpec r;
    for (const auto& e : splitList(c.region)) r.memberEdges.insert(e);
    for (const auto& v : splitList(c.regionInteractions)) r.memberInteractions.insert(v);
    f.region = r;
  }
  return f;
}

Json movesJson(const std::vector<MoveSite>& sites) {
  Json out = Json::array();
  for (std::size_t i = 0; i < sites.size(); ++i) out.push_back(Json{{"index", i}, {"site", sites[i].describe()}});
  return out;
}

int exitFor(const Error& e) { return e.kind() == ErrorKind::ParseError ? 2 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qnet: quandloid fusion networks"};
  app.require_subcommand(1);

  Common common;
  auto addPath = [&](CLI::App* sub) {
    sub->add_option("path", common.path, "network file")->required()->check(CLI::ExistingFile);
    sub->add_option("--region", common.region, "comma-separated protected edge ids");
    sub->add_option("--region-interactions", common.regionInteractions, "comma-separated protected interaction ids");
  };

  auto* validateCmd = app.add_subcommand("validate", "check network structure");
  addPath(validateCmd);

  std::string format = "json";
  auto* evalCmd = app.add_subcommand("eval", "propagate colours from the inputs");
  addPath(evalCmd);
  evalCmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string quandloid = "ci";
  int samples = 1000;
  std::uint64_t seed = 7;
  int dim = 3;
  auto* axiomsCmd = app.add_subcommand("axioms", "randomized quandloid axiom checks");
  axiomsCmd->add_option("--quandloid", quandloid, "ci, gaussian, fisher, entropy, vector, density");
  axiomsCmd->add_option("--samples", samples)->check(CLI::PositiveNumber);
  axiomsCmd->add_option("--seed", seed);
  axiomsCmd->add_option("--dim", dim)->check(CLI::PositiveNumber);

  std::string kinds, introWeights;
  auto* movesCmd = app.add_subcommand("moves", "list rewrite sites");
  addPath(movesCmd);
  movesCmd->add_option("--kinds", kinds, "comma-separated move kinds, or 'all'");
  movesCmd->add_option("--intro-s", introWeights, "weights offered to introduction moves");

  std::size_t siteIndex = 0;
  auto* applyCmd = app.add_subcommand("apply", "apply one rewrite site, print the new network");
  addPath(applyCmd);
  applyCmd->add_option("--site", siteIndex, "index from 'moves'")->required();
  applyCmd->add_option("--kinds", kinds);
  applyCmd->add_option("--intro-s", introWeights);

  int depth = 1, maxNodes = 10000;
  std::string objective;
  std::optional<double> trueCov;
  auto* searchCmd = app.add_subcommand("search", "enumerate the bounded equivalence class");
  addPath(searchCmd);
  searchCmd->add_option("--depth", depth)->check(CLI::NonNegativeNumber);
  searchCmd->add_option("--max-nodes", maxNodes);
  searchCmd->add_option("--kinds", kinds);
  searchCmd->add_option("--objective", objective, "chernoff, consistency or taint");
  searchCmd->add_option("--true-cov", trueCov, "true covariance as a multiple of I");

  std::string method = "grid";
  double gridStep = 0.05;
  bool maximize = false;
  auto* optimizeCmd = app.add_subcommand("optimize", "optimize interaction weights");
  addPath(optimizeCmd);
  optimizeCmd->add_option("--method", method)->check(CLI::IsMember({"grid", "coordinate"}));
  optimizeCmd->add_option("--grid-step", gridStep);
  optimizeCmd->add_flag("--maximize", maximize, "flip the sign of the Chernoff objective");

  std::string timeline;
  int faultDepth = 6;
  bool noOptimize = false;
  auto* faultCmd = app.add_subcommand("faultsim", "adaptive reconfiguration under a fault timeline");
  addPath(faultCmd);
  faultCmd->add_option("--timeline", timeline, "fault codes (000,0X0), 'fig4', or a JSON file");
  faultCmd->add_option("--depth", faultDepth)->check(CLI::NonNegativeNumber);
  std::string faultMethod = "coordinate";
  faultCmd->add_option("--method", faultMethod, "grid is exponential in the number of interactions")
      ->check(CLI::IsMember({"grid", "coordinate"}));
  faultCmd->add_option("--grid-step", gridStep);
  faultCmd->add_flag("--no-optimize", noOptimize, "keep the stored weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validateCmd) {
      NetworkFile f = load(common);
      const auto report = validate(f.net);
      Json v = Json::array();
      for (const auto& x : report.violations) v.push_back(Json{{"code", x.code}, {"where", x.where}, {"message", x.message}});
      print(Json{{"valid", report.ok()}, {"violations", v}});
      return report.ok() ? 0 : 1;
    }

    if (*evalCmd) {
      NetworkFile f = load(common);
      const Colouring col = propagate(f.net, f.inputs);
      if (format == "csv") {
        std::cout << "section,id";
        for (const auto& c : csvColumns(f.net.kind, f.net.dim)) std::cout << "," << c;
        std::cout << "\n";
        for (const auto& [e, c] : col.edgeColour) {
          std::cout << "edge," << e;
          for (double x : csvValues(c)) std::cout << "," << csvNumber(x);
          std::cout << "\n";
        }
        for (const auto& [ep, c] : terminalColoursByEndpoint(f.net, col)) {
          std::cout << "terminal," << ep;
          for (double x : csvValues(c)) std::cout << "," << csvNumber(x);
          std::cout << "\n";
        }
      } else {
        print(Json{{"edges", colouringToJson(col)}, {"terminals", terminalsToJson(f.net, col)}});
      }
      return 0;
    }

    if (*axiomsCmd) {
      const QuandloidKind kind = kindFromString(quandloid);
      const auto r = checkAxioms(kind, samples, seed, dim);
      const bool scalar = kind == QuandloidKind::Entropy || kind == QuandloidKind::LogLinearScalar;
      const double tol = scalar ? 1e-9 : 1e-7;
      print(Json{{"quandloid", std::string(to_string(kind))},
                 {"samples", r.samples},
                 {"seed", seed},
                 {"idempotence", r.idempotence},
                 {"leftInverse", r.leftInverse},
                 {"distributivity", r.distributivity},
                 {"identity", r.identity},
                 {"undefined", r.undefined},
                 {"definednessMismatches", r.definednessMismatches},
                 {"tolerance", tol},
                 {"passed", r.passed(tol)}});
      return r.passed(tol) ? 0 : 1;
    }

    if (*movesCmd || *applyCmd) {
      NetworkFile f = load(common);
      const Colouring col = propagate(f.net, f.inputs);
      auto ops = introWeights.empty() ? networkOps(f.net) : parseWeights(introWeights);
      const auto sites = findMoves(f.net, col, parseKinds(kinds), ops);
      if (*movesCmd) {
        print(Json{{"key", canonicalKey(f.net)}, {"moves", movesJson(sites)}});
        return 0;
      }
      if (siteIndex >= sites.size()) {
        std::cerr << "site index " << siteIndex << " out of range (" << sites.size() << " sites)\n";
        return 2;
      }
      logInfo("applying " + sites[siteIndex].describe());
      auto [net, next] = applyMove(f.net, col, sites[siteIndex]);
      NetworkFile out = f;
      out.net = net;
      print(networkToJson(out));
      return 0;
    }

    if (*searchCmd) {
      NetworkFile f = load(common);
      const Colouring col = propagate(f.net, f.inputs);
      SearchOptions opts;
      opts.kinds = parseKinds(kinds);
      const auto cls = equivalenceClass(f.net, col, depth, maxNodes, opts);
      logInfo(std::to_string(cls.members.size()) + " members");
      std::optional<Objective> obj;
      if (!objective.empty()) {
        obj = Objective{};
        obj->kind = objectiveFromString(objective);
        if (trueCov) obj->trueCov = *trueCov * Matrix::Identity(f.net.dim, f.net.dim);
        obj->region = f.region;
      }
      Json members = Json::array();
      std::vector<std::pair<Network, Colouring>> cands;
      for (const auto& m : cls.members) {
        Json path = Json::array();
        for (const auto& s : m.path) path.push_back(s.describe());
        Json entry{{"key", m.key}, {"path", path}, {"terminals", terminalsToJson(m.net, m.col)}};
        if (obj) {
          const double v = localObjective(m.net, m.col, *obj);
          entry["objective"] = std::isfinite(v) ? Json(v) : Json(nullptr);
        }
        members.push_back(entry);
        cands.emplace_back(m.net, m.col);
      }
      Json out{{"members", members}, {"truncated", cls.truncated}};
      if (obj) out["best"] = selectBestIndex(cands, *obj);
      print(out);
      return 0;
    }

    if (*optimizeCmd) {
      NetworkFile f = load(common);
      const auto r = optimizeParams(f.net, f.inputs, allInteractions(f.net),
                                    method == "grid" ? SearchMethod::Grid : SearchMethod::Coordinate, gridStep,
                                    maximize ? ChernoffSense::Maximize : ChernoffSense::Minimize);
      Json ops = Json::object();
      for (const auto& [id, op] : r.ops) ops[id] = op.s();
      print(Json{{"method", method}, {"ops", ops}, {"value", r.value}, {"evaluations", r.evaluations}});
      return 0;
    }

    if (*faultCmd) {
      NetworkFile f = load(common);
      if (!f.region) throw Error(ErrorKind::MissingRegion, "faultsim needs a region (file or --region)");
      auto order = f.faultOrder.empty() ? f.net.initialEdges() : f.faultOrder;
      Timeline tl;
      if (timeline.empty()) {
        if (!f.timeline) throw Error(ErrorKind::ParseError, "no timeline in file and none given");
        tl = *f.timeline;
      } else if (std::filesystem::exists(timeline)) {
        std::ifstream in(timeline);
        Json j;
        try {
          j = Json::parse(in);
        } catch (const Json::exception& e) {
          throw Error(ErrorKind::ParseError, e.what());
        }
        for (const auto& s : j) tl.push_back(TimelineStep{s.value("step", static_cast<int>(tl.size())), maskFromJson(s, f.net)});
      } else {
        tl = parseFaultCodes(timeline, order);
      }
      AdaptiveOptions opts;
      opts.method = faultMethod == "grid" ? SearchMethod::Grid : SearchMethod::Coordinate;
      opts.gridStep = gridStep;
      opts.optimize = !noOptimize;
      const auto trace = adaptiveRun(f.net, f.inputs, tl, *f.region, Objective{}, faultDepth, opts);
      std::cout << traceToJsonLines(trace, order);
      bool ok = true;
      for (const auto& s : trace.steps) ok = ok && s.error.empty();
      return ok ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exitFor(e);
  }
  return 0;
}
