#include "generators.hpp"

#include <gtest/gtest.h>

using namespace qnet;

namespace {

std::string dataFile(const std::string& name) { return std::string(QNET_DATA_DIR) + "/" + name; }

ErrorKind parseErrorKind(const std::string& text) {
  try {
    parseNetworkFile(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidNetwork;
}

}  // namespace

TEST(NetworkFile, BundledFixturesMatchBuilders) {
  const auto a = loadNetworkFile(dataFile("fig1a.json"));
  EXPECT_EQ(anchoredKey(a.net), anchoredKey(fixtures::schemeA()));
  const auto b = loadNetworkFile(dataFile("fig1b.json"));
  EXPECT_EQ(anchoredKey(b.net), anchoredKey(fixtures::schemeB()));
  const auto h = loadNetworkFile(dataFile("harness.json"));
  EXPECT_EQ(anchoredKey(h.net), anchoredKey(fixtures::harness()));
  ASSERT_TRUE(h.region);
  EXPECT_EQ(h.region->memberInteractions, fixtures::harnessRegion().memberInteractions);
  ASSERT_TRUE(h.timeline);
  EXPECT_EQ(h.timeline->size(), 6u);
  for (const auto& [e, c] : fixtures::schemeInputs()) EXPECT_TRUE(identical(a.inputs.at(e), c));
}

TEST(NetworkFile, RoundTrip) {
  Rng rng(51);
  for (auto kind : {QuandloidKind::CovarianceIntersection, QuandloidKind::LogLinearGaussian, QuandloidKind::Fisher,
                    QuandloidKind::Entropy, QuandloidKind::Vector, QuandloidKind::LogLinearScalar}) {
    auto s = gen::randomNetwork(rng, kind, 2, 3, 4, 0.0);
    ASSERT_TRUE(s);
    NetworkFile f{s->net, s->inputs, RegionSpec{{"s0"}, {"v0"}}, {"s0", "s1", "s2"}, parseFaultCodes("0X0", {"s0", "s1", "s2"})};
    const auto text = networkToJson(f).dump();
    const auto back = parseNetworkFile(text);
    EXPECT_EQ(canonicalKey(back.net), canonicalKey(f.net));
    EXPECT_EQ(anchoredKey(back.net), anchoredKey(f.net));
    for (const auto& [e, c] : f.inputs) EXPECT_TRUE(identical(back.inputs.at(e), c)) << to_string(kind);
    EXPECT_EQ(networkToJson(back).dump(), text);
  }
}

TEST(NetworkFile, ParseErrors) {
  std::string text;
  {
    std::ifstream in(dataFile("truncated.json"));
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  EXPECT_EQ(parseErrorKind(text), ErrorKind::ParseError);
  EXPECT_EQ(parseErrorKind("[]"), ErrorKind::ParseError);
  EXPECT_EQ(parseErrorKind(R"({"version": 2})"), ErrorKind::ParseError);
  EXPECT_EQ(parseErrorKind(R"({"version": 1, "quandloid": {"name": "nope"}})"), ErrorKind::ParseError);
  EXPECT_EQ(parseErrorKind(R"({"version": 1, "quandloid": {"name": "ci"}, "endpoints": [{"id": "x", "role": "sideways"}],
                             "edges": [], "interactions": []})"),
            ErrorKind::ParseError);
}

TEST(NetworkFile, ColourLiteralsMustMatchKind) {
  EXPECT_THROW(colourFromJson(Json::parse(R"({"mean": [0, 1], "cov": [[1]]})"), QuandloidKind::CovarianceIntersection, 2),
               Error);
  EXPECT_THROW(colourFromJson(Json::parse(R"({"bits": "x"})"), QuandloidKind::Entropy, 1), Error);
  const auto c = colourFromJson(Json::parse(R"({"mean": [1], "cov": [[2]]})"), QuandloidKind::LogLinearGaussian, 1);
  EXPECT_EQ(std::get<UnnormalizedGaussian>(c).logScale, 0.0);
}

TEST(NetworkFile, OddDegreeFixtureIsStructurallyInvalid) {
  const auto f = loadNetworkFile(dataFile("odd_degree.json"));
  EXPECT_TRUE(validate(f.net).has("unpaired patient edge"));
}

TEST(FaultCodes, Parse) {
  const std::vector<EdgeId> order{"a", "b", "c"};
  const auto tl = parseFaultCodes("000,X0X", order);
  ASSERT_EQ(tl.size(), 2u);
  EXPECT_TRUE(tl[0].mask.empty());
  EXPECT_EQ(tl[1].mask.faulty, (std::set<EdgeId>{"a", "c"}));
  EXPECT_EQ(faultCode(tl[1].mask, order), "X0X");
  EXPECT_EQ(parseFaultCodes("fig4", order).size(), 6u);
  EXPECT_THROW(parseFaultCodes("00", order), Error);
  EXPECT_THROW(parseFaultCodes("0Y0", order), Error);
}
