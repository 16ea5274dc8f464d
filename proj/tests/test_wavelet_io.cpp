#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "cli_support.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace mframe;
using namespace support;
using io::json;
namespace fs = std::filesystem;

namespace {

using clitest::kData;
using clitest::CliRun;
using clitest::run_cli;

TEST(Wavelet, CantorValues) {
  EXPECT_DOUBLE_EQ(cantor_element(1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(cantor_element(2, 1.0), 0.0);
  for (int l = 1; l <= 12; ++l) EXPECT_LE(cantor_partition_defect(l), 1e-12) << "L = " << l;
}

TEST(Wavelet, CantorFrameIsNormalizedTight) {
  for (int l : {1, 3, 6}) {
    const Frame f = cantor_frame(l);
    EXPECT_EQ(f.size(), static_cast<std::size_t>(l + 1));
    const oracle::Bounds o = oracle::bounds(f);
    EXPECT_NEAR(o.lower, 1.0, 1e-9);
    EXPECT_NEAR(f.bounds().lower, 1.0, 1e-9);
    EXPECT_NEAR(f.bounds().upper, 1.0, 1e-9);
    EXPECT_LE(reconstruct(f, f, sampled_vector(f.module(), dyadic_grid(l))).residual, 1e-10);
  }
}

TEST(Wavelet, SingleGeneratorBound) {
  EXPECT_EQ(single_generator_bound(1), 0.25);
  EXPECT_EQ(single_generator_bound(2), 1.0 / 16.0);
  for (int l = 1; l < 10; ++l) EXPECT_EQ(single_generator_bound(l + 1) / single_generator_bound(l), 0.25);
  EXPECT_THROW(dyadic_grid(0), DomainError);
}

TEST(Wavelet, Brackets) {
  const SampledFunction haar = indicator(8, 0.0, 1.0);
  for (const Complex& v : bracket(haar, haar).values) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-12);
  const SampledFunction wide = indicator(8, 0.0, 2.0);
  for (const Complex& v : bracket(wide, wide).values) EXPECT_NEAR(std::abs(v - 2.0), 0.0, 1e-12);
  SampledFunction zero = haar;
  for (auto& s : zero.samples) s = 0.0;
  for (const Complex& v : bracket(haar, zero).values) EXPECT_EQ(v, Complex(0.0));
  EXPECT_THROW(bracket(haar, indicator(4, 0.0, 1.0)), StructuralError);
}

TEST(Wavelet, BracketIsPositive) {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    SampledFunction f;
    f.samples_per_unit = rng.uniform_int(1, 8);
    f.support_start = rng.uniform_int(-3, 3);
    const int n = rng.uniform_int(1, 30);
    for (int k = 0; k < n; ++k) f.samples.push_back(rng.complex_gaussian());
    EXPECT_TRUE(is_positive(bracket(f, f).to_element()));
  }
}

TEST(Wavelet, TranslateFrames) {
  const Frame haar = translates_to_module_frame({indicator(4, 0.0, 1.0)});
  EXPECT_NEAR(haar.bounds().lower, 1.0, 1e-12);
  EXPECT_NEAR(haar.bounds().upper, 1.0, 1e-12);
  EXPECT_TRUE(haar.is_riesz());

  const Frame two = translates_to_module_frame({indicator(4, 0.0, 1.0), indicator(4, 1.0, 2.0)});
  EXPECT_EQ(two.module().rank(), 2);
  EXPECT_TRUE(two.is_tight());
  EXPECT_NEAR(two.bounds().upper, 1.0, 1e-12);

  // generator vanishing on part of the period
  const Frame gap = translates_to_module_frame({indicator(4, 0.0, 0.5)});
  EXPECT_NEAR(gap.bounds().lower, 0.0, 1e-12);
  EXPECT_FALSE(gap.is_frame());
}

TEST(Wavelet, TightnessIffConstantBracket) {
  // 1 on [0,1) plus 1 on [0,1/2) of the next period: bracket is 2 then 1
  SampledFunction f = indicator(4, 0.0, 1.5);
  const PeriodizedElement b = bracket(f, f);
  EXPECT_FALSE(std::abs(b.values[0] - b.values[3]) < 1e-12);
  EXPECT_FALSE(translates_to_module_frame({f}).is_tight());
  SampledFunction g = indicator(4, -1.0, 1.0);
  for (auto& s : g.samples) s *= std::sqrt(0.5);
  EXPECT_TRUE(translates_to_module_frame({g}).is_tight());
}

TEST(Io, FrameRoundTripIsByteExact) {
  for (const std::string& kind : fixture_kinds())
    for (std::uint64_t seed = 0; seed < 5; ++seed)
      for (const Frame& f : random_fixture(kind, seed)) {
        const std::string text = io::serialize_frame(f);
        const Frame g = io::parse_frame(text);
        EXPECT_EQ(io::serialize_frame(g), text);
        EXPECT_EQ(max_element_distance(f, g), 0.0);
      }
}

TEST(Io, SummandRoundTrip) {
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    const AlgebraDescriptor a = random_algebra(rng);
    const HilbertModule h = random_summand(rng, a, 2);
    std::vector<ModuleVector> xs;
    for (int j = 0; j < 3; ++j) xs.push_back(random_vector(h, rng));
    const Frame f(h, xs);
    const std::string text = io::serialize_frame(f);
    const Frame g = io::parse_frame(text);
    EXPECT_FALSE(g.module().is_free());
    EXPECT_EQ(io::serialize_frame(g), text);
  }
}

TEST(Io, SampleFilesAreCanonical) {
  for (const char* name : {"onb.json", "non-riesz.json", "mercedes.json", "pair-p.json", "pair-complement.json"}) {
    const std::string path = kData + "/" + name;
    EXPECT_EQ(io::serialize_frame(io::read_frame(path)), io::read_file(path)) << name;
  }
}

TEST(Io, ValidationPaths) {
  const std::string good = io::read_file(kData + "/onb.json");
  auto error_path = [](const std::string& text) -> std::string {
    try {
      io::parse_frame(text);
    } catch (const ValidationError& e) {
      return e.path();
    }
    return "<none>";
  };
  EXPECT_EQ(error_path("{"), "");
  EXPECT_EQ(error_path(std::regex_replace(good, std::regex("mframe.frame"), "other")), "format");
  EXPECT_EQ(error_path(std::regex_replace(good, std::regex("\"rank\": 2"), "\"rank\": 2.5")), "rank");
  EXPECT_EQ(error_path(std::regex_replace(good, std::regex("\\[1.0,0.0\\]\\]\\]\\],\\[\\[\\[\\[0.0,0.0\\]"), "[1.0,0.0]]]],[[[[\"x\",0.0]")), "vectors[0][1][0][0][0][0]");
  EXPECT_EQ(error_path(std::regex_replace(good, std::regex("\"blocks\":\\[1\\]"), "\"blocks\":[0]")), "algebra.blocks[0]");
  EXPECT_EQ(error_path(std::regex_replace(good, std::regex("\"version\": 1"), "\"version\": 2")), "version");
  json doc = json::parse(good);
  doc["vectors"][1].erase(1);
  EXPECT_EQ(error_path(doc.dump()), "vectors[1]");
  doc = json::parse(good);
  doc["projection"] = json::parse("[[[[[[2,0]]]],[[[[0,0]]]]],[[[[[0,0]]]],[[[[1,0]]]]]]");  // not idempotent
  EXPECT_EQ(error_path(doc.dump()), "projection");
  doc = json::parse(good);
  doc.erase("vectors");
  EXPECT_EQ(error_path(doc.dump()), "vectors");
}

TEST(Io, SampledRoundTrip) {
  const SampledFunction f = io::read_sampled(kData + "/haar.json");
  EXPECT_EQ(f.samples_per_unit, 4);
  EXPECT_EQ(io::sampled_from_json(io::sampled_to_json(f)).samples, f.samples);
  EXPECT_THROW(io::read_sampled(kData + "/onb.json"), ValidationError);
}

// ---- command line ----

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mframe-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    unsetenv("MFRAME_TOL");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("MFRAME_TOL");
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    io::write_file(path(name), text);
    return path(name);
  }
  fs::path dir_;
};

TEST_F(Cli, AnalyzeBasis) {
  const CliRun r = run_cli({"--json", "analyze", kData + "/onb.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_NEAR(rep["bounds"]["lower"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(rep["bounds"]["upper"].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(rep["riesz"].get<bool>());
}

TEST_F(Cli, ClassifyComplementaryPair) {
  const CliRun r = run_cli({"classify", kData + "/pair-p.json", kData + "/pair-complement.json", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["classification"]["strongly_complementary"].get<bool>());
}

TEST_F(Cli, TwoOnbOnNonRiesz) {
  const CliRun r = run_cli({"decompose", kData + "/non-riesz.json", "--method", "two-onb"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("result: \"none\""), std::string::npos);
  EXPECT_NE(r.out.find("riesz_report.witness: [["), std::string::npos);
}

TEST_F(Cli, DualWritesCanonicalFile) {
  const std::string out = path("dual.json");
  const CliRun r = run_cli({"dual", kData + "/non-riesz.json", "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const Frame d = io::read_frame(out);
  EXPECT_LE(max_element_distance(d, canonical_dual(e1e2e1())), 1e-15);
  const CliRun s = run_cli({"dual", kData + "/non-riesz.json"});
  EXPECT_EQ(s.out, io::read_file(out));
}

TEST_F(Cli, DilateWritesFiles) {
  const CliRun r = run_cli({"dilate", kData + "/non-riesz.json", "--out", path("d")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Frame c = io::read_frame(path("d.complement.json"));
  const Frame b = io::read_frame(path("d.dilated.json"));
  EXPECT_EQ(b.module().rank(), 5);
  EXPECT_TRUE(b.is_riesz());
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(run_cli({"dilate", kData + "/non-riesz.json", "--kind", "tight"}).code, 2);
}

TEST_F(Cli, FixtureFiles) {
  const CliRun r = run_cli({"--seed", "4", "fixture", "disjoint-pair", "--out", path("p")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto expect = random_fixture("disjoint-pair", 4);
  EXPECT_EQ(io::read_file(path("p-1.json")), io::serialize_frame(expect[0]));
  EXPECT_EQ(io::read_file(path("p-2.json")), io::serialize_frame(expect[1]));
  const CliRun s = run_cli({"fixture", "snt", "--seed", "9"});
  EXPECT_EQ(s.out, io::serialize_frame(random_fixture("snt", 9)[0]));
}

TEST_F(Cli, Demos) {
  const CliRun c = run_cli({"--json", "demo", "cantor", "--levels", "12"});
  ASSERT_EQ(c.code, 0) << c.err;
  const json rep = json::parse(c.out);
  EXPECT_NEAR(rep["bounds"]["lower"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(rep["bounds"]["upper"].get<double>(), 1.0, 1e-9);
  const CliRun s = run_cli({"--json", "demo", "single-generator", "--levels", "3"});
  EXPECT_EQ(json::parse(s.out)["lower_bound"].get<double>(), 1.0 / 64.0);
}

TEST_F(Cli, Bracket) {
  const CliRun r = run_cli({"--json", "bracket", kData + "/haar.json", kData + "/haar.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& v : json::parse(r.out)["values"]) EXPECT_EQ(v, json::array({1.0, 0.0}));
}

TEST_F(Cli, UsageAndInputErrorsExitOne) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
  EXPECT_EQ(run_cli({"analyze"}).code, 1);
  EXPECT_EQ(run_cli({"analyze", kData + "/onb.json", "--bogus"}).code, 1);
  EXPECT_EQ(run_cli({"--tol", "-1", "analyze", kData + "/onb.json"}).code, 1);
  EXPECT_EQ(run_cli({"--tol", "abc", "analyze", kData + "/onb.json"}).code, 1);
  EXPECT_EQ(run_cli({"analyze", path("missing.json")}).code, 1);
  EXPECT_EQ(run_cli({"analyze", write("bad.json", "{\"format\": ")}).code, 1);
  const CliRun v = run_cli({"analyze", write("v.json", std::regex_replace(io::read_file(kData + "/onb.json"), std::regex("\"rank\": 2"), "\"rank\": 3"))});
  EXPECT_EQ(v.code, 1);
  EXPECT_NE(v.err.find("vectors[0]"), std::string::npos) << v.err;
  EXPECT_EQ(run_cli({"decompose", kData + "/onb.json", "--method", "magic"}).code, 1);
  EXPECT_EQ(run_cli({"decompose", kData + "/onb.json"}).code, 1);
  EXPECT_EQ(run_cli({"demo", "cantor", "--levels", "0"}).code, 1);
  EXPECT_EQ(run_cli({"demo", "mandelbrot", "--levels", "2"}).code, 1);
  EXPECT_EQ(run_cli({"fixture", "unknown"}).code, 1);
  EXPECT_EQ(run_cli({"fixture", "complementary-pair"}).code, 1);
  EXPECT_EQ(run_cli({"bracket", kData + "/haar.json", kData + "/onb.json"}).code, 1);
  EXPECT_EQ(run_cli({"classify", kData + "/onb.json", kData + "/non-riesz.json"}).code, 1);
  EXPECT_EQ(run_cli({"decompose", kData + "/onb.json", "--method", "onb-riesz", "--epsilon", "1.5"}).code, 1);
  EXPECT_EQ(run_cli({"dual", kData + "/onb.json", "-o", path("no/such/dir/x.json")}).code, 1);
  const CliRun sampled = run_cli({"bracket", kData + "/haar.json", write("s.json", "{\"format\": \"mframe.sampled\", \"version\": 1, \"samples_per_unit\": 8, \"support_start\": 0, \"samples\": [[1,0]]}")});
  EXPECT_EQ(sampled.code, 1);
  setenv("MFRAME_TOL", "nonsense", 1);
  EXPECT_EQ(run_cli({"analyze", kData + "/onb.json"}).code, 1);
}

TEST_F(Cli, HelpExitsZero) {
  const CliRun r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("decompose"), std::string::npos);
}

TEST_F(Cli, CertificateFailuresExitTwo) {
  const Frame partial = hilbert_frame({{1, 0}, {1, 0}});
  const std::string p = write("partial.json", io::serialize_frame(partial));
  EXPECT_EQ(run_cli({"analyze", p}).code, 2);
  EXPECT_EQ(run_cli({"dual", p}).code, 2);
  EXPECT_EQ(run_cli({"classify", p, kData + "/onb.json"}).code, 2);
  EXPECT_EQ(run_cli({"decompose", kData + "/non-riesz.json", "--method", "three-onb"}).code, 2);
  EXPECT_EQ(run_cli({"decompose", kData + "/non-riesz.json", "--method", "onb-riesz"}).code, 2);
  EXPECT_EQ(run_cli({"decompose", kData + "/non-riesz.json", "--method", "three-unitaries"}).code, 2);
  EXPECT_EQ(run_cli({"decompose", p, "--method", "two-tight"}).code, 2);
}

TEST_F(Cli, ToleranceFromEnvironment) {
  // bounds (1, 1.05): tight only under a loose tolerance
  const std::string f = write("near.json", io::serialize_frame(hilbert_frame({{1, 0}, {0, std::sqrt(1.05)}})));
  auto tight = [&](std::vector<std::string> args) {
    const CliRun r = run_cli(args);
    return json::parse(r.out)["tight"].get<bool>();
  };
  EXPECT_FALSE(tight({"--json", "analyze", f}));
  setenv("MFRAME_TOL", "0.1", 1);
  EXPECT_TRUE(tight({"--json", "analyze", f}));
  EXPECT_FALSE(tight({"--json", "--tol", "1e-9", "analyze", f}));
}

TEST_F(Cli, TextAndJsonAgree) {
  const CliRun t = run_cli({"analyze", kData + "/mercedes.json"});
  const CliRun j = run_cli({"analyze", kData + "/mercedes.json", "--json"});
  ASSERT_EQ(t.code, 0);
  const json rep = json::parse(j.out);
  EXPECT_NE(t.out.find("bounds.upper: " + rep["bounds"]["upper"].dump()), std::string::npos);
}

TEST_F(Cli, GoldenReports) {
  const clitest::GoldenOutcome g = clitest::run_golden(dir_ / "golden", std::getenv("MFRAME_UPDATE_GOLDEN") != nullptr);
  EXPECT_GE(g.checked, 8);
  for (const auto& f : g.failures) ADD_FAILURE() << f;
}

}  // namespace
