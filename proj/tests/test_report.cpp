#include "gmtlab/errors.hpp"
#include "gmtlab/report.hpp"

#include <gtest/gtest.h>

using namespace gmtlab;

namespace {

RunConfig quick(const std::string& measure, std::vector<std::string> suites) {
  RunConfig c;
  c.measure = measure;
  c.suites = std::move(suites);
  c.rel_tol = 1e-9;
  c.mc_samples = 20000;
  return c;
}

}  // namespace

TEST(Config, ParsesKeyValueText) {
  const RunConfig c = parse_config_text(
      "# comment\n"
      "measure = sphere:2:0.5\n"
      "radii = 0.1, 0.5   # trailing comment\n"
      "centers = 0,0,-0.5; 0,0,0.5\n"
      "seed = 0x10\n"
      "policy = serial\n"
      "timing = false\n");
  EXPECT_EQ(c.measure, "sphere:2:0.5");
  ASSERT_EQ(c.radii.size(), 2u);
  EXPECT_EQ(c.radii[1], 0.5);
  ASSERT_EQ(c.centers.size(), 2u);
  EXPECT_EQ(c.centers[1][2], 0.5);
  EXPECT_EQ(c.seed, 16u);
  EXPECT_EQ(c.policy, ExecPolicy::serial);
}

TEST(Config, RejectsBadInput) {
  auto kind_of = [](const std::string& text) {
    try {
      validate(parse_config_text(text));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;  // sentinel: nothing thrown
  };
  EXPECT_EQ(kind_of("colour = blue\n"), ErrorKind::config);
  EXPECT_EQ(kind_of("tol = abc\n"), ErrorKind::config);
  EXPECT_EQ(kind_of("radii = 0.5, 1.5\n"), ErrorKind::config);
  EXPECT_EQ(kind_of("suite = uniformity, nonsense\n"), ErrorKind::config);
  EXPECT_EQ(kind_of("format = xml\n"), ErrorKind::config);
  EXPECT_EQ(kind_of("just a line\n"), ErrorKind::config);
  EXPECT_EQ(kind_of("mc_samples = 10\n"), ErrorKind::config);
}

TEST(Config, AllExpandsWithoutDuplicates) {
  RunConfig c;
  c.suites = {"uniformity", "all", "quadrature"};
  const auto s = expanded_suites(c);
  ASSERT_EQ(s.size(), 7u);
  EXPECT_EQ(s.front(), "uniformity");
  EXPECT_EQ(s.back(), "quadrature");
}

TEST(Report, ExitCodes) {
  EXPECT_EQ(exit_code(run(quick("plane", {"uniformity"}))), 0);
  EXPECT_EQ(exit_code(run(quick("s3_in_r4", {"uniformity"}))), 1);
  RunConfig bad = quick("sphere", {"uniformity"});
  bad.centers = {Eigen::Vector3d(0, 0, 0)};  // off the support
  try {
    run(bad);
    FAIL() << "expected PointOffManifold";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::point_off_manifold);
  }
  // Errors raised inside a suite mark only that suite.
  RunConfig wide = quick("sphere:2:0.5", {"identities", "uniformity"});
  wide.radii = {0.45};
  const ReportEnvelope r = run(wide);
  EXPECT_EQ(r.suites[0].status, SuiteStatus::pass);
  wide.radii = {0.6};  // identities need r < 1/2
  const ReportEnvelope e = run(wide);
  EXPECT_EQ(e.suites[0].status, SuiteStatus::error);
  EXPECT_EQ(e.suites[1].status, SuiteStatus::pass);
  EXPECT_EQ(exit_code(e), 2);
}

TEST(Report, JsonRoundTrip) {
  RunConfig c = quick("kp_cone", {"uniformity", "quadrature"});
  c.radii = {0.3};
  const ReportEnvelope r = run(c);
  const std::string text = emit_json(r);
  const ReportEnvelope back = parse_json_report(text);
  EXPECT_EQ(emit_json(back), text);
  EXPECT_EQ(back.schema_version, "1");
  EXPECT_EQ(back.suites.size(), 2u);
  EXPECT_NE(text.find("\"schema_version\": \"1\""), std::string::npos);
  EXPECT_NE(text.find("\"wall_time_seconds\": null"), std::string::npos);
}

TEST(Report, MalformedJsonIsIoError) {
  try {
    parse_json_report("{\"schema_version\": ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

TEST(Report, ByteIdenticalAcrossRunsAndPolicies) {
  RunConfig c = quick("sphere", {"all", "quadrature"});
  c.radii = {0.2, 0.4};
  const std::string a = emit_json(run(c));
  const std::string b = emit_json(run(c));
  EXPECT_EQ(a, b);
  RunConfig serial = c;
  serial.policy = ExecPolicy::serial;
  const std::string s = emit_json(run(serial));
  // Only the echoed policy differs.
  EXPECT_EQ(s.size(), a.size() + std::string("serial").size() -
                          std::string("parallel").size());
  EXPECT_EQ(emit_csv(run(serial)), emit_csv(run(c)));
}

TEST(Report, CsvShape) {
  RunConfig c = quick("plane", {"dimension"});
  const std::string csv = emit_csv(run(c));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "suite,measure,center,radius,quantity,value,error,verdict");
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_GT(lines, 5u);
  EXPECT_NE(csv.find("dimension,plane,0;0;0,,dimension_slope,"), std::string::npos);
}

TEST(Report, TimingIsOptIn) {
  RunConfig c = quick("plane", {"uniformity"});
  c.timing = true;
  const ReportEnvelope r = run(c);
  ASSERT_TRUE(r.wall_time_seconds.has_value());
  EXPECT_GE(*r.wall_time_seconds, 0.0);
}
