#include <gtest/gtest.h>

#include "ulyap/verify.hpp"

using namespace ulyap;

TEST(Verify, AllSuitesPass) {
  const VerifyReport rep = run_verification();
  ASSERT_EQ(rep.suites.size(), 6u);
  for (const auto& s : rep.suites) {
    EXPECT_TRUE(s.passed) << s.name << ": " << s.counterexample;
    EXPECT_GT(s.checks, 0u) << s.name;
    EXPECT_LE(s.worst, s.tolerance) << s.name;
    EXPECT_TRUE(s.counterexample.empty());
  }
  EXPECT_TRUE(rep.passed());
}

TEST(Verify, CorruptedStencilFailsEigenSuite) {
  VerifyOptions opt;
  opt.window = corrupted_window;
  opt.eigen_realizations = 5;
  const SuiteResult s = verify_eigen(opt);
  EXPECT_FALSE(s.passed);
  EXPECT_GT(s.worst, 1e-6);
  EXPECT_NE(s.counterexample.find("realization 0"), std::string::npos) << s.counterexample;
}

TEST(Verify, CorruptedStencilLeavesOtherSuitesAlone) {
  VerifyOptions opt;
  opt.window = corrupted_window;
  const VerifyReport rep = run_verification(opt);
  EXPECT_FALSE(rep.passed());
  for (const auto& s : rep.suites) EXPECT_EQ(s.passed, s.name != "eigen-recursion") << s.name;
}

TEST(Verify, SuiteRunKeepsFirstCounterexample) {
  detail::SuiteRun run("demo", 1.0);
  run.check(0.5, [] { return std::string("a"); });
  run.check(2.0, [] { return std::string("b"); });
  run.check(3.0, [] { return std::string("c"); });
  const SuiteResult r = run.finish();
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.counterexample, "b");
  EXPECT_EQ(r.worst, 3.0);
  EXPECT_EQ(r.checks, 3u);
}
