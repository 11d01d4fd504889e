#include <sstream>

#include <gtest/gtest.h>

#include "tqp_cli/commands.hpp"

using namespace tqp::cli;

TEST(FormatNumber, FixedSignificantDigits) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1e-12), "1e-12");
  EXPECT_EQ(format_number(123456789012345.0), "1.23456789012e+14");
}

TEST(Config, DefaultsCoverEveryCommand) {
  for (const auto& name : command_names()) {
    const json c = default_config(name);
    EXPECT_TRUE(c.contains("seed")) << name;
    EXPECT_TRUE(c.contains("threads")) << name;
  }
  EXPECT_THROW(default_config("bogus"), UsageError);
}

TEST(Config, MergeOverridesAndRejections) {
  GlobalOptions flags;
  const json merged = resolve_config("fidelity-sweep", json{{"n_max", 1.0}, {"noise", {{"n_th", 2.0}}}}, flags);
  EXPECT_EQ(merged["n_max"].get<double>(), 1.0);
  EXPECT_EQ(merged["noise"]["n_th"].get<double>(), 2.0);
  EXPECT_EQ(merged["noise"]["q"].get<double>(), 1e6);

  try {
    resolve_config("fidelity-sweep", json{{"noise", {{"bad", 1}}}}, flags);
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("'noise.bad'"), std::string::npos);
  }
  EXPECT_THROW(resolve_config("entropy-sweep", json{{"n_mx", 1.0}}, flags), UsageError);
  EXPECT_THROW(resolve_config("entropy-sweep", json{{"n_max", "two"}}, flags), UsageError);
}

TEST(Config, FlagPrecedence) {
  GlobalOptions flags;
  flags.seed = 42;
  flags.cutoff = 9;
  flags.threads = 2;
  const json a = resolve_config("algebra-check", json::parse(R"({"seed": 5, "threads": 4})"), flags);
  EXPECT_EQ(a["seed"].get<std::uint64_t>(), 42u);
  EXPECT_EQ(a["cutoffs"], json::array({9}));
  EXPECT_EQ(a["threads"].get<std::size_t>(), 2u);
  const json n = resolve_config("ns-check", nullptr, flags);
  EXPECT_EQ(n["cutoff"].get<std::size_t>(), 9u);
  flags.cutoff = 1;
  EXPECT_THROW(resolve_config("ns-check", nullptr, flags), UsageError);
}

TEST(Execute, EntropySweepOutputsAndExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(execute("entropy-sweep", GlobalOptions{}, out, err), kExitOk);
  const json doc = json::parse(out.str());
  EXPECT_EQ(doc["command"], "entropy-sweep");
  EXPECT_TRUE(doc["passed"].get<bool>());

  const auto first = run_command("entropy-sweep", resolve_config("entropy-sweep", nullptr, {}));
  const auto second = run_command("entropy-sweep", resolve_config("entropy-sweep", nullptr, {}));
  ASSERT_TRUE(first.csv.has_value());
  EXPECT_EQ(*first.csv, *second.csv);
  EXPECT_EQ(first.csv->substr(0, first.csv->find('\n')),
            "n_mean,S_thermal,S_tqp,n_tilde,landauer_pure,landauer_tqp,crossover_flag");

  GlobalOptions missing;
  missing.config_path = "/nonexistent/config.json";
  EXPECT_EQ(execute("entropy-sweep", missing, out, err), kExitUsage);
}
