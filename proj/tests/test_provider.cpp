#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "layertext/provider.hpp"
#include "test_support.hpp"

using namespace layertext;

TEST(ProviderCommand, Parsing) {
  EXPECT_EQ(ProviderCommand::parse("  tool  --x 1 ").argv, (std::vector<std::string>{"tool", "--x", "1"}));
  EXPECT_EQ(ProviderCommand::from_json(nlohmann::json("a b")).argv, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(ProviderCommand::from_json(nlohmann::json::array({"a b", "c"})).argv,
            (std::vector<std::string>{"a b", "c"}));
  EXPECT_TRUE(ProviderCommand::parse("   ").empty());
  EXPECT_CODE(ProviderCommand::from_json(nlohmann::json(3)), ErrorCode::InvalidScript);
}

TEST(RunProcess, ExitCodesAndOutput) {
  const ProcessResult ok = run_process({"sh", "-c", "echo out; echo err >&2"});
  EXPECT_EQ(ok.exit_code, 0);
  EXPECT_NE(ok.output.find("out"), std::string::npos);
  EXPECT_NE(ok.output.find("err"), std::string::npos);
  EXPECT_EQ(run_process({"sh", "-c", "exit 5"}).exit_code, 5);
  EXPECT_CODE(run_process({"/nonexistent/binary"}), ErrorCode::ProviderLaunchFailure);
  EXPECT_CODE(run_process({}), ErrorCode::ProviderLaunchFailure);
}

TEST(InvokeProvider, NonZeroExitCarriesOutput) {
  try {
    invoke_provider(ProviderCommand{{layertext::testing::provider_path("fail.sh").string()}}, {"--out", "x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderNonZeroExit);
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
}

TEST(TempDir, HonorsEnvironmentOverride) {
  const std::filesystem::path base = std::filesystem::temp_directory_path() / "layertext-tmp-override-test";
  std::filesystem::create_directories(base);
  ::setenv("LAYERTEXT_TMPDIR", base.c_str(), 1);
  std::filesystem::path made;
  {
    TempDir t;
    made = t.path();
    EXPECT_EQ(made.parent_path(), base);
    std::ofstream(t.file("x.txt")) << "x";
    EXPECT_TRUE(std::filesystem::exists(t.file("x.txt")));
  }
  ::unsetenv("LAYERTEXT_TMPDIR");
  EXPECT_FALSE(std::filesystem::exists(made));
  std::filesystem::remove_all(base);
}
