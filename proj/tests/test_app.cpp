#include <gtest/gtest.h>

#include <filesystem>

#include "app/config.hpp"
#include "app/stages.hpp"
#include "semcloud/errors.hpp"

using namespace semcloud;

TEST(AppConfig, SerializeRoundTrip) {
  app::ProjectConfig c;
  c.seed = 42;
  c.out = "elsewhere";
  c.range = 4;
  c.volumes = {0.5, 1.0};
  c.learn.methods = {learn::Method::KNN};
  const app::ProjectConfig back = app::parse_config(app::serialize_config(c));
  EXPECT_EQ(app::serialize_config(back), app::serialize_config(c));
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.range, 4);
}

TEST(AppConfig, ShippedExampleLoads) {
  const auto c = app::load_config(std::string(SEMCLOUD_DATA_DIR) + "/semcloud.json");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.cluster.nodes.size(), sim::ClusterSpec::desk_default().nodes.size());
  EXPECT_DOUBLE_EQ(c.cloud.nst, 15360);
}

TEST(AppConfig, PartialCostKeepsDefaults) {
  const auto c = app::parse_config(R"({"cost": {"noise": 0.0}})");
  EXPECT_EQ(c.cost.noise, 0.0);
  EXPECT_EQ(c.cost.legacy_threads, app::ProjectConfig::pilot_cost().legacy_threads);
}

TEST(AppConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(app::parse_config(R"({"sed": 3})"), ConfigError);
  EXPECT_THROW(app::parse_config(R"({"range": 0})"), ConfigError);
  EXPECT_THROW(app::parse_config("not json"), ConfigError);
}

TEST(AppStages, ReportOnEmptyDirectory) {
  app::ProjectConfig c;
  c.out = (std::filesystem::temp_directory_path() / "semcloud_app_empty_report").string();
  std::filesystem::remove_all(c.out);
  const auto r = app::run_report(c);
  EXPECT_EQ(r.status, "empty");
}

TEST(AppStages, ConfigureWithoutModelsNamesTheMissingExternal) {
  app::ProjectConfig c;
  c.out = (std::filesystem::temp_directory_path() / "semcloud_app_no_models").string();
  std::filesystem::remove_all(c.out);
  app::run_pilot(c);
  EXPECT_THROW(app::run_configure(c, std::string(SEMCLOUD_DATA_DIR) + "/pipelines/desk.json"), MissingExternal);
}
