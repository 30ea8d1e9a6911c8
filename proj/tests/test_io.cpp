#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace acagp;

TEST(Io, CloudRoundTrip) {
  Rng rng(1);
  const PointCloud c = generate_cloud(1, 0.5, 10, rng);
  const PointCloud back = io::cloud_from_json(io::cloud_to_json(c));
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    EXPECT_EQ(back[i], c[i]);
  EXPECT_THROW(io::cloud_from_json(io::json::parse(R"({"points": [[1]]})")), InputError);
  EXPECT_THROW(io::cloud_from_json(io::json::parse(R"([1, 2])")), InputError);
  EXPECT_THROW(io::read_cloud("/nonexistent/cloud.json"), InputError);
}

TEST(Io, SkeletonJson) {
  Rng rng(2);
  const PlacedClouds pc = place_clouds(1.0, 30, 20, 2.5, rng);
  KernelHandle<> k;
  StoppingParams stop;
  stop.k_max = 3;
  stop.epsilon = 0.0;
  const Skeleton sk = aca_gp(pc.x, pc.y, k, stop, GpOptions{}, rng);
  const io::json j = io::skeleton_to_json(sk);
  EXPECT_EQ(j["rank"], 3);
  EXPECT_EQ(j["U"].size(), 3u);
  EXPECT_EQ(j["U"][0].size(), 30u);
  EXPECT_EQ(j["V"][0].size(), 20u);
  EXPECT_EQ(j["pivot_trace"][0]["selector"], "first");
  EXPECT_EQ(j["pivot_trace"][2]["i"], sk.pivot_rows()[2]);
  EXPECT_EQ(j["kernel_evals"], sk.eval_count());
}

TEST(Io, NumberFormatting) {
  EXPECT_EQ(io::fmt9(0.1), "0.1");
  EXPECT_EQ(io::fmt9(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(io::fmt9(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(io::gain_to_json(Gain{0.0, true})["value"], nullptr);
}

TEST(Io, ResultsCsvLayout) {
  ExperimentConfig cfg;
  cfg.n = cfg.m = 40;
  cfg.realizations = 1;
  cfg.k_max = 2;
  std::ostringstream os;
  io::write_results_csv(os, run_benchmark(cfg));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, io::results_csv_header);
  std::vector<std::string> rows;
  while (std::getline(in, line))
    rows.push_back(line);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].rfind("1,aca,", 0), 0u);
  EXPECT_EQ(rows[1].rfind("1,acagp,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("1,svd,", 0), 0u);
  EXPECT_NE(rows[0].find(",,,,"), std::string::npos);
  // One realization: zero spread.
  EXPECT_NE(rows[0].find(",0,"), std::string::npos);
}
