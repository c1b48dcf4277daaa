#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "qkdv/config.hpp"
#include "qkdv/csv.hpp"
#include "qkdv/error.hpp"
#include "qkdv/parallel.hpp"
#include "qkdv/problems.hpp"
#include "qkdv/trajectory_io.hpp"

using namespace qkdv;

// Published FNV-1a 64-bit test vectors.
TEST(Hash, Fnv1aVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(hash_hex(0xaf63dc4c8601ec8cull), "af63dc4c8601ec8c");
  EXPECT_EQ(hash_hex(1), "0000000000000001");
}

TEST(Config, ParseAndOverride) {
  const Config c = Config::parse("# comment\nproblem = varcoef\neps = 0.1  # trailing\n\neps = 0.2\nlist = 1, 2,3\n");
  EXPECT_EQ(c.get_string("problem", ""), "varcoef");
  EXPECT_DOUBLE_EQ(c.get_double("eps", 0.0), 0.2);
  EXPECT_EQ(c.get_list("list", {}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(c.get_int("missing", 7), 7);
  EXPECT_EQ(c.canonical(), "eps = 0.2\nlist = 1, 2,3\nproblem = varcoef\n");
}

TEST(Config, Malformed) {
  EXPECT_THROW(Config::parse("no equals sign\n"), UsageError);
  const Config c = Config::parse("eps = abc\nn = 1.5\nflag = maybe\n");
  EXPECT_THROW(c.get_double("eps", 0.0), UsageError);
  EXPECT_THROW(c.get_int("n", 0), UsageError);
  EXPECT_THROW(c.get_bool("flag", false), UsageError);
  EXPECT_THROW(c.require_known({"eps"}), UsageError);
  EXPECT_NO_THROW(c.require_known({"eps", "n", "flag"}));
  EXPECT_THROW(Config::load("/nonexistent/qkdv.cfg"), UsageError);
}

TEST(Config, ExperimentHashIgnoresJobsAndOut) {
  Config c = Config::parse("problem = airy\neps = 0.1\n");
  const std::string h = experiment_from(c, "solve").config_hash();
  c.set("jobs", "4");
  c.set("out", "/tmp/elsewhere");
  EXPECT_EQ(experiment_from(c, "solve").config_hash(), h);
  c.set("eps", "0.2");
  EXPECT_NE(experiment_from(c, "solve").config_hash(), h);
  EXPECT_NE(experiment_from(Config::parse("problem = airy\neps = 0.1\n"), "energy").config_hash(), h);
}

TEST(Config, ExperimentFields) {
  const ExperimentConfig e = experiment_from(
      Config::parse("problem = varcoef\nparam.amp = 0.5\ngrid.n_points = 1024\nintegrator = imex\nseed = 9\n"), "solve");
  EXPECT_EQ(e.problem, "varcoef");
  EXPECT_DOUBLE_EQ(e.params.at("amp"), 0.5);
  EXPECT_EQ(e.grid.n_points, 1024u);
  EXPECT_EQ(e.solve.integrator, Integrator::imex);
  EXPECT_EQ(e.seed, 9u);
  EXPECT_THROW(experiment_from(Config::parse("integrator = euler\n"), "solve"), UsageError);
}

TEST(Csv, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, Render) {
  CsvTable t({"name", "value"});
  t.row() << "a,b" << 1.5;
  t.row() << std::string("plain") << 2;
  EXPECT_EQ(t.render("00ff"), "# config_hash=00ff\nname,value\n\"a,b\",1.5\nplain,2\n");
  t.row() << 1.0;
  EXPECT_THROW(t.render("00ff"), DimensionError);
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Csv, RateStudyTable) {
  RateStudy r;
  r.parameter = "kappa";
  r.norm_id = "H^9";
  r.values = {0.5, 0.25};
  r.norms = {1.0, 2.0};
  r.slope = -1.0;
  CsvTable t = rate_study_table();
  append_rate_study(t, r);
  ASSERT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cells(1), (std::vector<std::string>{"kappa", "0.25", "H^9", "2", "-1", "0"}));
}

TEST(TrajectoryIo, RoundTrip) {
  Trajectory tr;
  tr.grid = GridSpec{12.5, 16, 2};
  tr.config.eps = 0.25;
  for (int k = 0; k < 3; ++k) {
    tr.times.push_back(0.1 * k);
    tr.states.push_back(gaussian(tr.grid, 1.0 + k, 1.0));
  }
  std::stringstream buf;
  write_trajectory(buf, tr);
  EXPECT_EQ(buf.str().size(), 48u + 3u * (8u + 2u * 16u * 8u));
  EXPECT_EQ(buf.str().substr(0, 8), "QKDVTRJ1");
  EXPECT_EQ(static_cast<unsigned char>(buf.str()[8]), 16u);  // little-endian n_points

  const Trajectory back = read_trajectory(buf);
  EXPECT_EQ(back.grid, tr.grid);
  EXPECT_EQ(back.config.eps, 0.25);
  EXPECT_EQ(back.times, tr.times);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(back.states[k].values(), tr.states[k].values());
}

TEST(TrajectoryIo, RejectsBadInput) {
  std::stringstream junk("NOTATRAJECTORY");
  EXPECT_THROW(read_trajectory(junk), UsageError);

  Trajectory tr;
  tr.grid = GridSpec{10.0, 8, 1};
  tr.times = {0.0};
  tr.states = {Field(tr.grid)};
  std::stringstream buf;
  write_trajectory(buf, tr);
  std::stringstream cut(buf.str().substr(0, buf.str().size() - 4));
  EXPECT_THROW(read_trajectory(cut), UsageError);
}

TEST(Parallel, OrderAndErrors) {
  const auto out = parallel_map(50, 4, [](std::size_t i) { return static_cast<double>(i * i); });
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(out[i], static_cast<double>(i * i));
  std::atomic<int> calls{0};
  EXPECT_THROW(parallel_map(8, 3,
                            [&](std::size_t i) {
                              ++calls;
                              if (i == 5) throw DomainError("five");
                              return 0;
                            }),
               DomainError);
  EXPECT_EQ(calls.load(), 8);
}
