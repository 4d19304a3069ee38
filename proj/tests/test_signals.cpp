#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ssgain/signals.hpp"

using namespace ssgain;

namespace {

std::filesystem::path tmp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("step signal evaluation and validation") {
  StepSignal step;
  step.breakpoints = {0.0, 1.5, 4.0, 6.0};
  step.levels = {2.0, -1.0, 0.5};
  step.validate();

  CHECK(step.eval(-0.1) == 0.0);
  CHECK(step.eval(0.0) == 2.0);
  CHECK(step.eval(1.4999) == 2.0);
  CHECK(step.eval(1.5) == -1.0);
  CHECK(step.eval(4.0) == 0.5);
  CHECK(step.eval(5.999) == 0.5);
  CHECK(step.eval(6.0) == 0.0);
  CHECK(step.eval(100.0) == 0.0);

  StepSignal bad = step;
  bad.breakpoints[2] = bad.breakpoints[1];
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = step;
  bad.breakpoints[0] = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = step;
  bad.levels.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.levels.clear();
  bad.breakpoints = {0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("dt input evaluation") {
  DtInput u;
  u.samples = {1.0, 0.5, -2.0};
  CHECK(u.eval(-1) == 0.0);
  CHECK(u.eval(0) == 1.0);
  CHECK(u.eval(2) == -2.0);
  CHECK(u.eval(3) == 0.0);

  InputSignal sig = u;
  CHECK(eval_input(sig, -3.0) == 0.0);
  CHECK(eval_input(sig, 1.0) == 0.5);

  StepSignal step;
  step.breakpoints = {0.0, 2.0};
  step.levels = {3.0};
  InputSignal csig = step;
  CHECK(eval_input(csig, 1.0) == 3.0);
  CHECK(eval_input(csig, 2.5) == 0.0);
}

TEST_CASE("toeplitz matrix from dt input") {
  DtInput u;
  u.samples = {1.0, 2.0, 3.0};
  const Eigen::MatrixXd t = toeplitz(u, 4);
  REQUIRE(t.rows() == 4);
  // row i, col j holds u(i-j); strictly upper triangle is zero
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      const long lag = static_cast<long>(i) - static_cast<long>(j);
      const double expect =
          (lag >= 0 && lag < 3) ? u.samples[static_cast<std::size_t>(lag)] : 0.0;
      CHECK(t(i, j) == expect);
    }
}

TEST_CASE("truncated time shifts of step breakpoints") {
  StepSignal step;
  step.breakpoints = {0.5, 2.0, 5.0};
  step.levels = {1.0, -1.0};
  CHECK(sbar(step, 0, 3.0) == 2.5);
  CHECK(sbar(step, 1, 3.0) == 1.0);
  CHECK(sbar(step, 2, 3.0) == 0.0);
  CHECK(sbar(step, 2, 7.25) == 2.25);
  CHECK_THROWS_AS(sbar(step, 3, 1.0), std::invalid_argument);
}

TEST_CASE("index sets") {
  const IndexSet all = IndexSet::all(4);
  REQUIRE(all.indices == std::vector<std::size_t>{0, 1, 2, 3});
  all.validate(4);

  IndexSet s;
  s.indices = {1, 3};
  s.validate(5);
  CHECK(s.size() == 2);
  s.indices = {1, 1};
  CHECK_THROWS_AS(s.validate(5), std::invalid_argument);
  s.indices = {5};
  CHECK_THROWS_AS(s.validate(5), std::invalid_argument);
  s.indices = {};
  CHECK_THROWS_AS(s.validate(5), std::invalid_argument);
}

TEST_CASE("dataset validation") {
  Dataset ds;
  ds.domain = TimeDomain::DT;
  DtInput u;
  u.samples = {1.0, 0.0};
  ds.input = u;
  ds.sample_times = {0.0, 1.0, 2.0};
  ds.outputs = {0.1, 0.2, 0.3};
  ds.validate();

  Dataset bad = ds;
  bad.sample_times = {0.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ds;
  bad.sample_times = {0.0, 2.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ds;
  bad.sample_times[0] = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ds;
  StepSignal step;
  step.breakpoints = {0.0, 1.0};
  step.levels = {1.0};
  bad.input = step;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("dt dataset csv round trip is byte identical") {
  Dataset ds;
  ds.domain = TimeDomain::DT;
  DtInput u;
  u.samples = {1.0, -0.3333333333333333, 0.1};
  ds.input = u;
  ds.sample_times = {0.0, 1.0, 2.0};
  ds.outputs = {0.0, 0.7071067811865476, -1.25e-8};

  const auto p1 = tmp_path("ssgain_dt_a.csv");
  const auto p2 = tmp_path("ssgain_dt_b.csv");
  save_dt_dataset(ds, p1.string());
  const Dataset back = load_dt_dataset(p1.string());
  CHECK(back.sample_times == ds.sample_times);
  CHECK(back.outputs == ds.outputs);
  CHECK(std::get<DtInput>(back.input).samples == u.samples);

  save_dt_dataset(back, p2.string());
  std::ifstream a(p1), b(p2);
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("ct dataset csv round trip") {
  Dataset ds;
  ds.domain = TimeDomain::CT;
  StepSignal step;
  step.breakpoints = {0.0, 1.7, 3.1415926535897931, 9.0};
  step.levels = {1.0, -1.0, 1.0};
  ds.input = step;
  ds.sample_times = {0.5, 2.5, 8.25};
  ds.outputs = {0.01, -0.5, 4.0 / 3.0};

  const auto ps = tmp_path("ssgain_ct_steps.csv");
  const auto py = tmp_path("ssgain_ct_samples.csv");
  save_ct_dataset(ds, ps.string(), py.string());
  const Dataset back = load_ct_dataset(ps.string(), py.string());
  const auto& bstep = std::get<StepSignal>(back.input);
  CHECK(bstep.breakpoints == step.breakpoints);
  CHECK(bstep.levels == step.levels);
  CHECK(back.sample_times == ds.sample_times);
  CHECK(back.outputs == ds.outputs);
  std::filesystem::remove(ps);
  std::filesystem::remove(py);
}

TEST_CASE("csv errors carry row and column diagnostics") {
  const auto p = tmp_path("ssgain_bad.csv");

  write_file(p, "t,u\n0,1,2\n");
  CHECK_THROWS_AS(load_dt_dataset(p.string()), CsvError);

  write_file(p, "t,u,y\n0,1\n");
  CHECK_THROWS_WITH_AS(load_dt_dataset(p.string()),
                       doctest::Contains("row 2"), CsvError);

  write_file(p, "t,u,y\n0,1,0.5\n1,oops,0.6\n");
  try {
    load_dt_dataset(p.string());
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
    CHECK(msg.find("oops") != std::string::npos);
  }

  write_file(p, "t,u,y\n");
  CHECK_THROWS_AS(load_dt_dataset(p.string()), CsvError);
  write_file(p, "");
  CHECK_THROWS_AS(load_dt_dataset(p.string()), CsvError);
  CHECK_THROWS_AS(load_dt_dataset((p.string() + ".missing")),
                  CsvError);

  const auto ps = tmp_path("ssgain_bad_steps.csv");
  write_file(ps, "s,xi\n0,1\n2,\n");
  write_file(p, "t,y\n0.5,0.1\n");
  CHECK_NOTHROW(load_ct_dataset(ps.string(), p.string()));
  write_file(ps, "s,xi\n0,\n2,1\n");
  CHECK_THROWS_WITH_AS(load_ct_dataset(ps.string(), p.string()),
                       doctest::Contains("only the final breakpoint"),
                       CsvError);
  std::filesystem::remove(p);
  std::filesystem::remove(ps);
}
