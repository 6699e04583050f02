#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(OQSD_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) {
    res.output.append(buf, n);
  }
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("simulate emits the exact trajectory") {
  RunResult r = run("simulate --model central-spin --param spins=1 "
                    "--param coupling=0.5 --t-max 1 --dt 0.5 --initial 1,0,0");
  CHECK(r.exit_code == 0);
  CHECK(r.output ==
        "t,x,y,z\n"
        "0,1,0,0\n"
        "0.5,0.87758256189,0,0\n"
        "1,0.540302305868,0,0\n");
}

TEST_CASE("identical configs give byte-identical output") {
  std::string args = "simulate --model quasi-periodic --t-max 20 --dt 0.01 "
                     "--initial 0.3,0.4,0.5";
  RunResult a = run(args);
  RunResult b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  // Single header row, strictly increasing time column.
  std::istringstream lines(a.output);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,x,y,z");
  double prev = -1.0;
  while (std::getline(lines, line)) {
    CHECK(line.find("t,") != 0);
    double t = std::stod(line);
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("derive prints the printed coefficient vector") {
  RunResult r = run("derive --model central-spin --param spins=2 "
                    "--param coupling=0.70710678118654752");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("coeffs_x = 0 4 0 1") != std::string::npos);
  CHECK(r.output.find("order_x = 3") != std::string::npos);
}

TEST_CASE("integrate reports a small residual through singularities") {
  RunResult r = run("integrate --model two-spin --param omega1=1 "
                    "--param omega2=2 --t-max 12.566370614359172 --dt 0.004 "
                    "--out /dev/null");
  CHECK(r.exit_code == 0);
  auto pos = r.output.find("max_residual = ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.output.substr(pos + 15)) < 1e-6);
}

TEST_CASE("singularities subcommand") {
  RunResult r = run("singularities --model damped-cosine --param gamma=1 "
                    "--param omega=1 --t-max 5");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("count = 2") != std::string::npos);
  CHECK(r.output.find("t_0 = 1.570796") != std::string::npos);
}

TEST_CASE("measure subcommand, both rules") {
  RunResult tol = run("measure --model central-spin --param spins=1 "
                      "--param coupling=0.5 --epsilon 0.001 --t-max 50");
  CHECK(tol.exit_code == 0);
  CHECK(tol.output.find("tau = 6.25") != std::string::npos);
  CHECK(tol.output.find("rule = tolerance") != std::string::npos);

  RunResult per = run("measure --model central-spin --param spins=1 "
                      "--param coupling=0.5 --periodic");
  CHECK(per.exit_code == 0);
  CHECK(per.output.find("rate = 0.3183") != std::string::npos);

  // Unreachable tolerance: numerical not-found, exit code 2.
  RunResult nf = run("measure --model damped-cosine --param gamma=1 "
                     "--param omega=100 --epsilon 1e-4 --t-max 2");
  CHECK(nf.exit_code == 2);
}

TEST_CASE("mutual information CSV") {
  RunResult r = run("mutual-info --model central-spin --param spins=1 "
                    "--param coupling=0.5 --t-max 3.141592653589793 "
                    "--dt 0.785398163 --initial 1,0,0 --oracle");
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.output);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,I");
  REQUIRE(std::getline(lines, line));
  CHECK(line == "0,0");
  // Resource bound on the oracle path.
  RunResult big = run("mutual-info --model central-spin --param spins=12 "
                      "--t-max 1 --dt 0.5 --oracle");
  CHECK(big.exit_code == 2);
}

TEST_CASE("tomography over four trajectory files") {
  std::string dir = "cli_tomo_tmp";
  std::string mk = "mkdir -p " + dir;
  REQUIRE(std::system(mk.c_str()) == 0);
  const char* initials[4] = {"0,0,1", "0,0,-1", "1,0,0", "0,1,0"};
  for (int i = 0; i < 4; ++i) {
    std::ostringstream cmd;
    cmd << "simulate --model central-spin --param spins=1 "
           "--param coupling=0.5 --t-max 1.2 --dt 0.002 --initial "
        << initials[i] << " --out " << dir << "/traj" << i << ".csv";
    REQUIRE(run(cmd.str()).exit_code == 0);
  }
  std::ostringstream cmd;
  cmd << "tomography " << dir << "/traj0.csv " << dir << "/traj1.csv "
      << dir << "/traj2.csv " << dir << "/traj3.csv --out " << dir
      << "/report.csv";
  CHECK(run(cmd.str()).exit_code == 0);
  std::string report = slurp(dir + "/report.csv");
  // The rate column tracks (1/2) tan t: check the row closest to t = 1.
  std::istringstream rows(report);
  std::string row;
  REQUIRE(std::getline(rows, row)); // header
  bool found = false;
  while (std::getline(rows, row)) {
    std::istringstream fields(row);
    std::string field;
    REQUIRE(std::getline(fields, field, ','));
    double t = std::stod(field);
    if (std::abs(t - 1.0) > 1e-3) continue;
    for (int i = 0; i < 10; ++i) REQUIRE(std::getline(fields, field, ','));
    CHECK(std::stod(field) ==
          doctest::Approx(0.5 * std::tan(t)).epsilon(1e-3));
    found = true;
    break;
  }
  CHECK(found);

  // Grid mismatch is a usage error.
  std::ostringstream bad;
  bad << "simulate --model identity --t-max 1.2 --dt 0.003 --out " << dir
      << "/short.csv";
  REQUIRE(run(bad.str()).exit_code == 0);
  std::ostringstream mismatch;
  mismatch << "tomography " << dir << "/traj0.csv " << dir << "/traj1.csv "
           << dir << "/traj2.csv " << dir << "/short.csv";
  CHECK(run(mismatch.str()).exit_code == 1);
  std::string rm = "rm -rf " + dir;
  CHECK(std::system(rm.c_str()) == 0);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run("simulate --model no-such-model").exit_code == 1);
  CHECK(run("simulate --model identity --initial 2,0,0").exit_code == 1);
  CHECK(run("frobnicate").exit_code == 1);
  CHECK(run("models").exit_code == 0);
}
