#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run_cli(const std::string& args, const std::string& redirect = "") {
  std::string cmd = std::string(HMLAB_CLI_PATH) + " " + args;
  if (!redirect.empty()) cmd += " > " + redirect + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("quantum-exactness sweeps every input and reports ok") {
  REQUIRE(run_cli("quantum-exactness --m 4 --out qe.csv") == 0);
  const std::string csv = read_file("qe.csv");
  REQUIRE(csv.rfind("# schema=1\n", 0) == 0);
  REQUIRE(count_lines(csv) == 2 + 48);  // schema + header + 16*3 rows
  REQUIRE(csv.find("WRONG") == std::string::npos);
  REQUIRE(csv.find(",ok") != std::string::npos);

  REQUIRE(run_cli("quantum-exactness --m 4 --corrupt-referee --out qe_bad.csv") == 1);
  REQUIRE(read_file("qe_bad.csv").find("WRONG") != std::string::npos);

  // row count is sum over m of 2^m * |M_m|
  REQUIRE(run_cli("quantum-exactness --m 4 8 --out qe8.csv") == 0);
  REQUIRE(count_lines(read_file("qe8.csv")) == 2 + 48 + 26880);
}

TEST_CASE("depolarize reports the bound and agreement columns") {
  REQUIRE(run_cli("depolarize --m 4 --trials 20000 --seed 5 --out dp.csv") == 0);
  const std::string csv = read_file("dp.csv");
  REQUIRE(csv.find("0.0625") != std::string::npos);  // 1/m^2 at m=4
  REQUIRE(csv.find(",1,1\n") != std::string::npos);  // bound_ok, agree_3sigma

  REQUIRE(run_cli("depolarize --m 32 --out dp_bad.csv", "dp_err.txt") == 2);
  REQUIRE(read_file("dp_err.txt").find("supported m") != std::string::npos);
}

TEST_CASE("identical seeds give byte-identical output") {
  REQUIRE(run_cli("verify-dpt --trials 20 --seed 9 --out vd1.csv") == 0);
  REQUIRE(run_cli("verify-dpt --trials 20 --seed 9 --out vd2.csv") == 0);
  const std::string a = read_file("vd1.csv"), b = read_file("vd2.csv");
  REQUIRE(!a.empty());
  REQUIRE(a == b);
  REQUIRE(a.find("premise_met") != std::string::npos);
  REQUIRE(a.find("bias_implication,4,planted_m4") != std::string::npos);
  // planted family at m=4 misses the entropy premise
  REQUIRE(a.find("planted_m4,3,") != std::string::npos);
}

TEST_CASE("tradeoff-scan emits the cost and baseline columns") {
  REQUIRE(run_cli("tradeoff-scan --m 4 --k 1 --budget 0 1 --trials 5000 --seed 4 --out ts.csv --gnuplot ts.dat") == 0);
  const std::string csv = read_file("ts.csv");
  REQUIRE(csv.find("4,1,0,2,7,2,exact,0.5,") != std::string::npos);
  REQUIRE(csv.find("4,1,1,2,7,2,exact,0.75,") != std::string::npos);
  const std::string dat = read_file("ts.dat");
  REQUIRE(dat.rfind("# m k budget", 0) == 0);
}

TEST_CASE("classical-search writes the search schema") {
  REQUIRE(run_cli("classical-search --m 4 --k 1 --budget 0 1 4 --seed 3 --out cs.csv") == 0);
  const std::string csv = read_file("cs.csv");
  REQUIRE(csv.find("m,k,c,method,success,stderr,seed") != std::string::npos);
  REQUIRE(csv.find("4,1,0,exact,0.5,,3") != std::string::npos);
  REQUIRE(csv.find("4,1,1,exact,0.75,,3") != std::string::npos);
  REQUIRE(csv.find("4,1,4,exact,1,,3") != std::string::npos);
}

TEST_CASE("verify-dpt accepts user distribution files") {
  {
    std::ofstream d("user.dist");
    d << "m=4\n0110 2.0\n1001 2.0\n";
  }
  REQUIRE(run_cli("verify-dpt --trials 5 --seed 2 --dist user.dist --out vdist.csv", "vdist_err.txt") == 0);
  REQUIRE(read_file("vdist.csv").find("file:user.dist") != std::string::npos);
  REQUIRE(read_file("vdist_err.txt").find("renormalized") != std::string::npos);
}

TEST_CASE("config file supplies defaults, flags win") {
  {
    std::ofstream cfg("hmlab.ini");
    cfg << "m=4\ntrials=5000\nseed=11\n";
  }
  REQUIRE(run_cli("depolarize --config hmlab.ini --out cfg1.csv") == 0);
  REQUIRE(run_cli("depolarize --config hmlab.ini --seed 12 --out cfg2.csv") == 0);
  const std::string a = read_file("cfg1.csv"), b = read_file("cfg2.csv");
  REQUIRE(!a.empty());
  REQUIRE(a != b);  // the command-line seed overrode the file's
}
