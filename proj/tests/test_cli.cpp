#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(DECSTORE_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("decstore_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("repository round trip through the command line") {
  TempDir dir;
  const fs::path repo = dir.path / "repo";
  const fs::path f = dir.path / "f.bin";
  std::string text;
  for (int i = 0; i < 300; ++i) text += "line " + std::to_string(i * 7919 % 1000) + "\n";
  std::ofstream(f, std::ios::binary) << text;

  CHECK(run("init --repo " + repo.string() + " --k 4 --kappa 2 --delta-cap 200 --pad 20").code == 0);
  const Run c1 = run("commit --repo " + repo.string() + " " + f.string());
  CHECK(c1.code == 0);
  CHECK(c1.out.rfind("version 1 batch 0", 0) == 0);

  const std::string edited = text.substr(0, 500) + "inserted words" + text.substr(500);
  std::ofstream(f, std::ios::binary | std::ios::trunc) << edited;
  const Run c2 = run("commit --repo " + repo.string() + " " + f.string());
  CHECK(c2.code == 0);
  CHECK(c2.out.find("reset none") != std::string::npos);

  const fs::path out = dir.path / "v1.bin";
  CHECK(run("checkout --repo " + repo.string() + " -v 1 --out " + out.string()).code == 0);
  CHECK(slurp(out) == text);
  CHECK(run("checkout --repo " + repo.string() + " --version 2").out == edited);

  const Run log = run("log --repo " + repo.string());
  CHECK(log.code == 0);
  CHECK(log.out.rfind("version,batch,reset,size,groups,gamma,full_groups,storage_units,predicted_reads\n", 0) == 0);
  CHECK(std::count(log.out.begin(), log.out.end(), '\n') == 3);

  CHECK(run("init --repo " + repo.string()).code == 2);
  CHECK(run("checkout --repo " + repo.string() + " -v 9").code == 2);
  std::ofstream(repo / "manifest.tsv", std::ios::trunc) << "junk\n";
  CHECK(run("log --repo " + repo.string()).code == 3);
}

TEST_CASE("argument errors exit with 1") {
  CHECK(run("").code == 1);
  CHECK(run("no-such-command").code == 1);
  CHECK(run("resilience --bogus").code == 1);
  CHECK(run("checkout --repo /tmp").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("invalid values exit with 2") {
  CHECK(run("optimize-threshold --pmf zipf --pmf-param 1 --k 10").code == 2);
  CHECK(run("init --repo /tmp/decstore_never --k 8 --kappa 1.3").code == 2);
  CHECK(run("resilience --p 1.5").code == 2);
}

TEST_CASE("threshold search output") {
  const Run r = run("optimize-threshold --pmf binomial --pmf-param 0.3 --k 20 --kappa 2");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("pmf,param,k,kappa,w,cauchy,T_opt,", 0) == 0);
  const auto row = r.out.substr(r.out.find('\n') + 1);
  CHECK(row.find(",6,35.1") != std::string::npos);
}

TEST_CASE("benchmarks are deterministic in the seed") {
  const std::string args = "bench-zeropads --trials 30 --seed 4 --params 5,30";
  const Run a = run(args);
  const Run b = run(args + " --threads 3");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("workload_param,strategy,mean_storage_units\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 5);
  CHECK(run("bench-zeropads --trials 30 --seed 5 --params 5,30").out != a.out);
}

TEST_CASE("simulation and resilience subcommands") {
  const Run s = run("simulate --n 20 --k 10 --trials 1 --profile 3,8,3,6,7,9,10,6,2,2,3,9,3,9,3,10,4,2,3");
  CHECK(s.code == 0);
  CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 21);
  CHECK(s.out.find(",312,312\n") != std::string::npos);
  const Run r = run("resilience --p 0.01,0.02 --method enumerate");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("p,", 0) == 0);
  TempDir dir;
  const fs::path cfg = dir.path / "e.cfg";
  std::ofstream(cfg) << "family=bursty-insert\nparam=5\nstrategy=dec\ntrials=10\n";
  const Run e = run("experiment " + cfg.string());
  CHECK(e.code == 0);
  CHECK(e.out.find("5,dec,") != std::string::npos);
}
