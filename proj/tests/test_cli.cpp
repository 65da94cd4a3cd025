#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "detmodes_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd =
      "cd '" + work_dir().string() + "' && '" DETMODES_CLI "' " + args + " > last_stdout.txt 2> last_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_config(const std::string& name, const std::string& extra = "") {
  std::ofstream out(work_dir() / name);
  out << "nu = 0.1\nL = 6.283185307179586\nN = 16\ndt = 0.05\nT_total = 1\n"
         "snapshot_interval = 0.5\nforcing_amplitude = 1e-4\ninit_urms = 1e-4\n"
      << extra;
}

}  // namespace

TEST_CASE("simulate writes reproducible outputs") {
  write_config("sim.txt");
  REQUIRE(run("simulate --config sim.txt --output_dir a") == 0);
  REQUIRE(run("simulate --config sim.txt --output_dir b") == 0);
  for (const char* name : {"diagnostics.csv", "shells.csv", "energy.csv", "bounds.csv", "summary.txt",
                           "snapshot_000002.bin"}) {
    CAPTURE(name);
    const std::string first = slurp(work_dir() / "a" / name);
    CHECK_FALSE(first.empty());
    CHECK(first == slurp(work_dir() / "b" / name));
  }
  CHECK(slurp(work_dir() / "a" / "diagnostics.csv").rfind("t[time],", 0) == 0);
  CHECK(fs::exists(work_dir() / "a" / "config.txt"));
  CHECK_FALSE(fs::exists(work_dir() / "a" / "snapshot_000003.bin"));
}

TEST_CASE("sync, analyze and spectrum") {
  write_config("sync.txt", "output_dir = s\n");
  REQUIRE(run("sync --config sync.txt --T_total 2") == 0);
  const std::string w = slurp(work_dir() / "s" / "w_norm.csv");
  CHECK(w.rfind("t[time],w_L2", 0) == 0);
  CHECK(slurp(work_dir() / "s" / "decay_report.txt").find("sigma = ") != std::string::npos);

  REQUIRE(run("sync --config sync.txt --sync_mode steady --output_dir st") == 0);
  CHECK(slurp(work_dir() / "st" / "decay_report.txt").find("mode = steady") != std::string::npos);

  write_config("snap.txt", "output_dir = snaps\n");
  REQUIRE(run("simulate --config snap.txt") == 0);
  REQUIRE(run("analyze snaps/snapshot_000000.bin snaps/snapshot_000001.bin snaps/snapshot_000002.bin "
              "--output_dir an --bounds bounds.csv --config snap.txt") == 0);
  const std::string an = slurp(work_dir() / "an" / "wavenumbers.csv");
  CHECK(an.rfind("t[time],Lambda[1/length],Q[index],Lambda_dis", 0) == 0);
  CHECK(std::count(an.begin(), an.end(), '\n') == 4);
  const std::string report = slurp(work_dir() / "an" / "report.txt");
  CHECK(report.find("grashof = ") != std::string::npos);
  CHECK(report.find("average: ") != std::string::npos);
  CHECK(slurp(work_dir() / "bounds.csv").find("grashof") != std::string::npos);

  REQUIRE(run("spectrum snaps/snapshot_000001.bin --output e.csv") == 0);
  CHECK(slurp(work_dir() / "e.csv").rfind("k[1/length],E", 0) == 0);
  REQUIRE(run("spectrum --shells --r 2.5 snaps/snapshot_000001.bin") == 0);
  CHECK(slurp(work_dir() / "last_stdout.txt").rfind("q[index],lambda_q[1/length],shell_L2", 0) == 0);
}

TEST_CASE("exit codes") {
  write_config("ok.txt");
  CHECK(run("") == 1);
  CHECK(run("simulate") == 1);
  CHECK(run("simulate --config missing.txt") == 1);
  CHECK(run("simulate --config ok.txt --no-such-flag 1") == 1);
  CHECK(run("simulate --config ok.txt --r 3") == 2);
  CHECK(slurp(work_dir() / "last_stderr.txt").find("(2,3)") != std::string::npos);
  write_config("broken.txt", "mystery = 1\n");
  CHECK(run("simulate --config broken.txt") == 2);
  CHECK(run("spectrum ok.txt") == 2);
  CHECK(run("simulate --config ok.txt --init_urms 1e200 --output_dir boom") == 3);
  CHECK(fs::exists(work_dir() / "boom" / "diverged_last_good.bin"));
}
