#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "qdl_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

std::string slurp(const std::string& name) {
  std::ifstream in(path(name), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with stdout to `out` (relative to the scratch dir) and returns its exit code.
int run(const std::string& args, const std::string& out = "stdout.txt") {
  const std::string cmd = std::string("\"") + QDL_CLI_PATH + "\" " + args + " > \"" + path(out) + "\" 2> \"" +
                          path("stderr.txt") + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

const char* kSmallSweep = R"({
  "model": "effective",
  "params": {"n_max": 3},
  "sweep": {"axis": "eta", "start": 0.2, "stop": 1.0, "points": 3}
})";

}  // namespace

TEST_CASE("steady point") {
  write("steady.json", R"({"params": {"n_max": 4}, "outputs": ["n1", "n2", "pop_u"]})");
  CHECK(run("steady --config " + path("steady.json")) == 0);
  const std::string csv = slurp("stdout.txt");
  CHECK(csv.rfind("point,n1,n2,pop_u,residual,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(run("steady --format json --nmax 3") == 0);
  const auto doc = nlohmann::json::parse(slurp("stdout.txt"));
  CHECK(doc["rows"].size() == 1);
  CHECK(doc["config"]["params"]["n_max1"] == 3);
}

TEST_CASE("sweep output is reproducible byte for byte") {
  write("sweep.json", kSmallSweep);
  for (const char* fmt : {"csv", "json"}) {
    const std::string a = path(std::string("a.") + fmt), b = path(std::string("b.") + fmt);
    CHECK(run("sweep --config " + path("sweep.json") + " --format " + fmt + " --out " + a) == 0);
    CHECK(run("sweep --config " + path("sweep.json") + " --format " + fmt + " --workers 2 --out " + b) == 0);
    CHECK(slurp(std::string("a.") + fmt) == slurp(std::string("b.") + fmt));
    CHECK_FALSE(slurp(std::string("a.") + fmt).empty());
  }
  CHECK(run("sweep --config " + path("sweep.json") + " --points 5") == 0);
  const std::string csv = slurp("stdout.txt");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("rates and entangle subcommands") {
  write("sweep.json", kSmallSweep);
  CHECK(run("rates --config " + path("sweep.json")) == 0);
  CHECK(slurp("stdout.txt").rfind("eta,n1,n2,single1_net,single2_net,twophoton_net,", 0) == 0);
  CHECK(run("rates --config " + path("sweep.json") + " --model full") == 2);
  CHECK(run("entangle --config " + path("sweep.json") + " --model full") == 0);
  CHECK(slurp("stdout.txt").rfind("eta,n1,n2,variance_sum,variance_min,", 0) == 0);
}

TEST_CASE("kernels subcommand") {
  CHECK(run("kernels --points 11 --omega-min -5 --omega-max 5") == 0);
  const std::string csv = slurp("stdout.txt");
  CHECK(csv.rfind("omega,K_g_re,K_g_im,K_u_re,K_u_im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  write("cold.json", R"({"bath": {"temperature": 0}})");
  CHECK(run("kernels --config " + path("cold.json") + " --format json --points 3") == 0);
  CHECK(nlohmann::json::parse(slurp("stdout.txt"))["bath"]["temperature"] == 0.0);
}

TEST_CASE("preset subcommand") {
  CHECK(run("preset fig6a --points 2 --nmax 3") == 0);
  CHECK(slurp("stdout.txt").rfind("eta,", 0) == 0);
  CHECK(run("preset fig99") == 2);
  write("sweep.json", kSmallSweep);
  CHECK(run("preset fig2 --config " + path("sweep.json")) == 2);
}

TEST_CASE("configuration errors exit with 2") {
  write("unknown.json", R"({"params": {"kapa": 0.1}})");
  CHECK(run("steady --config " + path("unknown.json")) == 2);
  CHECK(slurp("stderr.txt").find("kapa") != std::string::npos);
  write("broken.json", "{not json");
  CHECK(run("steady --config " + path("broken.json")) == 2);
  CHECK(run("steady --config " + path("missing.json")) == 2);
  CHECK(run("steady --format xml") == 2);
  CHECK(run("steady --model reduced") == 2);
  CHECK(run("steady --nmax 0") == 2);
  CHECK(run("sweep") == 2);
  CHECK(run("") == 2);
  CHECK(run("bogus") == 2);
  CHECK(run("steady --nmax 2 --out " + path("no/such/dir/x.csv")) == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("solver failures map to exit codes 3 and 4") {
  write("none.json", R"({"params": {"n_max": 3}, "convergence": {"max_n": 4},
                         "sweep": {"axis": "Delta_1", "start": 2, "stop": 5, "points": 2}})");
  CHECK(run("sweep --config " + path("none.json")) == 3);
  CHECK(slurp("stderr.txt").find("failed") != std::string::npos);
  CHECK(slurp("stdout.txt").find(",failed,") != std::string::npos);

  write("some.json", R"({"params": {"n_max": 3}, "convergence": {"max_n": 5},
                         "sweep": {"axis": "Delta_1", "start": 2, "stop": 5, "points": 2}})");
  CHECK(run("sweep --config " + path("some.json")) == 4);
  const std::string csv = slurp("stdout.txt");
  CHECK(csv.find(",ok,") != std::string::npos);
  CHECK(csv.find(",failed,") != std::string::npos);
}
