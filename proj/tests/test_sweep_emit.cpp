#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdl/emit.hpp"
#include "qdl/sweep.hpp"

using namespace qdl;

namespace {

RunConfig small_sweep() {
  return parse_config(R"({
    "params": {"n_max": 4},
    "sweep": {"axis": "Delta_1", "start": 4.0, "stop": 6.0, "points": 3}
  })");
}

RunConfig effective_temperature_sweep() {
  return parse_config(R"({
    "model": "effective",
    "params": {"n_max": 4},
    "sweep": {"axis": "temperature", "start": 0.0, "stop": 20.0, "points": 3},
    "convergence": {"enabled": false}
  })");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir() {
  auto d = std::filesystem::temp_directory_path() / "qdl_test_sweep_emit";
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("sweep rows follow the axis and pass the solver checks") {
  const RunConfig cfg = small_sweep();
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].status == RowStatus::ok);
    CHECK(rows[i].axis_value == cfg.sweep->values()[i]);
    CHECK(rows[i].residual <= 1e-8);
    CHECK(rows[i].trace_error <= 1e-10);
    CHECK(rows[i].min_eigenvalue >= -1e-6);
    CHECK(rows[i].converged);
    CHECK(rows[i].convergence_change < 0.005);
    CHECK_FALSE(rows[i].single1_net.has_value());
  }
  CHECK(rows[1].n1 > rows[0].n1);
  CHECK(rows[1].n1 > rows[2].n1);
  CHECK(sweep_exit_code(rows) == 0);
}

TEST_CASE("emission is deterministic and round-trips") {
  const RunConfig cfg = small_sweep();
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  for (OutputFormat f : {OutputFormat::csv, OutputFormat::json}) {
    CHECK(format_results(a, cfg, f) == format_results(b, cfg, f));
  }

  const std::string csv = format_results(a, cfg, OutputFormat::csv);
  std::istringstream lines(csv);
  std::string header, line;
  std::getline(lines, header);
  CHECK(header.rfind("Delta_1,pop_g,", 0) == 0);
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == cfg.sweep->points);

  const std::string json = format_results(a, cfg, OutputFormat::json);
  const auto back = parse_results_json(json);
  REQUIRE(back.size() == a.size());
  CHECK(format_results(back, cfg, OutputFormat::json) == json);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (const auto& label : output_labels()) {
      const auto x = a[i].value(label), y = back[i].value(label);
      REQUIRE(x.has_value() == y.has_value());
      if (x) CHECK(*y == std::strtod(format_number(*x).c_str(), nullptr));
    }
    CHECK(back[i].n_max1 == a[i].n_max1);
    CHECK(back[i].converged == a[i].converged);
  }
  const auto doc = nlohmann::json::parse(json);
  auto echoed = cfg.to_json();
  echoed.erase("workers");
  echoed.erase("output_path");
  CHECK(nlohmann::json(doc.at("config")) == echoed);
  CHECK(doc.at("rows").size() == 3);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2.5e-17) == "-2.5e-17");
  CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(parse_format("json") == OutputFormat::json);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("selected outputs and undefined markers") {
  RunConfig cfg = parse_config(R"({"params": {"n_max": 2}, "outputs": ["n1", "g2_1", "single1_net"],
                                   "convergence": {"enabled": false}})");
  ResultRow r;
  r.n1 = 0.5;
  r.n_max1 = r.n_max2 = 2;
  const std::string csv = format_results({r}, cfg, OutputFormat::csv);
  CHECK(csv.rfind("point,n1,g2_1,single1_net,residual,", 0) == 0);
  CHECK(csv.find("\n0,0.5,NA,NA,") != std::string::npos);
  const auto doc = nlohmann::json::parse(format_results({r}, cfg, OutputFormat::json));
  CHECK(doc["rows"][0]["g2_1"].is_null());

  ResultRow failed;
  failed.status = RowStatus::failed;
  failed.message = "solver said \"no\", twice";
  const std::string fcsv = format_results({failed}, cfg, OutputFormat::csv);
  CHECK(fcsv.find("\n0,NA,NA,NA,") != std::string::npos);
  CHECK(fcsv.find(",failed,\"solver said \"\"no\"\", twice\",") != std::string::npos);
  CHECK_THROWS_AS(format_results({}, cfg, OutputFormat::csv), InvalidArgument);
}

TEST_CASE("worker count does not change the output") {
  RunConfig cfg = effective_temperature_sweep();
  const auto serial = run_sweep(cfg, SweepOptions{1, true});
  const auto parallel = run_sweep(cfg, SweepOptions{3, true});
  CHECK(format_results(serial, cfg, OutputFormat::json) == format_results(parallel, cfg, OutputFormat::json));
}

TEST_CASE("kernel caching is transparent") {
  const RunConfig cfg = effective_temperature_sweep();
  const auto cached = run_sweep(cfg, SweepOptions{1, true});
  const auto fresh = run_sweep(cfg, SweepOptions{1, false});
  REQUIRE(cached.size() == fresh.size());
  for (std::size_t i = 0; i < cached.size(); ++i) {
    REQUIRE(cached[i].status == RowStatus::ok);
    REQUIRE(fresh[i].status == RowStatus::ok);
    for (const auto& label : output_labels()) {
      const auto x = cached[i].value(label), y = fresh[i].value(label);
      REQUIRE(x.has_value() == y.has_value());
      if (x) CHECK(std::abs(*x - *y) <= 1e-12);
    }
  }
  CHECK(cached[0].single1_net.has_value());

  KernelCache cache;
  const PhononBathParams b5 = default_bath(5.0);
  const auto k1 = cache.get(b5);
  const auto k2 = cache.get(b5);
  CHECK(k1.get() == k2.get());
  cache.get(default_bath(20.0));
  CHECK(cache.size() == 2);
}

TEST_CASE("failed points are recorded in-row") {
  RunConfig cfg = small_sweep();
  cfg.convergence.max_n = 4;
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.status == RowStatus::failed);
    CHECK(r.message.find("truncation not converged") != std::string::npos);
  }
  CHECK(sweep_exit_code(rows) == 3);
  std::vector<ResultRow> mixed(2);
  mixed[1].status = RowStatus::failed;
  CHECK(sweep_exit_code(mixed) == 4);
}

TEST_CASE("file output") {
  const RunConfig cfg = effective_temperature_sweep();
  const auto rows = run_sweep(cfg);
  const auto dir = scratch_dir();
  const std::string p1 = (dir / "a.csv").string(), p2 = (dir / "b.csv").string();
  emit_results(rows, cfg, OutputFormat::csv, p1);
  emit_results(run_sweep(cfg), cfg, OutputFormat::csv, p2);
  CHECK(slurp(p1) == slurp(p2));
  CHECK_FALSE(slurp(p1).empty());
  CHECK_THROWS_AS(emit_results(rows, cfg, OutputFormat::csv, (dir / "missing" / "x.csv").string()), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("kernel table") {
  const PhononKernels k(default_bath(5.0));
  const auto table = kernel_table(k, -10.0, 10.0, 5);
  REQUIRE(table.size() == 5);
  CHECK(table[2].omega == 0.0);
  CHECK(table[3].k_u == k.half_fourier(Kernel::u, 5.0));
  const std::string csv = format_kernel_table(table, k, OutputFormat::csv);
  CHECK(csv.rfind("omega,K_g_re,K_g_im,K_u_re,K_u_im\n", 0) == 0);
  const auto doc = nlohmann::json::parse(format_kernel_table(table, k, OutputFormat::json));
  CHECK(doc["rows"].size() == 5);
  CHECK(doc["displacement_average"].get<double>() == doctest::Approx(k.displacement_average()));
  CHECK_THROWS_AS(kernel_table(k, 1.0, 0.0, 5), InvalidArgument);
}
