// CLI integration checks: exit codes, validation messages, report envelopes
// and byte-identical outputs across runs and thread counts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("[cli] %s %s\n", ok ? "PASS" : "FAIL", what.c_str());
  if (!ok) ++failures;
}

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json report(const fs::path& dir, const std::string& name) {
  return json::parse(slurp(dir / name));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-vpclt>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path base = fs::temp_directory_path() / "vpclt_cli_test";
  fs::remove_all(base);
  fs::create_directories(base);

  // exit 0 + report envelope with resolved config and version
  {
    const fs::path d = base / "decay";
    const int rc = run(cli + " decay-check --set Delta=0.1 --out-dir " +
                       d.string() + " > /dev/null 2>&1");
    check(rc == 0, "decay-check exits 0");
    json rep = report(d, "decay-check_report.json");
    check(rep["artifact"] == "vpclt" && rep.contains("version"),
          "report names the artifact and version");
    check(rep["config"]["m"] == 2.0 && rep["config"]["r_max"] == 16384,
          "resolved config embeds defaults");
    check(rep["results"]["verdict"] == "converging-trend",
          "log-power decay with Delta = 0.1 converges");
  }

  // validation failure: exit 1 and a field-level machine-readable error
  {
    const fs::path d = base / "bad";
    fs::create_directories(d);
    const int rc = run(
        cli + " simulate --set process.kind=eta0 --set process.delta=0.5"
              " --out-dir " +
        d.string() + " 2> " + (d / "err.json").string() + " > /dev/null");
    check(rc == 1, "invalid delta exits 1");
    json err = json::parse(slurp(d / "err.json"));
    check(err["error"]["field"] == "process.delta",
          "error object names the offending field");
  }

  // unknown keys rejected
  {
    const int rc = run(cli + " criterion --set nope=3 --out-dir " +
                       (base / "junk").string() + " > /dev/null 2>&1");
    check(rc == 1, "unknown config key exits 1");
  }

  // determinism: same seed, different thread counts, byte-identical CSVs
  {
    const fs::path d1 = base / "t1", d8 = base / "t8", d1b = base / "t1b";
    const std::string common =
        " simulate --seed 99 --set count=400 --set grid_size=64 ";
    check(run(cli + common + "--threads 1 --out-dir " + d1.string() +
              " > /dev/null 2>&1") == 0,
          "simulate runs with 1 thread");
    check(run(cli + common + "--threads 8 --out-dir " + d8.string() +
              " > /dev/null 2>&1") == 0,
          "simulate runs with 8 threads");
    check(run(cli + common + "--threads 1 --out-dir " + d1b.string() +
              " > /dev/null 2>&1") == 0,
          "simulate reruns");
    const std::string a = slurp(d1 / "paths.csv");
    check(!a.empty() && a == slurp(d8 / "paths.csv"),
          "paths.csv identical across thread counts");
    check(a == slurp(d1b / "paths.csv"), "paths.csv identical across reruns");
  }

  // seed changes change the data; env var is honored
  {
    const fs::path da = base / "sa", db = base / "sb", dc = base / "sc";
    const std::string common = " simulate --set count=50 --set grid_size=16 ";
    run(cli + common + "--seed 1 --out-dir " + da.string() +
        " > /dev/null 2>&1");
    run(cli + common + "--seed 2 --out-dir " + db.string() +
        " > /dev/null 2>&1");
    check(slurp(da / "paths.csv") != slurp(db / "paths.csv"),
          "different seeds give different paths");
    run("VPCLT_SEED=1 " + cli + common + "--out-dir " + dc.string() +
        " > /dev/null 2>&1");
    check(slurp(da / "paths.csv") == slurp(dc / "paths.csv"),
          "VPCLT_SEED environment override matches --seed");
  }

  // demo example1: end-to-end normalized-Brownian probe, diverging verdict
  {
    const fs::path d = base / "demo1";
    const int rc = run(cli + " demo example1 --set node_count=200 --out-dir " +
                       d.string() + " > /dev/null 2>&1");
    check(rc == 0, "demo example1 exits 0");
    json rep = report(d, "demo_report.json");
    check(rep["results"]["verdict"] == "diverging-trend",
          "demo example1 verdict is diverging-trend");
    check(fs::exists(d / "probe41_chain_profile.csv"),
          "demo example1 emits the chain profile CSV");
  }

  // entropy command round-trips a metric CSV
  {
    const fs::path d = base / "ent";
    fs::create_directories(d);
    std::ofstream m(d / "metric.csv");
    m << "a,b,c\n0,1,2\n1,0,1\n2,1,0\n";
    m.close();
    const int rc =
        run(cli + " entropy --set metric_csv=" + (d / "metric.csv").string() +
            " --set eps.min=0.011 --out-dir " + d.string() +
            " > /dev/null 2>&1");
    check(rc == 0, "entropy command exits 0");
    check(fs::exists(d / "entropy_profile.csv"), "entropy profile emitted");
  }

  // user_table process: header holds node positions, rows are realizations
  {
    const fs::path d = base / "table";
    fs::create_directories(d);
    std::ofstream m(d / "in.csv");
    m << "0,0.5,1\n1,2,3\n4,5,6\n";
    m.close();
    const int rc = run(
        cli + " simulate --set process.kind=user_table --set process.csv=" +
        (d / "in.csv").string() + " --set count=4 --set grid_size=4 "
        "--out-dir " + d.string() + " > /dev/null 2>&1");
    check(rc == 0, "user_table simulate exits 0");
    const std::string out = slurp(d / "paths.csv");
    check(out.find("1,2,3") != std::string::npos &&
              out.find("4,5,6") != std::string::npos,
          "user_table paths cycle the supplied realizations");
  }

  std::printf("[cli] %d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
