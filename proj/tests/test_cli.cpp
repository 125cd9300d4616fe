#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "dentseg/io.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + DENTSEG_CLI + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    CHECK(run("--help").code == 0);
    CHECK(run("").code == 1);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("segment").code == 1);
    CHECK(run("segment /nonexistent.pgm").code == 1);
    CHECK(run("synth --out /tmp/x --spec a.json --default-batch").code == 1);
  }

  TEST_CASE("evaluate") {
    const fs::path csv = fs::path(DENTSEG_REPO_DATA) / "fig7.csv";
    const Run table = run("evaluate " + q(csv));
    CHECK(table.code == 0);
    CHECK(table.out.find("   77.32   19.06    3.62    0.00    0.00    0.00") != std::string::npos);
    const Run js = run("evaluate --json " + q(csv));
    REQUIRE(js.code == 0);
    const auto j = nlohmann::json::parse(js.out);
    CHECK(j.at("optimality").get<double>() == doctest::Approx(77.32).epsilon(1e-4));

    const auto dir = testing::scratch_dir("cli_eval");
    std::ofstream(dir / "bad.csv") << "j\\i,1,2\n2,1,0\n";
    CHECK(run("evaluate " + q(dir / "bad.csv")).code == 2);
  }

  TEST_CASE("segment a blank image") {
    const auto dir = testing::scratch_dir("cli_segment");
    dentseg::save_image(dentseg::GrayImage(90, 80, 60.0), dir / "blank.pgm");
    const Run r = run("segment " + q(dir / "blank.pgm"));
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("separators").empty());
    CHECK(j.at("tooth_count") == 1);
    CHECK(j.at("timing_ms").empty());
    CHECK(nlohmann::json::parse(run("segment --timing " + q(dir / "blank.pgm")).out).at("timing_ms").size() == 4);

    CHECK(run("segment -o " + q(dir / "r.json") + " --overlay " + q(dir / "o.png") + " " + q(dir / "blank.pgm"))
              .code == 0);
    CHECK(fs::exists(dir / "o.png"));
    CHECK(dentseg::load_image(dir / "o.png").width() == 90);
    // Existing outputs are kept unless --force is given.
    CHECK(run("segment -o " + q(dir / "r.json") + " " + q(dir / "blank.pgm")).code == 2);
    CHECK(run("segment --force -o " + q(dir / "r.json") + " " + q(dir / "blank.pgm")).code == 0);

    CHECK(run("segment --wiener.rows 0 " + q(dir / "blank.pgm")).code == 1);
    CHECK(run("segment --mode sideways " + q(dir / "blank.pgm")).code == 1);
    std::ofstream(dir / "c.cfg") << "mean.size = 4\n";
    CHECK(run("segment --config " + q(dir / "c.cfg") + " " + q(dir / "blank.pgm")).code == 1);
    CHECK(run("segment --config " + q(dir / "c.cfg") + " --mean.size 5 " + q(dir / "blank.pgm")).code == 0);

    std::ofstream(dir / "junk.pgm") << "P5 nonsense";
    CHECK(run("segment " + q(dir / "junk.pgm")).code == 2);
  }

  TEST_CASE("synth, project, rotation, preprocess and bench") {
    const auto dir = testing::scratch_dir("cli_synth");
    std::ofstream(dir / "spec.json")
        << R"({"specs": [{"width": 240, "height": 300, "tooth_count": 3, "gap_width": 14, "tilt_degrees": 4, "seed": 5}]})";
    REQUIRE(run("synth --spec " + q(dir / "spec.json") + " --out " + q(dir / "out") + " --masks").code == 0);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    CHECK(fs::exists(dir / "out" / "phantom_000_gap1.pgm"));
    CHECK(run("synth --spec " + q(dir / "spec.json") + " --out " + q(dir / "out")).code == 2);
    CHECK(run("synth --out " + q(dir / "none")).code == 1);

    const fs::path img = dir / "out" / "phantom_000.pgm";
    const Run proj = run("project " + q(img));
    REQUIRE(proj.code == 0);
    CHECK(proj.out.rfind("# valleys", 0) == 0);
    std::size_t lines = 0;
    for (char c : proj.out) lines += c == '\n';
    CHECK(lines == 240 + 2);

    const Run rot = run("rotation " + q(img));
    REQUIRE(rot.code == 0);
    CHECK(nlohmann::json::parse(rot.out).contains("mean_degrees"));

    REQUIRE(run("preprocess --dump-stages " + q(img) + " " + q(dir / "pre.pgm")).code == 0);
    CHECK(fs::exists(dir / "pre.pgm"));
    CHECK(fs::exists(dir / "pre_butterworth.pgm"));
    CHECK(fs::exists(dir / "pre_gaussian.pgm"));

    const Run bench = run("bench --json " + q(dir / "out" / "manifest.json"));
    REQUIRE(bench.code == 0);
    const auto j = nlohmann::json::parse(bench.out);
    CHECK(j.at("items").size() == 1);
    CHECK(j.at("report").at("n_max") == 3);
    CHECK(run("bench --json --threads 2 " + q(dir / "out" / "manifest.json")).out == bench.out);
    CHECK(run("segment " + q(img)).out == run("segment " + q(img)).out);
  }
}
