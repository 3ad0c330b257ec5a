#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "odecond/io.hpp"
#include "odecond/errors.hpp"

using namespace odecond;

namespace {

std::string cli_path() {
    const char* path = std::getenv("ODECOND_CLI");
    REQUIRE_MESSAGE(path != nullptr, "ODECOND_CLI must point at the odecond binary");
    return path;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string out_file = "cli_stdout_" + std::to_string(counter) + ".txt";
    const std::string err_file = "cli_stderr_" + std::to_string(counter) + ".txt";
    ++counter;
    const std::string command =
        "\"" + cli_path() + "\" " + args + " > " + out_file + " 2> " + err_file;
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    std::remove(out_file.c_str());
    std::remove(err_file.c_str());
    return result;
}

}  // namespace

TEST_CASE("format_double renders 17 significant digits and round-trips") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> uni(-1e6, 1e6);
    for (int i = 0; i < 200; ++i) {
        const double x = uni(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        const double back = std::strtod(format_double(x).c_str(), nullptr);
        CHECK(back == x);  // bitwise round trip
    }
}

TEST_CASE("CSV write/read/write is byte-identical, including infinities") {
    CsvTable table;
    table.header = {"t", "E", "logE"};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-100.0, 100.0);
    for (int i = 0; i < 50; ++i) table.rows.push_back({uni(rng), uni(rng), uni(rng)});
    table.rows.push_back({0.0, 0.0, -std::numeric_limits<double>::infinity()});

    std::ostringstream first;
    write_csv(first, table);
    std::istringstream parse_it(first.str());
    const CsvTable parsed = read_csv(parse_it);
    std::ostringstream second;
    write_csv(second, parsed);
    CHECK(first.str() == second.str());
    CHECK(parsed.header == table.header);
}

TEST_CASE("read_csv rejects malformed input") {
    std::istringstream bad_cell("t,E\n1,zzz\n");
    CHECK_THROWS_AS((void)read_csv(bad_cell), usage_error);
    std::istringstream short_row("t,E\n1\n");
    CHECK_THROWS_AS((void)read_csv(short_row), usage_error);
    std::istringstream empty("");
    CHECK_THROWS_AS((void)read_csv(empty), usage_error);
}

TEST_CASE("SVG output is structured as one polyline per series") {
    CsvTable table;
    table.header = {"t", "a", "b"};
    for (int i = 0; i <= 10; ++i)
        table.rows.push_back({0.1 * i, std::sin(0.1 * i), std::cos(0.1 * i)});
    std::ostringstream os;
    write_svg(os, table, {"title", "t", "value"});
    const std::string svg = os.str();
    CHECK(svg.find("<svg xmlns=") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
    size_t polylines = 0;
    for (size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++polylines;
    CHECK(polylines == 2);
    CHECK(svg.find(">t</text>") != std::string::npos);      // x axis label
    CHECK(svg.find(">value</text>") != std::string::npos);  // y axis label
}

TEST_CASE("cli: list-systems table and json") {
    const RunResult table = run_cli("list-systems");
    CHECK(table.exit_code == 0);
    for (const char* name : {"decay", "expand", "rotation", "stable_focus", "vdp", "torus4",
                             "lorenz"})
        CHECK(table.out.find(name) != std::string::npos);

    const RunResult json = run_cli("list-systems --json");
    CHECK(json.exit_code == 0);
    const auto parsed = nlohmann::json::parse(json.out);
    CHECK(parsed.size() == 7);
    CHECK(parsed[0].contains("dimension"));
}

TEST_CASE("cli: list-systems --check validates the suite") {
    const RunResult result = run_cli("list-systems --check --seed 3");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("FAIL") == std::string::npos);
}

TEST_CASE("cli: regime prints the class token") {
    const RunResult result = run_cli("regime --system decay --t-final 40 --h 0.01");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("class=Constant") != std::string::npos);
}

TEST_CASE("cli: classify a linear csv and an undetermined csv") {
    {
        std::ofstream os("linear_curve.csv", std::ios::binary);
        os << "t,E\n";
        for (int i = 0; i < 64; ++i) os << format_double(i) << ',' << format_double(1.0 * i) << '\n';
    }
    const RunResult linear = run_cli("classify --in linear_curve.csv");
    CHECK(linear.exit_code == 0);
    CHECK(linear.out == "class=Linear\n");

    {
        // noisy square-root growth: rises too much for Constant, too wiggly
        // for the Linear fit, too slowly for Exponential
        std::ofstream os("noise_curve.csv", std::ios::binary);
        os << "t,E\n";
        for (int i = 1; i <= 64; ++i) {
            const double t = static_cast<double>(i);
            const double e = std::sqrt(t) * (1.0 + 0.25 * std::sin(1.7 * t));
            os << format_double(t) << ',' << format_double(e) << '\n';
        }
    }
    const RunResult noise = run_cli("classify --in noise_curve.csv");
    CHECK(noise.exit_code == 3);
    CHECK(noise.out == "class=Undetermined\n");
    std::remove("linear_curve.csv");
    std::remove("noise_curve.csv");
}

TEST_CASE("cli: bound-check with epsilon zero exits 1 quoting the requirement") {
    const RunResult result =
        run_cli("bound-check --system decay --method rk4 --t-final 20 --h0 0.05 --epsilon 0");
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("epsilon > 0") != std::string::npos);
}

TEST_CASE("cli: usage failures exit 1") {
    CHECK(run_cli("regime --system nope --t-final 1 --h 0.1").exit_code == 1);
    CHECK(run_cli("regime --system decay --t-final 1 --h 0.1 --bogus-flag").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("regime --system decay --t-final 1 --h 0.1 --svg").exit_code == 1);
}

TEST_CASE("cli: blow-up exits 2") {
    const RunResult result =
        run_cli("integrate --system lorenz --method euler --t-final 10 --h 0.9 --out blowup.csv");
    CHECK(result.exit_code == 2);
    std::remove("blowup.csv");
}

TEST_CASE("cli: emitted files are byte-identical across reruns and round-trip") {
    const std::string args =
        "condition --system stable_focus --t-final 10 --h 0.01 --queries 32 --out cond_a.csv "
        "--svg";
    CHECK(run_cli(args).exit_code == 0);
    const std::string csv_a = slurp("cond_a.csv");
    const std::string json_a = slurp("cond_a.csv.json");
    const std::string svg_a = slurp("cond_a.csv.svg");
    CHECK(run_cli(args).exit_code == 0);
    CHECK(slurp("cond_a.csv") == csv_a);
    CHECK(slurp("cond_a.csv.json") == json_a);
    CHECK(slurp("cond_a.csv.svg") == svg_a);

    // re-reading and re-emitting the CSV reproduces it byte for byte
    std::istringstream is(csv_a);
    const CsvTable parsed = read_csv(is);
    std::ostringstream os;
    write_csv(os, parsed);
    CHECK(os.str() == csv_a);
    CHECK(!svg_a.empty());

    std::remove("cond_a.csv");
    std::remove("cond_a.csv.json");
    std::remove("cond_a.csv.svg");
}

TEST_CASE("cli: convergence emits csv + sidecar + svg (nan order in first row)") {
    const RunResult result = run_cli(
        "convergence --system decay --t-final 1 --h0 0.1 --levels 3 --out conv.csv --svg");
    CHECK(result.exit_code == 0);
    const std::string csv = slurp("conv.csv");
    CHECK(csv.rfind("h,max_error,observed_order\n", 0) == 0);
    CHECK(csv.find("nan") != std::string::npos);  // no order above the coarsest level
    CHECK(!slurp("conv.csv.svg").empty());
    const auto sidecar = nlohmann::json::parse(slurp("conv.csv.json"));
    CHECK(sidecar["levels"].size() == 3);
    std::remove("conv.csv");
    std::remove("conv.csv.json");
    std::remove("conv.csv.svg");
}

TEST_CASE("cli: integrate emits full-precision trajectories") {
    const RunResult result =
        run_cli("integrate --system decay --t-final 1 --h 0.1 --out decay_traj.csv");
    CHECK(result.exit_code == 0);
    const std::string csv = slurp("decay_traj.csv");
    CHECK(csv.rfind("t,x1\n", 0) == 0);
    CHECK(csv.find("0.10000000000000001") != std::string::npos);  // %.17g rendering of 0.1
    std::remove("decay_traj.csv");
}

TEST_CASE("cli: certified reference emission") {
    const RunResult result = run_cli(
        "integrate --system vdp --t-final 5 --h 0.1 --reference --out vdp_ref.csv --json");
    CHECK(result.exit_code == 0);
    const auto parsed = nlohmann::json::parse(result.out);
    CHECK(parsed["method"] == "reference");
    CHECK(parsed["certificate"].get<double>() >= 0.0);
    CHECK(parsed["certificate"].get<double>() < 1e-9);
    std::remove("vdp_ref.csv");
}
