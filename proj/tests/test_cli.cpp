#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("ORLICZ_CLI");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

json schema() {
    std::ifstream in("schemas/report.schema.json");
    if (!in) in.open("../schemas/report.schema.json");
    if (!in) in.open("../../schemas/report.schema.json");
    REQUIRE(in.good());
    return json::parse(in);
}

// Structural validation against the shipped schema: the branch matching the
// report's command must have all its required keys present with sane types.
void check_against_schema(const json& report) {
    json sch = schema();
    REQUIRE(report.contains("command"));
    bool matched = false;
    for (const auto& branch : sch["oneOf"]) {
        if (branch["properties"]["command"]["const"] != report["command"]) continue;
        matched = true;
        for (const auto& key : branch["required"]) CHECK(report.contains(key.get<std::string>()));
    }
    CHECK(matched);
}

}  // namespace

TEST_CASE("verify report structure and exit codes") {
    auto res = run_cli("verify eq1 --grid 40 --seed 3");
    CHECK(res.exit_code == 0);
    json rep = json::parse(res.out);
    check_against_schema(rep);
    CHECK(rep["lemma"] == "eq1");
    CHECK(rep["pass"] == true);
    CHECK(rep["paper_constants"]["upper"] == 2.0);
    CHECK(rep["empirical_constants"]["max_ratio"].get<double>() <= 2.0 + 1e-9);
    CHECK(rep.contains("worst_case_instance"));
}

TEST_CASE("usage and resource exit codes") {
    CHECK(run_cli("verify nonsense").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("verify l21 --mode sideways").exit_code == 2);
    // materialization and exact-enumeration caps map to the resource code
    CHECK(run_cli("construct psi --n 5").exit_code == 3);
    CHECK(run_cli("distortion --n 7 --mode exact").exit_code == 3);
}

TEST_CASE("construct outputs") {
    auto y = run_cli("construct y-from-M --M power:2 --n 8");
    CHECK(y.exit_code == 0);
    json yj = json::parse(y.out);
    check_against_schema(yj);
    REQUIRE(yj["y"].size() == 8);
    // closed form 2n(sqrt(l/n) - sqrt((l-1)/n)) at l=1, printed to 12
    // significant digits
    CHECK(yj["y"][0].get<double>() == doctest::Approx(5.65685424949).epsilon(1e-11));
    for (std::size_t l = 1; l < 8; ++l)
        CHECK(yj["y"][l].get<double>() <= yj["y"][l - 1].get<double>());
    CHECK(y.out.find("5.65685424949") != std::string::npos);

    auto psi = run_cli("construct psi --n 2 --p 1.1 --r 1.5");
    CHECK(psi.exit_code == 0);
    json pj = json::parse(psi.out);
    CHECK(pj["row_count"] == 128);
    REQUIRE(pj["rows"].size() == 128);
    CHECK(pj["rows"][0].size() == 4);

    auto oa = run_cli("construct orlicz-from-a --a 4,3,2,1 --r 2");
    CHECK(oa.exit_code == 0);
    json oj = json::parse(oa.out);
    CHECK(oj["grid_concave"] == true);
    CHECK(oj["function"].contains("breakpoints"));
    REQUIRE(oj["grid"].size() == 4);

    CHECK(run_cli("construct orlicz-from-a --r 2").exit_code == 2);  // missing --a
}

TEST_CASE("distortion reports are deterministic and schema-stable") {
    auto a = run_cli("distortion --n 2 --seed 11 --samples 4");
    auto b = run_cli("distortion --n 2 --seed 11 --samples 4");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);  // byte-identical
    json rep = json::parse(a.out);
    check_against_schema(rep);
    CHECK(rep["report"]["n"] == 2);
    CHECK(rep["report"]["sample_count"] == 4);
    CHECK(rep["report"]["distortion"].get<double>() >= 1.0);
    CHECK(rep["ratios"].size() == 4);
    CHECK(rep["lower_bound"].get<double>() > 0.0);

    auto c = run_cli("distortion --n 2 --seed 12 --samples 4");
    CHECK(c.out != a.out);
}

TEST_CASE("monte carlo output is identical across thread counts") {
    const std::string base = "distortion --n 4 --mode mc --seed 9 --samples 2 --threads ";
    auto t1 = run_cli(base + "1");
    auto t2 = run_cli(base + "2");
    auto t8 = run_cli(base + "8");
    CHECK(t1.exit_code == 0);
    CHECK(t1.out == t2.out);
    CHECK(t2.out == t8.out);
    json rep = json::parse(t1.out);
    CHECK(rep["report"]["distortion"].get<double>() >= 1.0);
}

TEST_CASE("csv format") {
    auto res = run_cli("distortion --n 2 --seed 11 --samples 3 --format csv");
    CHECK(res.exit_code == 0);
    std::istringstream lines(res.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "sample_index,matrix_norm,l1_norm,ratio");
    int rows = 0;
    for (std::string line; std::getline(lines, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 3);

    auto v = run_cli("verify l23 --n 2 --samples 5 --format csv");
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("pass,true") != std::string::npos);
}

TEST_CASE("matrix file input") {
    const char* path = "/tmp/orlicz_cli_matrix.json";
    {
        std::ofstream f(path);
        f << "[[1.0, 0.5], [-0.25, 2.0]]\n";
    }
    auto res = run_cli(std::string("distortion --n 2 --samples 1 --matrix ") + path);
    CHECK(res.exit_code == 0);
    json rep = json::parse(res.out);
    CHECK(rep["input_matrix"]["matrix_norm"].get<double>() > 0.0);
    CHECK(rep["input_matrix"]["ratio"].get<double>() ==
          doctest::Approx(rep["input_matrix"]["l1_norm"].get<double>() /
                          rep["input_matrix"]["matrix_norm"].get<double>()));
    std::remove(path);

    CHECK(run_cli("distortion --n 3 --samples 1 --matrix " + std::string(path)).exit_code == 2);
}

TEST_CASE("reports write to a file") {
    const char* path = "/tmp/orlicz_cli_report.json";
    auto res = run_cli(std::string("verify l23 --n 2 --samples 3 --out ") + path);
    CHECK(res.exit_code == 0);
    CHECK(res.out.empty());
    std::ifstream in(path);
    REQUIRE(in.good());
    json rep = json::parse(in);
    CHECK(rep["lemma"] == "l23");
    std::remove(path);
}
