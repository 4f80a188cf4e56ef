#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ultraperc/erconn.hpp"
#include "ultraperc/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    return out;
}

std::string tmp_path(const std::string& name) {
    return "runner_test_" + name + ".csv";
}

int run_cli(std::initializer_list<std::string> args) {
    return ultraperc::cli::run(std::vector<std::string>(args));
}

struct FileGuard {
    std::string path;
    ~FileGuard() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("exact connectivity through the command line") {
    const std::string out = tmp_path("exact");
    FileGuard g{out};
    const int rc = run_cli({"erconn", "--exact", "--n", "3", "--p", "0.5",
                            "--seed", "1", "--out", out});
    CHECK(rc == 0);
    const auto ls = lines_of(slurp(out));
    REQUIRE(ls.size() == 2);
    const auto header = fields_of(ls[0]);
    const auto row = fields_of(ls[1]);
    REQUIRE(header.size() == row.size());
    REQUIRE(header.size() >= 5);
    CHECK(header[0] == "experiment");
    CHECK(header[2] == "mode");
    CHECK(header[4] == "value");
    CHECK(row[0] == "erconn");
    CHECK(row[2] == "exact");
    CHECK(row[4] == "0.5");
}

TEST_CASE("argument errors exit with 2") {
    // required seed missing
    CHECK(run_cli({"erconn", "--exact", "--n", "3", "--p", "0.5"}) == 2);
    // unknown subcommand and unknown flag
    CHECK(run_cli({"frobnicate", "--seed", "1"}) == 2);
    CHECK(run_cli({"erconn", "--exact", "--seed", "1", "--no-such-flag"}) == 2);
    // two mode flags at once
    CHECK(run_cli({"erconn", "--exact", "--mc", "--seed", "1"}) == 2);
    // out-of-regime parameters surface as config errors
    CHECK(run_cli({"cascade", "--mode", "certificate", "--N", "8", "--cert-K", "1",
                   "--cert-b", "1.5", "--cert-a", "112", "--theta", "0.1",
                   "--seed", "1"}) == 2);
    // a=1 is outside the lower-bound formula's domain
    CHECK(run_cli({"erconn", "--durrett", "--n", "100", "--a", "1", "--seed", "1"}) == 2);
}

TEST_CASE("infeasible scales exit with 3") {
    CHECK(run_cli({"simulate", "--N", "2", "--k", "30", "--k-min", "30",
                   "--replicates", "1", "--seed", "1"}) == 3);
}

TEST_CASE("simulate output is byte-identical across worker counts") {
    const std::string a = tmp_path("w1");
    const std::string b = tmp_path("w4");
    FileGuard ga{a}, gb{b};
    const int r1 = run_cli({"simulate", "--N", "2", "--k", "4", "--k-min", "2",
                            "--replicates", "16", "--c", "2", "--delta", "0.5",
                            "--seed", "42", "--workers", "1", "--out", a});
    const int r2 = run_cli({"simulate", "--N", "2", "--k", "4", "--k-min", "2",
                            "--replicates", "16", "--c", "2", "--delta", "0.5",
                            "--seed", "42", "--workers", "4", "--out", b});
    CHECK(r1 == 0);
    CHECK(r2 == 0);
    CHECK(slurp(a) == slurp(b));
    // 3 levels x 16 replicates plus the header
    CHECK(lines_of(slurp(a)).size() == 49);
}

TEST_CASE("same seed, same bytes") {
    const std::string a = tmp_path("s1");
    const std::string b = tmp_path("s2");
    FileGuard ga{a}, gb{b};
    CHECK(run_cli({"preperc", "--N", "3", "--delta", "1", "--family", "scaledlog",
                   "--K", "1", "--a", "6", "--b", "0", "--n-lo", "2", "--n-hi", "40",
                   "--sampled", "--seed", "9", "--out", a}) == 0);
    CHECK(run_cli({"preperc", "--N", "3", "--delta", "1", "--family", "scaledlog",
                   "--K", "1", "--a", "6", "--b", "0", "--n-lo", "2", "--n-hi", "40",
                   "--sampled", "--seed", "9", "--out", b}) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(lines_of(slurp(a)).size() == 40);  // header + 39 stages
}

TEST_CASE("json output parses and mirrors the table") {
    const std::string out = tmp_path("json");
    FileGuard g{out};
    CHECK(run_cli({"meanfield", "--family", "alogk", "--a", "2", "--kmax", "50",
                   "--format", "json", "--seed", "5", "--out", out}) == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc["experiment"] == "meanfield");
    REQUIRE(doc["columns"].is_array());
    REQUIRE(doc["rows"].is_array());
    CHECK(doc["rows"].size() == 50);
    // rows are self-describing objects keyed by the column names
    REQUIRE(doc["rows"][0].is_object());
    CHECK(doc["rows"][0].size() == doc["columns"].size());
    for (const auto& col : doc["columns"])
        CHECK(doc["rows"][0].contains(col.get<std::string>()));
    // the percolation product is a positive constant column in this regime
    CHECK(doc["rows"][0]["product"].get<double>() > 0.0);
    CHECK(doc["rows"][0]["product"] == doc["rows"][49]["product"]);
}

TEST_CASE("config file values load and flags override them") {
    const std::string cfg = "runner_test_cfg.ini";
    const std::string a = tmp_path("cfgA");
    const std::string b = tmp_path("cfgB");
    FileGuard gc{cfg}, ga{a}, gb{b};
    {
        std::ofstream f(cfg);
        f << "n=5\np=0.25\n";
    }
    CHECK(run_cli({"erconn", "--exact", "--config", cfg, "--seed", "3",
                   "--out", a}) == 0);
    const auto row_a = fields_of(lines_of(slurp(a))[1]);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", ultraperc::erconn::exact_connectivity(5, 0.25));
    CHECK(row_a[4] == buf);
    CHECK(row_a[3] == "5");

    // the command line wins over the file
    CHECK(run_cli({"erconn", "--exact", "--config", cfg, "--p", "0.75",
                   "--seed", "3", "--out", b}) == 0);
    const auto row_b = fields_of(lines_of(slurp(b))[1]);
    std::snprintf(buf, sizeof buf, "%.17g", ultraperc::erconn::exact_connectivity(5, 0.75));
    CHECK(row_b[4] == buf);
}

TEST_CASE("asymptotics and cascade certificate run end to end") {
    const std::string a = tmp_path("asym");
    const std::string c = tmp_path("cert");
    FileGuard ga{a}, gc{c};
    CHECK(run_cli({"asymptotics", "--mode", "annulus", "--case", "c", "--N", "3",
                   "--K", "1", "--a", "2", "--n-lo", "30", "--n-hi", "35",
                   "--seed", "2", "--out", a}) == 0);
    const auto ls = lines_of(slurp(a));
    CHECK(ls.size() == 7);  // header + 6 stages
    const auto header = fields_of(ls[0]);
    const auto row = fields_of(ls[1]);
    REQUIRE(header.size() == row.size());

    CHECK(run_cli({"cascade", "--mode", "certificate", "--N", "8", "--cert-K", "2",
                   "--cert-b", "3", "--cert-a", "170", "--theta", "0.5",
                   "--seed", "2", "--out", c}) == 0);
    const auto cl = lines_of(slurp(c));
    REQUIRE(cl.size() == 2);
    const auto ch = fields_of(cl[0]);
    const auto cr = fields_of(cl[1]);
    REQUIRE(ch.size() == cr.size());
    REQUIRE(ch.size() >= 3);
    CHECK(ch[2] == "n0_found");
    CHECK(cr[2] == "1");
}
