// End-to-end checks of the ael-arfima executable.
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("ael_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const auto log = workdir() / "stderr.txt";
    const std::string cmd = std::string("\"") + AEL_CLI_PATH + "\" " + args + " 2> \"" + log.string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string out(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("simulate writes a T-row series and is byte-reproducible") {
    REQUIRE(run("simulate --p 0 --q 0 --d 0.3 --family gaussian --T 1001 --seed 7 --out " + out("s1")) == 0);
    REQUIRE(run("simulate --p 0 --q 0 --d 0.3 --family gaussian --T 1001 --seed 7 --out " + out("s2")) == 0);
    const auto a = slurp(workdir() / "s1" / "series.csv");
    std::size_t lines = 0;
    for (char ch : a) lines += ch == '\n';
    CHECK(lines == 1002);
    CHECK(a == slurp(workdir() / "s2" / "series.csv"));
    CHECK(slurp(workdir() / "s1" / "series.json") == slurp(workdir() / "s2" / "series.json"));
    const auto meta = nlohmann::json::parse(slurp(workdir() / "s1" / "series.json"));
    CHECK(meta["seed"] == 7);
    CHECK(meta["family"] == "gaussian");
}

TEST_CASE("invalid d exits with code 2 and names the violated constraint") {
    CHECK(run("simulate --d 0.6 --out " + out("bad")) == 2);
    CHECK(slurp(workdir() / "stderr.txt").find("d must lie in (0, 0.5)") != std::string::npos);
    CHECK(run("simulate --no-such-flag") == 2);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE("re-running from the config echo reproduces outputs") {
    REQUIRE(run("simulate --p 1 --phi 0.4 --d 0.2 --T 301 --seed 9 --out " + out("c1")) == 0);
    REQUIRE(run("simulate --config " + out("c1/config.ini") + " --out " + out("c2")) == 0);
    CHECK(slurp(workdir() / "c1" / "series.csv") == slurp(workdir() / "c2" / "series.csv"));
}

TEST_CASE("flags override config values") {
    REQUIRE(run("simulate --d 0.2 --T 101 --seed 3 --out " + out("o1")) == 0);
    REQUIRE(run("simulate --config " + out("o1/config.ini") + " --seed 4 --out " + out("o2")) == 0);
    const auto meta = nlohmann::json::parse(slurp(workdir() / "o2" / "series.json"));
    CHECK(meta["seed"] == 4);
}

TEST_CASE("estimate, stat, region and coverage run end to end") {
    REQUIRE(run("simulate --p 1 --phi 0.2 --d 0.3 --T 1001 --seed 11 --out " + out("e")) == 0);
    const auto series = out("e/series.csv");

    REQUIRE(run("estimate --p 1 --input " + series + " --periodogram --out " + out("fit")) == 0);
    const auto fit = nlohmann::json::parse(slurp(workdir() / "fit" / "fit.json"));
    CHECK(fit["converged"] == true);
    CHECK(std::abs(fit["beta_hat"]["d"].get<double>() - 0.3) < 0.15);
    CHECK(fs::exists(workdir() / "fit" / "periodogram.csv"));
    CHECK(fs::exists(workdir() / "fit" / "config.ini"));

    REQUIRE(run("stat --p 1 --phi 0.2 --d 0.3 --input " + series + " --out " + out("st")) == 0);
    const auto st = nlohmann::json::parse(slurp(workdir() / "st" / "stat.json"));
    CHECK(st["AEL"]["status"] == "converged");
    CHECK(st["AEL"]["stat"].get<double>() <= st["EL"]["stat"].get<double>() + 1e-8);

    REQUIRE(run("region --p 1 --input " + series + " --steps1 12 --steps2 12 --out " + out("rg")) == 0);
    for (const char* f : {"region_EL.csv", "region_AEL.csv", "boundary_EL.csv", "boundary_AEL.csv",
                          "region_summary.json"})
        CHECK(fs::exists(workdir() / "rg" / f));
    const auto rs = nlohmann::json::parse(slurp(workdir() / "rg" / "region_summary.json"));
    CHECK(rs["AEL"]["area"].get<double>() >= rs["EL"]["area"].get<double>());
    CHECK(slurp(workdir() / "rg" / "region_EL.csv").rfind("axis1,axis2,stat,member\n", 0) == 0);

    REQUIRE(run("coverage --T 51 --d 0.3 --replicates 100 --tb-reps 200 --eb-reps 200 --out " + out("cv")) == 0);
    const auto table = slurp(workdir() / "cv" / "coverage_table.csv");
    CHECK(table.rfind("family,T,method,d=0.3\n", 0) == 0);
    CHECK(fs::exists(workdir() / "cv" / "coverage_long.csv"));
    CHECK(fs::exists(workdir() / "cv" / "coverage_meta.json"));
}

TEST_CASE("non-convergence exits with code 3 and still writes diagnostics") {
    REQUIRE(run("simulate --p 1 --phi 0.5 --d 0.3 --T 1001 --seed 12 --out " + out("nc")) == 0);
    CHECK(run("estimate --p 1 --input " + out("nc/series.csv") + " --max-iter 1 --starts 1 --out " + out("ncfit")) == 3);
    const auto fit = nlohmann::json::parse(slurp(workdir() / "ncfit" / "fit.json"));
    CHECK(fit["converged"] == false);
}

TEST_CASE("help documents the CSV formats") {
    REQUIRE(run("region --help > " + out("help.txt")) == 0);
    const auto help = slurp(workdir() / "help.txt");
    CHECK(help.find("axis1,axis2,stat,member") != std::string::npos);
    CHECK(help.find("t,value") != std::string::npos);
}
