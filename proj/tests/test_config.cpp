#include <catch2/catch_amalgamated.hpp>

#include "roughlab/config.hpp"
#include "roughlab/experiments.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace roughlab;
namespace fs = std::filesystem;

namespace {

RawConfig parse(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is, "test.cfg");
}

std::size_t error_line(const std::string& text) {
    try {
        validate_config(parse(text));
    } catch (const ConfigError& e) {
        return e.line();
    }
    return SIZE_MAX;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "roughlab-cli-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun cli(const fs::path& dir, const std::string& config, const std::string& args, const std::string& env = {}) {
    const fs::path cfg = dir / "run.cfg";
    if (!config.empty()) std::ofstream(cfg) << config;
    const std::string cmd = env + " '" + std::string(ROUGHLAB_CLI_PATH) + "' " +
                            (config.empty() ? std::string() : "--config '" + cfg.string() + "' ") + args + " > '" +
                            (dir / "stdout.txt").string() + "' 2> '" + (dir / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir / "stdout.txt");
    r.err = slurp(dir / "stderr.txt");
    return r;
}

}  // namespace

TEST_CASE("config syntax", "[config]") {
    const RawConfig raw = parse("# comment\nexperiment = lift\n\n  N = 128   # trailing\nseed=9\n");
    REQUIRE(raw.entries.size() == 3);
    CHECK(raw.entries.at("N").value == "128");
    CHECK(raw.entries.at("N").line == 4);
    CHECK(raw.entries.at("seed").line == 5);

    auto line_of = [](const std::string& text) {
        try {
            parse(text);
        } catch (const ConfigError& e) {
            return e.line();
        }
        return SIZE_MAX;
    };
    CHECK(line_of("experiment = lift\nN 128\n") == 2);
    CHECK(line_of("experiment = lift\n= 3\n") == 2);
    CHECK(line_of("experiment = lift\n\nN = \n") == 3);
    CHECK(line_of("experiment = lift\nN = 1\nN = 2\n") == 3);
    CHECK(line_of("experi ment = lift\n") == 1);
}

TEST_CASE("schema validation", "[config]") {
    CHECK(error_line("experiment = lift\nN = 64\nbogus = 1\n") == 3);
    CHECK(error_line("experiment = lift\nN = sixty\n") == 2);
    CHECK(error_line("experiment = lift\nN = 1\n") == 2);
    CHECK(error_line("experiment = lift\nalpha = 1.5\n") == 2);
    CHECK(error_line("experiment = lift\nlift = magic\n") == 2);
    CHECK(error_line("experiment = lift\nseed = -4\n") == 2);
    CHECK(error_line("experiment = nothing\n") == 1);
    CHECK(error_line("N = 4\n") == 0);
    CHECK(error_line("experiment = rde\nNs = 16,x\n") == 2);
    CHECK(error_line("experiment = lift\nN = 64\n") == SIZE_MAX);

    const RunConfig cfg = validate_config(parse("experiment = integrate\nN = 512\nseed = 18446744073709551615\n"));
    CHECK(cfg.seed == 18446744073709551615ULL);
    CHECK(cfg.count("N") == 512);
    CHECK(cfg.real("H") == 0.4);
    CHECK(cfg.integers("meshes") == std::vector<std::int64_t>{1, 2, 4, 8, 16});
    CHECK(cfg.reals("polynomial") == std::vector<double>{0.0, 0.0, 1.0});
    CHECK(cfg.text("lift") == "hermite");
    CHECK_THROWS(cfg.text("missing"));
}

TEST_CASE("canonical form and hash", "[config]") {
    const RunConfig a = validate_config(parse("experiment = clock\nN = 64\n"));
    const RunConfig b = validate_config(parse("N = 64 # same\nexperiment = clock\npower = 2\n"));
    CHECK(a.canonical() == b.canonical());
    CHECK(fnv1a64(a.canonical()) == fnv1a64(b.canonical()));
    const RunConfig c = validate_config(parse("experiment = clock\nN = 64\nseed = 2\n"));
    CHECK(fnv1a64(a.canonical()) != fnv1a64(c.canonical()));
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(split_list(" a, b ,,c ", ',') == std::vector<std::string>{"a", "b", "c"});
    CHECK(trim("  x y \t") == "x y");
}

TEST_CASE("experiment catalogue", "[config]") {
    const std::string text = list_experiments();
    CHECK(text == list_experiments());
    CHECK(text.find("arbitrage: power-mean pathwise arbitrage\n") != std::string::npos);
    CHECK(text.find("ito: rough Ito formula residual\n") != std::string::npos);
    std::vector<std::string> names;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) names.push_back(line.substr(0, line.find(':')));
    CHECK(names == std::vector<std::string>{"lift", "integrate", "ito", "mc-unbiased", "balance", "sarmanov", "rde",
                                            "arbitrage", "clock"});
    for (const auto& s : experiment_schemas()) {
        for (const auto& p : s.params) CHECK_FALSE(p.help.empty());
    }
    CHECK_THROWS(schema_for("nothing"));
}

TEST_CASE("cli exit codes per experiment", "[config][cli]") {
    struct Case {
        std::string name;
        std::string config;
        int code;
        std::string artifact;
    };
    const std::vector<Case> cases{
        {"lift", "experiment = lift\nN = 64\nchen_triples = 500\n", 0, "levels.csv"},
        {"integrate", "experiment = integrate\nN = 256\nmeshes = 1,2,4\n", 0, "refinement.csv"},
        {"ito", "experiment = ito\nN = 128\npaths = 2\nfunction = x3\n", 0, "ito.csv"},
        {"mc", "experiment = mc-unbiased\nnoise = fbm\nH = 0.4\nalpha = 0.35\nN = 64\nM = 1000\n"
               "integrands = poly(0,1);poly(0,0,1);poly(0,-3,0,1)\nstoppings = T;t=0.5\n",
         0, "report.csv"},
        {"mc-reject", "experiment = mc-unbiased\nlift = geometric\nN = 64\nM = 1000\nintegrands = poly(0,1)\n", 2,
         "report.csv"},
        {"balance-bm", "experiment = balance\nM = 4000\n", 0, "balance.csv"},
        {"balance-fbm", "experiment = balance\nprocess = fbm\nH = 0.7\nlevels = 2\nM = 4000\n", 2, "balance.csv"},
        {"sarmanov", "experiment = sarmanov\nM = 4000\nwrite_samples = 0\n", 0, "sarmanov.csv"},
        {"rde", "experiment = rde\nNs = 16,64\npaths = 4\n", 0, "convergence.csv"},
        {"arbitrage", "experiment = arbitrage\npaths = 2\nN = 256\nrefinement = 16\n", 0, "market.csv"},
        {"arbitrage-ito", "experiment = arbitrage\npaths = 2\nN = 64\nrefinement = 16\nH = 0.5\nscheme = ito\n", 2,
         "summary.csv"},
        {"clock", "experiment = clock\nN = 1024\nclock_N = 32\n", 0, "clock.csv"},
    };
    for (const auto& c : cases) {
        const fs::path dir = scratch(c.name);
        const CliRun r = cli(dir, c.config, "--workers 1 --out '" + (dir / "out").string() + "'");
        INFO(c.name << " stderr: " << r.err);
        CHECK(r.code == c.code);
        CHECK(fs::exists(dir / "out" / c.artifact));
        CHECK(fs::exists(dir / "out" / "manifest.json"));
    }
}

TEST_CASE("cli rejections", "[config][cli]") {
    const fs::path dir = scratch("reject");
    const std::string out = "--out '" + (dir / "out").string() + "'";
    CliRun r = cli(dir, "experiment = lift\nN = 64\nthis line is wrong\n", out);
    CHECK(r.code == 64);
    CHECK(r.err.find("run.cfg:3:") != std::string::npos);
    r = cli(dir, "experiment = lift\nN = 64\nfoo = 1\n", out);
    CHECK(r.code == 64);
    CHECK(r.err.find(":3:") != std::string::npos);
    CHECK(r.err.find("foo") != std::string::npos);
    r = cli(dir, "experiment = mc-unbiased\nM = 1000\nintegrands = sig(0,0.5)\n", out);
    CHECK(r.code == 64);
    r = cli(dir, {}, "--config '" + (dir / "absent.cfg").string() + "' " + out);
    CHECK(r.code == 64);
    r = cli(dir, {}, out);
    CHECK(r.code == 64);
    r = cli(dir, {}, "--workers=-2 --config x");
    CHECK(r.code == 64);
    // overflowing prices are a compute failure
    r = cli(dir, "experiment = arbitrage\npaths = 1\nN = 16\nrefinement = 16\nsigma = 1000\n", out);
    CHECK(r.code == 1);
    CHECK(slurp(dir / "out" / "manifest.json").find("\"error\"") != std::string::npos);
}

TEST_CASE("cli catalogue", "[config][cli]") {
    const fs::path dir = scratch("list");
    CliRun a = cli(dir, {}, "--list");
    CHECK(a.code == 0);
    CHECK(a.out == list_experiments());
    CliRun b = cli(dir, {}, "list");
    CHECK(b.out == a.out);
}

TEST_CASE("cli manifest and reproducibility", "[config][cli]") {
    const fs::path dir = scratch("repro");
    const std::string config =
        "experiment = mc-unbiased\nN = 32\nM = 2000\nseed = 5\nintegrands = poly(0,1);sig(2,0.5)\nstoppings = T;clock=0.5\n";
    const CliRun a = cli(dir, config, "--workers 1 --out '" + (dir / "a").string() + "'");
    const CliRun b = cli(dir, config, "--workers 3 --out '" + (dir / "b").string() + "'");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "a" / "report.csv") == slurp(dir / "b" / "report.csv"));
    const std::string manifest = slurp(dir / "a" / "manifest.json");
    for (const char* key : {"\"config_hash\"", "\"seed\": 5", "\"versions\"", "\"wall_time_seconds\"", "\"fftw\"",
                            "\"artifacts\"", "\"exit_code\": 0"}) {
        CHECK(manifest.find(key) != std::string::npos);
    }
    // seed override and environment default for the output directory
    const CliRun c = cli(dir, config, "--seed 6", "ROUGHLAB_OUT='" + (dir / "env").string() + "'");
    CHECK(c.code == 0);
    CHECK(slurp(dir / "env" / "manifest.json").find("\"seed\": 6") != std::string::npos);
    CHECK(slurp(dir / "env" / "report.csv") != slurp(dir / "a" / "report.csv"));
}
