#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>

#include <apes/dynamics.hpp>
#include <apes/errors.hpp>
#include <apes/io.hpp>

#include "test_helpers.hpp"

using namespace apes;
using namespace apes::testing;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path d = fs::temp_directory_path() / ("apes_test_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(APES_CLI_PATH) + " " + args;
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("fnv1a64 known vectors") {
    CHECK(io::fnv1a64("", 0) == 14695981039346656037ULL);
    CHECK(io::fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
    CHECK(io::fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);
}

TEST_CASE("snapshot round trip is bit exact") {
    const fs::path dir = temp_dir("snap");
    Grid g(12, 12, 6, 0.8);
    State s(g);
    s.v1 = random_field(g, Parity::Even, 1);
    s.v2 = random_field(g, Parity::Even, 2);
    s.T = random_field(g, Parity::Odd, 3);
    s.t = 0.625;

    Tendency mem;
    mem.dv1 = random_field(g, Parity::Even, 4);
    mem.dv2 = random_field(g, Parity::Even, 5);
    mem.dT = random_field(g, Parity::Odd, 6);

    const std::string path = (dir / "x.apes").string();
    io::write_snapshot(path, s, &mem, 17);
    io::Snapshot snap = io::read_snapshot(path);

    CHECK(snap.state.t == 0.625);
    CHECK(snap.step_index == 17);
    CHECK(max_coeff_diff(snap.state.v1, s.v1) == 0.0);
    CHECK(max_coeff_diff(snap.state.T, s.T) == 0.0);
    REQUIRE(snap.ab2.has_value());
    CHECK(max_coeff_diff(snap.ab2->dv1, mem.dv1) == 0.0);

    SUBCASE("magic line is as documented") {
        CHECK(slurp(path).rfind("APES1\n", 0) == 0);
    }
    SUBCASE("corrupt magic is rejected") {
        std::ofstream out(dir / "bad.apes", std::ios::binary);
        out << "NOPE\n{}\n\n";
        out.close();
        CHECK_THROWS_AS(io::read_snapshot((dir / "bad.apes").string()), IoError);
    }
}

TEST_CASE("config parsing") {
    const fs::path dir = temp_dir("cfg");
    {
        std::ofstream out(dir / "good.cfg");
        out << "# comment\n"
            << "nx = 16\nny = 16\nnz = 8\n"
            << "epsilon = 0.01\n"
            << "q_list = 4,8\n"
            << "scheme = imex_euler\n";
    }
    Params p = io::read_config((dir / "good.cfg").string());
    CHECK(p.nx == 16);
    CHECK(p.epsilon == 0.01);
    CHECK(p.q_list == std::vector<int>{4, 8});
    CHECK(p.scheme == Scheme::ImexEuler);

    SUBCASE("unknown keys are hard errors") {
        std::ofstream out(dir / "bad.cfg");
        out << "nx = 16\nnnx = 8\n";
        out.close();
        CHECK_THROWS_AS(io::read_config((dir / "bad.cfg").string()), ValidationError);
    }
    SUBCASE("missing file is an I/O error") {
        CHECK_THROWS_AS(io::read_config((dir / "absent.cfg").string()), IoError);
    }
    SUBCASE("flag overrides win") {
        Params q = io::apply_config_pairs(p, {{"epsilon", "0.5"}});
        CHECK(q.epsilon == 0.5);
    }
}

TEST_CASE("cli exit codes") {
    const fs::path dir = temp_dir("cli");
    CHECK(run_cli("run --config " + (dir / "missing.cfg").string() +
                  " > /dev/null 2>&1") == 4);
    CHECK(run_cli("run --resolution 16 16 8 --dt 1e-3 --t-final 0 --output-dir " +
                  (dir / "r0").string() + " > /dev/null 2>&1") == 0);
    // one monitor row after the header
    const std::string csv = slurp(dir / "r0" / "monitors.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(run_cli("run --resolution 7 16 8 --output-dir " + (dir / "bad").string() +
                  " > /dev/null 2>&1") == 2);
}

TEST_CASE("cli gronwall-demo is byte deterministic") {
    const fs::path dir = temp_dir("gd");
    const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
    CHECK(run_cli("gronwall-demo --count 100 --seed 7 --output " + a +
                  " > /dev/null 2>&1") == 0);
    CHECK(run_cli("gronwall-demo --count 100 --seed 7 --output " + b +
                  " > /dev/null 2>&1") == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).size() > 1000);
}

TEST_CASE("run + resume reproduces the monitor series bit for bit") {
    const fs::path dir = temp_dir("resume");
    const std::string common =
        "--resolution 12 12 6 --dt 2e-3 --seed 9 --monitor-stride 5 ";
    CHECK(run_cli("run " + common + "--t-final 0.08 --output-dir " +
                  (dir / "full").string() + " > /dev/null 2>&1") == 0);
    CHECK(run_cli("run " + common + "--t-final 0.04 --checkpoint-every 20 "
                  "--output-dir " + (dir / "head").string() +
                  " > /dev/null 2>&1") == 0);
    CHECK(run_cli("run " + common + "--t-final 0.08 --resume " +
                  (dir / "head" / "checkpoint_00000020.apes").string() +
                  " --output-dir " + (dir / "tail").string() +
                  " > /dev/null 2>&1") == 0);

    // every row of the tail run must appear verbatim in the full run
    std::istringstream full(slurp(dir / "full" / "monitors.csv"));
    std::set<std::string> rows;
    std::string line;
    while (std::getline(full, line)) rows.insert(line);
    std::istringstream tail(slurp(dir / "tail" / "monitors.csv"));
    int matched = 0;
    bool header = true;
    while (std::getline(tail, line)) {
        if (header) {
            header = false;
            continue;
        }
        CHECK(rows.count(line) == 1);
        ++matched;
    }
    CHECK(matched >= 4);

    SUBCASE("manifest lists checksummed files") {
        const std::string man = slurp(dir / "head" / "manifest.json");
        CHECK(man.find("fnv1a64") != std::string::npos);
        CHECK(man.find("monitors.csv") != std::string::npos);
        CHECK(man.find("\"status\": \"ok\"") != std::string::npos);
    }
}

TEST_CASE("identical (config, seed) reruns are byte-identical") {
    const fs::path dir = temp_dir("repro");
    const std::string common =
        "run --resolution 12 12 6 --dt 2e-3 --t-final 0.02 --seed 4 "
        "--monitor-stride 2 --output-dir ";
    CHECK(run_cli(common + (dir / "a").string() + " > /dev/null 2>&1") == 0);
    CHECK(run_cli(common + (dir / "b").string() + " > /dev/null 2>&1") == 0);
    CHECK(slurp(dir / "a" / "monitors.csv") == slurp(dir / "b" / "monitors.csv"));
    CHECK(slurp(dir / "a" / "state_final.apes") ==
          slurp(dir / "b" / "state_final.apes"));
}

TEST_CASE("initial data can be loaded from a snapshot file") {
    const fs::path dir = temp_dir("initfile");
    Grid g(12, 12, 6, 1.0);
    State s(g);
    s.v1 = random_field(g, Parity::Even, 71);
    s.v2 = random_field(g, Parity::Even, 72);
    s.T = random_field(g, Parity::Odd, 73);
    project_barotropic(s.v1, s.v2);
    s.t = 3.25;
    io::write_snapshot((dir / "ic.apes").string(), s);

    Params p;
    p.nx = p.ny = 12;
    p.nz = 6;
    p.init_kind = InitKind::File;
    p.init_file = (dir / "ic.apes").string();
    State loaded = make_initial_data(p);
    CHECK(loaded.t == 0.0); // initial data resets the clock
    CHECK(max_coeff_diff(loaded.v1, s.v1) < 1e-14);
    CHECK(barotropic_residual(loaded.v1, loaded.v2) < 1e-12);

    SUBCASE("missing file raises an I/O error") {
        p.init_file = (dir / "absent.apes").string();
        CHECK_THROWS_AS(make_initial_data(p), IoError);
    }
    SUBCASE("grid mismatch is a validation error") {
        p.nz = 8;
        CHECK_THROWS_AS(make_initial_data(p), ValidationError);
    }
}

TEST_CASE("residuals, twin, and halfdomain subcommands produce reports") {
    const fs::path dir = temp_dir("sub");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "nx = 12\nny = 12\nnz = 6\ndt = 2e-3\nt_final = 0.02\n"
            << "seed = 9\nsnapshot_every = 2\nmonitor_stride = 2\n"
            << "init_amplitude = 0.4\n";
    }
    CHECK(run_cli("run --config " + (dir / "run.cfg").string() + " --output-dir " +
                  (dir / "out").string() + " > /dev/null 2>&1") == 0);
    CHECK(run_cli("residuals --dir " + (dir / "out").string() +
                  " > /dev/null 2>&1") == 0);
    CHECK(fs::exists(dir / "out" / "residuals.json"));

    CHECK(run_cli("twin --config " + (dir / "run.cfg").string() +
                  " --delta 1e-6 --horizon 0.01 --output-dir " +
                  (dir / "tw").string() + " > /dev/null 2>&1") == 0);
    CHECK(slurp(dir / "tw" / "twin.json").find("growth_exponent") !=
          std::string::npos);

    CHECK(run_cli("halfdomain --config " + (dir / "run.cfg").string() +
                  " --steps 10 --output-dir " + (dir / "hd").string() +
                  " > /dev/null 2>&1") == 0);
    CHECK(slurp(dir / "hd" / "halfdomain.json").find("max_discrepancy") !=
          std::string::npos);
}

TEST_CASE("manifest is written on blow-up with exit 3") {
    const fs::path dir = temp_dir("blow");
    const int rc = run_cli(
        "run --resolution 16 16 8 --dt 0.4 --t-final 40 --seed 3 --output-dir " +
        (dir / "b").string() + " > /dev/null 2>&1");
    CHECK(rc == 3);
    const std::string man = slurp(dir / "b" / "manifest.json");
    CHECK(man.find("\"status\": \"blowup\"") != std::string::npos);
    CHECK(man.find("blowup_time") != std::string::npos);
}
