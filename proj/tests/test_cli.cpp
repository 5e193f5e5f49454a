#include "racf/ablation.hpp"
#include "racf/config.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace racf;
using namespace racf::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("racf_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(RACF_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const std::string& s) { return int(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("config text round trips byte for byte") {
    const std::string text = emit_config(RunConfig{});
    CHECK(emit_config(parse_config(text)) == text);

    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        RunConfig c;
        c.ic = rng.coin();
        c.fpe = rng.coin();
        c.ic_amount = rng.uniform(0, 3);
        c.ic_threshold = rng.uniform(0, 1);
        c.fpe_rho = rng.uniform(0.1, 10);
        c.omega_d = rng.uniform(0, 1);
        c.learning_rate = rng.uniform(0.001, 0.5);
        c.scales = 1 + 2 * rng.integer(0, 4);
        const std::string t = emit_config(c);
        const RunConfig back = parse_config(t);
        CHECK(emit_config(back) == t);
        CHECK(back.ic_amount == c.ic_amount);
        CHECK(back.learning_rate == c.learning_rate);
    }
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 5e-324}) CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
}

TEST_CASE("config parsing rejects unknown keys and out-of-range values") {
    CHECK_THROWS_AS(parse_config("colour=blue\n"), FormatError);
    CHECK_THROWS_AS(parse_config("scales=abc\n"), FormatError);
    CHECK_THROWS_AS(parse_config("ic=maybe\n"), FormatError);
    CHECK_THROWS_AS(parse_config("missing equals\n"), FormatError);
    CHECK_THROWS(parse_config("scales=4\n"));
    CHECK_THROWS(parse_config("omega_d=1.5\n"));
    CHECK_THROWS(parse_config("fpe_rho=0\n"));

    const RunConfig c = parse_config("# comment\n\nrot_halfcount=3\nfpe=false\n");
    CHECK(c.rot_halfcount == 3);
    CHECK_FALSE(c.fpe);
    CHECK(c.rot_delta == 5.0);
}

TEST_CASE("defaults") {
    const RunConfig c;
    CHECK(c.rot_delta == 5.0);
    CHECK(c.rot_halfcount == 2);
    CHECK(c.scales == 5);
    CHECK(c.scale_step == 1.01);
    CHECK(c.fpe_rho == 1.0);
    CHECK(c.omega_d == 0.9);
    CHECK(c.omega_a == 0.9);
    CHECK(c.learning_rate == 0.025);
    CHECK(c.cell_size == 4);
    CHECK(c.sigma_factor == 1.0 / 16.0);
    CHECK(c.effective_omega_d() == 0.9);

    RunConfig off = c;
    off.dc = false;
    CHECK(off.effective_omega_d() == 1.0);
    CHECK(off.effective_omega_a() == 1.0);
}

TEST_CASE("ablation variants are the eight fixed combinations") {
    const auto& v = ablation_variants();
    REQUIRE(v.size() == 8);
    const char* names[] = {"baseline", "D", "DF", "R", "RF", "RD", "RDF", "RIDF"};
    for (int i = 0; i < 8; ++i) {
        CHECK(v[i].name == names[i]);
        const RunConfig c = v[i].apply(RunConfig{});
        const std::string n = names[i];
        CHECK(c.rotation == (n.find('R') != std::string::npos));
        CHECK(c.ic == (n.find('I') != std::string::npos));
        CHECK(c.dc == (n.find('D') != std::string::npos));
        CHECK(c.fpe == (n.find('F') != std::string::npos));
    }
    CHECK(ablation_suite("mixed", 1).size() == 5);
    CHECK_THROWS_AS(ablation_suite("everything", 1), ContractError);
}

TEST_CASE("cli: emit-config honours toggles and files") {
    const fs::path dir = scratch("emit");
    REQUIRE(run("emit-config --no-ic --no-rotation --no-fpe --no-dc --fpe-rho 2.5", dir / "out.txt") == 0);
    const RunConfig c = parse_config(slurp(dir / "out.txt"));
    CHECK_FALSE(c.ic);
    CHECK_FALSE(c.rotation);
    CHECK_FALSE(c.fpe);
    CHECK_FALSE(c.dc);
    CHECK(c.fpe_rho == 2.5);

    std::ofstream(dir / "cfg.txt") << "rot_halfcount=1\nscales=3\n";
    REQUIRE(run("emit-config --config " + (dir / "cfg.txt").string() + " --scales 7 --out " +
                    (dir / "written.txt").string(),
                dir / "log.txt") == 0);
    const RunConfig w = load_config(dir / "written.txt");
    CHECK(w.rot_halfcount == 1);
    CHECK(w.scales == 7);

    std::ofstream(dir / "bad.txt") << "nonsense=1\n";
    CHECK(run("emit-config --config " + (dir / "bad.txt").string(), dir / "log.txt") == 1);
}

TEST_CASE("cli: unknown flags abort before any work") {
    const fs::path dir = scratch("flags");
    CHECK(run("synth --scenario rotation --frames 2 --out " + (dir / "seq").string() + " --bogus", dir / "log.txt") != 0);
    CHECK_FALSE(fs::exists(dir / "seq"));
    CHECK(run("ablate --suite rotation --frames 2 --out-dir " + dir.string() + " --wat", dir / "log.txt") != 0);
    CHECK_FALSE(fs::exists(dir / "frames"));
    CHECK_FALSE(fs::exists(dir / "reports"));
    CHECK(run("", dir / "log.txt") != 0);
    CHECK(run("synth --scenario spiral", dir / "log.txt") != 0);
}

TEST_CASE("cli: missing ground truth exits with code 2") {
    const fs::path dir = scratch("missing");
    REQUIRE(run("synth --scenario translation --frames 3 --out " + (dir / "seq").string(), dir / "log.txt") == 0);
    fs::remove(dir / "seq" / "groundtruth.txt");
    CHECK(run("track --sequence " + (dir / "seq").string() + " --out-dir " + dir.string(), dir / "log.txt") == 2);
    CHECK(slurp(dir / "log.txt").find("error:") != std::string::npos);
    CHECK(run("track --sequence " + (dir / "nowhere").string(), dir / "log.txt") == 1);
}

TEST_CASE("cli: track writes a per-frame csv with an orientation column") {
    const fs::path dir = scratch("track");
    REQUIRE(run("synth --scenario rotation --frames 8 --seed 1 --out-dir " + dir.string(), dir / "log.txt") == 0);
    const fs::path seq = dir / "frames" / "rotation-s1";
    REQUIRE(fs::exists(seq / "groundtruth.txt"));
    REQUIRE(fs::exists(seq / "manifest.txt"));
    REQUIRE(run("track --sequence " + seq.string() + " --out-dir " + dir.string() + " --dump-filter --dump-scoremaps",
                dir / "log.txt") == 0);
    const std::string csv = slurp(dir / "reports" / "rotation-s1_track.csv");
    REQUIRE(count_lines(csv) == 9);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line.find(",theta,") != std::string::npos);
    int k = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream cs(line);
        std::string c;
        while (std::getline(cs, c, ',')) cells.push_back(c);
        REQUIRE(cells.size() == 14);
        CHECK(std::abs(normalize_degrees(std::stod(cells[9]) - 3.0 * k)) <= 5.0);
        ++k;
    }
    CHECK(fs::exists(dir / "reports" / "rotation-s1_summary.txt"));
    CHECK(fs::exists(dir / "dumps" / "rotation-s1" / "filter_00000001.bin"));
    CHECK(fs::exists(dir / "dumps" / "rotation-s1" / "score_00000002.pgm"));

    // baseline toggles: orientation column stays at zero
    REQUIRE(run("track --sequence " + seq.string() + " --report-dir " + (dir / "base").string() +
                    " --no-ic --no-rotation --no-fpe --no-dc",
                dir / "log.txt") == 0);
    std::istringstream base(slurp(dir / "base" / "rotation-s1_track.csv"));
    std::getline(base, line);
    while (std::getline(base, line)) {
        int commas = 0;
        std::size_t pos = 0;
        while (commas < 9) pos = line.find(',', pos) + 1, ++commas;
        CHECK(std::stod(line.substr(pos)) == 0.0);
    }
}

TEST_CASE("cli: eval writes per-sequence and summary reports") {
    const fs::path dir = scratch("eval");
    for (const char* s : {"translation", "scale"})
        REQUIRE(run(std::string("synth --frames 5 --scenario ") + s + " --out-dir " + dir.string(), dir / "log.txt") == 0);
    REQUIRE(run("eval --sequence " + (dir / "frames" / "translation-s1").string() + " --sequence " +
                    (dir / "frames" / "scale-s1").string() + " --out-dir " + dir.string(),
                dir / "log.txt") == 0);
    const std::string summary = slurp(dir / "reports" / "eval_summary.csv");
    CHECK(count_lines(summary) == 4);
    // rows sorted by sequence name
    CHECK(summary.find("scale-s1") < summary.find("translation-s1"));
    CHECK(summary.find("\nALL,") != std::string::npos);
    CHECK(count_lines(slurp(dir / "reports" / "scale-s1_eval.csv")) == 6);
}

TEST_CASE("cli: ablate emits eight rows in order and is reproducible") {
    const fs::path dir = scratch("ablate");
    REQUIRE(run("ablate --suite rotation --frames 4 --threads 2 --out-dir " + dir.string(), dir / "log.txt") == 0);
    const std::string first = slurp(dir / "reports" / "ablation_rotation.csv");
    std::istringstream in(first);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("variant,mean_iou,failures,evaluated,", 0) == 0);
    std::vector<std::string> names;
    while (std::getline(in, line)) names.push_back(line.substr(0, line.find(',')));
    CHECK(names == std::vector<std::string>{"baseline", "D", "DF", "R", "RF", "RD", "RDF", "RIDF"});
    CHECK(fs::exists(dir / "frames" / "rotation-s1" / "groundtruth.txt"));

    REQUIRE(run("ablate --suite rotation --frames 4 --threads 1 --out-dir " + dir.string(), dir / "log.txt") == 0);
    CHECK(slurp(dir / "reports" / "ablation_rotation.csv") == first);
}
