#include "catch_amalgamated.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "qcausal/format.hpp"
#include "qcausal/formulas.hpp"

namespace {

struct CmdResult {
    int status = -1;
    std::string out;
};

CmdResult run_cli(const std::string &args) {
    const std::string cmd = std::string("'") + QCAUSAL_CLI_PATH + "' " + args;
    FILE *pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult res;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

std::vector<std::string> lines_of(const std::string &text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> fields;
    std::istringstream is(line);
    std::string f;
    while (std::getline(is, f, ',')) fields.push_back(f);
    return fields;
}

}  // namespace

TEST_CASE("cli info and help") {
    const CmdResult info = run_cli("info");
    REQUIRE(info.status == 0);
    REQUIRE(info.out.find("qcausal") != std::string::npos);
    REQUIRE(info.out.find("curve") != std::string::npos);

    const CmdResult help = run_cli("--help");
    REQUIRE(help.status == 0);
    REQUIRE(help.out.find("Usage") != std::string::npos);
}

TEST_CASE("cli curve output") {
    SECTION("rows carry the closed-form values, sorted by strategy then n") {
        const CmdResult res =
            run_cli("curve --d 2 --n-max 4 --strategy classical --strategy coherent 2>/dev/null");
        REQUIRE(res.status == 0);
        std::string want = "n,d,strategy,p_err,log2_p_err\n";
        for (std::size_t n = 1; n <= 4; ++n)
            want += std::to_string(n) + ",2,classical," +
                    qcausal::format_double(qcausal::p_classical(n, 2)) + "," +
                    qcausal::format_double(qcausal::log2_p_classical(n, 2)) + "\n";
        for (std::size_t n = 1; n <= 4; ++n)
            want += std::to_string(n) + ",2,coherent," +
                    qcausal::format_double(qcausal::p_coherent(n, 2)) + "," +
                    qcausal::format_double(qcausal::log2_p_coherent(n, 2)) + "\n";
        REQUIRE(res.out == want);
    }

    SECTION("rows outside a strategy's domain are skipped") {
        const CmdResult res =
            run_cli("curve --d 2 --n-max 4 --strategy singlet --strategy reference 2>/dev/null");
        REQUIRE(res.status == 0);
        const auto lines = lines_of(res.out);
        REQUIRE(lines.size() == 6);  // header, reference n=2,4, singlet n=2,3,4
        REQUIRE(split_csv(lines[1])[2] == "reference");
        REQUIRE(split_csv(lines[1])[0] == "2");
        REQUIRE(split_csv(lines[2])[0] == "4");
        REQUIRE(split_csv(lines[3])[2] == "singlet");
        REQUIRE(split_csv(lines[3])[0] == "2");
        REQUIRE(split_csv(lines[5])[0] == "4");
    }

    SECTION("n stride") {
        const CmdResult res = run_cli("curve --d 2 --n-max 5 --n-step 2 --strategy classical");
        REQUIRE(res.status == 0);
        const auto lines = lines_of(res.out);
        REQUIRE(lines.size() == 4);
        REQUIRE(split_csv(lines[1])[0] == "1");
        REQUIRE(split_csv(lines[2])[0] == "3");
        REQUIRE(split_csv(lines[3])[0] == "5");
    }

    SECTION("repeat runs are byte-identical") {
        const std::string args = "curve --d 3 --n-max 6 2>/dev/null";
        REQUIRE(run_cli(args).out == run_cli(args).out);
    }

    SECTION("--out writes the same bytes to a file") {
        const std::string path = "/tmp/qcausal_cli_curve_test.csv";
        const CmdResult direct = run_cli("curve --d 2 --n-max 3 --strategy classical");
        const CmdResult tofile =
            run_cli("curve --d 2 --n-max 3 --strategy classical --out " + path);
        REQUIRE(direct.status == 0);
        REQUIRE(tofile.status == 0);
        REQUIRE(tofile.out.empty());
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        REQUIRE(ss.str() == direct.out);
        std::remove(path.c_str());
    }

    SECTION("usage errors") {
        const CmdResult unknown = run_cli("curve --d 2 --n-max 3 --strategy bogus 2>&1");
        REQUIRE(unknown.status == 2);
        REQUIRE(unknown.out.find("bogus") != std::string::npos);
        REQUIRE(run_cli("curve --d 2 2>/dev/null").status == 2);
        REQUIRE(run_cli("curve --d 2 --n-max 0 2>/dev/null").status == 2);
        REQUIRE(run_cli("frobnicate 2>/dev/null").status == 2);
    }
}

TEST_CASE("cli claim") {
    const CmdResult tight = run_cli("claim --threshold 1e-6");
    REQUIRE(tight.status == 0);
    REQUIRE(tight.out.find("quantum_n=12\n") != std::string::npos);
    REQUIRE(tight.out.find("classical_n=20\n") != std::string::npos);
    REQUIRE(tight.out.find("classical_p=" +
                           qcausal::format_double(qcausal::p_classical(20, 2)) + "\n") !=
            std::string::npos);

    const CmdResult loose = run_cli("claim --threshold 0.3");
    REQUIRE(loose.status == 0);
    REQUIRE(loose.out.find("quantum_n=2\n") != std::string::npos);
    REQUIRE(loose.out.find("classical_n=2\n") != std::string::npos);

    const CmdResult half = run_cli("claim --threshold 0.5");
    REQUIRE(half.status == 0);
    REQUIRE(half.out.find("quantum_n=1\n") != std::string::npos);
    REQUIRE(half.out.find("classical_n=1\n") != std::string::npos);

    REQUIRE(run_cli("claim --threshold 0 2>/dev/null").status == 2);
}

TEST_CASE("cli simulate") {
    const std::string args = "simulate --d 2 --n 2 --trials 2000 --seed 5";
    const CmdResult res = run_cli(args);
    REQUIRE(res.status == 0);
    const auto lines = lines_of(res.out);
    REQUIRE(lines.size() == 2);
    REQUIRE(lines[0] == "n,d,inputs_pattern,trials,p_hat,std_err,p_closed_form,z_score");
    const auto f = split_csv(lines[1]);
    REQUIRE(f.size() == 8);
    REQUIRE(f[0] == "2");
    REQUIRE(f[1] == "2");
    REQUIRE(f[2] == "00");
    REQUIRE(f[3] == "2000");
    REQUIRE(f[6] == "0.25");
    REQUIRE(std::abs(std::stod(f[7])) < 6.0);

    SECTION("seeded runs repeat byte for byte") { REQUIRE(run_cli(args).out == res.out); }
    SECTION("usage errors") {
        REQUIRE(run_cli("simulate --d 2 --n 2 --trials 50 2>/dev/null").status == 2);
        REQUIRE(run_cli("simulate --d 2 --n 5 2>/dev/null").status == 2);
    }
}

TEST_CASE("cli verify") {
    SECTION("default run reports the one documented miss") {
        const CmdResult res = run_cli("verify 2>/dev/null");
        REQUIRE(res.status == 1);
        std::vector<std::string> fails;
        std::size_t passes = 0;
        for (const auto &line : lines_of(res.out)) {
            if (line.find(" FAIL") != std::string::npos) fails.push_back(line);
            if (line.find(" PASS") != std::string::npos) ++passes;
        }
        REQUIRE(fails.size() == 1);
        REQUIRE(fails[0].rfind("rate_reference_d3", 0) == 0);
        REQUIRE(passes > 30);
    }

    SECTION("fault injection trips the closed-form cross-check") {
        const CmdResult res = run_cli("verify --fault-inject 2>/dev/null");
        REQUIRE(res.status == 1);
        bool hit = false;
        for (const auto &line : lines_of(res.out))
            if (line.find(" FAIL") != std::string::npos &&
                line.rfind("reference_closed_form_d2_n4", 0) == 0)
                hit = true;
        REQUIRE(hit);
    }
}
