// Shell-level checks of the CLI contract: exit codes (0 success,
// 2 validation, 3 budget, 64 usage), validation messages listing every
// violated precondition, and the CSV / plot-data emitters.
// Usage: cli_behavior <path-to-sievelab>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

std::string g_cli;
int g_failures = 0;

struct Result {
    int exit_code;
    std::string output;  // stdout + stderr
};

Result run(const std::string& args) {
    std::string out_file = "cli_behavior_out.txt";
    std::string cmd = "\"" + g_cli + "\" " + args + " > " + out_file + " 2>&1";
    int status = std::system(cmd.c_str());
    int code = -1;
#ifdef WEXITSTATUS
    if (status != -1) code = WEXITSTATUS(status);
#else
    code = status;
#endif
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::remove(out_file.c_str());
    return {code, ss.str()};
}

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++g_failures;
        std::printf("FAIL  %s\n", what.c_str());
    } else {
        std::printf("ok    %s\n", what.c_str());
    }
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_behavior <path-to-sievelab>\n");
        return 1;
    }
    g_cli = argv[1];

    {
        Result r = run("sieve --n 1000");
        expect(r.exit_code == 0, "sieve runs clean");
        expect(contains(r.output, "\"prime_count\":168"), "sieve counts pi(1000) = 168");
    }
    {
        Result r = run("frobnicate --n 10");
        expect(r.exit_code == 64, "unknown command exits 64");
    }
    {
        Result r = run("gowers --n 101 --k 9");
        expect(r.exit_code == 2, "k = 9 exits 2");
        expect(contains(r.output, "[2, 5]"), "message names the k cap");
    }
    {
        // several violations at once: all of them are listed
        Result r = run("gowers --n 101 --k 9 --epsilon 7 --w 1");
        expect(r.exit_code == 2, "multiple violations exit 2");
        expect(contains(r.output, "--k") && contains(r.output, "--epsilon") && contains(r.output, "--w"),
               "every violated precondition is listed");
    }
    {
        Result r = run("tuples --forms \"x1; x1+x2; x1+2*x2\" --n 500 --weighting mangoldt --p-max 499 --budget 1000");
        expect(r.exit_code == 3, "alpha_p past the budget exits 3");
        expect(contains(r.output, "budget"), "budget message names the failure");
    }
    {
        Result r = run("pnt --n 10000,100000,1000000 --r-exponent 1/2 --weighting truncated --format csv");
        expect(r.exit_code == 0, "multi-N csv run");
        std::istringstream lines(r.output);
        std::string header;
        std::getline(lines, header);
        expect(contains(header, "deviation"), "csv header carries the deviation column");
        int rows = 0;
        double prev = 1e9;
        bool decreasing = true;
        for (std::string line; std::getline(lines, line);) {
            if (line.empty()) continue;
            ++rows;
            auto pos = header.find("deviation");
            int field = 0;
            for (size_t i = 0; i < pos; ++i)
                if (header[i] == ',') ++field;
            std::istringstream ls(line);
            std::string cell;
            for (int i = 0; i <= field; ++i) std::getline(ls, cell, ',');
            double dev = std::stod(cell);
            if (dev >= prev) decreasing = false;
            prev = dev;
        }
        expect(rows == 3, "three records for three N values");
        expect(decreasing, "deviation column decreases with N");
    }
    {
        Result r = run("pnt --n 10000,100000 --r-exponent 1/2 --weighting truncated --plot n,value");
        expect(r.exit_code == 0, "plot emitter runs");
        std::istringstream lines(r.output);
        std::string header;
        std::getline(lines, header);
        expect(header == "n,value,series", "two-column plot header with series tag");
        int rows = 0;
        for (std::string line; std::getline(lines, line);)
            if (!line.empty()) ++rows;
        expect(rows == 2, "one plot row per record");
    }
    {
        Result r = run("roth --n 101");
        expect(r.exit_code == 0, "roth runs");
        expect(contains(r.output, "\"route_difference\":"), "roth reports the cross-route difference");
    }
    {
        Result r = run("tuples --forms \"x; x+2\" --n 100000 --weighting mangoldt");
        expect(r.exit_code == 0, "twin tuples runs");
        expect(contains(r.output, "\"prediction\":1.3203"), "twin prediction carries the twin constant");
        expect(contains(r.output, "\"conjectural\":true"), "twin record is flagged conjectural");
    }
    {
        Result r = run("gowers --n 2003 --k 3 --w 10 --epsilon 0.2");
        expect(r.exit_code == 0, "gowers runs");
        expect(contains(r.output, "norms_lambda_b_minus_1"), "gowers reports the uniformity norms");
    }

    if (g_failures == 0) std::printf("cli behavior: all checks passed\n");
    return g_failures;
}
