// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion (with the measured runtime).
// The CLI determinism checks need the path to the sievelab binary as
// argv[1].  Exit status = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sievelab/cyclic_analysis.hpp"
#include "sievelab/local_model.hpp"
#include "sievelab/obstruction_engine.hpp"
#include "sievelab/parallel.hpp"
#include "sievelab/prime_patterns.hpp"
#include "sievelab/rng.hpp"
#include "sievelab/sieve_core.hpp"
#include "sievelab/truncated_sieve.hpp"
#include "sievelab/w_trick.hpp"

using namespace sievelab;

namespace {

std::string g_cli_path;
int g_failures = 0;

struct Outcome {
    bool ok;
    std::string detail;
};

void run_criterion(const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = body();
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_budget = seconds <= budget_seconds;
    bool pass = outcome.ok && in_budget;
    if (!pass) ++g_failures;
    std::printf("%s  %-58s  %7.2fs/%.0fs  %s\n", pass ? "PASS" : "FAIL", name.c_str(), seconds, budget_seconds,
                outcome.detail.c_str());
    std::fflush(stdout);
}

ResidueFunction random_function(int64_t n, Rng& rng, double magnitude = 1.0) {
    ResidueFunction f = ResidueFunction::zeros(n);
    for (auto& v : f.values) v = magnitude * rng.uniform01() * rng.unit_phase();
    return f;
}

// ---- exact identities ---------------------------------------------------

Outcome check_logn_identity() {
    SieveTable table = build_sieve(10000);
    double worst = 0.0;
    for (int64_t n = 1; n <= 10000; ++n) {
        double sum = 0.0;
        for (int64_t d : divisors(n, table)) sum += table.mangoldt(d);
        double err = std::abs(sum - std::log(static_cast<double>(n))) / std::max(1.0, std::log(static_cast<double>(n)));
        worst = std::max(worst, err);
    }
    return {worst <= 1e-9, "max relative error " + std::to_string(worst)};
}

Outcome check_lambdamu_identity() {
    SieveTable table = build_sieve(10000);
    double worst = 0.0;
    for (int64_t n = 2; n <= 10000; ++n) {
        TruncationParams params(static_cast<double>(n), CutoffFunction::make(CutoffKind::triangle));
        double got = truncated_mangoldt(n, params, table);
        double err = std::abs(got - table.mangoldt(n)) / std::max(1.0, table.mangoldt(n));
        worst = std::max(worst, err);
    }
    return {worst <= 1e-9, "max relative error " + std::to_string(worst)};
}

Outcome check_fgh_fourier() {
    double worst = 0.0;
    for (int64_t n : {int64_t{128}, int64_t{1024}}) {
        Rng rng(1000 + n);
        for (int trial = 0; trial < 50; ++trial) {
            ResidueFunction f = random_function(n, rng), g = random_function(n, rng), h = random_function(n, rng);
            cplx direct{0.0, 0.0};
            for (int64_t a = 0; a < n; ++a)
                for (int64_t r = 0; r < n; ++r) direct += f.at(a) * g.at(a + r) * h.at(a + 2 * r);
            direct /= static_cast<double>(n) * static_cast<double>(n);

            SpectrumView fh = dft(f), gh = dft(g), hh = dft(h);
            cplx spectral{0.0, 0.0};
            for (int64_t xi = 0; xi < n; ++xi) {
                int64_t m2 = ((-2 * xi) % n + n) % n;
                spectral += fh.coefficients[static_cast<size_t>(xi)] * gh.coefficients[static_cast<size_t>(m2)] *
                            hh.coefficients[static_cast<size_t>(xi)];
            }
            worst = std::max(worst, std::abs(direct - spectral));
        }
    }
    return {worst <= 1e-9, "100 triples at N in {128, 1024}; max |direct - spectral| = " + std::to_string(worst)};
}

Outcome check_u2_routes() {
    double worst = 0.0;
    int cases = 0;
    for (int64_t n : {int64_t{64}, int64_t{127}, int64_t{256}, int64_t{1024}}) {
        Rng rng(2000 + n);
        for (int trial = 0; trial < 25; ++trial) {
            ResidueFunction f = random_function(n, rng);
            worst = std::max(worst, std::abs(gowers_norm_direct(f, 2) - gowers_u2_fourier(f)));
            ++cases;
        }
    }
    return {worst <= 1e-9, std::to_string(cases) + " cases; max route difference " + std::to_string(worst)};
}

Outcome check_dual_pairing() {
    double worst = 0.0;
    for (int k : {3, 4}) {
        Rng rng(3000 + k);
        for (int trial = 0; trial < 20; ++trial) {
            ResidueFunction f = random_function(64, rng);
            cplx pairing = inner_product(f, dual_function(f, k - 1));
            double norm_power = std::pow(gowers_norm(f, k - 1), static_cast<double>(1 << (k - 1)));
            worst = std::max(worst, std::abs(pairing - cplx{norm_power, 0.0}));
        }
    }
    return {worst <= 1e-9, "k in {3,4}, N = 64, 20 cases each; max |pairing - norm power| = " + std::to_string(worst)};
}

Outcome check_energy_increment() {
    double min_slack = 1e18;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        const int64_t n = 128;
        SigmaAlgebra coarse;
        coarse.modulus = n;
        coarse.atom_of.resize(static_cast<size_t>(n));
        for (auto& a : coarse.atom_of) a = static_cast<int32_t>(rng.below(4));
        {
            std::vector<int32_t> remap(4, -1);
            int32_t next = 0;
            for (auto& a : coarse.atom_of) {
                if (remap[static_cast<size_t>(a)] < 0) remap[static_cast<size_t>(a)] = next++;
                a = remap[static_cast<size_t>(a)];
            }
            coarse.atom_count = next;
        }
        SigmaAlgebra fine;
        fine.modulus = n;
        fine.atom_of.resize(static_cast<size_t>(n));
        for (int64_t m = 0; m < n; ++m)
            fine.atom_of[static_cast<size_t>(m)] =
                static_cast<int32_t>(2 * coarse.atom_of[static_cast<size_t>(m)] + static_cast<int32_t>(rng.below(2)));
        {
            std::vector<int32_t> remap(static_cast<size_t>(2 * coarse.atom_count), -1);
            int32_t next = 0;
            for (auto& a : fine.atom_of) {
                if (remap[static_cast<size_t>(a)] < 0) remap[static_cast<size_t>(a)] = next++;
                a = remap[static_cast<size_t>(a)];
            }
            fine.atom_count = next;
        }

        ResidueFunction f0 = random_function(n, rng);
        ResidueFunction proj = conditional_expectation(f0, coarse);
        ResidueFunction f = ResidueFunction::zeros(n);
        for (int64_t m = 0; m < n; ++m)
            f.values[static_cast<size_t>(m)] = f0.values[static_cast<size_t>(m)] - proj.values[static_cast<size_t>(m)];

        ResidueFunction raw = random_function(n, rng);
        ResidueFunction g = conditional_expectation(raw, fine);
        for (auto& v : g.values) {
            double a = std::abs(v);
            if (a > 1.0) v /= a;
        }
        g = conditional_expectation(g, fine);

        EnergyIncrementReport rep = energy_increment_check(f, coarse, fine, g);
        min_slack = std::min(min_slack, rep.slack);
    }
    return {min_slack >= -1e-9, "100 admissible triples at N = 128; min slack " + std::to_string(min_slack)};
}

Outcome check_quadratic_identity() {
    Rng rng(4000);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        ResidueFunction f = random_function(101, rng);
        auto [lhs, rhs] = quadratic_obstruction_demo(f, static_cast<int64_t>(rng.below(101)));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return {worst <= 1e-9, "50 seeded f at N = 101; max side difference " + std::to_string(worst)};
}

// ---- oracle equivalences ------------------------------------------------

Outcome check_roth_vs_spectral() {
    double worst = 0.0;
    for (int64_t n : {int64_t{101}, int64_t{256}}) {
        Rng rng(5000 + n);
        for (int trial = 0; trial < 50; ++trial) {
            ResidueFunction f = ResidueFunction::zeros(n);
            for (auto& v : f.values) v = rng.uniform01();
            std::vector<ResidueFunction> fs(3, f);
            worst = std::max(worst, std::abs(roth_count_oracle(f) - ap_average(fs).real()));
        }
    }
    return {worst <= 1e-9, "100 shared inputs; max route difference " + std::to_string(worst)};
}

Outcome check_alpha_p_closed_forms() {
    AffineSystem twin = AffineSystem::parse("x; x+2");
    double worst = std::abs(alpha_p(twin, 2) - 2.0);
    for (int64_t p : primes_below(101)) {
        if (p == 2) continue;
        double want = 1.0 - 1.0 / ((p - 1.0) * (p - 1.0));
        worst = std::max(worst, std::abs(alpha_p(twin, p) - want));
    }
    return {worst <= 1e-9, "alpha_2 and alpha_p, p <= 100; max |exhaustive - closed form| = " + std::to_string(worst)};
}

// ---- statistical desk-scale reproductions --------------------------------

Outcome check_pnt_mean() {
    SieveTable table = build_sieve(1000000);
    double sum = 0.0;
    for (int64_t n = 1; n <= 1000000; ++n) sum += table.mangoldt(n);
    double mean = sum / 1e6;
    return {mean >= 0.99 && mean <= 1.01, "mean Lambda = " + std::to_string(mean)};
}

Outcome check_truncated_mean() {
    SieveTable table = build_sieve(128);
    TruncationParams params(truncation_level(1000000, 1, 3), CutoffFunction::make(CutoffKind::smooth_unit));
    MeanReport rep = mean_truncated(1000000, params, table);
    return {std::abs(rep.value - 1.0) <= 0.1, "mean = " + std::to_string(rep.value) + " at R = N^(1/3)"};
}

Outcome check_sieve_mean() {
    SieveTable table = build_sieve(128);
    TruncationParams params(truncation_level(1000000, 1, 5), CutoffFunction::make(CutoffKind::smooth_l2normalized));
    MeanReport rep = mean_sieve(1000000, params, table);
    return {std::abs(rep.value - 1.0) <= 0.15, "mean = " + std::to_string(rep.value) + " at R = N^(1/5)"};
}

Outcome check_twin_mangoldt() {
    SieveTable table = build_sieve(1000002);
    CorrelationResult r = correlation_experiment(AffineSystem::parse("x; x+2"), 1000000, Weighting::mangoldt, table);
    bool ok = std::abs(r.lhs - 1.32032) <= 0.2 * 1.32032;
    return {ok, "lhs = " + std::to_string(r.lhs) + " vs 1.32032"};
}

Outcome check_twin_sieve() {
    SieveTable table = build_sieve(1000002);
    TruncationParams params(truncation_level(1000000, 1, 5), CutoffFunction::make(CutoffKind::smooth_l2normalized));
    CorrelationOptions opt;
    opt.params = &params;
    CorrelationResult r = correlation_experiment(AffineSystem::parse("x; x+2"), 1000000, Weighting::sieve, table, opt);
    bool ok = std::abs(r.lhs - 1.32032) <= 0.25 * 1.32032;
    return {ok, "lhs = " + std::to_string(r.lhs) + " vs 1.32032 at R = N^(1/5)"};
}

Outcome check_tau_moments() {
    SieveTable table = build_sieve(100000);
    std::string detail = "moments:";
    bool ok = true;
    for (int q : {1, 2, 4}) {
        double m = tau_moment(100000, 10.0, q, &table);
        detail += " q=" + std::to_string(q) + ": " + std::to_string(m);
        if (m > 2.0) ok = false;
    }
    return {ok, detail};
}

// ---- property suites ------------------------------------------------------

Outcome check_von_neumann_suite() {
    double min_slack = 1e18;
    int cases = 0;
    for (int k : {3, 4}) {
        for (int64_t n : {int64_t{31}, int64_t{97}, int64_t{499}}) {
            Rng rng(static_cast<uint64_t>(6000 + 100 * k + n));
            for (int trial = 0; trial < 167 && cases < 1000; ++trial) {
                std::vector<ResidueFunction> fs;
                for (int j = 0; j < k; ++j) {
                    ResidueFunction f = ResidueFunction::zeros(n);
                    for (auto& v : f.values)
                        v = (trial % 2 == 0) ? rng.unit_phase() : rng.uniform01() * rng.unit_phase();
                    fs.push_back(std::move(f));
                }
                VonNeumannReport rep = von_neumann_check(fs);
                min_slack = std::min(min_slack, rep.slack);
                ++cases;
            }
        }
    }
    return {min_slack >= -1e-9,
            std::to_string(cases) + " bounded cases, k in {3,4}, N in {31,97,499}; min slack " +
                std::to_string(min_slack)};
}

Outcome check_structure_decompose() {
    Rng rng(77);
    const int64_t n = 499;
    ResidueFunction f = ResidueFunction::zeros(n);
    for (auto& v : f.values) v = rng.below(2) ? 1.0 : 0.0;
    ResidueFunction majorant = ResidueFunction::constant(n, 1.0);
    Decomposition d = structure_decompose(f, 3, 0.1, majorant);

    bool ok = d.terminated && d.iterations <= 50;
    ok = ok && d.final_gowers <= std::sqrt(0.1);
    for (const cplx& v : d.f_uperp.values) ok = ok && v.real() >= -1e-9 && v.real() <= 1.2;
    for (size_t i = 1; i < d.energy_trace.size(); ++i) ok = ok && d.energy_trace[i] >= d.energy_trace[i - 1] - 1e-9;
    ok = ok && std::abs(d.f_uperp.mean().real() - f.mean().real()) <= d.exceptional_mass + 1e-9;
    return {ok, "iterations = " + std::to_string(d.iterations) + ", final U^2 = " + std::to_string(d.final_gowers) +
                    ", exceptional mass = " + std::to_string(d.exceptional_mass)};
}

Outcome check_pipeline() {
    PipelineReport rep = decomposition_pipeline(2003, 3, 0.1, 10.0, 1, 5, 1);
    bool ok = rep.terminated;
    ok = ok && rep.f_uperp_ap_average > 0.0;
    double worst_cross = 0.0;
    for (double v : rep.cross_terms) worst_cross = std::max(worst_cross, v);
    ok = ok && worst_cross <= rep.final_gowers + 1e-6;
    return {ok, "f_Uperp AP average = " + std::to_string(rep.f_uperp_ap_average) + ", max cross = " +
                    std::to_string(worst_cross) + ", final norm = " + std::to_string(rep.final_gowers)};
}

// ---- CLI determinism -------------------------------------------------------

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome check_cli_determinism() {
    if (g_cli_path.empty()) return {false, "no CLI path given on the command line"};
    struct Case {
        std::string name;
        std::string args;
    };
    std::vector<Case> cases = {
        {"tuples", "tuples --forms \"x; x+2\" --n 200000 --weighting mangoldt --seed 7"},
        {"pnt", "pnt --n 10000,100000 --r-exponent 1/3 --cutoff smooth_unit --weighting truncated --seed 3"},
        {"pipeline", "pipeline --n 503 --k 3 --epsilon 0.1 --w 6 --r-exponent 1/5 --seed 11"},
    };
    for (const auto& c : cases) {
        std::string out1 = "acceptance_cli_1.jsonl", out2 = "acceptance_cli_2.jsonl";
        std::string cmd1 = "\"" + g_cli_path + "\" " + c.args + " --threads 1 --out " + out1;
        std::string cmd2 = "\"" + g_cli_path + "\" " + c.args + " --threads 4 --out " + out2;
        if (std::system(cmd1.c_str()) != 0) return {false, c.name + ": first run failed"};
        if (std::system(cmd2.c_str()) != 0) return {false, c.name + ": second run failed"};
        std::string a = slurp(out1), b = slurp(out2);
        std::remove(out1.c_str());
        std::remove(out2.c_str());
        if (a.empty() || a != b) return {false, c.name + ": records differ between --threads 1 and --threads 4"};
    }
    return {true, std::to_string(cases.size()) + " commands byte-identical across thread counts"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    std::printf("== exact identities (tolerance 1e-9) ==\n");
    run_criterion("logn: divisor sums of Lambda rebuild log n", 1.0, check_logn_identity);
    run_criterion("lambdamu: triangle cutoff at R = n recovers Lambda", 5.0, check_lambdamu_identity);
    run_criterion("fgh-fourier: triple average = spectral sum", 10.0, check_fgh_fourier);
    run_criterion("U^2: recursive route = fourier route", 30.0, check_u2_routes);
    run_criterion("fkf: <f, D_{k-1} f> = U^{k-1} norm power", 30.0, check_dual_pairing);
    run_criterion("energy increment inequality, 100 triples", 30.0, check_energy_increment);
    run_criterion("quadratic obstruction identity, 50 cases", 30.0, check_quadratic_identity);

    std::printf("== oracle equivalences ==\n");
    run_criterion("roth count oracle = spectral progression average", 30.0, check_roth_vs_spectral);
    run_criterion("alpha_p exhaustive = closed forms (twin system)", 30.0, check_alpha_p_closed_forms);

    std::printf("== statistical desk-scale reproductions ==\n");
    run_criterion("pnt: mean Lambda over 10^6 in [0.99, 1.01]", 2.0, check_pnt_mean);
    run_criterion("truncated mean at N = 10^6, R = N^(1/3) within 0.1", 60.0, check_truncated_mean);
    run_criterion("sieve mean at N = 10^6, R = N^(1/5) within 0.15", 120.0, check_sieve_mean);
    run_criterion("twin correlation, Lambda weight, within 20%", 5.0, check_twin_mangoldt);
    run_criterion("twin correlation, sieve weight, within 25%", 120.0, check_twin_sieve);
    run_criterion("tau moments q in {1,2,4} at w = 10 stay <= 2", 5.0, check_tau_moments);

    std::printf("== property suites ==\n");
    run_criterion("von neumann inequality, 1000 seeded cases", 120.0, check_von_neumann_suite);
    run_criterion("structure decomposition of a dense indicator", 120.0, check_structure_decompose);
    run_criterion("transference pipeline at N = 2003, k = 3", 600.0, check_pipeline);
    run_criterion("CLI determinism across thread counts", 120.0, check_cli_determinism);

    if (g_failures == 0) std::printf("all acceptance criteria passed\n");
    else std::printf("%d criteria FAILED\n", g_failures);
    return g_failures;
}
