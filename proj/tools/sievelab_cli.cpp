// sievelab: command-line experiment harness.
//
// One experiment per record, one JSON record per line (or CSV with
// --format csv).  All randomness flows from --seed; varying --threads
// never changes any emitted value.  Exit codes: 0 success, 2 parameter
// validation, 3 budget exceeded, 64 usage.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "sievelab/errors.hpp"
#include "sievelab/parallel.hpp"
#include "sievelab/prime_patterns.hpp"

using json = nlohmann::ordered_json;
using namespace sievelab;

namespace {

struct CommonOptions {
    std::string out;
    std::string format = "json";
    std::string plot;  // "xfield,yfield" -> two-column CSV with a series tag
    int threads = 0;
    uint64_t seed = 1;
    bool timings = false;
};

struct RunError {
    int exit_code;
    std::string message;
};

int64_t parse_integer(const std::string& text, const std::string& flag) {
    try {
        size_t used = 0;
        int64_t v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw RunError{2, flag + ": '" + text + "' is not an integer"};
    }
}

std::vector<int64_t> parse_n_list(const std::string& text) {
    std::vector<int64_t> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        if (piece.empty()) continue;
        out.push_back(parse_integer(piece, "--n"));
    }
    if (out.empty()) throw RunError{2, "--n: no values given"};
    return out;
}

std::pair<int64_t, int64_t> parse_exponent(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) throw RunError{2, "--r-exponent: expected an exact rational like 1/3"};
    int64_t num = parse_integer(text.substr(0, slash), "--r-exponent");
    int64_t den = parse_integer(text.substr(slash + 1), "--r-exponent");
    if (num <= 0 || den <= 0 || num >= den) throw RunError{2, "--r-exponent: need a rational in (0, 1)"};
    return {num, den};
}

void fail_if(bool condition, std::vector<std::string>& violations, const std::string& message) {
    if (condition) violations.push_back(message);
}

void finish_validation(const std::vector<std::string>& violations) {
    if (violations.empty()) return;
    std::string all;
    for (const auto& v : violations) all += "  - " + v + "\n";
    throw RunError{2, "invalid parameters:\n" + all};
}

// flatten scalar fields to one CSV row; records must be homogeneous
std::string to_csv(const std::vector<json>& records) {
    std::ostringstream out;
    if (records.empty()) {
        out << "\n";
        return out.str();
    }
    std::vector<std::string> keys;
    for (auto it = records[0].begin(); it != records[0].end(); ++it)
        if (!it.value().is_array() && !it.value().is_object()) keys.push_back(it.key());
    for (size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
    out << "\n";
    for (const auto& rec : records) {
        for (size_t i = 0; i < keys.size(); ++i) {
            if (!rec.contains(keys[i])) throw RunError{2, "heterogeneous record set: missing field " + keys[i]};
            const auto& v = rec.at(keys[i]);
            out << (i ? "," : "");
            if (v.is_string()) out << v.get<std::string>();
            else out << v.dump();
        }
        out << "\n";
    }
    return out.str();
}

std::string emit_plot_data(const std::vector<json>& records, const std::string& x, const std::string& y) {
    std::ostringstream out;
    out << x << "," << y << ",series\n";
    for (const auto& rec : records) {
        if (!rec.contains(x) || !rec.contains(y))
            throw RunError{2, "plot fields '" + x + "'/'" + y + "' missing from a record"};
        const auto emit_field = [&](const json& v) {
            if (v.is_string()) out << v.get<std::string>();
            else out << v.dump();
        };
        emit_field(rec.at(x));
        out << ",";
        emit_field(rec.at(y));
        out << "," << (rec.contains("experiment") ? rec.at("experiment").get<std::string>() : "") << "\n";
    }
    return out.str();
}

void write_records(const std::vector<json>& records, const CommonOptions& common) {
    std::string payload;
    if (!common.plot.empty()) {
        auto comma = common.plot.find(',');
        if (comma == std::string::npos) throw RunError{2, "--plot: expected xfield,yfield"};
        payload = emit_plot_data(records, common.plot.substr(0, comma), common.plot.substr(comma + 1));
    } else if (common.format == "csv") {
        payload = to_csv(records);
    } else {
        std::ostringstream out;
        for (const auto& rec : records) out << rec.dump() << "\n";
        payload = out.str();
    }
    if (common.out.empty()) {
        std::cout << payload;
    } else {
        std::ofstream file(common.out, std::ios::binary);
        if (!file) throw RunError{2, "cannot open --out file " + common.out};
        file << payload;
    }
}

int64_t elapsed_ms(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
}

// ---- subcommand payloads ----------------------------------------------

json run_sieve(int64_t n, const CommonOptions& common) {
    auto start = std::chrono::steady_clock::now();
    SieveTable table = build_sieve(n);
    double sum = 0.0;
    int64_t primes = 0, mertens = 0;
    for (int64_t m = 1; m <= n; ++m) {
        sum += table.mangoldt(m);
        if (table.is_prime(m)) ++primes;
        mertens += table.moebius(m);
    }
    json rec;
    rec["experiment"] = "sieve";
    rec["n"] = n;
    rec["mean_mangoldt"] = sum / static_cast<double>(n);
    rec["prime_count"] = primes;
    rec["mertens_sum"] = mertens;
    if (common.timings) rec["runtime_ms"] = elapsed_ms(start);
    return rec;
}

json run_pnt(int64_t n, const std::string& weighting, int64_t theta_num, int64_t theta_den,
             const std::string& cutoff, const CommonOptions& common) {
    auto start = std::chrono::steady_clock::now();
    json rec;
    rec["experiment"] = "pnt";
    rec["weighting"] = weighting;
    rec["n"] = n;
    if (weighting == "mangoldt") {
        SieveTable table = build_sieve(n);
        double sum = 0.0;
        for (int64_t m = 1; m <= n; ++m) sum += table.mangoldt(m);
        rec["value"] = sum / static_cast<double>(n);
    } else {
        double r = truncation_level(n, theta_num, theta_den);
        TruncationParams params(r, CutoffFunction::make(cutoff));
        SieveTable table = build_sieve(std::max<int64_t>(static_cast<int64_t>(r) + 1, 16));
        MeanReport rep = weighting == "truncated" ? mean_truncated(n, params, table) : mean_sieve(n, params, table);
        rec["r_exponent"] = std::to_string(theta_num) + "/" + std::to_string(theta_den);
        rec["r"] = rep.r;
        rec["cutoff"] = cutoff;
        rec["value"] = rep.value;
        rec["window_ok"] = rep.window_ok;
        if (!rep.window_note.empty()) rec["window_note"] = rep.window_note;
    }
    rec["deviation"] = std::abs(rec["value"].get<double>() - 1.0);
    rec["seed"] = common.seed;
    if (common.timings) rec["runtime_ms"] = elapsed_ms(start);
    return rec;
}

json run_tuples(const std::string& forms, int64_t n, const std::string& weighting_name_str, int64_t theta_num,
                int64_t theta_den, const std::string& cutoff, double w, uint64_t b, int64_t p_max,
                int64_t budget, const CommonOptions& common) {
    auto start = std::chrono::steady_clock::now();
    AffineSystem system = AffineSystem::parse(forms);
    Weighting weighting = weighting_from_name(weighting_name_str);

    bool renormalized =
        weighting == Weighting::renormalized_mangoldt || weighting == Weighting::renormalized_sieve;
    bool sieve_weighted = weighting == Weighting::sieve || weighting == Weighting::renormalized_sieve;

    WContext ctx;
    if (renormalized) ctx = make_w_context(w);

    // table covers the largest weighted argument
    int64_t max_value = 1;
    for (int i = 0; i < system.m(); ++i) {
        int64_t hi = system.constant(i);
        for (int j = 0; j < system.t(); ++j) {
            int64_t c = system.coefficient(i, j);
            hi += c > 0 ? c * n : c;
        }
        max_value = std::max(max_value, hi);
    }
    int64_t table_max = renormalized
                            ? static_cast<int64_t>(ctx.big_w) * max_value + static_cast<int64_t>(ctx.big_w)
                            : max_value;
    SieveTable table = build_sieve(std::max<int64_t>(table_max, 16));

    double scale = renormalized ? static_cast<double>(ctx.big_w) * static_cast<double>(n) : static_cast<double>(n);
    std::optional<TruncationParams> params;
    if (sieve_weighted)
        params.emplace(std::floor(std::exp(static_cast<double>(theta_num) / static_cast<double>(theta_den) *
                                           std::log(scale))),
                       CutoffFunction::make(cutoff));

    CorrelationOptions opt;
    opt.p_max = p_max;
    opt.seed = common.seed;
    opt.b = b;
    if (budget > 0) {
        opt.grid_budget = budget;
        opt.sample_budget = std::min<int64_t>(budget, opt.sample_budget);
        opt.alpha_p_budget = budget;
    }
    if (renormalized) opt.ctx = &ctx;
    if (params) opt.params = &*params;

    CorrelationResult result = correlation_experiment(system, n, weighting, table, opt);

    json rec;
    rec["experiment"] = "tuples";
    rec["system"] = result.system;
    rec["n"] = n;
    rec["weighting"] = weighting_name_str;
    if (sieve_weighted) {
        rec["r_exponent"] = std::to_string(theta_num) + "/" + std::to_string(theta_den);
        rec["r"] = params->r;
        rec["cutoff"] = cutoff;
    }
    if (renormalized) {
        rec["w"] = w;
        rec["b"] = b;
    }
    rec["lhs"] = result.lhs;
    rec["prediction"] = result.prediction;
    rec["deviation"] = result.relative_deviation;
    if (!result.exact) rec["stderr"] = result.std_error;
    rec["exact"] = result.exact;
    rec["conjectural"] = result.conjectural;
    if (!result.note.empty()) rec["note"] = result.note;
    rec["seed"] = common.seed;
    if (common.timings) rec["runtime_ms"] = elapsed_ms(start);
    return rec;
}

json run_gowers(int64_t n, int k, double w, uint64_t b, double epsilon, double rho, const CommonOptions& common) {
    auto start = std::chrono::steady_clock::now();
    WContext ctx = make_w_context(w);
    SieveTable table(static_cast<int64_t>(ctx.big_w) * n + static_cast<int64_t>(ctx.big_w));
    ResidueFunction lam = lambda_b_grid(n, b, ctx, table);
    ResidueFunction centered = lam;
    for (auto& v : centered.values) v -= 1.0;

    json rec;
    rec["experiment"] = "gowers";
    rec["n"] = n;
    rec["w"] = w;
    rec["b"] = b;
    json norms = json::object();
    for (int d = 1; d <= k - 1; ++d) norms["u" + std::to_string(d)] = gowers_norm(centered, d);
    rec["norms_lambda_b_minus_1"] = norms;

    // obstruction side: exceptional frequencies, the Bohr set they span,
    // and the boundedness of the Fejer-smoothed part
    Spectrum s = spectrum(centered, epsilon);
    rec["epsilon"] = epsilon;
    rec["spectrum_size"] = s.frequencies.size();
    rec["rho"] = rho;
    BohrSet bohr = bohr_set(n, s.frequencies, rho);
    rec["bohr_size"] = bohr.members.size();
    Decomposition split = fejer_split(lam, bohr);
    rec["fejer_uperp_max"] = split.f_uperp.max_abs();
    rec["fejer_u2_residual"] = split.final_gowers;
    rec["seed"] = common.seed;
    if (common.timings) rec["runtime_ms"] = elapsed_ms(start);
    return rec;
}

json run_decompose(int64_t n, int k, double epsilon, double w, int64_t theta_num, int64_t theta_den,
                   const std::string& cutoff, uint64_t b, int max_iter, const CommonOptions& common) {
    auto start = std::chrono::steady_clock::now();
    WContext ctx = make_w_context(w);
    const int64_t big_w = static_cast<int64_t>(ctx.big_w);
    SieveTable table(big_w * n + big_w);
    double r = truncation_level(big_w * n, theta_num, theta_den);
    TruncationParams params(r, CutoffFunction::make(cutoff));
    ResidueFunction lam = lambda_b_grid(n, b, ctx, table);
    ResidueFunction nu = nu_b_grid(n, b, ctx, params, table);

    double c = 1.0 / majorization_constant(big_w * n, params);
    double worst = 0.0;
    for (int64_t m = 0; m < n; ++m) {
        double l = lam.values[static_cast<size_t>(m)].real();
        if (l > 0.0) worst = std::max(worst, c * l / nu.values[static_cast<size_t>(m)].real());
    }
    if (worst > 1.0) c /= worst * (1.0 + 1e-12);
    ResidueFunction f = ResidueFunction::zeros(n);
    for (int64_t m = 0; m < n; ++m) f.values[static_cast<size_t>(m)] = c * lam.values[static_cast<size_t>(m)];

    StructureOptions sopt;
    sopt.max_iter = max_iter;
    sopt.shift_seed = common.seed;
    Decomposition d = structure_decompose(f, k, epsilon, nu, sopt);

    json rec;
    rec["experiment"] = "decompose";
    rec["n"] = n;
    rec["k"] = k;
    rec["w"] = w;
    rec["b"] = b;
    rec["r"] = r;
    rec["cutoff"] = cutoff;
    rec["c_normalization"] = c;
    rec["seed"] = common.seed;
    rec["decomposition"] = json::parse(d.to_json());
    if (common.timings) rec["runtime_ms"] = elapsed_ms(start);
    return rec;
}

json run_pipeline(int64_t n, int k, double epsilon, double w, int64_t theta_num, int64_t theta_den,
                  const std::string& cutoff, uint64_t b, int max_iter, const CommonOptions& common) {
    auto start = std::chrono::steady_clock::now();
    PipelineOptions opt;
    opt.b = b;
    opt.max_iter = max_iter;
    opt.cutoff = CutoffFunction::make(cutoff).kind();
    PipelineReport rep = decomposition_pipeline(n, k, epsilon, w, theta_num, theta_den, common.seed, opt);
    json rec = json::parse(rep.to_json());
    if (common.timings) rec["runtime_ms"] = elapsed_ms(start);
    return rec;
}

json run_roth(int64_t n, const CommonOptions& common) {
    auto start = std::chrono::steady_clock::now();
    SieveTable table = build_sieve(std::max<int64_t>(n, 2));
    ResidueFunction f = ResidueFunction::zeros(n);
    int64_t primes = 0;
    for (int64_t m = 2; m < n; ++m)
        if (table.is_prime(m)) {
            f.values[static_cast<size_t>(m)] = 1.0;
            ++primes;
        }
    double oracle = roth_count_oracle(f);
    std::vector<ResidueFunction> fs(3, f);
    double spectral = ap_average(fs).real();

    json rec;
    rec["experiment"] = "roth";
    rec["n"] = n;
    rec["prime_density"] = static_cast<double>(primes) / static_cast<double>(n);
    rec["count_oracle"] = oracle;
    rec["spectral_average"] = spectral;
    rec["route_difference"] = std::abs(oracle - spectral);
    rec["seed"] = common.seed;
    if (common.timings) rec["runtime_ms"] = elapsed_ms(start);
    return rec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sievelab: sieve / uniformity-norm experiment harness"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    app.add_option("--out", common.out, "write records to a file instead of stdout");
    app.add_option("--format", common.format, "json (one record per line) or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--plot", common.plot, "emit two-column plot CSV: xfield,yfield");
    app.add_option("--threads", common.threads, "worker threads (values never depend on this)");
    app.add_option("--seed", common.seed, "seed for all randomized paths");
    app.add_flag("--timings", common.timings, "include runtime_ms in records (breaks byte-determinism)");

    std::string n_text = "1000";
    std::string r_exponent = "1/3";
    std::string cutoff = "smooth_unit";
    std::string weighting = "mangoldt";
    std::string forms = "x; x+2";
    double w = 10.0;
    double epsilon = 0.1;
    double rho = 0.1;
    uint64_t b = 1;
    int k = 3;
    int max_iter = 50;
    int64_t p_max = 0;
    int64_t budget = 0;

    auto* sieve_cmd = app.add_subcommand("sieve", "arithmetic-function tables and summary statistics");
    sieve_cmd->add_option("--n", n_text, "table size (comma-separated for several runs)");

    std::string pnt_weighting = "truncated";
    auto* pnt_cmd = app.add_subcommand("pnt", "mean of the (truncated) von Mangoldt weights");
    pnt_cmd->add_option("--n", n_text);
    pnt_cmd->add_option("--r-exponent", r_exponent, "exact rational theta: R = N^theta");
    pnt_cmd->add_option("--cutoff", cutoff)->check(CLI::IsMember({"triangle", "smooth_unit", "smooth_l2normalized"}));
    pnt_cmd->add_option("--weighting", pnt_weighting, "mangoldt | truncated | sieve");

    auto* tuples_cmd = app.add_subcommand("tuples", "affine-system correlations against the local model");
    tuples_cmd->add_option("--forms", forms, "semicolon-separated affine forms, e.g. \"x; x+2\"");
    tuples_cmd->add_option("--n", n_text);
    tuples_cmd->add_option("--weighting", weighting,
                           "mangoldt | sieve | renormalized_mangoldt | renormalized_sieve | indicator");
    tuples_cmd->add_option("--r-exponent", r_exponent);
    tuples_cmd->add_option("--cutoff", cutoff);
    tuples_cmd->add_option("--w", w, "small-prime threshold for the renormalized weightings");
    tuples_cmd->add_option("--b", b, "residue class for the renormalized weightings");
    tuples_cmd->add_option("--p-max", p_max, "singular-series cutoff (0 = automatic)");
    tuples_cmd->add_option("--budget", budget, "evaluation budget for grids and local densities");

    auto* gowers_cmd = app.add_subcommand("gowers", "uniformity norms of the renormalized weights");
    gowers_cmd->add_option("--n", n_text, "prime modulus");
    gowers_cmd->add_option("--k", k, "pattern length: norms U^1..U^(k-1)");
    gowers_cmd->add_option("--w", w);
    gowers_cmd->add_option("--b", b);
    gowers_cmd->add_option("--epsilon", epsilon, "spectrum threshold");
    gowers_cmd->add_option("--rho", rho, "Bohr-set radius for the Fejer diagnostics");

    std::string sieve_cutoff = "smooth_l2normalized";
    auto* decompose_cmd = app.add_subcommand("decompose", "energy-increment structure decomposition of c*Lambda_b");
    decompose_cmd->add_option("--n", n_text, "prime modulus");
    decompose_cmd->add_option("--k", k);
    decompose_cmd->add_option("--epsilon", epsilon);
    decompose_cmd->add_option("--w", w);
    decompose_cmd->add_option("--r-exponent", r_exponent);
    decompose_cmd->add_option("--cutoff", sieve_cutoff);
    decompose_cmd->add_option("--b", b);
    decompose_cmd->add_option("--max-iter", max_iter);

    auto* pipeline_cmd = app.add_subcommand("pipeline", "full transference chain with progression counts");
    pipeline_cmd->add_option("--n", n_text, "prime modulus");
    pipeline_cmd->add_option("--k", k);
    pipeline_cmd->add_option("--epsilon", epsilon);
    pipeline_cmd->add_option("--w", w);
    pipeline_cmd->add_option("--r-exponent", r_exponent);
    pipeline_cmd->add_option("--cutoff", sieve_cutoff);
    pipeline_cmd->add_option("--b", b);
    pipeline_cmd->add_option("--max-iter", max_iter);

    auto* roth_cmd = app.add_subcommand("roth", "3-term progression counts in the primes, two routes");
    roth_cmd->add_option("--n", n_text, "modulus");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 64;
    }

    try {
        if (common.threads > 0) par::set_thread_count(common.threads);
        std::vector<int64_t> ns = parse_n_list(n_text);
        auto [theta_num, theta_den] = parse_exponent(r_exponent);

        std::vector<std::string> violations;
        for (int64_t n : ns) fail_if(n < 1, violations, "--n must be >= 1");

        std::vector<json> records;
        if (sieve_cmd->parsed()) {
            finish_validation(violations);
            for (int64_t n : ns) records.push_back(run_sieve(n, common));
        } else if (pnt_cmd->parsed()) {
            fail_if(pnt_weighting != "mangoldt" && pnt_weighting != "truncated" && pnt_weighting != "sieve",
                    violations, "--weighting must be mangoldt, truncated or sieve");
            finish_validation(violations);
            for (int64_t n : ns) records.push_back(run_pnt(n, pnt_weighting, theta_num, theta_den, cutoff, common));
        } else if (tuples_cmd->parsed()) {
            fail_if(w < 2.0, violations, "--w must be >= 2");
            finish_validation(violations);
            for (int64_t n : ns)
                records.push_back(
                    run_tuples(forms, n, weighting, theta_num, theta_den, cutoff, w, b, p_max, budget, common));
        } else if (gowers_cmd->parsed()) {
            fail_if(k < 2 || k > 5, violations, "--k must be in [2, 5] (U^4 is the largest supported norm)");
            fail_if(!(epsilon > 0.0 && epsilon < 1.0), violations, "--epsilon must be in (0, 1)");
            fail_if(w < 2.0, violations, "--w must be >= 2");
            fail_if(!(rho > 0.0 && rho <= 0.5), violations, "--rho must be in (0, 1/2]");
            finish_validation(violations);
            for (int64_t n : ns) records.push_back(run_gowers(n, k, w, b, epsilon, rho, common));
        } else if (decompose_cmd->parsed() || pipeline_cmd->parsed()) {
            fail_if(k < 3 || k > 4, violations, "--k must be 3 or 4");
            fail_if(!(epsilon > 0.0 && epsilon < 1.0), violations, "--epsilon must be in (0, 1)");
            fail_if(w < 2.0, violations, "--w must be >= 2");
            fail_if(max_iter < 1, violations, "--max-iter must be >= 1");
            for (int64_t n : ns) fail_if(n > 5003, violations, "--n capped at 5003 (U^(k-1) cost)");
            finish_validation(violations);
            for (int64_t n : ns)
                records.push_back(decompose_cmd->parsed()
                                      ? run_decompose(n, k, epsilon, w, theta_num, theta_den, sieve_cutoff, b,
                                                      max_iter, common)
                                      : run_pipeline(n, k, epsilon, w, theta_num, theta_den, sieve_cutoff, b,
                                                     max_iter, common));
        } else if (roth_cmd->parsed()) {
            for (int64_t n : ns) fail_if(n > 20000, violations, "--n capped at 20000 (O(N^2) count)");
            finish_validation(violations);
            for (int64_t n : ns) records.push_back(run_roth(n, common));
        }

        write_records(records, common);
        return 0;
    } catch (const RunError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    } catch (const budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
