#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sievelab/cyclic_analysis.hpp"
#include "sievelab/local_model.hpp"
#include "sievelab/obstruction_engine.hpp"
#include "sievelab/truncated_sieve.hpp"
#include "sievelab/w_trick.hpp"

namespace sievelab {

enum class Weighting {
    mangoldt,
    sieve,
    renormalized_mangoldt,
    renormalized_sieve,
    indicator,
};
Weighting weighting_from_name(const std::string& name);
std::string weighting_name(Weighting w);

// Tuple-correlation experiment: empirical average of the weighted forms
// against the local-model prediction.
struct CorrelationResult {
    std::string system;
    int64_t n = 0;
    Weighting weighting = Weighting::mangoldt;
    double lhs = 0.0;
    double prediction = 0.0;
    double relative_deviation = 0.0;  // |lhs - prediction| / max(prediction, 1e-12)
    double std_error = 0.0;           // 0 when exhaustive
    bool exact = true;
    bool conjectural = false;  // prediction rests on the unproven tuple conjecture
    std::string note;
    int64_t runtime_ms = 0;
};

struct CorrelationOptions {
    int64_t p_max = 0;              // singular-series cutoff; 0 = auto by t
    int64_t grid_budget = 1'000'000'000;  // exhaustive grid cap (t <= 2)
    int64_t sample_budget = 2'000'000;    // Monte Carlo draws past the cap
    int64_t alpha_p_budget = 100'000'000;
    uint64_t seed = 1;
    uint64_t b = 1;  // residue for the renormalized weightings
    const WContext* ctx = nullptr;
    const TruncationParams* params = nullptr;
};

CorrelationResult correlation_experiment(const AffineSystem& system, int64_t n, Weighting weighting,
                                         const SieveTable& table, const CorrelationOptions& options = {});

// Weighted k-term progression average over 1 <= a, r <= N; progressions
// whose entries exceed table.n_max are dropped (no wraparound).
struct CensusResult {
    double value = 0.0;
    double std_error = 0.0;
    bool exact = true;
};
struct CensusOptions {
    int64_t exhaustive_cap = 100'000;  // largest N for the O(k N^2) loop
    int64_t sample_budget = 2'000'000;
    uint64_t seed = 1;
    uint64_t b = 1;
    const WContext* ctx = nullptr;
    const TruncationParams* params = nullptr;
};
CensusResult ap_census(int k, int64_t n, Weighting weighting, const SieveTable& table,
                       const CensusOptions& options = {});

// E( f(a) f(a+r) f(a+2r) | a, r in Z/NZ ) by a direct O(N^2) loop.
// Deliberately independent of the spectral ap_average path so the two can
// cross-validate each other.  f must be real with 0 <= f.
double roth_count_oracle(const ResidueFunction& f);

// Renormalized weights on the grid n = 0..N-1 (identifying {1..N} with
// Z/NZ; argument of the underlying weight is Wn + b).
ResidueFunction lambda_b_grid(int64_t n, uint64_t b, const WContext& ctx, const SieveTable& table);
ResidueFunction nu_b_grid(int64_t n, uint64_t b, const WContext& ctx, const TruncationParams& params,
                          const SieveTable& table);

// The full transference chain on one prime modulus: W-trick, majorize
// c Lambda_b <= nu_b, structure-decompose, count f_Uperp progressions and
// bound every cross term containing f_U.
struct PipelineReport {
    int64_t n = 0;
    int k = 0;
    double w = 0.0;
    uint64_t big_w = 0;
    uint64_t b = 1;
    double r = 0.0;      // truncation level
    double theta = 0.0;  // log R / log(W N)
    double epsilon = 0.0;
    uint64_t seed = 0;
    double c_normalization = 0.0;  // f = c Lambda_b
    double majorant_mean = 0.0;
    double f_mean = 0.0;
    int iterations = 0;
    bool terminated = true;
    double final_gowers = 0.0;
    std::vector<double> energy_trace;
    double exceptional_mass = 0.0;
    double f_uperp_max = 0.0;
    double f_uperp_ap_average = 0.0;        // the all-f_Uperp term
    std::vector<double> cross_terms;        // |ap| of every term containing f_U
    std::vector<std::string> cross_labels;  // e.g. "U,Uperp,Uperp"
    double max_cross_term = 0.0;
    double multilinearity_residual = 0.0;  // |sum of 2^k terms - unsplit average|
    double lambda_b_ap_average = 0.0;      // unsplit Lambda_b average, for comparison
    double assembled_lower_bound = 0.0;    // (pure term - sum |cross|) / c^k

    std::string to_json() const;
};

struct PipelineOptions {
    uint64_t b = 1;
    int max_iter = 50;
    double atom_cap = 10.0;
    CutoffKind cutoff = CutoffKind::smooth_l2normalized;
};

PipelineReport decomposition_pipeline(int64_t n_prime, int k, double epsilon, double w, int64_t theta_num,
                                      int64_t theta_den, uint64_t seed, const PipelineOptions& options = {});

}  // namespace sievelab
