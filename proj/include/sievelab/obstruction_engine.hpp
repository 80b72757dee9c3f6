#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sievelab/cyclic_analysis.hpp"

namespace sievelab {

// Frequencies xi with |fhat(xi)| >= epsilon: the obstructions to linear
// uniformity detected in f.
struct Spectrum {
    int64_t modulus = 0;
    double epsilon = 0.0;
    std::vector<int64_t> frequencies;
};
Spectrum spectrum(const ResidueFunction& f, double epsilon);

// B(S, rho) = { n : dist(n xi / N, Z) < rho for all xi in S }, the phase
// read here being n*xi/N (frequencies as N-th roots of unity).
struct BohrSet {
    int64_t modulus = 0;
    std::vector<int64_t> frequencies;
    double radius = 0.0;
    std::vector<int64_t> members;  // sorted
};
BohrSet bohr_set(int64_t n, std::vector<int64_t> frequencies, double rho);

// A partition of Z/NZ into atoms, ids dense in [0, atom_count).
struct SigmaAlgebra {
    int64_t modulus = 0;
    std::vector<int32_t> atom_of;
    int32_t atom_count = 0;

    static SigmaAlgebra trivial(int64_t n);   // one atom
    static SigmaAlgebra discrete(int64_t n);  // N atoms
    std::vector<int64_t> atom_sizes() const;
    // every atom of *this lies inside one atom of coarser
    bool refines(const SigmaAlgebra& coarser) const;
};

// E(f | B): constant on each atom, equal to the atom mean (long-double
// accumulation, so projecting twice reproduces the first projection).
ResidueFunction conditional_expectation(const ResidueFunction& f, const SigmaAlgebra& algebra);

// Atoms = nonempty preimages of the half-open eps-grid on C, translated by
// a seeded uniform shift in [0, eps)^2.  Ids in first-seen order along n.
SigmaAlgebra level_set_algebra(const ResidueFunction& g, double epsilon, uint64_t shift_seed);

// smallest common refinement (nonempty pairwise atom intersections)
SigmaAlgebra join(const SigmaAlgebra& a, const SigmaAlgebra& b);

// One decomposition f = f_U + f_Uperp (exact except on the exceptional
// atom, where both parts are zeroed and the dropped f-mass is reported).
struct Decomposition {
    ResidueFunction f_u;
    ResidueFunction f_uperp;
    int iterations = 0;
    std::vector<double> energy_trace;  // E(|f_Uperp|^2) per iteration
    double final_gowers = 0.0;         // achieved ||f_U||_{U^{k-1}}
    double exceptional_mass = 0.0;     // E(f 1_Omega)
    bool terminated = true;            // stop rule reached before max_iter
    double min_energy_increment = 0.0;  // smallest step in energy_trace
    int k = 0;
    double epsilon = 0.0;

    std::string to_json() const;  // {N, k, epsilon, iterations, ...}
};

// Fejer-kernel split along a Bohr set: f_Uperp = f * K with
// K = (N/|B|) 1_B * (N/|B|) 1_B, f_U = f - f_Uperp.  K has mean 1, so the
// split preserves the mean exactly.
Decomposition fejer_split(const ResidueFunction& f, const BohrSet& bohr);

// Khат(xi) = (N/|B|)^2 (1_B)hat(xi)^2, the multiplier applied by the split
std::vector<double> fejer_multiplier(const BohrSet& bohr);

// Both sides of the energy-increment inequality
//   E(|E(f|Bfine)|^2) >= E(|E(f|Bcoarse)|^2) + |<f, g>|^2
// under: Bfine refines Bcoarse, E(f|Bcoarse) = 0, g Bfine-measurable with
// |g| <= 1.  Violated hypotheses are reported by name.
struct EnergyIncrementReport {
    double fine_energy = 0.0;
    double coarse_energy = 0.0;
    double correlation_sq = 0.0;  // |<f,g>|^2
    double slack = 0.0;           // fine - (coarse + correlation_sq)
};
EnergyIncrementReport energy_increment_check(const ResidueFunction& f, const SigmaAlgebra& coarse,
                                             const SigmaAlgebra& fine, const ResidueFunction& g);

// The energy-increment structure decomposition:
//   Step 0  m = 0
//   Step 1  f_Uperp = E(f | B_eps(D_{k-1} f_1) v ... v B_eps(D_{k-1} f_m)),
//           f_U = f - f_Uperp
//   Step 2  stop once ||f_U||_{U^{k-1}} <= sqrt(eps), else f_{m+1} = f_U
// Atoms whose majorant conditional mean exceeds atom_cap are pooled into an
// exceptional atom where both parts are zeroed (mass reported).
struct StructureOptions {
    int max_iter = 50;
    uint64_t shift_seed = 1;
    double atom_cap = 10.0;
};
Decomposition structure_decompose(const ResidueFunction& f, int k, double epsilon, const ResidueFunction& majorant,
                                  const StructureOptions& options = {});

// Diagnostics for the orthogonality of nu_b - 1 to polynomial combinations
// of dual functions (degree <= 2 monomials) and to the level-set algebra
// they generate.  Both are empirical curves, recorded rather than asserted.
struct DualOrthogonalityReport {
    double max_monomial_correlation = 0.0;        // max |<nu_b - 1, P>|
    double conditional_sup_off_exceptional = 0.0;  // ||E(nu_b - 1 | B)||_inf off Omega
    double exceptional_mass = 0.0;                 // E((nu_b + 1) 1_Omega)
};
DualOrthogonalityReport dual_orthogonality_diagnostic(const ResidueFunction& nu_b_minus_1,
                                                      const std::vector<ResidueFunction>& duals, double epsilon,
                                                      uint64_t shift_seed, const ResidueFunction& nu_b,
                                                      double atom_cap = 10.0);

}  // namespace sievelab
