#include "sievelab/obstruction_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "sievelab/fft.hpp"
#include "sievelab/rng.hpp"

namespace sievelab {

Spectrum spectrum(const ResidueFunction& f, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("spectrum: need 0 < epsilon < 1");
    Spectrum s;
    s.modulus = f.modulus;
    s.epsilon = epsilon;
    SpectrumView view = dft(f);
    for (int64_t xi = 0; xi < f.modulus; ++xi)
        if (std::abs(view.coefficients[static_cast<size_t>(xi)]) >= epsilon) s.frequencies.push_back(xi);
    return s;
}

BohrSet bohr_set(int64_t n, std::vector<int64_t> frequencies, double rho) {
    if (n < 1) throw std::invalid_argument("bohr_set: modulus must be >= 1");
    if (!(rho > 0.0 && rho <= 0.5)) throw std::invalid_argument("bohr_set: need 0 < rho <= 1/2");
    BohrSet b;
    b.modulus = n;
    b.frequencies = std::move(frequencies);
    b.radius = rho;
    for (int64_t m = 0; m < n; ++m) {
        bool inside = true;
        for (int64_t xi : b.frequencies) {
            int64_t r = ((m * (xi % n)) % n + n) % n;
            double dist = static_cast<double>(std::min(r, n - r)) / static_cast<double>(n);
            if (!(dist < rho)) {
                inside = false;
                break;
            }
        }
        if (inside) b.members.push_back(m);
    }
    return b;
}

SigmaAlgebra SigmaAlgebra::trivial(int64_t n) {
    SigmaAlgebra b;
    b.modulus = n;
    b.atom_of.assign(static_cast<size_t>(n), 0);
    b.atom_count = 1;
    return b;
}

SigmaAlgebra SigmaAlgebra::discrete(int64_t n) {
    SigmaAlgebra b;
    b.modulus = n;
    b.atom_of.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) b.atom_of[static_cast<size_t>(i)] = static_cast<int32_t>(i);
    b.atom_count = static_cast<int32_t>(n);
    return b;
}

std::vector<int64_t> SigmaAlgebra::atom_sizes() const {
    std::vector<int64_t> sizes(static_cast<size_t>(atom_count), 0);
    for (int32_t a : atom_of) ++sizes[static_cast<size_t>(a)];
    return sizes;
}

bool SigmaAlgebra::refines(const SigmaAlgebra& coarser) const {
    if (modulus != coarser.modulus) return false;
    std::vector<int32_t> image(static_cast<size_t>(atom_count), -1);
    for (int64_t n = 0; n < modulus; ++n) {
        int32_t fine = atom_of[static_cast<size_t>(n)];
        int32_t coarse = coarser.atom_of[static_cast<size_t>(n)];
        auto& slot = image[static_cast<size_t>(fine)];
        if (slot == -1) slot = coarse;
        else if (slot != coarse) return false;
    }
    return true;
}

ResidueFunction conditional_expectation(const ResidueFunction& f, const SigmaAlgebra& algebra) {
    if (f.modulus != algebra.modulus) throw std::invalid_argument("conditional_expectation: modulus mismatch");
    size_t atoms = static_cast<size_t>(algebra.atom_count);
    std::vector<long double> sum_re(atoms, 0.0L), sum_im(atoms, 0.0L);
    std::vector<int64_t> count(atoms, 0);
    for (int64_t n = 0; n < f.modulus; ++n) {
        size_t a = static_cast<size_t>(algebra.atom_of[static_cast<size_t>(n)]);
        sum_re[a] += f.values[static_cast<size_t>(n)].real();
        sum_im[a] += f.values[static_cast<size_t>(n)].imag();
        ++count[a];
    }
    std::vector<cplx> mean(atoms);
    for (size_t a = 0; a < atoms; ++a)
        mean[a] = {static_cast<double>(sum_re[a] / count[a]), static_cast<double>(sum_im[a] / count[a])};
    ResidueFunction out = ResidueFunction::zeros(f.modulus);
    for (int64_t n = 0; n < f.modulus; ++n)
        out.values[static_cast<size_t>(n)] = mean[static_cast<size_t>(algebra.atom_of[static_cast<size_t>(n)])];
    return out;
}

SigmaAlgebra level_set_algebra(const ResidueFunction& g, double epsilon, uint64_t shift_seed) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("level_set_algebra: need epsilon > 0");
    if (!g.finite()) throw std::invalid_argument("level_set_algebra: input has non-finite values");
    Rng rng(shift_seed);
    double s_re = epsilon * rng.uniform01();
    double s_im = epsilon * rng.uniform01();

    SigmaAlgebra b;
    b.modulus = g.modulus;
    b.atom_of.resize(static_cast<size_t>(g.modulus));
    std::map<std::pair<int64_t, int64_t>, int32_t> cells;  // first-seen dense ids
    for (int64_t n = 0; n < g.modulus; ++n) {
        const cplx& v = g.values[static_cast<size_t>(n)];
        auto cell = std::make_pair(static_cast<int64_t>(std::floor((v.real() - s_re) / epsilon)),
                                   static_cast<int64_t>(std::floor((v.imag() - s_im) / epsilon)));
        auto [it, inserted] = cells.emplace(cell, static_cast<int32_t>(cells.size()));
        b.atom_of[static_cast<size_t>(n)] = it->second;
    }
    b.atom_count = static_cast<int32_t>(cells.size());
    return b;
}

SigmaAlgebra join(const SigmaAlgebra& a, const SigmaAlgebra& b) {
    if (a.modulus != b.modulus) throw std::invalid_argument("join: modulus mismatch");
    SigmaAlgebra out;
    out.modulus = a.modulus;
    out.atom_of.resize(static_cast<size_t>(a.modulus));
    std::map<std::pair<int32_t, int32_t>, int32_t> pairs;
    for (int64_t n = 0; n < a.modulus; ++n) {
        auto key = std::make_pair(a.atom_of[static_cast<size_t>(n)], b.atom_of[static_cast<size_t>(n)]);
        auto [it, inserted] = pairs.emplace(key, static_cast<int32_t>(pairs.size()));
        out.atom_of[static_cast<size_t>(n)] = it->second;
    }
    out.atom_count = static_cast<int32_t>(pairs.size());
    return out;
}

std::vector<double> fejer_multiplier(const BohrSet& bohr) {
    if (bohr.members.empty()) throw std::invalid_argument("fejer_split: degenerate kernel (empty Bohr set)");
    const int64_t n = bohr.modulus;
    ResidueFunction indicator = ResidueFunction::zeros(n);
    for (int64_t m : bohr.members) indicator.values[static_cast<size_t>(m)] = 1.0;
    SpectrumView bhat = dft(indicator);
    double scale = static_cast<double>(n) / static_cast<double>(bohr.members.size());
    std::vector<double> khat(static_cast<size_t>(n));
    // Bohr sets are symmetric, so (1_B)hat is real and its square is
    // |.|^2; the kernel multiplier is therefore non-negative.
    for (int64_t xi = 0; xi < n; ++xi)
        khat[static_cast<size_t>(xi)] = scale * scale * std::norm(bhat.coefficients[static_cast<size_t>(xi)]);
    khat[0] = 1.0;  // kernel normalized to mean 1
    return khat;
}

Decomposition fejer_split(const ResidueFunction& f, const BohrSet& bohr) {
    if (f.modulus != bohr.modulus) throw std::invalid_argument("fejer_split: modulus mismatch");
    std::vector<double> khat = fejer_multiplier(bohr);

    SpectrumView fhat = dft(f);
    for (int64_t xi = 0; xi < f.modulus; ++xi) fhat.coefficients[static_cast<size_t>(xi)] *= khat[static_cast<size_t>(xi)];

    Decomposition d;
    d.f_uperp = idft(fhat);
    d.f_u = ResidueFunction::zeros(f.modulus);
    for (int64_t n = 0; n < f.modulus; ++n)
        d.f_u.values[static_cast<size_t>(n)] = f.values[static_cast<size_t>(n)] - d.f_uperp.values[static_cast<size_t>(n)];
    d.iterations = 1;
    double energy = 0.0;
    for (const cplx& v : d.f_uperp.values) energy += std::norm(v);
    d.energy_trace = {energy / static_cast<double>(f.modulus)};
    d.k = 3;
    d.final_gowers = gowers_norm(d.f_u, 2);
    return d;
}

EnergyIncrementReport energy_increment_check(const ResidueFunction& f, const SigmaAlgebra& coarse,
                                             const SigmaAlgebra& fine, const ResidueFunction& g) {
    if (f.modulus != coarse.modulus || f.modulus != fine.modulus || f.modulus != g.modulus)
        throw std::invalid_argument("energy_increment_check: modulus mismatch");
    if (!fine.refines(coarse))
        throw std::invalid_argument("energy_increment_check: hypothesis failed: B' does not refine B");

    ResidueFunction cond_coarse = conditional_expectation(f, coarse);
    if (cond_coarse.max_abs() > 1e-9)
        throw std::invalid_argument(
            "energy_increment_check: hypothesis failed: f is not orthogonal to the coarse algebra (E(f|B) != 0)");
    if (g.max_abs() > 1.0 + 1e-12)
        throw std::invalid_argument("energy_increment_check: hypothesis failed: |g| exceeds 1");
    ResidueFunction g_proj = conditional_expectation(g, fine);
    for (int64_t n = 0; n < f.modulus; ++n)
        if (std::abs(g_proj.values[static_cast<size_t>(n)] - g.values[static_cast<size_t>(n)]) > 1e-9)
            throw std::invalid_argument("energy_increment_check: hypothesis failed: g is not B'-measurable");

    auto energy = [](const ResidueFunction& h) {
        double e = 0.0;
        for (const cplx& v : h.values) e += std::norm(v);
        return e / static_cast<double>(h.modulus);
    };

    EnergyIncrementReport rep;
    rep.fine_energy = energy(conditional_expectation(f, fine));
    rep.coarse_energy = energy(cond_coarse);
    rep.correlation_sq = std::norm(inner_product(f, g));
    rep.slack = rep.fine_energy - rep.coarse_energy - rep.correlation_sq;
    if (rep.slack < -1e-9)
        throw std::logic_error("energy_increment_check: inequality violated, slack = " + std::to_string(rep.slack));
    return rep;
}

namespace {

// per-iteration projection with the exceptional-atom policy
struct ProjectionResult {
    ResidueFunction f_uperp;
    ResidueFunction f_u;
    double exceptional_mass = 0.0;
    double energy = 0.0;
};

ProjectionResult project_with_cap(const ResidueFunction& f, const ResidueFunction& majorant,
                                  const SigmaAlgebra& algebra, double atom_cap) {
    ResidueFunction cond_f = conditional_expectation(f, algebra);
    ResidueFunction cond_maj = conditional_expectation(majorant, algebra);

    std::vector<char> exceptional(static_cast<size_t>(algebra.atom_count), 0);
    for (int64_t n = 0; n < f.modulus; ++n) {
        size_t a = static_cast<size_t>(algebra.atom_of[static_cast<size_t>(n)]);
        if (cond_maj.values[static_cast<size_t>(n)].real() > atom_cap) exceptional[a] = 1;
    }

    ProjectionResult out;
    out.f_uperp = ResidueFunction::zeros(f.modulus);
    out.f_u = ResidueFunction::zeros(f.modulus);
    for (int64_t n = 0; n < f.modulus; ++n) {
        size_t i = static_cast<size_t>(n);
        if (exceptional[static_cast<size_t>(algebra.atom_of[i])]) {
            out.exceptional_mass += f.values[i].real();
        } else {
            out.f_uperp.values[i] = cond_f.values[i];
            out.f_u.values[i] = f.values[i] - cond_f.values[i];
        }
        out.energy += std::norm(out.f_uperp.values[i]);
    }
    out.exceptional_mass /= static_cast<double>(f.modulus);
    out.energy /= static_cast<double>(f.modulus);
    return out;
}

}  // namespace

Decomposition structure_decompose(const ResidueFunction& f, int k, double epsilon, const ResidueFunction& majorant,
                                  const StructureOptions& options) {
    if (k < 3 || k > 4) throw std::invalid_argument("structure_decompose: need k in {3, 4}");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("structure_decompose: need 0 < epsilon < 1");
    if (f.modulus != majorant.modulus) throw std::invalid_argument("structure_decompose: modulus mismatch");
    for (int64_t n = 0; n < f.modulus; ++n) {
        double v = f.values[static_cast<size_t>(n)].real();
        if (std::abs(f.values[static_cast<size_t>(n)].imag()) > 1e-12)
            throw std::invalid_argument("structure_decompose: f must be real-valued");
        if (v < -1e-12 || v > majorant.values[static_cast<size_t>(n)].real() + 1e-9)
            throw std::invalid_argument("structure_decompose: need 0 <= f <= majorant pointwise");
    }

    const double stop = std::sqrt(epsilon);
    SigmaAlgebra algebra = SigmaAlgebra::trivial(f.modulus);

    Decomposition d;
    d.k = k;
    d.epsilon = epsilon;
    for (int m = 0;; ++m) {
        ProjectionResult proj = project_with_cap(f, majorant, algebra, options.atom_cap);
        d.f_uperp = std::move(proj.f_uperp);
        d.f_u = std::move(proj.f_u);
        d.exceptional_mass = proj.exceptional_mass;
        d.energy_trace.push_back(proj.energy);
        d.iterations = m;
        d.final_gowers = gowers_norm(d.f_u, k - 1);

        if (d.final_gowers <= stop) {
            d.terminated = true;
            break;
        }
        if (m >= options.max_iter) {
            d.terminated = false;  // stop rule unreached; caller sees a flagged partial result
            break;
        }
        // f_{m+1} := f_U; its dual function refines the algebra
        ResidueFunction dual = dual_function(d.f_u, k - 1);
        uint64_t seed = options.shift_seed ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(m + 1));
        algebra = join(algebra, level_set_algebra(dual, epsilon, seed));
    }

    d.min_energy_increment = 0.0;
    for (size_t i = 1; i < d.energy_trace.size(); ++i) {
        double inc = d.energy_trace[i] - d.energy_trace[i - 1];
        if (i == 1 || inc < d.min_energy_increment) d.min_energy_increment = inc;
    }
    return d;
}

std::string Decomposition::to_json() const {
    nlohmann::ordered_json j;
    j["N"] = f_uperp.modulus;
    j["k"] = k;
    j["epsilon"] = epsilon;
    j["iterations"] = iterations;
    j["energy_trace"] = energy_trace;
    j["final_gowers"] = final_gowers;
    j["exceptional_mass"] = exceptional_mass;
    j["terminated"] = terminated;
    std::vector<double> fu, fup;
    fu.reserve(f_u.values.size());
    fup.reserve(f_uperp.values.size());
    for (const cplx& v : f_u.values) fu.push_back(v.real());
    for (const cplx& v : f_uperp.values) fup.push_back(v.real());
    j["f_U"] = fu;
    j["f_Uperp"] = fup;
    return j.dump();
}

DualOrthogonalityReport dual_orthogonality_diagnostic(const ResidueFunction& nu_b_minus_1,
                                                      const std::vector<ResidueFunction>& duals, double epsilon,
                                                      uint64_t shift_seed, const ResidueFunction& nu_b,
                                                      double atom_cap) {
    DualOrthogonalityReport rep;
    const int64_t n = nu_b_minus_1.modulus;

    // degree <= 2 monomials in the dual functions and their conjugates
    std::vector<ResidueFunction> monomials;
    for (const auto& dd : duals) {
        monomials.push_back(dd);
        ResidueFunction conj_d = dd;
        for (cplx& v : conj_d.values) v = std::conj(v);
        monomials.push_back(std::move(conj_d));
    }
    size_t linear_count = monomials.size();
    for (size_t i = 0; i < linear_count; ++i) {
        for (size_t j = i; j < linear_count; ++j) {
            ResidueFunction prod = ResidueFunction::zeros(n);
            for (int64_t m = 0; m < n; ++m)
                prod.values[static_cast<size_t>(m)] =
                    monomials[i].values[static_cast<size_t>(m)] * monomials[j].values[static_cast<size_t>(m)];
            monomials.push_back(std::move(prod));
        }
    }
    for (const auto& p : monomials)
        rep.max_monomial_correlation = std::max(rep.max_monomial_correlation, std::abs(inner_product(nu_b_minus_1, p)));

    // conditional expectation onto the joined level-set algebra
    SigmaAlgebra algebra = SigmaAlgebra::trivial(n);
    for (size_t i = 0; i < duals.size(); ++i) {
        uint64_t seed = shift_seed ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(i + 1));
        algebra = join(algebra, level_set_algebra(duals[i], epsilon, seed));
    }
    ResidueFunction cond = conditional_expectation(nu_b_minus_1, algebra);
    ResidueFunction cond_nu = conditional_expectation(nu_b, algebra);
    double omega_mass = 0.0;
    for (int64_t m = 0; m < n; ++m) {
        if (cond_nu.values[static_cast<size_t>(m)].real() > atom_cap)
            omega_mass += nu_b.values[static_cast<size_t>(m)].real() + 1.0;
        else
            rep.conditional_sup_off_exceptional =
                std::max(rep.conditional_sup_off_exceptional, std::abs(cond.values[static_cast<size_t>(m)]));
    }
    rep.exceptional_mass = omega_mass / static_cast<double>(n);
    return rep;
}

}  // namespace sievelab
