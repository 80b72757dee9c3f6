// Python bindings for the main operations: sieve tables, truncated sums,
// local densities, W-trick weights, cyclic analysis, the obstruction
// engine and the counting experiments.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sievelab/cyclic_analysis.hpp"
#include "sievelab/local_model.hpp"
#include "sievelab/obstruction_engine.hpp"
#include "sievelab/parallel.hpp"
#include "sievelab/prime_patterns.hpp"
#include "sievelab/sieve_core.hpp"
#include "sievelab/truncated_sieve.hpp"
#include "sievelab/w_trick.hpp"

namespace py = pybind11;
using namespace sievelab;

namespace {

ResidueFunction make_residue_function(int64_t n, const std::vector<cplx>& values) {
    return ResidueFunction(n, values);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "sieve tables, uniformity norms and prime-pattern experiments";

    m.def("set_thread_count", &par::set_thread_count, py::arg("n"));

    // sieve_core
    py::class_<SieveTable>(m, "SieveTable")
        .def(py::init<int64_t>(), py::arg("n_max"))
        .def_property_readonly("n_max", &SieveTable::n_max)
        .def("mangoldt", &SieveTable::mangoldt, py::arg("n"))
        .def("moebius", &SieveTable::moebius, py::arg("n"))
        .def("spf", &SieveTable::spf, py::arg("n"))
        .def("is_prime", &SieveTable::is_prime, py::arg("n"))
        .def("factor", &SieveTable::factor, py::arg("n"));
    m.def("build_sieve", &build_sieve, py::arg("n_max"));
    m.def("euler_totient", &euler_totient, py::arg("q"));
    m.def("divisors", &divisors, py::arg("n"), py::arg("table"));
    m.def("primes_below", &primes_below, py::arg("limit"));

    // cutoffs and truncated sums
    py::enum_<CutoffKind>(m, "CutoffKind")
        .value("triangle", CutoffKind::triangle)
        .value("smooth_unit", CutoffKind::smooth_unit)
        .value("smooth_l2normalized", CutoffKind::smooth_l2normalized);
    py::class_<CutoffFunction>(m, "CutoffFunction")
        .def_static("make", py::overload_cast<CutoffKind>(&CutoffFunction::make), py::arg("kind"))
        .def_static("make", py::overload_cast<const std::string&>(&CutoffFunction::make), py::arg("name"))
        .def("__call__", &CutoffFunction::operator(), py::arg("x"))
        .def_property_readonly("value_at_zero", &CutoffFunction::value_at_zero)
        .def_property_readonly("l2_derivative_norm", &CutoffFunction::l2_derivative_norm)
        .def_property_readonly("name", &CutoffFunction::name);
    py::class_<TruncationParams>(m, "TruncationParams")
        .def(py::init<double, CutoffFunction>(), py::arg("r"), py::arg("cutoff"))
        .def_readonly("r", &TruncationParams::r);
    m.def("truncated_mangoldt", &truncated_mangoldt, py::arg("n"), py::arg("params"), py::arg("table"));
    m.def("enveloping_sieve", &enveloping_sieve, py::arg("n"), py::arg("params"), py::arg("table"));
    m.def("majorization_constant", &majorization_constant, py::arg("n"), py::arg("params"));
    py::class_<MeanReport>(m, "MeanReport")
        .def_readonly("value", &MeanReport::value)
        .def_readonly("n", &MeanReport::n)
        .def_readonly("r", &MeanReport::r)
        .def_readonly("theta", &MeanReport::theta)
        .def_readonly("window_ok", &MeanReport::window_ok)
        .def_readonly("window_note", &MeanReport::window_note);
    m.def("mean_truncated", &mean_truncated, py::arg("n"), py::arg("params"), py::arg("table"));
    m.def("mean_sieve", &mean_sieve, py::arg("n"), py::arg("params"), py::arg("table"));
    m.def("truncation_level", &truncation_level, py::arg("n"), py::arg("theta_num"), py::arg("theta_den"));

    // local model
    py::class_<AffineSystem>(m, "AffineSystem")
        .def(py::init<std::vector<std::vector<int64_t>>, std::vector<int64_t>>(), py::arg("coefficients"),
             py::arg("constants"))
        .def_static("parse", &AffineSystem::parse, py::arg("forms"))
        .def_property_readonly("m", &AffineSystem::m)
        .def_property_readonly("t", &AffineSystem::t)
        .def("evaluate",
             [](const AffineSystem& sys, int i, const std::vector<int64_t>& x) { return sys.evaluate(i, x); })
        .def("linear_parts_pairwise_independent", &AffineSystem::linear_parts_pairwise_independent)
        .def("__str__", &AffineSystem::to_string);
    m.def("local_mangoldt", &local_mangoldt, py::arg("a"), py::arg("q"));
    m.def("alpha_p", &alpha_p, py::arg("system"), py::arg("p"), py::arg("budget") = 100'000'000);
    py::class_<LocalDensityReport>(m, "LocalDensityReport")
        .def_readonly("alpha_p_values", &LocalDensityReport::alpha_p_values)
        .def_readonly("p_max", &LocalDensityReport::p_max)
        .def_readonly("partial_product", &LocalDensityReport::partial_product)
        .def_readonly("tail_note", &LocalDensityReport::tail_note);
    m.def("singular_series", &singular_series, py::arg("system"), py::arg("p_max"),
          py::arg("budget") = 100'000'000);
    py::class_<DensityAtInfinity>(m, "DensityAtInfinity")
        .def_readonly("value", &DensityAtInfinity::value)
        .def_readonly("std_error", &DensityAtInfinity::std_error)
        .def_readonly("exact", &DensityAtInfinity::exact);
    m.def("alpha_infinity", &alpha_infinity, py::arg("system"), py::arg("n"), py::arg("sample_budget"),
          py::arg("seed"));
    m.def("tau_weight", &tau_weight, py::arg("a"), py::arg("w"));

    // W-trick
    py::class_<WContext>(m, "WContext")
        .def_readonly("w", &WContext::w)
        .def_readonly("W", &WContext::big_w)
        .def_readonly("phi_W", &WContext::phi_w)
        .def_readonly("residues", &WContext::residues)
        .def("renorm", &WContext::renorm)
        .def("coprime", &WContext::coprime, py::arg("b"));
    m.def("make_w_context", &make_w_context, py::arg("w"));
    m.def("renormalized_mangoldt", &renormalized_mangoldt, py::arg("n"), py::arg("b"), py::arg("ctx"),
          py::arg("table"));
    m.def("renormalized_sieve", &renormalized_sieve, py::arg("n"), py::arg("b"), py::arg("ctx"), py::arg("params"),
          py::arg("table"));
    py::class_<UniformityScan::Row>(m, "UniformityRow")
        .def_readonly("b", &UniformityScan::Row::b)
        .def_readonly("q", &UniformityScan::Row::q)
        .def_readonly("a", &UniformityScan::Row::a)
        .def_readonly("mean", &UniformityScan::Row::mean);
    py::class_<UniformityScan>(m, "UniformityScan")
        .def_readonly("rows", &UniformityScan::rows)
        .def_readonly("max_deviation", &UniformityScan::max_deviation);
    m.def("residue_uniformity_scan", &residue_uniformity_scan, py::arg("ctx"), py::arg("n"), py::arg("q_max"),
          py::arg("table"));
    py::class_<LinearFormsReport>(m, "LinearFormsReport")
        .def_readonly("average", &LinearFormsReport::average)
        .def_readonly("deviation", &LinearFormsReport::deviation)
        .def_readonly("points_used", &LinearFormsReport::points_used)
        .def_readonly("points_total", &LinearFormsReport::points_total)
        .def_readonly("exact", &LinearFormsReport::exact);
    m.def("linear_forms_diagnostic", &linear_forms_diagnostic, py::arg("system"), py::arg("ctx"), py::arg("params"),
          py::arg("table"), py::arg("n"), py::arg("bs") = std::vector<uint64_t>{},
          py::arg("sample_budget") = 1'000'000, py::arg("seed") = 1);

    // cyclic analysis
    py::class_<ResidueFunction>(m, "ResidueFunction")
        .def(py::init(&make_residue_function), py::arg("modulus"), py::arg("values"))
        .def_static("zeros", &ResidueFunction::zeros, py::arg("n"))
        .def_static("constant", &ResidueFunction::constant, py::arg("n"), py::arg("c"))
        .def_readonly("modulus", &ResidueFunction::modulus)
        .def_readwrite("values", &ResidueFunction::values)
        .def("mean", &ResidueFunction::mean)
        .def("max_abs", &ResidueFunction::max_abs);
    py::class_<SpectrumView>(m, "SpectrumView")
        .def_readonly("modulus", &SpectrumView::modulus)
        .def_readonly("coefficients", &SpectrumView::coefficients);
    m.def("dft", &dft, py::arg("f"));
    m.def("idft", &idft, py::arg("spectrum"));
    m.def("inner_product", &inner_product, py::arg("f"), py::arg("g"));
    m.def("ap_average", [](const std::vector<ResidueFunction>& fs) { return ap_average(fs); }, py::arg("fs"));
    m.def("gowers_norm", &gowers_norm, py::arg("f"), py::arg("d"));
    m.def("gowers_norm_direct", &gowers_norm_direct, py::arg("f"), py::arg("d"));
    m.def("gowers_u2_fourier", &gowers_u2_fourier, py::arg("f"));
    m.def("dual_function", &dual_function, py::arg("f"), py::arg("d"));
    m.def("quadratic_obstruction_demo", &quadratic_obstruction_demo, py::arg("f"), py::arg("alpha_index"));
    py::class_<VonNeumannReport>(m, "VonNeumannReport")
        .def_readonly("ap_magnitude", &VonNeumannReport::ap_magnitude)
        .def_readonly("min_gowers", &VonNeumannReport::min_gowers)
        .def_readonly("slack", &VonNeumannReport::slack);
    m.def("von_neumann_check", [](const std::vector<ResidueFunction>& fs) { return von_neumann_check(fs); },
          py::arg("fs"));

    // obstruction engine
    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("modulus", &Spectrum::modulus)
        .def_readonly("epsilon", &Spectrum::epsilon)
        .def_readonly("frequencies", &Spectrum::frequencies);
    m.def("spectrum", &spectrum, py::arg("f"), py::arg("epsilon"));
    py::class_<BohrSet>(m, "BohrSet")
        .def_readonly("modulus", &BohrSet::modulus)
        .def_readonly("frequencies", &BohrSet::frequencies)
        .def_readonly("radius", &BohrSet::radius)
        .def_readonly("members", &BohrSet::members);
    m.def("bohr_set", &bohr_set, py::arg("n"), py::arg("frequencies"), py::arg("rho"));
    py::class_<SigmaAlgebra>(m, "SigmaAlgebra")
        .def_static("trivial", &SigmaAlgebra::trivial, py::arg("n"))
        .def_static("discrete", &SigmaAlgebra::discrete, py::arg("n"))
        .def_readonly("modulus", &SigmaAlgebra::modulus)
        .def_readonly("atom_of", &SigmaAlgebra::atom_of)
        .def_readonly("atom_count", &SigmaAlgebra::atom_count)
        .def("atom_sizes", &SigmaAlgebra::atom_sizes)
        .def("refines", &SigmaAlgebra::refines, py::arg("coarser"));
    m.def("conditional_expectation", &conditional_expectation, py::arg("f"), py::arg("algebra"));
    m.def("level_set_algebra", &level_set_algebra, py::arg("g"), py::arg("epsilon"), py::arg("shift_seed"));
    m.def("join", &join, py::arg("a"), py::arg("b"));
    py::class_<EnergyIncrementReport>(m, "EnergyIncrementReport")
        .def_readonly("fine_energy", &EnergyIncrementReport::fine_energy)
        .def_readonly("coarse_energy", &EnergyIncrementReport::coarse_energy)
        .def_readonly("correlation_sq", &EnergyIncrementReport::correlation_sq)
        .def_readonly("slack", &EnergyIncrementReport::slack);
    m.def("energy_increment_check", &energy_increment_check, py::arg("f"), py::arg("coarse"), py::arg("fine"),
          py::arg("g"));
    py::class_<Decomposition>(m, "Decomposition")
        .def_readonly("f_u", &Decomposition::f_u)
        .def_readonly("f_uperp", &Decomposition::f_uperp)
        .def_readonly("iterations", &Decomposition::iterations)
        .def_readonly("energy_trace", &Decomposition::energy_trace)
        .def_readonly("final_gowers", &Decomposition::final_gowers)
        .def_readonly("exceptional_mass", &Decomposition::exceptional_mass)
        .def_readonly("terminated", &Decomposition::terminated)
        .def("to_json", &Decomposition::to_json);
    m.def("fejer_split", &fejer_split, py::arg("f"), py::arg("bohr"));
    m.def("fejer_multiplier", &fejer_multiplier, py::arg("bohr"));
    py::class_<StructureOptions>(m, "StructureOptions")
        .def(py::init<>())
        .def_readwrite("max_iter", &StructureOptions::max_iter)
        .def_readwrite("shift_seed", &StructureOptions::shift_seed)
        .def_readwrite("atom_cap", &StructureOptions::atom_cap);
    m.def("structure_decompose", &structure_decompose, py::arg("f"), py::arg("k"), py::arg("epsilon"),
          py::arg("majorant"), py::arg("options") = StructureOptions{});

    // prime patterns
    py::enum_<Weighting>(m, "Weighting")
        .value("mangoldt", Weighting::mangoldt)
        .value("sieve", Weighting::sieve)
        .value("renormalized_mangoldt", Weighting::renormalized_mangoldt)
        .value("renormalized_sieve", Weighting::renormalized_sieve)
        .value("indicator", Weighting::indicator);
    py::class_<CorrelationResult>(m, "CorrelationResult")
        .def_readonly("system", &CorrelationResult::system)
        .def_readonly("n", &CorrelationResult::n)
        .def_readonly("lhs", &CorrelationResult::lhs)
        .def_readonly("prediction", &CorrelationResult::prediction)
        .def_readonly("relative_deviation", &CorrelationResult::relative_deviation)
        .def_readonly("std_error", &CorrelationResult::std_error)
        .def_readonly("exact", &CorrelationResult::exact)
        .def_readonly("conjectural", &CorrelationResult::conjectural)
        .def_readonly("note", &CorrelationResult::note);
    m.def(
        "correlation_experiment",
        [](const AffineSystem& system, int64_t n, Weighting weighting, const SieveTable& table, int64_t p_max,
           uint64_t seed) {
            CorrelationOptions opt;
            opt.p_max = p_max;
            opt.seed = seed;
            return correlation_experiment(system, n, weighting, table, opt);
        },
        py::arg("system"), py::arg("n"), py::arg("weighting"), py::arg("table"), py::arg("p_max") = 0,
        py::arg("seed") = 1);
    py::class_<CensusResult>(m, "CensusResult")
        .def_readonly("value", &CensusResult::value)
        .def_readonly("std_error", &CensusResult::std_error)
        .def_readonly("exact", &CensusResult::exact);
    m.def(
        "ap_census",
        [](int k, int64_t n, Weighting weighting, const SieveTable& table, uint64_t seed) {
            CensusOptions opt;
            opt.seed = seed;
            return ap_census(k, n, weighting, table, opt);
        },
        py::arg("k"), py::arg("n"), py::arg("weighting"), py::arg("table"), py::arg("seed") = 1);
    m.def("roth_count_oracle", &roth_count_oracle, py::arg("f"));
    m.def("lambda_b_grid", &lambda_b_grid, py::arg("n"), py::arg("b"), py::arg("ctx"), py::arg("table"));
    m.def("nu_b_grid", &nu_b_grid, py::arg("n"), py::arg("b"), py::arg("ctx"), py::arg("params"), py::arg("table"));
    py::class_<PipelineReport>(m, "PipelineReport")
        .def_readonly("n", &PipelineReport::n)
        .def_readonly("k", &PipelineReport::k)
        .def_readonly("iterations", &PipelineReport::iterations)
        .def_readonly("terminated", &PipelineReport::terminated)
        .def_readonly("final_gowers", &PipelineReport::final_gowers)
        .def_readonly("f_uperp_ap_average", &PipelineReport::f_uperp_ap_average)
        .def_readonly("cross_terms", &PipelineReport::cross_terms)
        .def_readonly("max_cross_term", &PipelineReport::max_cross_term)
        .def_readonly("assembled_lower_bound", &PipelineReport::assembled_lower_bound)
        .def("to_json", &PipelineReport::to_json);
    m.def(
        "decomposition_pipeline",
        [](int64_t n_prime, int k, double epsilon, double w, int64_t theta_num, int64_t theta_den, uint64_t seed) {
            return decomposition_pipeline(n_prime, k, epsilon, w, theta_num, theta_den, seed);
        },
        py::arg("n_prime"), py::arg("k"), py::arg("epsilon"), py::arg("w"), py::arg("theta_num"),
        py::arg("theta_den"), py::arg("seed") = 1);
}
