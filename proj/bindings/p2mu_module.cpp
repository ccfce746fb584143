#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "p2mu/scenario.hpp"

#include <complex>

namespace py = pybind11;
using namespace p2mu;

namespace {

RadialWeight make_radial(const std::string& family, const std::string& c, const std::string& beta,
                         const std::string& alpha) {
    if (family == "power") return RadialWeight::power(Rat::parse(beta));
    if (family == "expdec") return RadialWeight::expdec(Rat::parse(c));
    if (family == "stretched-exp")
        return RadialWeight::stretched_exp(Rat::parse(c), Rat::parse(alpha));
    if (family == "double-exp") return RadialWeight::double_exp(Rat::parse(c));
    throw std::invalid_argument("unknown radial family: " + family);
}

py::dict radial_check(const std::string& family, const std::string& c, const std::string& beta,
                      const std::string& alpha) {
    RadialWeight g = make_radial(family, c, beta, alpha);
    auto ed = g.check_exp_dec();
    auto ll = g.check_loglog_int();
    py::dict out;
    out["family"] = g.describe();
    out["expdec_holds"] = ed.holds;
    out["expdec_d"] = ed.d.to_double();
    out["loglog_holds"] = ll.holds;
    out["loglog_integral"] = ll.integral.to_double();
    return out;
}

std::vector<double> alpha_moments_py(const std::string& family, long nmax, const std::string& c,
                                     const std::string& beta, const std::string& alpha) {
    RadialWeight g = make_radial(family, c, beta, alpha);
    std::vector<double> out;
    out.reserve(nmax + 1);
    for (long n = 0; n <= nmax; ++n) out.push_back(alpha_moment(g, n).value.to_double());
    return out;
}

py::dict envelope_py(const std::string& family, double x, const std::string& c,
                     const std::string& beta, const std::string& alpha) {
    RadialWeight g = make_radial(family, c, beta, alpha);
    EnvelopeValue e = envelope_k(g, Real(x));
    py::dict out;
    out["k"] = e.k.to_double();
    out["argmin_y"] = e.argmin_y.to_double();
    return out;
}

std::vector<std::pair<double, double>> fat_cantor_stage_py(const std::string& target_measure,
                                                           int stage) {
    auto set = FatCantorSet::geometric(Arc(Rat(0L), Rat(1L)), Rat::parse(target_measure));
    std::vector<std::pair<double, double>> out;
    for (const Arc& a : set->stage_arcs(stage))
        out.emplace_back(a.start.to_double(), a.end().to_double());
    return out;
}

std::complex<double> herglotz_py(double start, double length, std::complex<double> z) {
    Complex h = herglotz_arc(Arc(Rat::from_double(start), Rat::from_double(length)),
                             Complex(Real(z.real()), Real(z.imag())));
    return {h.re.to_double(), h.im.to_double()};
}

py::dict variation_py(const std::vector<std::pair<double, double>>& arcs, double r) {
    std::vector<Arc> as;
    for (const auto& [a, b] : arcs)
        as.emplace_back(Rat::from_double(a), Rat::from_double(b - a));
    VariationCheck v = variation_sum_check(as, Real(r));
    py::dict out;
    out["sum"] = v.sum.to_double();
    out["bound"] = v.bound.to_double();
    out["ok"] = v.ok;
    return out;
}

py::dict predict_py(const std::string& scenario_json) {
    Scenario sc = parse_scenario(scenario_json);
    set_working_precision(sc.precision_bits);
    StructurePrediction p = predict_structure(sc.mu);
    py::dict out;
    out["decomposition"] = p.decomposition;
    out["in_scope"] = p.in_scope;
    out["full_splitting"] = p.full_splitting;
    out["residual_empty"] = p.residual_empty;
    out["khrushchev_flag"] = p.khrushchev_flag;
    out["volberg_flag"] = p.volberg_flag;
    out["expdec_d"] = p.expdec_d.to_double();
    return out;
}

py::dict run_py(const std::string& scenario_path, const std::string& out_dir, long precision) {
    Scenario sc = load_scenario(scenario_path);
    RunOptions opt;
    opt.out_dir = out_dir;
    if (precision > 0) opt.precision_override = precision;
    RunReport r = run_scenario(sc, opt);
    py::dict out;
    out["exit_code"] = r.exit_code;
    out["files"] = r.files_written;
    return out;
}

}  // namespace

PYBIND11_MODULE(_p2mu, m) {
    m.doc() = "polynomial approximation laboratory in weighted L^2 on the unit disk";

    m.def(
        "set_precision", [](long bits) { set_working_precision(bits); }, py::arg("bits"),
        "set the working precision in bits (>= 64)");
    m.def("radial_check", &radial_check, py::arg("family"), py::arg("c") = "1",
          py::arg("beta") = "1", py::arg("alpha") = "1/2",
          "exponential-decay and log-log integrability verdicts for a radial weight");
    m.def("alpha_moments", &alpha_moments_py, py::arg("family"), py::arg("nmax"),
          py::arg("c") = "1", py::arg("beta") = "1", py::arg("alpha") = "1/2",
          "moments alpha_n = 2 int r^{2n+1} G(1-r) dr for n = 0..nmax");
    m.def("envelope", &envelope_py, py::arg("family"), py::arg("x"), py::arg("c") = "1",
          py::arg("beta") = "1", py::arg("alpha") = "1/2",
          "Legendre-type envelope k(x) = inf_y m(y) + yx and its argmin");
    m.def("fat_cantor_stage", &fat_cantor_stage_py, py::arg("target_measure"), py::arg("stage"),
          "stage arcs of the geometric fat-Cantor construction on the full circle");
    m.def("herglotz_arc", &herglotz_py, py::arg("start"), py::arg("length"), py::arg("z"),
          "closed-form Herglotz transform of an arc at a point of the open disk");
    m.def("variation_check", &variation_py, py::arg("arcs"), py::arg("r"),
          "sum of Poisson-kernel variations over disjoint arcs vs the 4/(1-r) bound");
    m.def("predict", &predict_py, py::arg("scenario_json"),
          "structure prediction for a scenario (JSON text)");
    m.def("run_scenario", &run_py, py::arg("scenario_path"), py::arg("out_dir"),
          py::arg("precision") = 0, "full pipeline run; returns exit code and written files");
}
