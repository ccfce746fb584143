#include "p2mu/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

using namespace p2mu;

namespace {

int run_cmd(const std::string& file, const RunOptions& opt) {
    Scenario sc = load_scenario(file);
    RunReport r = run_scenario(sc, opt);
    std::cout << "wrote " << r.files_written.size() << " files to " << opt.out_dir << "\n";
    return r.exit_code;
}

int sweep_cmd(const std::string& file, const RunOptions& opt) {
    std::ifstream is(file);
    if (!is) throw ParseError("cannot open scenario file: " + file);
    std::stringstream ss;
    ss << is.rdbuf();
    nlohmann::json j = nlohmann::json::parse(ss.str());
    if (!j.contains("sweep")) throw ParseError("sweep: scenario has no \"sweep\" section");
    std::string param = j["sweep"].at("param").get<std::string>();
    std::vector<std::string> values;
    for (const auto& v : j["sweep"].at("values")) {
        if (v.is_string())
            values.push_back(v.get<std::string>());
        else
            values.push_back(v.dump());
    }
    j.erase("sweep");
    SweepReport r = run_sweep(j.dump(), param, values, opt);
    std::cout << "sweep over " << param << ": " << r.points.size() << " points, combined.csv in "
              << opt.out_dir << "\n";
    return r.exit_code;
}

int moments_cmd(const std::string& family, const std::string& c, const std::string& beta,
                const std::string& alpha, long nmax, const RunOptions& opt) {
    RadialWeight G = [&]() {
        if (family == "power") return RadialWeight::power(Rat::parse(beta));
        if (family == "expdec") return RadialWeight::expdec(Rat::parse(c));
        if (family == "stretched-exp")
            return RadialWeight::stretched_exp(Rat::parse(c), Rat::parse(alpha));
        if (family == "double-exp") return RadialWeight::double_exp(Rat::parse(c));
        throw ParseError("unknown family: " + family);
    }();
    std::filesystem::create_directories(opt.out_dir);
    {
        std::ofstream os(std::filesystem::path(opt.out_dir) / "moments.csv", std::ios::binary);
        os << "n,alpha,alpha_err\n";
        for (long n = 0; n <= nmax; ++n) {
            ValueWithError a = alpha_moment(G, n);
            os << n << "," << a.value.str() << "," << a.error.str() << "\n";
        }
    }
    {
        std::ofstream os(std::filesystem::path(opt.out_dir) / "envelope.csv", std::ios::binary);
        os << "x,k,argmin_y\n";
        for (long e = 0; e <= 20; ++e) {
            Real x = Real::pow2(e);
            EnvelopeValue env = envelope_k(G, x);
            os << x.str() << "," << env.k.str() << "," << env.argmin_y.str() << "\n";
        }
    }
    std::cout << "moments.csv and envelope.csv written to " << opt.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p2mu: polynomial approximation laboratory in weighted L^2 on the disk"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    long precision = 128;
    std::uint64_t seed = 0;
    bool seed_set = false;
    RunOptions opt;
    app.add_option("--precision", precision, "working precision in bits (>= 64)");
    app.add_option("--seed", seed, "seed for randomized audits")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--format", opt.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    std::string scenario_file;
    auto* run = app.add_subcommand("run", "run a scenario end to end");
    run->add_option("scenario", scenario_file, "scenario JSON file")->required();

    auto* sweep = app.add_subcommand("sweep", "parameter sweep over a base scenario");
    sweep->add_option("scenario", scenario_file, "scenario JSON with a sweep section")->required();

    std::string family = "expdec", cpar = "1", beta = "1", alphap = "1/2";
    long nmax = 64;
    auto* moments = app.add_subcommand("moments", "emit moment and envelope tables");
    moments->add_option("--family", family, "power|expdec|stretched-exp|double-exp");
    moments->add_option("--c", cpar, "decay parameter c");
    moments->add_option("--beta", beta, "power family exponent");
    moments->add_option("--alpha", alphap, "stretched-exp exponent");
    moments->add_option("--nmax", nmax, "largest moment index");

    std::vector<std::string> witness_Ns;
    auto* witness = app.add_subcommand("witness", "build and verify witness families");
    witness->add_option("scenario", scenario_file, "scenario JSON file")->required();
    witness->add_option("--N", witness_Ns, "witness parameters (override scenario)");

    auto* annihilate = app.add_subcommand("annihilate", "construct the annihilator tuple");
    annihilate->add_option("scenario", scenario_file, "scenario JSON file")->required();

    auto* predict = app.add_subcommand("predict", "print the structure prediction");
    predict->add_option("scenario", scenario_file, "scenario JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (precision < 64) throw ParseError("--precision must be >= 64");
        set_working_precision(precision);
        opt.precision_override = precision;
        if (seed_set) opt.seed_override = seed;

        if (run->parsed()) return run_cmd(scenario_file, opt);
        if (sweep->parsed()) return sweep_cmd(scenario_file, opt);
        if (moments->parsed()) return moments_cmd(family, cpar, beta, alphap, nmax, opt);
        if (witness->parsed()) {
            Scenario sc = load_scenario(scenario_file);
            sc.profile_N.clear();
            sc.targets.clear();
            sc.annihilator.reset();
            sc.variation.reset();
            if (!witness_Ns.empty()) {
                sc.witness_N.clear();
                for (const std::string& s : witness_Ns) sc.witness_N.push_back(Rat::parse(s));
            }
            return run_scenario(sc, opt).exit_code;
        }
        if (annihilate->parsed()) {
            Scenario sc = load_scenario(scenario_file);
            if (!sc.annihilator) throw ParseError("scenario has no annihilator section");
            sc.profile_N.clear();
            sc.witness_N.clear();
            sc.variation.reset();
            return run_scenario(sc, opt).exit_code;
        }
        if (predict->parsed()) {
            Scenario sc = load_scenario(scenario_file);
            set_working_precision(opt.precision_override.value_or(sc.precision_bits));
            StructurePrediction pred = predict_structure(sc.mu);
            std::cout << pred.decomposition << "\n";
            std::cout << "expdec: " << (pred.expdec_holds ? "holds" : "fails")
                      << " (d = " << pred.expdec_d.str(8) << "), loglog: "
                      << (pred.loglog_holds ? "holds" : "fails") << " (integral = "
                      << pred.loglog_integral.str(8) << ")\n";
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const PrecisionError& e) {
        std::cerr << "precision exhausted: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
