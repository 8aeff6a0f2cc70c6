#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "torsionlab/heat_kernel.hpp"
#include "torsionlab/metrized_complex.hpp"
#include "torsionlab/quadrature.hpp"
#include "torsionlab/special_zeta.hpp"
#include "torsionlab/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIdentityFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

nlohmann::json parse_params(const std::vector<std::string>& raw) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& kv : raw) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw CLI::ValidationError("--param expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        try {
            std::size_t used = 0;
            const double d = std::stod(value, &used);
            if (used == value.size()) {
                if (d == static_cast<long long>(d) &&
                    (key == "rank" || key == "seed" || key == "count" || key == "points"))
                    out[key] = static_cast<long long>(d);
                else
                    out[key] = d;
                continue;
            }
        } catch (const std::exception&) {
        }
        out[key] = value;
    }
    return out;
}

int run_verify(const std::string& identity, const std::vector<std::string>& raw_params,
               double tolerance, const std::string& mode) {
    torsionlab::verify::ScenarioConfig config;
    config.identity_id = identity;
    config.parameters = parse_params(raw_params);
    config.tolerance = tolerance;
    config.mode = mode;
    const auto calibration = torsionlab::engine::calibrate();
    const auto report = torsionlab::verify::run_identity(config, calibration);
    std::cout << torsionlab::verify::report_to_json(report, true).dump(2) << "\n";
    return report.pass ? kExitOk : kExitIdentityFailure;
}

int run_report(const std::string& config_path, const std::string& out_path) {
    auto scenarios = torsionlab::verify::load_config(config_path);
    const auto result = torsionlab::verify::run_scenarios(std::move(scenarios));
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return kExitUsage;
    }
    out << result.to_json(true).dump(2) << "\n";
    std::cout << (result.exit_code == 0 ? "all identities pass" : "identity failures present")
              << "; report written to " << out_path << "\n";
    return result.exit_code;
}

int run_torsion_of_complex(const std::string& file) {
    std::ifstream in(file);
    if (!in) {
        std::cerr << "cannot read " << file << "\n";
        return kExitUsage;
    }
    const auto c = torsionlab::complexes::read_complex(in);
    const auto diag = torsionlab::complexes::validate(c);
    std::cout << diag.summary() << "\n";
    const auto torsion = torsionlab::complexes::torsion_acyclic(c);
    std::cout << "torsion " << std::setprecision(17) << torsion.value << "\n";
    return kExitOk;
}

int run_zeta(const std::string& bc) {
    using namespace torsionlab;
    const heat::ScalarBCPair pair = heat::bc_pair_from_string(bc);
    if (pair != heat::kDD && pair != heat::kDN) {
        std::cerr << "zeta: --bc must be dd or dn\n";
        return kExitUsage;
    }
    const auto traced = heat::zeta_from_trace(heat::IntervalSpec{1.0}, pair);
    const auto closed =
        pair == heat::kDD ? zeta::zeta_dd_closed_at_0() : zeta::zeta_dn_closed_at_0();
    nlohmann::ordered_json j;
    j["bc"] = bc;
    j["trace_route"] = {{"value_at_0", traced.value_at_0},
                        {"deriv_at_0", traced.deriv_at_0},
                        {"error_bound", traced.error_bound}};
    j["closed_form"] = {{"value_at_0", closed.value_at_0},
                        {"deriv_at_0", closed.deriv_at_0},
                        {"note", "two-component trace count"}};
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytic torsion verification workbench"};
    app.require_subcommand(1);

    std::string identity, mode = "DirectSpectral";
    std::vector<std::string> raw_params;
    double tolerance = 0.0;
    auto* verify_cmd = app.add_subcommand("verify", "evaluate one registered identity");
    verify_cmd->add_option("identity", identity, "identity id (see 'list')")->required();
    verify_cmd->add_option("--param", raw_params, "parameter override key=value");
    verify_cmd->add_option("--tol", tolerance, "tolerance override");
    verify_cmd->add_option("--mode", mode, "DirectSpectral | PaperClosedForm | both");

    std::string config_path, out_path = "report.json";
    auto* report_cmd = app.add_subcommand("report", "run a scenario file and write a report");
    report_cmd->add_option("--config", config_path, "scenario config (JSON)")->required();
    report_cmd->add_option("--out", out_path, "output report path");

    std::string complex_file;
    auto* complex_cmd =
        app.add_subcommand("torsion-of-complex", "torsion of a metrized complex file");
    complex_cmd->add_option("--file", complex_file, "plain-text complex file")->required();

    std::string bc;
    auto* zeta_cmd = app.add_subcommand("zeta", "boundary zeta values at 0");
    zeta_cmd->add_option("--bc", bc, "dd | dn")->required();

    auto* list_cmd = app.add_subcommand("list", "list registered identity ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (verify_cmd->parsed()) return run_verify(identity, raw_params, tolerance, mode);
        if (report_cmd->parsed()) return run_report(config_path, out_path);
        if (complex_cmd->parsed()) return run_torsion_of_complex(complex_file);
        if (zeta_cmd->parsed()) return run_zeta(bc);
        if (list_cmd->parsed()) {
            for (const auto& id : torsionlab::verify::registered_identities())
                std::cout << id << "\n";
            return kExitOk;
        }
    } catch (const torsionlab::quad::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const torsionlab::engine::CalibrationFailure& e) {
        std::cerr << "calibration failure:\n" << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
