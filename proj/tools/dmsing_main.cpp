// dmsing — singular points, intermediate maps, and non-Markovianity of
// qubit dynamical maps in affine Bloch form.

#include "dmsing/bloch.hpp"
#include "dmsing/divisibility.hpp"
#include "dmsing/errors.hpp"
#include "dmsing/measures.hpp"
#include "dmsing/models.hpp"
#include "dmsing/report.hpp"
#include "dmsing/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace {

using dmsing::AffineMap;
using dmsing::MapFamily;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct ModelArgs {
    std::string model;
    std::vector<std::string> params;
};

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& raw) {
    std::map<std::string, double> out;
    for (const std::string& kv : raw) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw CLI::ValidationError("--param", "expected KEY=VALUE, got '" + kv + "'");
        }
        const std::string key = kv.substr(0, eq);
        try {
            std::size_t used = 0;
            const double value = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
            out[key] = value;
        } catch (const std::exception&) {
            throw CLI::ValidationError("--param", "value of '" + key + "' is not a number");
        }
    }
    return out;
}

MapFamily build_family(const ModelArgs& args) {
    const std::map<std::string, double> params = parse_params(args.params);
    if (args.model == "dephasing") {
        dmsing::DephasingParams p;
        p.A = get_param(params, "A", 1.0);
        p.N = static_cast<int>(std::llround(get_param(params, "N", 1.0)));
        return dmsing::dephasing_family(p);
    }
    if (args.model == "jc") {
        dmsing::JCParams p;
        p.gamma0 = get_param(params, "gamma0", 1.0);
        p.lambda = get_param(params, "lambda", 1.0);
        return dmsing::jc_family(p);
    }
    if (args.model.rfind("file:", 0) == 0) {
        return dmsing::load_tabulated_family(args.model.substr(5));
    }
    if (args.model.rfind("kraus:", 0) == 0) {
        return dmsing::family_from_kraus(args.model.substr(6));
    }
    throw CLI::ValidationError("--model",
                               "unknown model '" + args.model +
                                   "' (expected dephasing, jc, file:PATH, or kraus:PATH)");
}

void add_model_options(CLI::App* cmd, ModelArgs& args) {
    cmd->add_option("--model", args.model,
                    "Model: dephasing | jc | file:PATH | kraus:PATH")
        ->required();
    cmd->add_option("--param", args.params, "Model parameter KEY=VALUE (repeatable)");
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

ojson affine_to_json(const AffineMap& m) {
    ojson D = ojson::array();
    for (int r = 0; r < m.D.rows(); ++r) {
        for (int c = 0; c < m.D.cols(); ++c) D.push_back(m.D(r, c));
    }
    ojson f = ojson::array();
    for (int r = 0; r < m.f.size(); ++r) f.push_back(m.f(r));
    return ojson{{"D", std::move(D)}, {"f", std::move(f)}};
}

ojson vector_to_json(const dmsing::RealVector& v) {
    ojson out = ojson::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Singular points and non-Markovianity of dynamical maps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dmsing::kVersion));

    // ---- scan ----
    auto* scan_cmd = app.add_subcommand("scan", "Locate singular times of a map family");
    ModelArgs scan_model;
    add_model_options(scan_cmd, scan_model);
    dmsing::ScanConfig scan_cfg;
    std::string scan_out;
    std::string scan_format = "json";
    std::uint64_t scan_seed = 42;
    bool scan_no_measures = false;
    scan_cmd->add_option("--t-max", scan_cfg.t_max, "Scan horizon")->required();
    scan_cmd->add_option("--grid-points", scan_cfg.grid_points, "Grid nodes (default 2000)");
    scan_cmd->add_option("--rank-tol", scan_cfg.rank_tol, "Relative rank tolerance");
    scan_cmd->add_option("--seed", scan_seed, "Seed recorded in the report");
    scan_cmd->add_option("--out", scan_out, "Output path (default stdout)");
    scan_cmd->add_option("--format", scan_format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    scan_cmd->add_flag("--no-measures", scan_no_measures,
                       "Skip singularity measures in the JSON report");

    // ---- measure ----
    auto* measure_cmd =
        app.add_subcommand("measure", "Singularity measure S at a given t_c");
    ModelArgs measure_model;
    add_model_options(measure_cmd, measure_model);
    double measure_tc = 0.0;
    dmsing::MeasureConfig measure_cfg;
    measure_cfg.t_max = std::numeric_limits<double>::quiet_NaN();
    std::string measure_out;
    measure_cmd->add_option("--tc", measure_tc, "Singular time")->required();
    measure_cmd->add_option("--t-max", measure_cfg.t_max,
                            "Outer horizon (default: two closed-form periods past tc)");
    measure_cmd->add_option("--outer-grid", measure_cfg.outer_grid,
                            "Outer grid nodes (default 400)");
    measure_cmd->add_option("--out", measure_out, "Output path (default stdout)");

    // ---- decompose ----
    auto* decompose_cmd =
        app.add_subcommand("decompose", "Solve for the intermediate map between t1 and t2");
    ModelArgs decompose_model;
    add_model_options(decompose_cmd, decompose_model);
    double dec_t1 = 0.0;
    double dec_t2 = 0.0;
    bool dec_check_cp = false;
    std::string dec_out;
    decompose_cmd->add_option("--t1", dec_t1, "Earlier time")->required();
    decompose_cmd->add_option("--t2", dec_t2, "Later time")->required();
    decompose_cmd->add_flag("--check-cp", dec_check_cp,
                            "Also report Choi eigenvalues and CP verdict (qubit only)");
    decompose_cmd->add_option("--out", dec_out, "Output path (default stdout)");

    // ---- nonmarkov ----
    auto* nm_cmd = app.add_subcommand("nonmarkov", "Non-Markovianity N_M over a horizon");
    ModelArgs nm_model;
    add_model_options(nm_cmd, nm_model);
    double nm_horizon = 0.0;
    dmsing::ScanConfig nm_scan;
    dmsing::MeasureConfig nm_measure;
    std::string nm_out;
    nm_cmd->add_option("--horizon", nm_horizon, "Scan and measure horizon")->required();
    nm_cmd->add_option("--grid-points", nm_scan.grid_points, "Grid nodes (default 2000)");
    nm_cmd->add_option("--rank-tol", nm_scan.rank_tol, "Relative rank tolerance");
    nm_cmd->add_option("--outer-grid", nm_measure.outer_grid, "Outer grid nodes");
    nm_cmd->add_option("--out", nm_out, "Output path (default stdout)");

    // ---- classify ----
    auto* classify_cmd =
        app.add_subcommand("classify", "Divisibility class of the (t1, t2) interval");
    ModelArgs classify_model;
    add_model_options(classify_cmd, classify_model);
    double cls_t1 = 0.0;
    double cls_t2 = 0.0;
    std::uint64_t cls_seed = 42;
    std::string cls_out;
    classify_cmd->add_option("--t1", cls_t1, "Earlier time")->required();
    classify_cmd->add_option("--t2", cls_t2, "Later time")->required();
    classify_cmd->add_option("--seed", cls_seed, "Seed for the positivity sampler");
    classify_cmd->add_option("--out", cls_out, "Output path (default stdout)");

    // ---- reproduce ----
    auto* repro_cmd =
        app.add_subcommand("reproduce", "Re-derive the published worked examples");
    std::string repro_case;
    repro_cmd->add_option("--case", repro_case, "dephasing | jc")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints message / help text
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (scan_cmd->parsed()) {
        const MapFamily family = build_family(scan_model);
        if (scan_format == "csv") {
            const std::string tmp = scan_out.empty() ? "/dev/stdout" : scan_out;
            dmsing::write_scan_csv(family, scan_cfg, tmp);
            return kExitOk;
        }
        dmsing::RunScanOptions options;
        options.scan = scan_cfg;
        options.seed = scan_seed;
        options.with_measures = !scan_no_measures;
        const dmsing::ScanReport report = dmsing::run_scan(family, options);
        emit(dmsing::report_to_json(report), scan_out);
        return kExitOk;
    }

    if (measure_cmd->parsed()) {
        const MapFamily family = build_family(measure_model);
        if (std::isnan(measure_cfg.t_max)) {
            measure_cfg.t_max = dmsing::default_measure_horizon(family, measure_tc);
        }
        const dmsing::MeasureResult result =
            dmsing::singularity_measure(family, measure_tc, measure_cfg);
        ojson j;
        j["t_c"] = result.t_c;
        j["S"] = result.S;
        j["argmax_T"] = result.argmax_T;
        j["argmax_n0"] = vector_to_json(result.argmax_n0);
        j["outer_evaluations"] = result.outer_evaluations;
        j["inner_solver"] = result.inner_solver;
        j["restart_semantics"] = "environment-reset";
        j["version"] = dmsing::kVersion;
        emit(j.dump(2) + "\n", measure_out);
        return kExitOk;
    }

    if (decompose_cmd->parsed()) {
        const MapFamily family = build_family(decompose_model);
        if (!(dec_t1 >= 0.0) || !(dec_t2 > dec_t1)) {
            throw CLI::ValidationError("--t1/--t2", "need 0 <= t1 < t2");
        }
        const AffineMap map_c = family.evaluate(dec_t1);
        const AffineMap map_t = family.evaluate(dec_t2);
        const dmsing::DecompositionResult dec = dmsing::solve_decomposition(map_c, map_t);
        ojson j;
        j["t1"] = dec_t1;
        j["t2"] = dec_t2;
        j["status"] =
            dec.status == dmsing::DecompositionStatus::Exists ? "Exists" : "NotExists";
        j["rank_t1"] = dec.rank_c;
        j["rank_stacked"] = dec.rank_stacked;
        if (dec.status == dmsing::DecompositionStatus::Exists) {
            AffineMap intermediate;
            intermediate.d = family.d;
            intermediate.D = dec.V;
            intermediate.f = dec.r;
            j["intermediate"] = affine_to_json(intermediate);
            j["unique"] = dec.unique;
            j["residual"] = dec.residual;
            if (dec_check_cp) {
                if (family.d != 2) {
                    throw CLI::ValidationError("--check-cp", "qubit families only");
                }
                const dmsing::ChoiMatrix choi = dmsing::choi_from_affine(dec.V, dec.r);
                Eigen::SelfAdjointEigenSolver<dmsing::Matrix> eig(choi.entries);
                j["choi_eigenvalues"] = vector_to_json(eig.eigenvalues());
                j["completely_positive"] = dmsing::is_completely_positive(choi);
            }
        }
        j["version"] = dmsing::kVersion;
        emit(j.dump(2) + "\n", dec_out);
        return kExitOk;
    }

    if (nm_cmd->parsed()) {
        const MapFamily family = build_family(nm_model);
        nm_scan.t_max = nm_horizon;
        nm_measure.t_max = nm_horizon;
        const dmsing::NonMarkovianityResult result =
            dmsing::non_markovianity(family, nm_scan, nm_measure);
        ojson terms = ojson::array();
        for (const auto& term : result.terms) {
            terms.push_back(ojson{{"t_c", term.t_c},
                                  {"S", term.S},
                                  {"argmax_T", term.argmax_T},
                                  {"inner_solver", term.inner_solver}});
        }
        ojson j;
        j["horizon"] = nm_horizon;
        j["N_M"] = result.N_M;
        j["terms"] = std::move(terms);
        j["restart_semantics"] = "environment-reset";
        j["version"] = dmsing::kVersion;
        emit(j.dump(2) + "\n", nm_out);
        return kExitOk;
    }

    if (classify_cmd->parsed()) {
        const MapFamily family = build_family(classify_model);
        if (!(cls_t1 >= 0.0) || !(cls_t2 > cls_t1)) {
            throw CLI::ValidationError("--t1/--t2", "need 0 <= t1 < t2");
        }
        dmsing::ClassificationConfig cfg;
        cfg.seed = cls_seed;
        const dmsing::DivisibilityClass verdict =
            dmsing::classify_interval(family, cls_t1, cls_t2, cfg);
        ojson j;
        j["t1"] = cls_t1;
        j["t2"] = cls_t2;
        j["class"] = dmsing::to_string(verdict);
        j["seed"] = cls_seed;
        j["version"] = dmsing::kVersion;
        emit(j.dump(2) + "\n", cls_out);
        return kExitOk;
    }

    if (repro_cmd->parsed()) {
        constexpr double kPi = std::numbers::pi;
        struct Row {
            std::string label;
            double got;
            double want;
            double tol;
        };
        std::vector<Row> rows;
        if (repro_case == "dephasing") {
            const MapFamily family = dmsing::dephasing_family({1.0, 4});
            dmsing::ScanConfig scan;
            scan.t_max = 10.0;
            dmsing::MeasureConfig measure;
            measure.t_max = 10.0;
            const auto points = dmsing::find_singular_points(family, scan);
            rows.push_back({"count(t_c)", static_cast<double>(points.size()), 3.0, 0.5});
            for (std::size_t i = 0; i < points.size() && i < 3; ++i) {
                const double expect = (2.0 * i + 1.0) * kPi / 2.0;
                rows.push_back({"t_c[" + std::to_string(i) + "]", points[i].t_c, expect, 1e-6});
                const auto m = dmsing::singularity_measure(family, points[i].t_c, measure);
                rows.push_back({"S[" + std::to_string(i) + "]", m.S, 0.5, 1e-3});
            }
            const auto nm = dmsing::non_markovianity(family, scan, measure);
            rows.push_back({"N_M", nm.N_M, 1.5, 5e-3});
        } else if (repro_case == "jc") {
            for (double gamma0 : {5.0, 50.0}) {
                const std::string tag = "gamma0=" + std::to_string(static_cast<int>(gamma0));
                const dmsing::JCParams p{gamma0, 1.0};
                const MapFamily family = dmsing::jc_family(p);
                const double d0 = std::sqrt(2.0 * gamma0 - 1.0);
                dmsing::ScanConfig scan;
                scan.t_max = 3.0;
                const auto points = dmsing::find_singular_points(family, scan);
                int expected_count = 0;
                while (family.closed_form_singular_points(expected_count) <= scan.t_max) {
                    ++expected_count;
                }
                rows.push_back({tag + " count(t_c<3)", static_cast<double>(points.size()),
                                static_cast<double>(expected_count), 0.5});
                if (points.empty()) continue;
                const double tc0 = family.closed_form_singular_points(0);
                rows.push_back({tag + " t_c[0]", points[0].t_c, tc0, 1e-6});
                dmsing::MeasureConfig measure;
                measure.t_max = dmsing::default_measure_horizon(family, points[0].t_c);
                const auto m = dmsing::singularity_measure(family, points[0].t_c, measure);
                const double T0 = 2.0 * kPi / d0;
                const double d33 = std::pow(dmsing::jc_c(p, T0), 2);
                const double S_closed =
                    d33 < 0.5 ? 0.5 * std::sqrt(d33 / (1.0 - d33)) : d33;
                rows.push_back({tag + " argmax_T", m.argmax_T, T0, 1e-3});
                rows.push_back({tag + " S[0]", m.S, S_closed, 1e-3});
            }
        } else {
            throw CLI::ValidationError("--case", "expected dephasing or jc");
        }
        bool all_pass = true;
        std::printf("%-24s %14s %14s %10s  %s\n", "quantity", "computed", "reference",
                    "tol", "verdict");
        for (const Row& row : rows) {
            const bool pass = std::abs(row.got - row.want) <= row.tol;
            all_pass = all_pass && pass;
            std::printf("%-24s %14.7f %14.7f %10.1e  %s\n", row.label.c_str(), row.got,
                        row.want, row.tol, pass ? "pass" : "FAIL");
        }
        std::printf("%s\n", all_pass ? "ALL PASS" : "FAILURES PRESENT");
        return all_pass ? kExitOk : kExitNumerical;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::Error& e) {
        // Post-parse validation failures (bad model, bad params).
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dmsing::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dmsing::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
