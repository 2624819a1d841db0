#include "dmsing/report.hpp"

#include "dmsing/version.hpp"

#include <Eigen/SVD>
#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dmsing {

namespace {

using ojson = nlohmann::ordered_json;

}  // namespace

std::string report_to_json(const ScanReport& report) {
    ojson j;
    j["model"] = report.model;
    ojson params = ojson::object();
    for (const auto& [key, value] : report.params) params[key] = value;
    j["params"] = std::move(params);
    j["t_max"] = report.t_max;
    j["grid_points"] = report.grid_points;
    j["rank_tol"] = report.rank_tol;
    j["seed"] = report.seed;
    ojson points = ojson::array();
    for (const auto& p : report.singular_points) {
        ojson pj;
        pj["t_c"] = p.t_c;
        pj["sigma_min"] = p.sigma_min;
        pj["rank_deficit"] = p.rank_deficit;
        pj["confirmed"] = p.confirmed;
        if (p.S.has_value()) {
            pj["S"] = *p.S;
        } else {
            pj["S"] = nullptr;
        }
        points.push_back(std::move(pj));
    }
    j["singular_points"] = std::move(points);
    if (report.N_M.has_value()) {
        j["N_M"] = *report.N_M;
    } else {
        j["N_M"] = nullptr;
    }
    j["version"] = report.version;
    return j.dump(2) + "\n";
}

ScanReport run_scan(const MapFamily& family, const RunScanOptions& options) {
    ScanReport report;
    report.model = family.name;
    report.params = family.params;
    report.t_max = options.scan.t_max;
    report.grid_points = options.scan.grid_points;
    report.rank_tol = options.scan.rank_tol;
    report.seed = options.seed;
    report.version = kVersion;

    const std::vector<SingularPoint> points = find_singular_points(family, options.scan);
    double total = 0.0;
    bool any_measure = false;
    for (const auto& p : points) {
        ReportPoint rp;
        rp.t_c = p.t_c;
        rp.sigma_min = p.sigma_min;
        rp.rank_deficit = p.rank_deficit;
        rp.confirmed = p.confirmed;
        if (options.with_measures && p.confirmed) {
            MeasureConfig mc = options.measure;
            mc.t_max = options.scan.t_max;
            const MeasureResult m = singularity_measure(family, p.t_c, mc);
            rp.S = m.S;
            total += m.S;
            any_measure = true;
        }
        report.singular_points.push_back(std::move(rp));
    }
    if (options.with_measures) report.N_M = any_measure ? total : 0.0;
    return report;
}

void write_scan_csv(const MapFamily& family, const ScanConfig& config,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_scan_csv: cannot write " + path);
    out << "t,sigma_min,det,rank\n";
    std::ostringstream line;
    line.precision(17);
    const double h = config.t_max / config.grid_points;
    for (int i = 0; i < config.grid_points; ++i) {
        const double t = (i + 1) * h;
        const AffineMap m = family.evaluate(t);
        Eigen::JacobiSVD<RealMatrix> svd(m.D);
        const RealVector& sv = svd.singularValues();
        const double sigma_min = sv(sv.size() - 1);
        const double det = m.D.determinant();
        const int rank = numeric_rank(m.D, config.rank_tol);
        line.str("");
        line << t << "," << sigma_min << "," << det << "," << rank << "\n";
        out << line.str();
    }
}

}  // namespace dmsing
