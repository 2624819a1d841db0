#pragma once

#include "dmsing/divisibility.hpp"
#include "dmsing/measures.hpp"
#include "dmsing/models.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dmsing {

// One detected singular time plus its measure, as emitted in reports.
struct ReportPoint {
    double t_c{0.0};
    double sigma_min{0.0};
    int rank_deficit{0};
    bool confirmed{false};
    std::optional<double> S;  // absent when measures were not requested
};

struct ScanReport {
    std::string model;
    std::map<std::string, double> params;
    double t_max{0.0};
    int grid_points{0};
    double rank_tol{0.0};
    std::uint64_t seed{0};
    std::vector<ReportPoint> singular_points;
    std::optional<double> N_M;
    std::string version;
};

// Serialize with a fixed key order so equal inputs give identical bytes.
std::string report_to_json(const ScanReport& report);

struct RunScanOptions {
    ScanConfig scan;
    MeasureConfig measure;
    std::uint64_t seed{42};
    bool with_measures{true};
};

ScanReport run_scan(const MapFamily& family, const RunScanOptions& options);

// Per-grid-node diagnostics: header "t,sigma_min,det,rank".
void write_scan_csv(const MapFamily& family, const ScanConfig& config,
                    const std::string& path);

}  // namespace dmsing
