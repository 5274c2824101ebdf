#pragma once

#include <string_view>

#include "sitaware/ingest.hpp"
#include "sitaware/preprocess.hpp"

namespace fixtures {

// Ten-source casualty report table used across the suites.
inline constexpr std::string_view kCasualtyReportsCsv =
    "source,year,a34,a35,a34_2,a35_2\n"
    "Wall Street Journal,2024,480000,80000,600000,200000\n"
    "Ukrainian officials,2024,320000,31000,600000,200000\n"
    "UK Broadcasting,2023,350000,33000,500000,50000\n"
    "France officials,2024,380000,45000,500000,150000\n"
    "Mediazona,2024,450000,60000,600000,71000\n"
    "Media_z1,2023,420000,50000,420000,70000\n"
    "Media_z2,2024,360000,41000,390000,65000\n"
    "Media_z3,2023,350000,40000,370000,64000\n"
    "Media_z4,2024,340000,37000,480000,80000\n"
    "Media_z5,2024,460000,51000,510000,90000\n";

inline sitaware::ingest::ReportTable report_table() {
  return sitaware::ingest::parse_report_table(kCasualtyReportsCsv);
}

inline sitaware::prep::Dataset normalized_dataset() {
  const auto raw = sitaware::prep::dataset_from_report_table(report_table());
  return sitaware::prep::minmax_apply(sitaware::prep::minmax_fit(raw), raw);
}

// Normalized features plus the default synthetic target (seed 42).
inline sitaware::prep::Dataset modeling_dataset(std::uint64_t seed = 42) {
  const auto normalized = normalized_dataset();
  return sitaware::prep::synthesize_target(normalized, sitaware::prep::kDefaultTargetCoefficients,
                                           sitaware::prep::kDefaultNoiseSd, seed);
}

}  // namespace fixtures
