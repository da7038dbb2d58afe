#pragma once

#include <filesystem>
#include <string>

#include "fmfusion/eval/crossval.hpp"

namespace fmfusion::eval {

/// Human-readable tables: per-arm Sens/Spec/BA with 95% CIs, then the
/// pairwise Wilcoxon p-value matrix.
std::string render_report(const EvalReport& report);

/// Writes report.txt (rendered tables), perfold.csv (machine-readable
/// per-fold counts and rates) and, with two or more arms, pairwise.csv.
void write_report_files(const EvalReport& report, const std::filesystem::path& dir);

/// Reads per-fold rows back from perfold.csv (one or more files may be
/// merged by calling this repeatedly and concatenating the results).
std::vector<ArmResult> read_perfold_csv(const std::filesystem::path& path);

}  // namespace fmfusion::eval
