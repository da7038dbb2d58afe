#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fmfusion/types.hpp"

namespace fmfusion {

/// One dataset entry; paths are relative to the manifest location.
struct SnippetEntry {
    std::string snippet_id;
    SubjectId subject;
    Label label = Label::FMminus;
    std::optional<std::string> video_path;
    std::optional<std::string> mat_path;
    std::optional<std::string> imu_path;
};

/// Parsed dataset manifest. Format (UTF-8, line oriented, '#' comments):
///
///   dataset: <name>
///   subject: <id>            (one line per subject)
///   snippet: <id> subject=<id> label=<FM+|FM-> [video=<rel>] [mat=<rel>] [imu=<rel>]
///
/// Every referenced subject must appear in a `subject:` line and snippet ids
/// must be unique.
struct DatasetManifest {
    std::string dataset_name;
    std::vector<SubjectId> subjects;
    std::vector<SnippetEntry> snippets;
    std::filesystem::path root;  // directory containing the manifest file

    const SnippetEntry* find(const std::string& snippet_id) const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);

/// Reads the per-modality files referenced by the manifest entry and returns
/// a snippet that passes validate_snippet. Throws DataError on missing files
/// or malformed row/column counts.
Snippet load_snippet(const DatasetManifest& m, const std::string& snippet_id);

/// Plain numeric text, one frame per row, comma separated. Values are
/// written with 9 significant digits.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path);

}  // namespace fmfusion
