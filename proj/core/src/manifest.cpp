#include "fmfusion/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fmfusion/errors.hpp"

namespace fmfusion {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Label parse_label(const std::string& s, const std::filesystem::path& path, int line_no) {
    if (s == "FM+") return Label::FMplus;
    if (s == "FM-") return Label::FMminus;
    std::ostringstream os;
    os << path.string() << ":" << line_no << ": unknown label '" << s << "' (want FM+ or FM-)";
    throw DataError(os.str());
}

}  // namespace

const SnippetEntry* DatasetManifest::find(const std::string& snippet_id) const {
    for (const auto& e : snippets) {
        if (e.snippet_id == snippet_id) return &e;
    }
    return nullptr;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest: " + path.string());

    DatasetManifest m;
    m.root = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto colon = t.find(':');
        if (colon == std::string::npos) {
            std::ostringstream os;
            os << path.string() << ":" << line_no << ": expected 'key: value', got '" << t << "'";
            throw DataError(os.str());
        }
        const std::string key = trim(t.substr(0, colon));
        const std::string rest = trim(t.substr(colon + 1));
        if (key == "dataset") {
            m.dataset_name = rest;
        } else if (key == "subject") {
            if (rest.empty()) throw DataError(path.string() + ": empty subject id");
            m.subjects.emplace_back(rest);
        } else if (key == "snippet") {
            std::istringstream fields(rest);
            SnippetEntry e;
            if (!(fields >> e.snippet_id)) {
                throw DataError(path.string() + ": snippet line without id");
            }
            std::string kv;
            while (fields >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    std::ostringstream os;
                    os << path.string() << ":" << line_no << ": expected key=value, got '" << kv
                       << "'";
                    throw DataError(os.str());
                }
                const std::string k = kv.substr(0, eq);
                const std::string v = kv.substr(eq + 1);
                if (k == "subject") {
                    e.subject = SubjectId(v);
                } else if (k == "label") {
                    e.label = parse_label(v, path, line_no);
                } else if (k == "video") {
                    e.video_path = v;
                } else if (k == "mat") {
                    e.mat_path = v;
                } else if (k == "imu") {
                    e.imu_path = v;
                } else {
                    std::ostringstream os;
                    os << path.string() << ":" << line_no << ": unknown field '" << k << "'";
                    throw DataError(os.str());
                }
            }
            if (e.subject.value.empty()) {
                std::ostringstream os;
                os << path.string() << ":" << line_no << ": snippet '" << e.snippet_id
                   << "' has no subject";
                throw DataError(os.str());
            }
            m.snippets.push_back(std::move(e));
        } else {
            std::ostringstream os;
            os << path.string() << ":" << line_no << ": unknown key '" << key << "'";
            throw DataError(os.str());
        }
    }

    // Invariants: unique subjects and snippet ids, no dangling subject refs.
    std::set<std::string> subject_set;
    for (const auto& s : m.subjects) {
        if (!subject_set.insert(s.value).second) {
            throw DataError(path.string() + ": duplicate subject '" + s.value + "'");
        }
    }
    std::set<std::string> id_set;
    for (const auto& e : m.snippets) {
        if (!id_set.insert(e.snippet_id).second) {
            throw DataError(path.string() + ": duplicate snippet id '" + e.snippet_id + "'");
        }
        if (!subject_set.count(e.subject.value)) {
            throw DataError(path.string() + ": dangling subject '" + e.subject.value +
                            "' in snippet '" + e.snippet_id + "'");
        }
    }
    return m;
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest: " + path.string());
    out << "# fmfusion dataset manifest\n";
    out << "dataset: " << m.dataset_name << "\n";
    for (const auto& s : m.subjects) out << "subject: " << s.value << "\n";
    for (const auto& e : m.snippets) {
        out << "snippet: " << e.snippet_id << " subject=" << e.subject.value
            << " label=" << label_name(e.label);
        if (e.video_path) out << " video=" << *e.video_path;
        if (e.mat_path) out << " mat=" << *e.mat_path;
        if (e.imu_path) out << " imu=" << *e.imu_path;
        out << "\n";
    }
    if (!out) throw DataError("write failed: " + path.string());
}

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    Eigen::Index cols = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<double> row;
        const char* p = t.c_str();
        char* end = nullptr;
        while (*p) {
            const double v = std::strtod(p, &end);
            if (end == p) {
                std::ostringstream os;
                os << path.string() << ":" << line_no << ": malformed number near '" << p << "'";
                throw DataError(os.str());
            }
            row.push_back(v);
            p = end;
            while (*p == ' ' || *p == '\t') ++p;
            if (*p == ',') ++p;
        }
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            std::ostringstream os;
            os << path.string() << ":" << line_no << ": expected " << cols << " columns, got "
               << row.size();
            throw DataError(os.str());
        }
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), std::max<Eigen::Index>(cols, 0));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

void write_csv_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write data file: " + path.string());
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.9g", m(i, j));
            out << buf;
            if (j + 1 < m.cols()) out << ',';
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

namespace {

Eigen::MatrixXd load_modality(const std::filesystem::path& root, const std::string& rel,
                              int rows, int cols, const char* what) {
    const Eigen::MatrixXd m = read_csv_matrix(root / rel);
    if (m.rows() != rows) {
        std::ostringstream os;
        os << what << " frame count: " << rel << " has " << m.rows() << " rows, expected " << rows;
        throw DataError(os.str());
    }
    if (m.cols() != cols) {
        std::ostringstream os;
        os << what << " column count: " << rel << " has " << m.cols() << " columns, expected "
           << cols;
        throw DataError(os.str());
    }
    return m;
}

}  // namespace

Snippet load_snippet(const DatasetManifest& m, const std::string& snippet_id) {
    const SnippetEntry* e = m.find(snippet_id);
    if (!e) throw DataError("snippet '" + snippet_id + "' not in manifest");

    Snippet s;
    s.snippet_id = e->snippet_id;
    s.subject = e->subject;
    s.label = e->label;
    if (e->video_path) {
        s.video = RawVideoKeypoints{
            load_modality(m.root, *e->video_path, kVideoFrames, 2 * kKeypoints, "video")};
    }
    if (e->mat_path) {
        s.mat = RawMatFrames{
            load_modality(m.root, *e->mat_path, kMatFrames, kMatGrid * kMatGrid, "mat")};
    }
    if (e->imu_path) {
        s.imu = RawImuFrames{
            load_modality(m.root, *e->imu_path, kImuFrames, kImuChannels, "imu")};
    }
    const ValidationResult v = validate_snippet(s);
    if (!v.ok()) {
        std::ostringstream os;
        os << "snippet '" << snippet_id << "' invalid:";
        for (const auto& msg : v.violations) os << " [" << msg << "]";
        throw DataError(os.str());
    }
    return s;
}

}  // namespace fmfusion
