#include "fmfusion/eval/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fmfusion/errors.hpp"

namespace fmfusion::eval {

namespace {

std::string pct_ci(const MeanCi& c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%6.2f  [%6.2f %6.2f]", 100.0 * c.mean, 100.0 * c.lo,
                  100.0 * c.hi);
    return buf;
}

}  // namespace

std::string render_report(const EvalReport& report) {
    std::ostringstream os;
    os << "Classification performance (mean over "
       << (report.arms.empty() ? 0 : report.arms.front().per_fold.size())
       << " folds, CI 95%)\n";
    std::size_t name_w = 5;
    for (const auto& a : report.arms) name_w = std::max(name_w, a.name.size());
    os << std::left << std::setw(static_cast<int>(name_w) + 2) << "Model"
       << std::setw(26) << "Sens. (%) [ CI ]" << std::setw(26) << "Spec. (%) [ CI ]"
       << "BA (%) [ CI ]\n";
    for (const auto& a : report.arms) {
        os << std::left << std::setw(static_cast<int>(name_w) + 2) << a.name
           << std::setw(26) << pct_ci(a.sens) << std::setw(26) << pct_ci(a.spec)
           << pct_ci(a.ba) << "\n";
    }
    if (report.arms.size() > 1) {
        os << "\nPairwise Wilcoxon signed-rank p-values (balanced accuracy, two-sided)\n";
        os << std::left << std::setw(static_cast<int>(name_w) + 2) << "";
        for (const auto& a : report.arms) os << std::setw(static_cast<int>(name_w) + 2) << a.name;
        os << "\n";
        for (std::size_t i = 0; i < report.arms.size(); ++i) {
            os << std::left << std::setw(static_cast<int>(name_w) + 2) << report.arms[i].name;
            for (std::size_t j = 0; j < report.arms.size(); ++j) {
                if (i == j) {
                    os << std::setw(static_cast<int>(name_w) + 2) << "-";
                } else {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.4f", report.pairwise_p[i][j]);
                    os << std::setw(static_cast<int>(name_w) + 2) << buf;
                }
            }
            os << "\n";
        }
    }
    if (!report.warnings.empty()) {
        os << "\nWarnings:\n";
        for (const auto& w : report.warnings) os << "  " << w << "\n";
    }
    return os.str();
}

void write_report_files(const EvalReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create report directory: " + dir.string());

    {
        std::ofstream out(dir / "report.txt");
        if (!out) throw DataError("cannot write report.txt under " + dir.string());
        out << render_report(report);
    }
    {
        std::ofstream out(dir / "perfold.csv");
        if (!out) throw DataError("cannot write perfold.csv under " + dir.string());
        out << "arm,fold,tp,fn,tn,fp,tpr,tnr,ba\n";
        char buf[128];
        for (const auto& a : report.arms) {
            for (std::size_t f = 0; f < a.per_fold.size(); ++f) {
                const MetricSet& m = a.per_fold[f];
                std::snprintf(buf, sizeof buf, "%s,%zu,%ld,%ld,%ld,%ld,%.9g,%.9g,%.9g\n",
                              a.name.c_str(), f, m.tp, m.fn, m.tn, m.fp, m.tpr, m.tnr, m.ba);
                out << buf;
            }
        }
    }
    if (report.arms.size() > 1) {
        std::ofstream out(dir / "pairwise.csv");
        if (!out) throw DataError("cannot write pairwise.csv under " + dir.string());
        out << "a,b,p\n";
        char buf[160];
        for (std::size_t i = 0; i < report.arms.size(); ++i) {
            for (std::size_t j = i + 1; j < report.arms.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%s,%s,%.9g\n", report.arms[i].name.c_str(),
                              report.arms[j].name.c_str(), report.pairwise_p[i][j]);
                out << buf;
            }
        }
    }
}

std::vector<ArmResult> read_perfold_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("arm,fold,", 0) != 0) {
        throw DataError(path.string() + ": not a perfold.csv file");
    }
    std::vector<ArmResult> arms;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(is, field, ',')) fields.push_back(field);
        if (fields.size() != 9) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 9 fields");
        }
        const std::string& arm_name = fields[0];
        ArmResult* arm = nullptr;
        for (auto& a : arms) {
            if (a.name == arm_name) arm = &a;
        }
        if (!arm) {
            arms.push_back(ArmResult{arm_name, {}, {}, {}, {}});
            arm = &arms.back();
        }
        try {
            arm->per_fold.push_back(metrics_from_counts(std::stol(fields[2]), std::stol(fields[3]),
                                                        std::stol(fields[4]),
                                                        std::stol(fields[5])));
        } catch (const std::invalid_argument& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return arms;
}

}  // namespace fmfusion::eval
