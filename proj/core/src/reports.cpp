#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "partskel/error.hpp"
#include "partskel/pipeline.hpp"

namespace partskel {

namespace {

using Json = nlohmann::ordered_json;

std::string row_text(const EvalRow& r) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %-10s %6zu %6zu  %6.2f  %6.2f  %6.2f  %6.2f\n", r.representation.c_str(),
                  r.condition.c_str(), r.report.probes, r.report.gallery, 100.0 * r.report.rank1,
                  100.0 * r.report.rank5, 100.0 * r.report.mean_ap, 100.0 * r.report.mean_inp);
    return line;
}

const char* kRowHeader = "input      condition  probes  gall.  Rank-1  Rank-5     mAP    mINP\n";

Json row_json(const EvalRow& r) {
    Json j;
    j["representation"] = r.representation;
    j["condition"] = r.condition;
    j["probes"] = r.report.probes;
    j["gallery"] = r.report.gallery;
    j["rank1"] = r.report.rank1;
    j["rank5"] = r.report.rank5;
    j["mAP"] = r.report.mean_ap;
    j["mINP"] = r.report.mean_inp;
    j["cmc"] = r.report.cmc;
    return j;
}

void write_pair(const std::filesystem::path& dir, const std::string& stem, const std::string& text,
                const std::string& json) {
    std::filesystem::create_directories(dir);
    for (const auto& [ext, body] : {std::pair{".txt", text}, std::pair{".json", json}}) {
        const auto path = dir / (stem + ext);
        std::ofstream out(path, std::ios::binary);
        out << body;
        if (!out) throw IoError("cannot write " + path.string());
    }
}

}  // namespace

std::string format_eval_text(const EvalSummary& summary) {
    std::ostringstream out;
    char meta[160];
    std::snprintf(meta, sizeof(meta), "strategy %s, radius %g, line width %g\n", summary.strategy.c_str(),
                  summary.radius, summary.line_width);
    out << "evaluation report (percent)\nconfig " << summary.config_hash << "\n" << meta << kRowHeader;
    for (const auto& r : summary.rows) out << row_text(r);
    for (const auto& c : summary.skipped) out << "skipped " << c << ": no probes\n";
    return out.str();
}

std::string format_eval_json(const EvalSummary& summary) {
    Json j;
    j["config_hash"] = summary.config_hash;
    j["strategy"] = summary.strategy;
    j["radius"] = summary.radius;
    j["line_width"] = summary.line_width;
    auto& rows = j["rows"] = Json::array();
    for (const auto& r : summary.rows) rows.push_back(row_json(r));
    j["skipped"] = summary.skipped;
    return j.dump(2) + "\n";
}

void write_eval_report(const std::filesystem::path& dir, const EvalSummary& summary) {
    write_pair(dir, "eval_report", format_eval_text(summary), format_eval_json(summary));
}

std::string format_sweep_text(const SweepSummary& summary) {
    std::ostringstream out;
    out << "radius/width sweep\nconfig " << summary.config_hash << "\n";
    char line[160];
    for (const auto& row : summary.rows) {
        std::snprintf(line, sizeof(line), "radius %g width %g  H = %.6f bits (%+.6f vs silhouette)\n", row.point.radius,
                      row.point.line_width, row.entropy, row.entropy_delta);
        out << line << "  " << kRowHeader;
        for (const auto& r : row.eval) out << "  " << row_text(r);
    }
    return out.str();
}

std::string format_sweep_json(const SweepSummary& summary) {
    Json j;
    j["config_hash"] = summary.config_hash;
    auto& rows = j["rows"] = Json::array();
    for (const auto& row : summary.rows) {
        Json r;
        r["radius"] = row.point.radius;
        r["line_width"] = row.point.line_width;
        r["entropy_bits"] = row.entropy;
        r["entropy_delta"] = row.entropy_delta;
        auto& eval = r["eval"] = Json::array();
        for (const auto& e : row.eval) eval.push_back(row_json(e));
        rows.push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

void write_sweep_report(const std::filesystem::path& dir, const SweepSummary& summary) {
    write_pair(dir, "sweep_report", format_sweep_text(summary), format_sweep_json(summary));
}

}  // namespace partskel
