#include "partskel/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "partskel/error.hpp"

namespace partskel {

namespace {

std::vector<std::string> tokens(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream ss{std::string(line)};
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

bool single_token(const std::string& s) {
    return !s.empty() && s.find_first_of(" \t\r\n") == std::string::npos;
}

}  // namespace

std::string_view to_string(Split s) noexcept { return s == Split::Gallery ? "gallery" : "probe"; }

std::string frame_file_name(std::int64_t frame, std::string_view extension) {
    return std::to_string(frame) + "." + std::string(extension);
}

void Manifest::validate() const {
    std::set<std::string> ids;
    for (const auto& e : sequences) {
        for (const auto* field : {&e.sequence_id, &e.identity, &e.condition}) {
            if (!single_token(*field)) throw ValidationError("manifest fields must be non-empty single tokens");
        }
        if (!single_token(e.keypoints.string()) || !single_token(e.silhouettes.string())) {
            throw ValidationError("manifest paths must be non-empty and contain no whitespace");
        }
        if (!ids.insert(e.sequence_id).second) {
            throw ValidationError("duplicate sequence id '" + e.sequence_id + "' in manifest");
        }
    }
    for (const auto& [k, v] : stamps) {
        if (!single_token(k) || !single_token(v)) throw ValidationError("manifest stamps must be single tokens");
    }
}

void Manifest::validate_paths(const std::filesystem::path& root) const {
    validate();
    for (const auto& e : sequences) {
        if (!std::filesystem::is_regular_file(root / e.keypoints)) {
            throw ValidationError("sequence " + e.sequence_id + ": missing keypoint file " +
                                  (root / e.keypoints).string());
        }
        if (!std::filesystem::is_directory(root / e.silhouettes)) {
            throw ValidationError("sequence " + e.sequence_id + ": missing silhouette directory " +
                                  (root / e.silhouettes).string());
        }
    }
}

std::vector<std::string> Manifest::conditions() const {
    std::vector<std::string> out;
    for (const auto& e : sequences) {
        if (std::find(out.begin(), out.end(), e.condition) == out.end()) out.push_back(e.condition);
    }
    return out;
}

Manifest Manifest::parse(std::string_view text, std::string_view source) {
    Manifest m;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    auto fail = [&](const std::string& what) {
        throw ValidationError(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = tokens(line);
        if (t.empty()) continue;
        if (!header) {
            if (t.size() != 2 || t[0] != "manifest" || t[1] != "v1") fail("expected header 'manifest v1'");
            header = true;
            continue;
        }
        if (t[0] == "stamp") {
            if (t.size() != 3) fail("stamp needs a key and a value");
            m.stamps[t[1]] = t[2];
        } else if (t[0] == "seq") {
            if (t.size() != 7) fail("seq record needs 6 fields");
            Split split{};
            if (t[4] == "gallery") {
                split = Split::Gallery;
            } else if (t[4] == "probe") {
                split = Split::Probe;
            } else {
                fail("split must be gallery or probe");
            }
            m.sequences.push_back({t[1], t[2], t[3], split, t[5], t[6]});
        } else {
            fail("unknown record '" + t[0] + "'");
        }
    }
    if (!header) throw ValidationError(std::string(source) + ": empty manifest");
    m.validate();
    return m;
}

std::string Manifest::serialize() const {
    validate();
    std::string out = "manifest v1\n";
    for (const auto& [k, v] : stamps) out += "stamp " + k + " " + v + "\n";
    for (const auto& e : sequences) {
        out += "seq " + e.sequence_id + " " + e.identity + " " + e.condition + " " + std::string(to_string(e.split)) +
               " " + e.keypoints.generic_string() + " " + e.silhouettes.generic_string() + "\n";
    }
    return out;
}

Manifest Manifest::load(const std::filesystem::path& root) {
    const auto path = root / "manifest";
    std::ifstream in(path);
    if (!in) throw IoError("no manifest in " + root.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void Manifest::save(const std::filesystem::path& root) const {
    const auto text = serialize();
    const auto path = root / "manifest";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("short write on " + path.string());
}

DatasetLayout::DatasetLayout(std::filesystem::path root, std::filesystem::path out)
    : root_(std::move(root)), out_(out.empty() ? root_ / "out" : std::move(out)) {}

std::filesystem::path DatasetLayout::silhouette_path(const ManifestEntry& e, std::int64_t frame) const {
    return root_ / e.silhouettes / frame_file_name(frame, "png");
}

std::filesystem::path DatasetLayout::parsing_path(const std::string& seq, std::int64_t frame) const {
    return parsing_dir(seq) / frame_file_name(frame, "png");
}

std::filesystem::path DatasetLayout::fused_dir(const std::string& seq, Strategy s) const {
    return out_ / seq / std::string(to_string(s));
}

std::filesystem::path DatasetLayout::fused_path(const std::string& seq, Strategy s, std::int64_t frame) const {
    return fused_dir(seq, s) / frame_file_name(frame, s == Strategy::Crf ? "png" : "tns");
}

}  // namespace partskel
