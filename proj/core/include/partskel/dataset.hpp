#pragma once

/// \file dataset.hpp
/// \brief On-disk dataset layout and the manifest that indexes it.
///
///     <root>/manifest
///     <root>/<seq>/keypoints.txt
///     <root>/<seq>/sil/<frame>.png
///     <out>/<seq>/parsing/<frame>.png          rendered parsing skeletons
///     <out>/<seq>/render.log                   frames with no valid joint
///     <out>/<seq>/{crf|dcf}/<frame>.{png|tns}  fused samples
///
/// `<out>` defaults to `<root>/out`.
///
/// Manifest format, one record per line:
///
///     manifest v1
///     stamp <key> <value>
///     seq <id> <identity> <condition> <gallery|probe> <keypoints> <silhouette-dir>
///
/// Paths in `seq` records are relative to the root.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "partskel/fusion.hpp"

namespace partskel {

enum class Split : std::uint8_t { Gallery, Probe };

std::string_view to_string(Split s) noexcept;

struct ManifestEntry {
    std::string sequence_id;
    std::string identity;
    std::string condition;
    Split split = Split::Gallery;
    std::filesystem::path keypoints;    ///< relative to the dataset root
    std::filesystem::path silhouettes;  ///< relative to the dataset root

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
    std::vector<ManifestEntry> sequences;
    std::map<std::string, std::string> stamps;

    /// Unique sequence ids and single-token fields.
    void validate() const;
    /// validate() plus existence of every referenced path under `root`.
    void validate_paths(const std::filesystem::path& root) const;

    [[nodiscard]] std::vector<std::string> conditions() const;

    static Manifest parse(std::string_view text, std::string_view source = "manifest");
    [[nodiscard]] std::string serialize() const;

    static Manifest load(const std::filesystem::path& root);
    void save(const std::filesystem::path& root) const;

    friend bool operator==(const Manifest&, const Manifest&) = default;
};

class DatasetLayout {
public:
    explicit DatasetLayout(std::filesystem::path root, std::filesystem::path out = {});

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] const std::filesystem::path& out() const noexcept { return out_; }

    [[nodiscard]] std::filesystem::path manifest_path() const { return root_ / "manifest"; }
    [[nodiscard]] std::filesystem::path keypoints_path(const ManifestEntry& e) const { return root_ / e.keypoints; }
    [[nodiscard]] std::filesystem::path silhouette_path(const ManifestEntry& e, std::int64_t frame) const;
    [[nodiscard]] std::filesystem::path parsing_dir(const std::string& seq) const { return out_ / seq / "parsing"; }
    [[nodiscard]] std::filesystem::path parsing_path(const std::string& seq, std::int64_t frame) const;
    [[nodiscard]] std::filesystem::path render_log(const std::string& seq) const { return out_ / seq / "render.log"; }
    [[nodiscard]] std::filesystem::path fused_dir(const std::string& seq, Strategy s) const;
    [[nodiscard]] std::filesystem::path fused_path(const std::string& seq, Strategy s, std::int64_t frame) const;

private:
    std::filesystem::path root_;
    std::filesystem::path out_;
};

std::string frame_file_name(std::int64_t frame, std::string_view extension);

}  // namespace partskel
