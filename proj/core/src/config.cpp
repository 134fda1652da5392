#include "partskel/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "partskel/error.hpp"

namespace partskel {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last || value.empty()) {
        throw ConfigError("bad value '" + std::string(value) + "' for key '" + std::string(key) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(out)) throw ConfigError("non-finite value for key '" + std::string(key) + "'");
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

const std::vector<std::string>& PipelineConfig::keys() {
    static const std::vector<std::string> k = {
        "tau",       "radius", "line_width", "head_joints",    "strategy",     "target_height", "target_width",
        "align",     "bands",  "stripes",    "margin",         "ce_weight",    "triplet_weight", "train_epochs",
        "learning_rate", "seed", "workers",  "dataset",        "output",
    };
    return k;
}

void PipelineConfig::set(std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    if (key == "tau") {
        tau = parse_value<double>(key, value);
    } else if (key == "radius") {
        radius = parse_value<double>(key, value);
    } else if (key == "line_width") {
        line_width = parse_value<double>(key, value);
    } else if (key == "head_joints") {
        std::vector<int> joints;
        std::string_view rest = value;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto name = trim(rest.substr(0, comma));
            try {
                joints.push_back(joint_from_name(name));
            } catch (const SchemaError& e) {
                throw ConfigError(std::string("head_joints: ") + e.what());
            }
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        if (joints.empty()) throw ConfigError("head_joints must name at least one joint");
        head_joints = std::move(joints);
    } else if (key == "strategy") {
        try {
            strategy = parse_strategy(value);
        } catch (const ValidationError& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "target_height") {
        target.height = parse_value<int>(key, value);
    } else if (key == "target_width") {
        target.width = parse_value<int>(key, value);
    } else if (key == "align") {
        if (value == "none") {
            auto_align = false;
        } else if (value == "auto") {
            auto_align = true;
        } else {
            throw ConfigError("align must be 'none' or 'auto'");
        }
    } else if (key == "bands") {
        bands = parse_value<int>(key, value);
    } else if (key == "stripes") {
        stripes = parse_value<int>(key, value);
    } else if (key == "margin") {
        margin = parse_value<double>(key, value);
    } else if (key == "ce_weight") {
        ce_weight = parse_value<double>(key, value);
    } else if (key == "triplet_weight") {
        triplet_weight = parse_value<double>(key, value);
    } else if (key == "train_epochs") {
        train_epochs = parse_value<int>(key, value);
    } else if (key == "learning_rate") {
        learning_rate = parse_value<double>(key, value);
    } else if (key == "seed") {
        seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "workers") {
        workers = parse_value<int>(key, value);
    } else if (key == "dataset") {
        dataset = std::filesystem::path(std::string(value));
    } else if (key == "output") {
        output = std::filesystem::path(std::string(value));
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

std::string PipelineConfig::get(std::string_view key) const {
    if (key == "tau") return fmt_double(tau);
    if (key == "radius") return fmt_double(radius);
    if (key == "line_width") return fmt_double(line_width);
    if (key == "head_joints") {
        std::string s;
        for (int j : head_joints) {
            if (!s.empty()) s += ',';
            s += joint_name(j);
        }
        return s;
    }
    if (key == "strategy") return std::string(to_string(strategy));
    if (key == "target_height") return std::to_string(target.height);
    if (key == "target_width") return std::to_string(target.width);
    if (key == "align") return auto_align ? "auto" : "none";
    if (key == "bands") return std::to_string(bands);
    if (key == "stripes") return std::to_string(stripes);
    if (key == "margin") return fmt_double(margin);
    if (key == "ce_weight") return fmt_double(ce_weight);
    if (key == "triplet_weight") return fmt_double(triplet_weight);
    if (key == "train_epochs") return std::to_string(train_epochs);
    if (key == "learning_rate") return fmt_double(learning_rate);
    if (key == "seed") return std::to_string(seed);
    if (key == "workers") return std::to_string(workers);
    if (key == "dataset") return dataset.string();
    if (key == "output") return output.string();
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void PipelineConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0,1]");
    if (!(radius >= 1.0)) throw ConfigError("radius must be >= 1");
    if (!(line_width >= 1.0)) throw ConfigError("line_width must be >= 1");
    if (target.height < 1 || target.width < 1) throw ConfigError("target size must be positive");
    if (bands < 1 || target.height % bands != 0) {
        throw ConfigError("bands must divide target_height (" + std::to_string(target.height) + ")");
    }
    if (stripes < 1 || bands % stripes != 0) {
        throw ConfigError("stripes must divide bands (" + std::to_string(bands) + ")");
    }
    if (!(margin > 0.0)) throw ConfigError("margin must be > 0");
    if (ce_weight < 0.0 || triplet_weight < 0.0) throw ConfigError("loss weights must be non-negative");
    if (train_epochs < 0) throw ConfigError("train_epochs must be >= 0");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (workers < 1) throw ConfigError("workers must be >= 1");
}

std::string PipelineConfig::canonical() const {
    std::string out;
    for (const auto& k : keys()) {
        if (k == "workers" || k == "dataset" || k == "output") continue;
        out += k + " = " + get(k) + "\n";
    }
    return out;
}

std::string PipelineConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
}

RenderConfig PipelineConfig::render_config(Size canvas) const {
    return RenderConfig{radius, line_width, tau, canvas};
}

PartMapping PipelineConfig::part_mapping() const { return PartMapping::coco17(head_joints); }

std::filesystem::path PipelineConfig::output_root() const {
    if (!output.empty()) return output;
    return dataset / "out";
}

PipelineConfig PipelineConfig::parse(std::string_view text, std::string_view source) {
    PipelineConfig cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash_pos = line.find('#'); hash_pos != std::string_view::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

}  // namespace partskel
