#pragma once

// Run manifests: the resolved configuration, input digests, seed, and
// version of a CLI invocation, written next to the outputs so any run can be
// reproduced from the manifest alone.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "spms/version.hpp"

namespace spms {

inline std::uint64_t fnv1a_64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string fnv1a_hex(std::string_view bytes) {
    std::ostringstream os;
    os << "fnv64:" << std::hex << fnv1a_64(bytes);
    return os.str();
}

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for digest");
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a_hex(buf.str());
}

struct RunManifest {
    std::string subcommand;
    nlohmann::json config;  // every default materialized
    std::map<std::string, std::string> input_digests;
    std::uint64_t master_seed = 0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["subcommand"] = subcommand;
        j["config"] = config;
        j["inputs"] = input_digests;
        j["master_seed"] = master_seed;
        j["version"] = kVersion;
        return j;
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
        out << to_json().dump(2) << "\n";
    }
};

}  // namespace spms
