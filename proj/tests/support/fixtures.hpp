#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "osgilab/dsl.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
    return std::string(OSGILAB_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline osgilab::SystemDef load_model(const std::string& name) {
    auto r = osgilab::parse_model(read_file(fixture_path(name)));
    if (!r.ok()) throw std::runtime_error("fixture model " + name + " rejected");
    return *r.value;
}

inline osgilab::ProtoSpec load_protocol(const std::string& name) {
    auto r = osgilab::parse_protocol(read_file(fixture_path(name)));
    if (!r.ok()) throw std::runtime_error("fixture protocol " + name + " rejected");
    return *r.value;
}

inline std::vector<osgilab::Event> load_trace(const std::string& name) {
    auto r = osgilab::parse_trace(read_file(fixture_path(name)));
    if (!r.ok()) throw std::runtime_error("fixture trace " + name + " rejected");
    return *r.value;
}

}  // namespace testsupport
