#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "mtsref/textfmt.hpp"

namespace testing {

inline std::string readModel(const std::string& file) {
    std::ifstream in(std::string(MTSREF_MODELS_DIR) + "/" + file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<mtsref::TransitionSystem> loadModel(const std::string& file) {
    return mtsref::parseSystems(readModel(file));
}

inline mtsref::StateId state(const mtsref::TransitionSystem& sys, const std::string& name) {
    auto s = sys.findState(name);
    if (!s) throw std::runtime_error("no state " + name);
    return *s;
}

}  // namespace testing
