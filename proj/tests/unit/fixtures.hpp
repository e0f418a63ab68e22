#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef TPATCH_TEST_DATA
#error "TPATCH_TEST_DATA must name the fixture directory"
#endif

namespace tpatch::test {

inline std::string data_path(const std::string& name) {
  return std::string(TPATCH_TEST_DATA) + "/" + name;
}

inline std::string read_data(const std::string& name) {
  std::ifstream in(data_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tpatch::test
