#pragma once

#include <cstdio>
#include <string>

namespace check {

// Collects PASS/FAIL lines; ok() is false once any check fails.
class Report {
 public:
  explicit Report(std::string prefix, std::string indent = {})
      : prefix_(std::move(prefix)), indent_(std::move(indent)) {}

  bool expect(const std::string& name, bool pass, const std::string& detail = {}) {
    std::printf("%s%s %s%s%s%s\n", indent_.c_str(), pass ? "PASS" : "FAIL", prefix_.c_str(), name.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
    ok_ = ok_ && pass;
    return pass;
  }
  bool ok() const { return ok_; }

 private:
  std::string prefix_;
  std::string indent_;
  bool ok_ = true;
};

inline std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace check
