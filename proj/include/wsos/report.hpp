#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "wsos/io.hpp"

namespace wsos {

inline constexpr const char* kVersion = "0.1.0";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << x;
  return o.str();
}

enum class ItemStatus { Pass, Fail, Skipped };

inline const char* to_string(ItemStatus s) {
  switch (s) {
    case ItemStatus::Pass: return "pass";
    case ItemStatus::Fail: return "fail";
    case ItemStatus::Skipped: return "skipped";
  }
  return "?";
}

struct ReportItem {
  std::string name;
  io::json expected;
  io::json computed;
  ItemStatus status = ItemStatus::Pass;
  std::string note;
};

/// Items are only ever appended; the hash covers the config, never the timestamp.
class ReproductionReport {
 public:
  explicit ReproductionReport(io::json config) : config_(std::move(config)) {}

  void add(ReportItem item) { items_.push_back(std::move(item)); }
  const std::vector<ReportItem>& items() const { return items_; }

  std::string config_hash() const { return hex64(fnv1a(config_.dump())); }

  const ReportItem* first_failure() const {
    for (const auto& it : items_)
      if (it.status == ItemStatus::Fail) return &it;
    return nullptr;
  }

  io::json to_json(const std::string& timestamp = now_utc()) const {
    io::json items = io::json::array();
    for (const auto& it : items_) {
      io::json j = {{"name", it.name}, {"status", to_string(it.status)}, {"expected", it.expected},
                    {"computed", it.computed}};
      if (!it.note.empty()) j["note"] = it.note;
      items.push_back(std::move(j));
    }
    std::size_t pass = 0, fail = 0, skipped = 0;
    for (const auto& it : items_)
      (it.status == ItemStatus::Pass ? pass : it.status == ItemStatus::Fail ? fail : skipped)++;
    return {{"tool", "werner_sos"},
            {"version", kVersion},
            {"config", config_},
            {"config_hash", config_hash()},
            {"timestamp", timestamp},
            {"summary", {{"pass", pass}, {"fail", fail}, {"skipped", skipped}}},
            {"items", std::move(items)}};
  }

  std::string to_text() const {
    std::ostringstream o;
    for (const auto& it : items_) {
      o << std::left << std::setw(8) << to_string(it.status) << it.name;
      if (!it.note.empty()) o << "  (" << it.note << ")";
      o << "\n";
    }
    return o.str();
  }

  static std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream o;
    o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return o.str();
  }

 private:
  io::json config_;
  std::vector<ReportItem> items_;
};

}  // namespace wsos
