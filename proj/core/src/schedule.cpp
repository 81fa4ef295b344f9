#include "sunny/schedule.hpp"

#include <cmath>

#include <json.hpp>

namespace sunny {

double Schedule::total_seconds() const {
  double total = 0.0;
  for (const auto& s : slots) total += s.seconds;
  return total;
}

std::size_t Schedule::size() const {
  std::size_t n = 0;
  for (const auto& s : slots) n += s.seconds > 0.0 ? 1 : 0;
  return n;
}

std::vector<IntegerSlot> to_integer_slots(const Schedule& schedule, double timeout) {
  std::vector<IntegerSlot> out;
  if (schedule.slots.empty()) return out;
  const auto total = static_cast<std::int64_t>(std::llround(timeout));
  std::int64_t used = 0;
  for (std::size_t i = 0; i + 1 < schedule.slots.size(); ++i) {
    const auto secs = static_cast<std::int64_t>(std::floor(schedule.slots[i].seconds + 1e-9));
    out.push_back({schedule.slots[i].algorithm, secs});
    used += secs;
  }
  out.push_back({schedule.slots.back().algorithm, total - used});
  return out;
}

std::string schedule_to_json(const Schedule& schedule, const Scenario& scenario) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& slot : to_integer_slots(schedule, scenario.timeout())) {
    arr.push_back({scenario.algorithm_ids().at(slot.algorithm), slot.seconds});
  }
  return arr.dump();
}

}  // namespace sunny
