#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sunny/scenario.hpp"

namespace sunny {

struct Slot {
  AlgorithmIndex algorithm = 0;
  double seconds = 0.0;

  friend bool operator==(const Slot&, const Slot&) = default;
};

// Sequential solver schedule. Slots run in order; seconds sum to the timeout.
struct Schedule {
  std::vector<Slot> slots;

  [[nodiscard]] double total_seconds() const;
  // Number of slots with positive time.
  [[nodiscard]] std::size_t size() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct IntegerSlot {
  AlgorithmIndex algorithm = 0;
  std::int64_t seconds = 0;

  friend bool operator==(const IntegerSlot&, const IntegerSlot&) = default;
};

// Whole-second form for external output: every slot is floored and the last
// slot absorbs the remainder so the total equals round(timeout) exactly.
std::vector<IntegerSlot> to_integer_slots(const Schedule& schedule, double timeout);

// `[["A4",600],["A1",600],...]`
std::string schedule_to_json(const Schedule& schedule, const Scenario& scenario);

}  // namespace sunny
