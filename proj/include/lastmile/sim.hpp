#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <vector>

#include "lastmile/error.hpp"

namespace lastmile {

// Simulation time in hours. Distances are km and speeds km/h throughout the
// library, so travel time is distance/speed with no hidden constants.
using SimTime = double;

inline constexpr double kKmPerMile = 1.609344;

inline double miles_to_km(double miles) { return miles * kKmPerMile; }
inline double km_to_miles(double km) { return km / kKmPerMile; }

// One splitmix64 step. Bijective on 64-bit values; used both as the seed
// mixer for derived streams and by tests that need cheap distinct seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seeded random stream. The generator is std::mt19937_64, whose output
// sequence for a given seed is fixed by the C++ standard, so identical seeds
// reproduce identical samples on every platform. The uniform and exponential
// mappings below are written out explicitly instead of using
// std::*_distribution, which the standard does not pin down.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  static constexpr const char* algorithm() { return "mt19937_64"; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1): (k + 0.5) * 2^-53 for k in [0, 2^53).
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
  }

  // Independent child stream. Mixing the label through splitmix64 keeps the
  // parent's draw sequence untouched when streams are added or removed.
  RngStream substream(std::uint64_t label) const {
    return RngStream(splitmix64(seed_ ^ (label + 1)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Exponential inter-arrival sampler: -ln(u)/rate with u in (0,1), so the
// result is strictly positive and finite.
inline SimTime sample_exponential(RngStream& rng, double rate) {
  if (!(rate > 0.0)) {
    throw Error(ErrorCode::NonPositiveRate, "exponential rate must be > 0, got " + std::to_string(rate));
  }
  return -std::log(rng.uniform01()) / rate;
}

template <typename Payload>
struct Event {
  SimTime at = 0.0;
  std::uint64_t seq = 0;  // insertion order, unique per run
  Payload payload{};
};

// Time-ordered event queue with a clock. Pop order is non-decreasing in time;
// simultaneous events dispatch in insertion order (FIFO), which keeps runs
// reproducible when the model schedules ties.
template <typename Payload>
class EventQueue {
 public:
  SimTime now() const { return now_; }
  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }

  Event<Payload> schedule(SimTime at, Payload payload) {
    if (at < now_) {
      throw Error(ErrorCode::SchedulingInPast,
                  "event at t=" + std::to_string(at) + " before clock t=" + std::to_string(now_));
    }
    Event<Payload> event{at, next_seq_++, std::move(payload)};
    heap_.push(event);
    return event;
  }

  // Dispatches every event with time <= horizon in (time, seq) order, then
  // advances the clock to the horizon. The handler may schedule follow-up
  // events; ones that land inside the horizon are dispatched in this call.
  // Returns the number of events dispatched.
  template <typename Handler>
  std::size_t run_until(SimTime horizon, Handler&& handler) {
    if (horizon < now_) {
      throw Error(ErrorCode::SchedulingInPast,
                  "horizon t=" + std::to_string(horizon) + " before clock t=" + std::to_string(now_));
    }
    std::size_t steps = 0;
    while (!heap_.empty() && heap_.top().at <= horizon) {
      Event<Payload> event = heap_.top();
      heap_.pop();
      now_ = event.at;
      ++steps;
      handler(event);
    }
    now_ = horizon;
    return steps;
  }

 private:
  struct Later {
    bool operator()(const Event<Payload>& a, const Event<Payload>& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  SimTime now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event<Payload>, std::vector<Event<Payload>>, Later> heap_;
};

}  // namespace lastmile
