#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lastmile/detail/format.hpp"
#include "lastmile/error.hpp"
#include "lastmile/sim.hpp"

namespace lastmile {

enum class Spoke : std::uint8_t { Alpha = 0, Beta = 1 };

inline const char* spoke_name(Spoke s) { return s == Spoke::Alpha ? "alpha" : "beta"; }
inline Spoke other_spoke(Spoke s) { return s == Spoke::Alpha ? Spoke::Beta : Spoke::Alpha; }

enum class PolicyKind : std::uint8_t { ViaHub, Direct, Threshold };

// Routing choice for spoke-to-spoke mail. Threshold routes direct when the
// spokes are within `cutoff_km` of each other and via the hub otherwise.
struct RoutePolicy {
  PolicyKind kind = PolicyKind::ViaHub;
  double cutoff_km = 0.0;

  static RoutePolicy via_hub() { return {PolicyKind::ViaHub, 0.0}; }
  static RoutePolicy direct() { return {PolicyKind::Direct, 0.0}; }
  static RoutePolicy threshold(double cutoff_km) { return {PolicyKind::Threshold, cutoff_km}; }
};

inline std::string policy_name(const RoutePolicy& policy) {
  switch (policy.kind) {
    case PolicyKind::ViaHub: return "via_hub";
    case PolicyKind::Direct: return "direct";
    case PolicyKind::Threshold: return "threshold";
  }
  return "unknown";
}

// Distance one item travels under a policy. Via the hub the route is out to
// the hub, back, and across: 2*d_h + d_s.
inline double route_distance(const RoutePolicy& policy, double d_s_km, double d_h_km) {
  switch (policy.kind) {
    case PolicyKind::Direct: return d_s_km;
    case PolicyKind::Threshold:
      return d_s_km <= policy.cutoff_km ? d_s_km : 2.0 * d_h_km + d_s_km;
    case PolicyKind::ViaHub: break;
  }
  return 2.0 * d_h_km + d_s_km;
}

struct NetworkConfig {
  double d_s_km = 8.04672;    // spoke-to-spoke distance (default: 5 mi)
  double d_h_km = 80.4672;    // hub-to-spoke distance (default: 50 mi)
  double speed_kmh = 48.28032;  // travel speed (default: 30 mph)
  double lambda_per_hour = 4.0;  // mail arrival rate per spoke; hub sees 2x
  double mu_per_hour = 10.0;     // hub service rate; stable only when 2*lambda < mu
  double sim_time_hours = 1000.0;
  std::uint64_t seed = 42;
  RoutePolicy policy = RoutePolicy::via_hub();

  // Throws ConfigInvalid naming the violated field.
  void validate() const {
    if (!(d_s_km >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "d_s_km must be >= 0");
    if (!(d_h_km >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "d_h_km must be >= 0");
    if (!(speed_kmh > 0.0)) throw Error(ErrorCode::ConfigInvalid, "speed_kmh must be > 0");
    if (!(lambda_per_hour >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "lambda_per_hour must be >= 0");
    if (!(mu_per_hour > 0.0)) throw Error(ErrorCode::ConfigInvalid, "mu_per_hour must be > 0");
    if (!(sim_time_hours > 0.0)) throw Error(ErrorCode::ConfigInvalid, "sim_time_hours must be > 0");
    if (policy.kind == PolicyKind::Threshold && !(policy.cutoff_km > 0.0)) {
      throw Error(ErrorCode::ConfigInvalid, "threshold_km must be > 0");
    }
  }
};

// One tracked parcel. Timestamps are stamped as the item moves through its
// lifecycle; direct-routed items never visit the hub, so their queued/service
// fields stay empty.
struct MailItem {
  std::uint64_t id = 0;
  Spoke origin = Spoke::Alpha;
  Spoke destination = Spoke::Beta;
  std::optional<SimTime> created_at;
  std::optional<SimTime> queued_at;
  std::optional<SimTime> service_start_at;
  std::optional<SimTime> service_end_at;
  std::optional<SimTime> delivered_at;
};

struct RunMetrics {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  double avg_transit_hours = 0.0;  // mean over delivered items; 0 when none delivered
  std::uint64_t max_queue_len = 0;  // waiting items, excluding the one in service
  double time_avg_queue_len = 0.0;
  double hub_utilization = 0.0;  // busy time / sim_time
  double success_rate = 1.0;     // delivered/generated; 1.0 when nothing was generated
};

// Counts at an event boundary, for conservation checks:
// generated == waiting + in_service + in_transit + delivered always holds.
struct RunSnapshot {
  SimTime time = 0.0;
  std::uint64_t generated = 0;
  std::uint64_t waiting = 0;
  std::uint64_t in_service = 0;
  std::uint64_t in_transit = 0;
  std::uint64_t delivered = 0;
};

struct RunObserver {
  // One tab-separated line per dispatched event: time, seq, payload.
  std::ostream* trace = nullptr;
  // Called after each dispatched event with the post-event state.
  std::function<void(const RunSnapshot&)> on_event;
};

struct ScenarioResult {
  RunMetrics metrics;
  std::vector<MailItem> items;
};

namespace detail {

enum class MailEventKind : std::uint8_t { ArrivalAtSpoke, HubServiceComplete, DeliveryComplete };

struct MailEvent {
  MailEventKind kind = MailEventKind::ArrivalAtSpoke;
  Spoke spoke = Spoke::Alpha;    // meaningful for arrivals
  std::uint64_t item_id = 0;     // meaningful for service/delivery
};

inline std::string mail_event_label(const MailEvent& ev) {
  switch (ev.kind) {
    case MailEventKind::ArrivalAtSpoke:
      return std::string("arrival_at_spoke ") + spoke_name(ev.spoke);
    case MailEventKind::HubServiceComplete:
      return "hub_service_complete " + std::to_string(ev.item_id);
    case MailEventKind::DeliveryComplete:
      return "delivery_complete " + std::to_string(ev.item_id);
  }
  return "unknown";
}

// The three processes of the model -- mail generation, hub processing, and
// delivery -- realized as event handlers over a shared queue. Wakeups are
// event-driven: the hub starts serving the moment work exists, with no
// polling events in between.
class HubSpokeSim {
 public:
  HubSpokeSim(const NetworkConfig& config, const RunObserver& observer)
      : config_(config),
        observer_(observer),
        master_(config.seed),
        arrival_rng_{master_.substream(0), master_.substream(1)},
        service_rng_(master_.substream(2)) {}

  ScenarioResult run() {
    if (config_.lambda_per_hour > 0.0) {
      schedule_arrival(Spoke::Alpha);
      schedule_arrival(Spoke::Beta);
    }
    queue_.run_until(config_.sim_time_hours, [this](const Event<MailEvent>& event) {
      dispatch(event);
      if (observer_.trace) {
        *observer_.trace << lastmile::detail::fmt_fixed(event.at, 6) << '\t' << event.seq << '\t'
                         << mail_event_label(event.payload) << '\n';
      }
      if (observer_.on_event) observer_.on_event(snapshot(event.at));
    });
    return finalize();
  }

 private:
  void schedule_arrival(Spoke spoke) {
    const SimTime gap = sample_exponential(arrival_rng_[static_cast<int>(spoke)], config_.lambda_per_hour);
    queue_.schedule(queue_.now() + gap, MailEvent{MailEventKind::ArrivalAtSpoke, spoke, 0});
  }

  void dispatch(const Event<MailEvent>& event) {
    const SimTime now = event.at;
    switch (event.payload.kind) {
      case MailEventKind::ArrivalAtSpoke: handle_arrival(now, event.payload.spoke); break;
      case MailEventKind::HubServiceComplete: handle_service_complete(now, event.payload.item_id); break;
      case MailEventKind::DeliveryComplete: handle_delivery(now, event.payload.item_id); break;
    }
  }

  void handle_arrival(SimTime now, Spoke spoke) {
    MailItem item;
    item.id = items_.size();
    item.origin = spoke;
    item.destination = other_spoke(spoke);
    item.created_at = now;
    items_.push_back(item);
    schedule_arrival(spoke);

    const bool via_hub = config_.policy.kind == PolicyKind::ViaHub ||
                         (config_.policy.kind == PolicyKind::Threshold &&
                          config_.d_s_km > config_.policy.cutoff_km);
    if (via_hub) {
      items_.back().queued_at = now;
      if (server_busy_) {
        fifo_.push_back(item.id);
        set_queue_len(now, fifo_.size());
      } else {
        start_service(now, item.id);
      }
    } else {
      start_transit(now, item.id, config_.d_s_km);
    }
  }

  void start_service(SimTime now, std::uint64_t item_id) {
    items_[item_id].service_start_at = now;
    server_busy_ = true;
    busy_since_ = now;
    const SimTime service = sample_exponential(service_rng_, config_.mu_per_hour);
    queue_.schedule(now + service, MailEvent{MailEventKind::HubServiceComplete, Spoke::Alpha, item_id});
  }

  void handle_service_complete(SimTime now, std::uint64_t item_id) {
    items_[item_id].service_end_at = now;
    busy_hours_ += now - busy_since_;
    server_busy_ = false;
    start_transit(now, item_id, 2.0 * config_.d_h_km + config_.d_s_km);
    if (!fifo_.empty()) {
      const std::uint64_t next = fifo_.front();
      fifo_.pop_front();
      set_queue_len(now, fifo_.size());
      start_service(now, next);
    }
  }

  void start_transit(SimTime now, std::uint64_t item_id, double distance_km) {
    ++in_transit_;
    queue_.schedule(now + distance_km / config_.speed_kmh,
                    MailEvent{MailEventKind::DeliveryComplete, Spoke::Alpha, item_id});
  }

  void handle_delivery(SimTime now, std::uint64_t item_id) {
    items_[item_id].delivered_at = now;
    --in_transit_;
    ++delivered_;
  }

  void set_queue_len(SimTime now, std::size_t len) {
    queue_len_integral_ += static_cast<double>(queue_len_) * (now - queue_len_since_);
    queue_len_ = len;
    queue_len_since_ = now;
    if (len > max_queue_len_) max_queue_len_ = len;
  }

  RunSnapshot snapshot(SimTime now) const {
    RunSnapshot s;
    s.time = now;
    s.generated = items_.size();
    s.waiting = fifo_.size();
    s.in_service = server_busy_ ? 1 : 0;
    s.in_transit = in_transit_;
    s.delivered = delivered_;
    return s;
  }

  ScenarioResult finalize() {
    const SimTime horizon = config_.sim_time_hours;
    queue_len_integral_ += static_cast<double>(queue_len_) * (horizon - queue_len_since_);
    if (server_busy_) {
      busy_hours_ += horizon - busy_since_;
      server_busy_ = false;
    }

    RunMetrics m;
    m.generated = items_.size();
    m.delivered = delivered_;
    double transit_sum = 0.0;
    for (const MailItem& item : items_) {
      if (item.delivered_at) transit_sum += *item.delivered_at - *item.created_at;
    }
    m.avg_transit_hours = delivered_ > 0 ? transit_sum / static_cast<double>(delivered_) : 0.0;
    m.max_queue_len = max_queue_len_;
    m.time_avg_queue_len = queue_len_integral_ / horizon;
    m.hub_utilization = busy_hours_ / horizon;
    m.success_rate = m.generated > 0
                         ? static_cast<double>(m.delivered) / static_cast<double>(m.generated)
                         : 1.0;
    return ScenarioResult{m, std::move(items_)};
  }

  NetworkConfig config_;
  RunObserver observer_;
  RngStream master_;
  RngStream arrival_rng_[2];
  RngStream service_rng_;

  EventQueue<MailEvent> queue_;
  std::vector<MailItem> items_;
  std::deque<std::uint64_t> fifo_;
  bool server_busy_ = false;
  std::uint64_t in_transit_ = 0;
  std::uint64_t delivered_ = 0;
  SimTime busy_since_ = 0.0;
  double busy_hours_ = 0.0;
  std::size_t queue_len_ = 0;
  SimTime queue_len_since_ = 0.0;
  double queue_len_integral_ = 0.0;
  std::size_t max_queue_len_ = 0;
};

}  // namespace detail

// Runs one scenario to its horizon. Deterministic for a given config: the
// arrival streams of both spokes and the service stream are independent
// substreams of the master seed, so swapping the routing policy replays the
// same arrivals.
inline ScenarioResult run_scenario(const NetworkConfig& config, const RunObserver& observer = {}) {
  config.validate();
  detail::HubSpokeSim sim(config, observer);
  return sim.run();
}

// Mail lifecycle CSV; absent timestamps are empty fields.
inline void write_lifecycle_csv(std::ostream& out, const std::vector<MailItem>& items) {
  auto cell = [](const std::optional<SimTime>& t) {
    return t ? detail::fmt_double(*t) : std::string();
  };
  out << "id,origin,destination,created_at,queued_at,service_start_at,service_end_at,delivered_at\n";
  for (const MailItem& item : items) {
    out << item.id << ',' << spoke_name(item.origin) << ',' << spoke_name(item.destination) << ','
        << cell(item.created_at) << ',' << cell(item.queued_at) << ',' << cell(item.service_start_at)
        << ',' << cell(item.service_end_at) << ',' << cell(item.delivered_at) << '\n';
  }
}

}  // namespace lastmile
