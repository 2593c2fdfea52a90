#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "transit/error.hpp"
#include "transit/ptn/instance.hpp"

namespace transit::ean {

enum class EventKind { Arrival, Departure, Source, Target };
enum class ActivityKind { Drive, Wait, Transfer, AuxIn, AuxOut };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Arrival: return "arr";
    case EventKind::Departure: return "dep";
    case EventKind::Source: return "source";
    case EventKind::Target: return "target";
  }
  return "?";
}

inline const char* to_string(ActivityKind k) {
  switch (k) {
    case ActivityKind::Drive: return "drive";
    case ActivityKind::Wait: return "wait";
    case ActivityKind::Transfer: return "transfer";
    case ActivityKind::AuxIn: return "aux_in";
    case ActivityKind::AuxOut: return "aux_out";
  }
  return "?";
}

constexpr int kNoLine = -1;

struct Event {
  int id = 0;  // stable across restrict()
  EventKind kind = EventKind::Arrival;
  int stop = 0;         // stop id
  int line = kNoLine;   // line id; none for source/target
  bool operator==(const Event&) const = default;
};

struct Activity {
  int id = 0;  // stable across restrict()
  ActivityKind kind = ActivityKind::Drive;
  int tail = 0, head = 0;  // positions in Ean::events
  int L = 0, U = 0;
  int line1 = kNoLine;  // owner line; tail line of a transfer
  int line2 = kNoLine;  // head line of a transfer
  int edge = -1;        // PTN edge of a drive
  int stop = 0;         // stop of wait/transfer/aux, tail stop of a drive

  bool is_aux() const { return kind == ActivityKind::AuxIn || kind == ActivityKind::AuxOut; }
  bool operator==(const Activity&) const = default;
};

class Ean {
 public:
  std::vector<Event> events;
  std::vector<Activity> activities;

  bool extended() const { return extended_; }

  const std::vector<int>& out(int e) const { return out_.at(e); }
  const std::vector<int>& in(int e) const { return in_.at(e); }

  std::optional<int> find(EventKind kind, int stop, int line = kNoLine) const {
    auto it = index_.find({static_cast<int>(kind), stop, line});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  int arr(int stop, int line) const { return must(EventKind::Arrival, stop, line); }
  int dep(int stop, int line) const { return must(EventKind::Departure, stop, line); }
  int source(int stop) const { return must(EventKind::Source, stop, kNoLine); }
  int target(int stop) const { return must(EventKind::Target, stop, kNoLine); }

  // A(l): drive and wait activities of line l in travel order.
  std::vector<int> line_activities(int line) const {
    std::vector<int> out;
    for (std::size_t a = 0; a < activities.size(); ++a) {
      const auto& x = activities[a];
      if ((x.kind == ActivityKind::Drive || x.kind == ActivityKind::Wait) && x.line1 == line)
        out.push_back(static_cast<int>(a));
    }
    return out;
  }

  // Node-arc incidence entry: +1 if e is the tail of a, -1 if the head.
  int incidence(int e, int a) const {
    const auto& x = activities.at(a);
    return (x.tail == e ? 1 : 0) - (x.head == e ? 1 : 0);
  }

  // b^{u,v}: +1 at (u, source), -1 at (v, target).
  std::vector<int> demand_vector(int u, int v) const {
    std::vector<int> b(events.size(), 0);
    b[source(u)] += 1;
    b[target(v)] -= 1;
    return b;
  }

  // Rebuilds incidence lists and the event index after edits.
  void reindex() {
    out_.assign(events.size(), {});
    in_.assign(events.size(), {});
    index_.clear();
    for (std::size_t e = 0; e < events.size(); ++e)
      index_[{static_cast<int>(events[e].kind), events[e].stop, events[e].line}] = static_cast<int>(e);
    for (std::size_t a = 0; a < activities.size(); ++a) {
      out_[activities[a].tail].push_back(static_cast<int>(a));
      in_[activities[a].head].push_back(static_cast<int>(a));
    }
  }

  bool operator==(const Ean& o) const {
    return events == o.events && activities == o.activities && extended_ == o.extended_;
  }

 private:
  int must(EventKind kind, int stop, int line) const {
    auto e = find(kind, stop, line);
    if (!e)
      throw ModelError(std::string("no ") + to_string(kind) + " event at stop " + std::to_string(stop) +
                       (line == kNoLine ? "" : " of line " + std::to_string(line)));
    return *e;
  }

  bool extended_ = false;
  std::vector<std::vector<int>> out_, in_;
  std::map<std::tuple<int, int, int>, int> index_;

  friend Ean extend_for_routing(Ean, const ptn::PtnInstance&);
  friend Ean restrict(const Ean&, const std::set<int>&);
};

// Arrival/departure events per (stop, line), wait and drive activities per
// line, transfers for every ordered pair of distinct lines at a shared stop.
inline Ean build_ean(const ptn::PtnInstance& inst) {
  Ean n;
  auto add_event = [&](EventKind k, int stop, int line) {
    n.events.push_back({static_cast<int>(n.events.size()), k, stop, line});
    return static_cast<int>(n.events.size()) - 1;
  };
  auto add_activity = [&](Activity a) {
    a.id = static_cast<int>(n.activities.size());
    n.activities.push_back(a);
  };
  for (const auto& l : inst.pool) {
    std::vector<int> arr, dep;
    for (int s : l.stops) {
      arr.push_back(add_event(EventKind::Arrival, s, l.id));
      dep.push_back(add_event(EventKind::Departure, s, l.id));
    }
    for (std::size_t i = 0; i < l.stops.size(); ++i) {
      const auto& st = inst.stop(l.stops[i]);
      add_activity({0, ActivityKind::Wait, arr[i], dep[i], st.L_wait, st.U_wait, l.id, kNoLine, -1, st.id});
      if (i + 1 < l.stops.size()) {
        const auto& e = inst.edge(l.edges[i]);
        add_activity({0, ActivityKind::Drive, dep[i], arr[i + 1], e.L_drive, e.U_drive, l.id, kNoLine, e.id, st.id});
      }
    }
  }
  n.reindex();
  std::vector<Activity> transfers;
  for (const auto& st : inst.stops)
    for (const auto& l1 : inst.pool)
      for (const auto& l2 : inst.pool) {
        if (l1.id == l2.id) continue;
        auto a = n.find(EventKind::Arrival, st.id, l1.id);
        auto d = n.find(EventKind::Departure, st.id, l2.id);
        if (a && d) transfers.push_back({0, ActivityKind::Transfer, *a, *d, st.L_trans, st.U_trans, l1.id, l2.id, -1, st.id});
      }
  for (auto& t : transfers) add_activity(t);
  n.reindex();
  return n;
}

// Adds (v, source) and (v, target) per stop, aux_in arcs (v, source) -> (v, l, dep)
// and aux_out arcs (v, l, arr) -> (v, target) for every line l through v.
inline Ean extend_for_routing(Ean n, const ptn::PtnInstance& inst) {
  if (n.extended_) throw ModelError("network is already extended");
  std::map<int, std::pair<int, int>> st;
  for (const auto& s : inst.stops) {
    n.events.push_back({static_cast<int>(n.events.size()), EventKind::Source, s.id, kNoLine});
    n.events.push_back({static_cast<int>(n.events.size()), EventKind::Target, s.id, kNoLine});
    st[s.id] = {static_cast<int>(n.events.size()) - 2, static_cast<int>(n.events.size()) - 1};
  }
  n.reindex();
  for (const auto& s : inst.stops)
    for (const auto& l : inst.pool) {
      auto d = n.find(EventKind::Departure, s.id, l.id);
      if (!d) continue;
      const int a = n.arr(s.id, l.id);
      n.activities.push_back(
          {static_cast<int>(n.activities.size()), ActivityKind::AuxIn, st[s.id].first, *d, 0, 0, l.id, kNoLine, -1, s.id});
      n.activities.push_back(
          {static_cast<int>(n.activities.size()), ActivityKind::AuxOut, a, st[s.id].second, 0, 0, l.id, kNoLine, -1, s.id});
    }
  n.extended_ = true;
  n.reindex();
  return n;
}

// Subnetwork of the events and activities whose owner lines are all in
// `chosen`. Ids are preserved.
inline Ean restrict(const Ean& n, const std::set<int>& chosen) {
  auto keep_line = [&](int l) { return l == kNoLine || chosen.count(l) > 0; };
  Ean r;
  r.extended_ = n.extended_;
  std::vector<int> pos(n.events.size(), -1);
  for (std::size_t e = 0; e < n.events.size(); ++e)
    if (keep_line(n.events[e].line)) {
      pos[e] = static_cast<int>(r.events.size());
      r.events.push_back(n.events[e]);
    }
  for (const auto& a : n.activities) {
    if (!keep_line(a.line1) || !keep_line(a.line2)) continue;
    Activity b = a;
    b.tail = pos[a.tail];
    b.head = pos[a.head];
    r.activities.push_back(b);
  }
  r.reindex();
  return r;
}

// Debug dump: events.csv (id;kind;stop;line) and activities.csv
// (id;kind;tail;head;L;U;line1;line2), with event ids and -1 for "none".
inline void write_csv(const Ean& n, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream ev(dir / "events.csv"), ac(dir / "activities.csv");
  if (!ev || !ac) throw IoError("cannot write EAN files to " + dir.string());
  ev << "id;kind;stop;line\n";
  for (const auto& e : n.events) ev << e.id << ';' << to_string(e.kind) << ';' << e.stop << ';' << e.line << '\n';
  ac << "id;kind;tail;head;L;U;line1;line2\n";
  for (const auto& a : n.activities)
    ac << a.id << ';' << to_string(a.kind) << ';' << n.events[a.tail].id << ';' << n.events[a.head].id << ';' << a.L
       << ';' << a.U << ';' << a.line1 << ';' << a.line2 << '\n';
}

}  // namespace transit::ean
