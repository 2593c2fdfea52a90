#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "transit/error.hpp"
#include "transit/ptn/instance.hpp"

// LinTim-style CSV: ';' separator, '#' starts a comment, first data line is
// the header.
//
//   stops.csv        id;name;L_wait;U_wait;L_trans;U_trans
//   edges.csv        id;u;v;length;L_drive;U_drive;f_min;f_max
//   od.csv           u;v;demand
//   pool.csv         line_id;edge_ids;cost          (edge_ids comma-joined)
//   config.csv       key;value
//   turnarounds.csv  from;to;time;distance          (optional; "depot" allowed)

namespace transit::ptn {

namespace csv {

struct Row {
  int line = 0;
  std::vector<std::string> cells;
};

struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<Row> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ParseError(file, 1, "missing column " + name);
  }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Table t;
  t.file = path.filename().string();
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto p = raw.find('#'); p != std::string::npos) raw.erase(p);
    if (trim(raw).empty()) continue;
    auto cells = split(raw, ';');
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw ParseError(t.file, lineno,
                       "expected " + std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
    t.rows.push_back({lineno, std::move(cells)});
  }
  if (t.header.empty()) throw ParseError(t.file, lineno, "missing header row");
  return t;
}

inline int to_int(const Table& t, const Row& r, const std::string& s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(t.file, r.line, "not an integer: '" + s + "'");
  return v;
}

inline double to_double(const Table& t, const Row& r, const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(t.file, r.line, "not a number: '" + s + "'");
  return v;
}

// Shortest text that reads back to the same double.
inline std::string num(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <class T>
std::string join(const std::vector<T>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    if constexpr (std::is_same_v<T, std::string>) out += v[i];
    else out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace csv

inline PtnInstance load_instance(const std::filesystem::path& dir) {
  using csv::Table;
  PtnInstance inst;
  inst.name = dir.filename().string();
  if (inst.name.empty()) inst.name = dir.parent_path().filename().string();

  {
    const Table t = csv::read(dir / "stops.csv");
    const auto id = t.column("id"), nm = t.column("name"), lw = t.column("L_wait"), uw = t.column("U_wait"),
               lt = t.column("L_trans"), ut = t.column("U_trans");
    for (const auto& r : t.rows)
      inst.stops.push_back({csv::to_int(t, r, r.cells[id]), r.cells[nm], csv::to_int(t, r, r.cells[lw]),
                            csv::to_int(t, r, r.cells[uw]), csv::to_int(t, r, r.cells[lt]),
                            csv::to_int(t, r, r.cells[ut])});
  }
  {
    const Table t = csv::read(dir / "edges.csv");
    const auto id = t.column("id"), u = t.column("u"), v = t.column("v"), len = t.column("length"),
               ld = t.column("L_drive"), ud = t.column("U_drive"), fmin = t.column("f_min"), fmax = t.column("f_max");
    for (const auto& r : t.rows)
      inst.edges.push_back({csv::to_int(t, r, r.cells[id]), csv::to_int(t, r, r.cells[u]),
                            csv::to_int(t, r, r.cells[v]), csv::to_double(t, r, r.cells[len]),
                            csv::to_int(t, r, r.cells[ld]), csv::to_int(t, r, r.cells[ud]),
                            csv::to_int(t, r, r.cells[fmin]), csv::to_int(t, r, r.cells[fmax])});
  }
  {
    const Table t = csv::read(dir / "od.csv");
    const auto u = t.column("u"), v = t.column("v"), c = t.column("demand");
    for (const auto& r : t.rows) {
      const std::pair<int, int> key{csv::to_int(t, r, r.cells[u]), csv::to_int(t, r, r.cells[v])};
      if (!inst.od.emplace(key, csv::to_double(t, r, r.cells[c])).second)
        throw ParseError(t.file, r.line, "duplicate OD pair");
    }
  }
  {
    const Table t = csv::read(dir / "pool.csv");
    const auto id = t.column("line_id"), es = t.column("edge_ids"), c = t.column("cost");
    for (const auto& r : t.rows) {
      Line l;
      l.id = csv::to_int(t, r, r.cells[id]);
      for (const auto& e : csv::split(r.cells[es], ',')) l.edges.push_back(csv::to_int(t, r, e));
      l.cost = csv::to_double(t, r, r.cells[c]);
      inst.pool.push_back(std::move(l));
    }
  }
  {
    const Table t = csv::read(dir / "config.csv");
    const auto k = t.column("key"), v = t.column("value");
    Params& p = inst.params;
    for (const auto& r : t.rows) {
      const std::string& key = r.cells[k];
      const std::string& val = r.cells[v];
      if (key == "period_T") p.T = csv::to_int(t, r, val);
      else if (key == "periods") {
        p.periods.clear();
        for (const auto& s : csv::split(val, ',')) p.periods.push_back(csv::to_int(t, r, s));
        std::sort(p.periods.begin(), p.periods.end());
        p.periods.erase(std::unique(p.periods.begin(), p.periods.end()), p.periods.end());
      } else if (key.rfind("gamma_", 0) == 0 && key.size() == 7 && key[6] >= '1' && key[6] <= '5')
        p.gamma[key[6] - '1'] = csv::to_double(t, r, val);
      else if (key == "lambda_1") p.lambda1 = csv::to_double(t, r, val);
      else if (key == "lambda_3") p.lambda3 = csv::to_double(t, r, val);
      else if (key == "lambda_4") p.lambda4 = csv::to_double(t, r, val);
      else if (key == "depot_stop") p.depot_stop = csv::to_int(t, r, val);
      else if (key == "min_turnaround") p.min_turnaround = csv::to_int(t, r, val);
      else if (key == "big_M") p.big_M = csv::to_double(t, r, val);
      else if (key == "big_M_prime") p.big_M_prime = csv::to_double(t, r, val);
      else if (key == "transfer_penalty") p.transfer_penalty = csv::to_double(t, r, val);
      else if (key == "name") inst.name = val;
      else throw ParseError(t.file, r.line, "unknown config key " + key);
    }
  }
  if (std::filesystem::exists(dir / "turnarounds.csv")) {
    const Table t = csv::read(dir / "turnarounds.csv");
    const auto f = t.column("from"), to = t.column("to"), tm = t.column("time"), d = t.column("distance");
    for (const auto& r : t.rows) {
      const Deadhead dh{csv::to_int(t, r, r.cells[tm]), csv::to_double(t, r, r.cells[d])};
      const bool from_depot = r.cells[f] == "depot", to_depot = r.cells[to] == "depot";
      if (from_depot && to_depot) throw ParseError(t.file, r.line, "depot to depot");
      if (from_depot) inst.depot_out[csv::to_int(t, r, r.cells[to])] = dh;
      else if (to_depot) inst.depot_in[csv::to_int(t, r, r.cells[f])] = dh;
      else inst.turnaround[{csv::to_int(t, r, r.cells[f]), csv::to_int(t, r, r.cells[to])}] = dh;
    }
  }
  finalize_lines(inst);
  validate(inst);
  return inst;
}

inline void save_instance(const PtnInstance& inst, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream os(dir / name);
    if (!os) throw IoError("cannot write " + (dir / name).string());
    return os;
  };
  using csv::num;
  {
    auto os = open("stops.csv");
    os << "id;name;L_wait;U_wait;L_trans;U_trans\n";
    for (const auto& s : inst.stops)
      os << s.id << ';' << s.name << ';' << s.L_wait << ';' << s.U_wait << ';' << s.L_trans << ';' << s.U_trans
         << '\n';
  }
  {
    auto os = open("edges.csv");
    os << "id;u;v;length;L_drive;U_drive;f_min;f_max\n";
    for (const auto& e : inst.edges)
      os << e.id << ';' << e.u << ';' << e.v << ';' << num(e.length) << ';' << e.L_drive << ';' << e.U_drive << ';'
         << e.f_min << ';' << e.f_max << '\n';
  }
  {
    auto os = open("od.csv");
    os << "u;v;demand\n";
    for (const auto& [uv, c] : inst.od) os << uv.first << ';' << uv.second << ';' << num(c) << '\n';
  }
  {
    auto os = open("pool.csv");
    os << "line_id;edge_ids;cost\n";
    for (const auto& l : inst.pool) os << l.id << ';' << csv::join(l.edges, ',') << ';' << num(l.cost) << '\n';
  }
  {
    const Params& p = inst.params;
    auto os = open("config.csv");
    os << "key;value\n";
    os << "name;" << inst.name << '\n';
    os << "period_T;" << p.T << '\n';
    os << "periods;" << csv::join(p.periods, ',') << '\n';
    for (int i = 0; i < 5; ++i) os << "gamma_" << i + 1 << ';' << num(p.gamma[i]) << '\n';
    os << "lambda_1;" << num(p.lambda1) << "\nlambda_3;" << num(p.lambda3) << "\nlambda_4;" << num(p.lambda4) << '\n';
    if (p.depot_stop) os << "depot_stop;" << *p.depot_stop << '\n';
    os << "min_turnaround;" << p.min_turnaround << '\n';
    if (p.big_M) os << "big_M;" << num(*p.big_M) << '\n';
    if (p.big_M_prime) os << "big_M_prime;" << num(*p.big_M_prime) << '\n';
    if (p.transfer_penalty != 0.0) os << "transfer_penalty;" << num(p.transfer_penalty) << '\n';
  }
  if (!inst.turnaround.empty() || !inst.depot_out.empty() || !inst.depot_in.empty()) {
    auto os = open("turnarounds.csv");
    os << "from;to;time;distance\n";
    for (const auto& [k, d] : inst.turnaround)
      os << k.first << ';' << k.second << ';' << d.time << ';' << num(d.distance) << '\n';
    for (const auto& [l, d] : inst.depot_out) os << "depot;" << l << ';' << d.time << ';' << num(d.distance) << '\n';
    for (const auto& [l, d] : inst.depot_in) os << l << ";depot;" << d.time << ';' << num(d.distance) << '\n';
  }
}

}  // namespace transit::ptn
