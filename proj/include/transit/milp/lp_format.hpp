#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "transit/error.hpp"
#include "transit/milp/model.hpp"

// CPLEX-LP-style text subset: Minimize / Subject To / Bounds / Generals /
// Binaries / End. No ranges, no SOS, no quadratic terms. Every token is
// separated by whitespace, and every variable gets an explicit bounds line in
// declaration order so the parser can restore the original ordering.

namespace transit::milp {

namespace detail {

inline std::string fmt17(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void export_lp(const MilpModel& model, std::ostream& os) {
  if (!model.frozen()) throw ModelError("export_lp needs a frozen model");
  const auto& vars = model.vars();
  auto terms = [&](const LinExpr& e) {
    int k = 0;
    for (const auto& [v, c] : e.terms()) {
      if (k > 0 && k % 8 == 0) os << "\n   ";
      os << (c < 0 ? " - " : " + ") << detail::fmt17(std::abs(c)) << ' ' << vars[v.index].name;
      ++k;
    }
  };
  os << "\\ exported by transit\n";
  os << "Minimize\n obj:";
  terms(model.objective());
  const double k0 = model.objective().constant();
  if (k0 != 0.0 || !model.objective().has_terms())
    os << (k0 < 0 ? " - " : " + ") << detail::fmt17(std::abs(k0));
  os << "\nSubject To\n";
  for (const auto& c : model.constraints()) {
    os << ' ' << c.label << ':';
    terms(c.expr);
    os << ' ' << to_string(c.sense) << ' ' << detail::fmt17(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& d : vars)
    os << ' ' << detail::fmt17(d.lo) << " <= " << d.name << " <= " << detail::fmt17(d.hi) << '\n';
  os << "Generals\n";
  for (const auto& d : vars)
    if (d.domain == Domain::Integer) os << ' ' << d.name << '\n';
  os << "Binaries\n";
  for (const auto& d : vars)
    if (d.domain == Domain::Binary) os << ' ' << d.name << '\n';
  os << "End\n";
  if (!os) throw IoError("failed writing LP text");
}

inline std::string export_lp(const MilpModel& model) {
  std::ostringstream os;
  export_lp(model, os);
  return os.str();
}

inline void export_lp_file(const MilpModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  export_lp(model, os);
}

// Reads the subset written by export_lp back into a frozen model.
inline MilpModel parse_lp(const std::string& text) {
  enum class Section { None, Objective, Constraints, Bounds, Generals, Binaries, End };
  std::vector<std::pair<Section, std::vector<std::string>>> sections;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto p = line.find('\\'); p != std::string::npos) line.erase(p);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    std::string rest;
    std::getline(ls, rest);
    const std::string head = first + (rest.rfind(" To", 0) == 0 || rest == " To" ? " To" : "");
    Section s = Section::None;
    if (first == "Minimize") s = Section::Objective;
    else if (head == "Subject To") s = Section::Constraints;
    else if (first == "Bounds") s = Section::Bounds;
    else if (first == "Generals") s = Section::Generals;
    else if (first == "Binaries") s = Section::Binaries;
    else if (first == "End") s = Section::End;
    if (s != Section::None) {
      sections.push_back({s, {}});
      continue;
    }
    if (sections.empty()) throw ParseError("<lp>", 0, "text before first section");
    std::istringstream toks(line);
    for (std::string tok; toks >> tok;) sections.back().second.push_back(tok);
  }

  auto is_number = [](const std::string& s) {
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return !s.empty() && end == s.c_str() + s.size();
  };

  std::vector<std::string> order;
  std::map<std::string, std::pair<double, double>> bounds;
  std::set<std::string> generals, binaries;
  for (const auto& [sec, toks] : sections) {
    if (sec == Section::Bounds) {
      // "lo <= name <= hi"
      for (std::size_t i = 0; i + 4 < toks.size(); i += 5) {
        const std::string& name = toks[i + 2];
        order.push_back(name);
        bounds[name] = {std::stod(toks[i]), std::stod(toks[i + 4])};
      }
    } else if (sec == Section::Generals) {
      generals.insert(toks.begin(), toks.end());
    } else if (sec == Section::Binaries) {
      binaries.insert(toks.begin(), toks.end());
    }
  }

  MilpModel model;
  std::map<std::string, VarId> ids;
  auto var = [&](const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    VarId id;
    if (binaries.count(name)) {
      id = model.add_binary(name);
      if (auto b = bounds.find(name); b != bounds.end()) model.set_bounds(id, b->second.first, b->second.second);
    } else {
      auto found = bounds.find(name);
      if (found == bounds.end()) throw ParseError("<lp>", 0, "variable without bounds: " + name);
      const auto b = found->second;
      id = generals.count(name) ? model.add_integer(name, b.first, b.second)
                                : model.add_continuous(name, b.first, b.second);
    }
    ids.emplace(name, id);
    return id;
  };
  for (const auto& name : order) var(name);
  for (const auto& name : binaries) var(name);

  // Parses "[label:] (+|- coef name | +|- const)* [sense rhs]".
  auto parse_expr = [&](const std::vector<std::string>& toks, std::size_t& i, LinExpr& e) {
    while (i < toks.size()) {
      const std::string& t = toks[i];
      if (t == "<=" || t == ">=" || t == "=" || t.back() == ':') return;
      double sign = 1.0;
      if (t == "+" || t == "-") {
        sign = t == "-" ? -1.0 : 1.0;
        ++i;
      }
      if (i >= toks.size()) throw ParseError("<lp>", 0, "dangling sign");
      double coef = 1.0;
      if (is_number(toks[i])) {
        coef = std::stod(toks[i]);
        ++i;
        const bool name_follows = i < toks.size() && !is_number(toks[i]) && toks[i] != "+" &&
                                  toks[i] != "-" && toks[i] != "<=" && toks[i] != ">=" &&
                                  toks[i] != "=" && toks[i].back() != ':';
        if (!name_follows) {
          e.add_constant(sign * coef);
          continue;
        }
      }
      e.add(var(toks[i]), sign * coef);
      ++i;
    }
  };

  for (const auto& [sec, toks] : sections) {
    std::size_t i = 0;
    if (sec == Section::Objective) {
      if (i < toks.size() && toks[i].back() == ':') ++i;
      LinExpr obj;
      parse_expr(toks, i, obj);
      model.set_objective(obj);
    } else if (sec == Section::Constraints) {
      int anon = 0;
      while (i < toks.size()) {
        std::string label;
        if (toks[i].back() == ':') {
          label = toks[i].substr(0, toks[i].size() - 1);
          ++i;
        } else {
          label = "R" + std::to_string(anon++);
        }
        LinExpr e;
        parse_expr(toks, i, e);
        if (i + 1 >= toks.size()) throw ParseError("<lp>", 0, "constraint " + label + " lacks rhs");
        const std::string& s = toks[i];
        const Sense sense = s == "<=" ? Sense::LessEqual : s == ">=" ? Sense::GreaterEqual : Sense::Equal;
        const double rhs = std::stod(toks[i + 1]);
        i += 2;
        model.add_constraint(std::move(e), sense, rhs, label);
      }
    }
  }
  model.freeze();
  return model;
}

}  // namespace transit::milp
