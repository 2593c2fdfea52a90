#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "transit/milp/model.hpp"

namespace transit::milp {

struct BlockCount {
  std::string tag;
  std::size_t vars = 0;
  std::size_t cons = 0;
};

// Variables are counted under their own tag. A constraint counts under the
// tag of the variables it touches; constraints spanning several tags form a
// coupling block named like "lin+pass" (tags in first-declaration order).
struct BlockStats {
  std::size_t total_vars = 0;
  std::size_t total_cons = 0;
  std::vector<BlockCount> blocks;

  const BlockCount* find(const std::string& tag) const {
    for (const auto& b : blocks)
      if (b.tag == tag) return &b;
    return nullptr;
  }
};

inline BlockStats model_stats(const MilpModel& model) {
  BlockStats st;
  st.total_vars = model.num_vars();
  st.total_cons = model.num_constraints();
  std::map<std::string, std::size_t> rank;
  for (std::size_t j = 0; j < model.num_vars(); ++j)
    rank.emplace(model.var_tag(VarId{static_cast<std::uint32_t>(j)}), rank.size());

  std::vector<BlockCount> blocks;
  auto slot = [&](const std::string& tag) -> BlockCount& {
    for (auto& b : blocks)
      if (b.tag == tag) return b;
    blocks.push_back({tag, 0, 0});
    return blocks.back();
  };
  for (std::size_t j = 0; j < model.num_vars(); ++j)
    ++slot(model.var_tag(VarId{static_cast<std::uint32_t>(j)})).vars;
  for (const auto& c : model.constraints()) {
    std::vector<std::string> tags;
    for (const auto& [v, a] : c.expr.terms()) tags.push_back(model.var_tag(v));
    std::sort(tags.begin(), tags.end(),
              [&](const auto& x, const auto& y) { return rank[x] < rank[y]; });
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    std::string name;
    for (const auto& t : tags) name += (name.empty() ? "" : "+") + t;
    ++slot(name).cons;
  }
  st.blocks = std::move(blocks);
  return st;
}

inline nlohmann::json to_json(const BlockStats& st) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : st.blocks) blocks.push_back({{"tag", b.tag}, {"vars", b.vars}, {"cons", b.cons}});
  return {{"total_vars", st.total_vars}, {"total_cons", st.total_cons}, {"blocks", blocks}};
}

// Nonzero pattern as (row, column) pairs, for external plotting.
inline std::vector<std::pair<std::size_t, std::size_t>> sparsity(const MilpModel& model) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r = 0; r < model.num_constraints(); ++r)
    for (const auto& [v, a] : model.constraints()[r].expr.terms()) out.emplace_back(r, v.index);
  return out;
}

}  // namespace transit::milp
