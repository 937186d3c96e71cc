#include <algorithm>
#include <unordered_map>

#include "lcre/rewriting.hpp"

namespace lcre {

namespace {

struct Edge {
  std::optional<Term> expanded;
  std::vector<CalcStep> pre;   // expanded -> source
  TraceStep rule;
  std::vector<CalcStep> calc;  // normalization after the rule step
};

struct NodeInfo {
  int depth = 0;
  std::optional<Term> parent;
  Edge edge;
};

using NodeMap = std::unordered_map<Term, NodeInfo, TermHash>;

std::vector<std::pair<Term, Edge>> successors(const Term& u, const CETheory& th, const StepPools& pools) {
  std::vector<std::pair<Term, Edge>> out;
  for (auto& rs : rule_step_candidates(u, th, pools)) {
    Edge e;
    if (rs.expanded) {
      e.expanded = rs.expanded;
      e.pre = calc_sequence(*th.model, *rs.expanded);
    }
    e.rule.kind = StepKind::Rule;
    e.rule.pos = rs.pos;
    e.rule.dir = rs.dir;
    e.rule.equation = rs.equation;
    e.rule.witness = rs.witness;
    e.rule.result = rs.result;
    e.calc = calc_sequence(*th.model, rs.result);
    Term n = e.calc.empty() ? rs.result : e.calc.back().result;
    out.emplace_back(std::move(n), std::move(e));
  }
  return out;
}

void append_calc(std::vector<TraceStep>& out, const std::vector<CalcStep>& calc) {
  for (const auto& c : calc) {
    TraceStep s;
    s.kind = StepKind::Calc;
    s.pos = c.pos;
    s.dir = Direction::LeftToRight;
    s.result = c.result;
    out.push_back(std::move(s));
  }
}

// Steps from the end of `calc` (started at `origin`) back to `origin`.
void append_reverse_calc(std::vector<TraceStep>& out, const Term& origin, const std::vector<CalcStep>& calc) {
  for (std::size_t i = calc.size(); i-- > 0;) {
    TraceStep s;
    s.kind = StepKind::Calc;
    s.pos = calc[i].pos;
    s.dir = Direction::RightToLeft;
    s.result = i == 0 ? origin : calc[i - 1].result;
    out.push_back(std::move(s));
  }
}

void append_edge(std::vector<TraceStep>& out, const Edge& e) {
  if (e.expanded) append_reverse_calc(out, *e.expanded, e.pre);
  out.push_back(e.rule);
  append_calc(out, e.calc);
}

// The edge went parent -> rule -> calc -> child; walk it backwards.
void append_edge_reversed(std::vector<TraceStep>& out, const Edge& e, const Term& parent) {
  append_reverse_calc(out, *e.rule.result, e.calc);
  TraceStep r = e.rule;
  r.dir = flip(r.dir);
  r.result = e.expanded ? *e.expanded : parent;
  out.push_back(std::move(r));
  append_calc(out, e.pre);
}

// Forward edges from the root of `map` to `node`, in order.
std::vector<const NodeInfo*> path_to(const NodeMap& map, const Term& node) {
  std::vector<const NodeInfo*> chain;
  Term cur = node;
  while (true) {
    const NodeInfo& info = map.at(cur);
    if (!info.parent) break;
    chain.push_back(&info);
    cur = *info.parent;
  }
  return {chain.rbegin(), chain.rend()};
}

}  // namespace

std::optional<ConversionTrace> conversion_search(const Term& s, const Term& t, const CETheory& th,
                                                 const SearchOptions& opt) {
  if (!(s.sort() == t.sort())) return std::nullopt;
  const UnderlyingModel& m = *th.model;
  auto s_calc = calc_sequence(m, s);
  auto t_calc = calc_sequence(m, t);
  Term s0 = s_calc.empty() ? s : s_calc.back().result;
  Term t0 = t_calc.empty() ? t : t_calc.back().result;

  auto build = [&](const NodeMap& fwd, const NodeMap& bwd, const Term& meet) {
    ConversionTrace tr;
    tr.start = s;
    append_calc(tr.steps, s_calc);
    for (const NodeInfo* info : path_to(fwd, meet)) append_edge(tr.steps, info->edge);
    auto back = path_to(bwd, meet);
    for (auto it = back.rbegin(); it != back.rend(); ++it)
      append_edge_reversed(tr.steps, (*it)->edge, *(*it)->parent);
    append_reverse_calc(tr.steps, t, t_calc);
    return tr;
  };

  NodeMap fwd;
  NodeMap bwd;
  fwd[s0] = NodeInfo{};
  bwd[t0] = NodeInfo{};
  if (s0 == t0) return build(fwd, bwd, s0);
  if (opt.calc_only || opt.bound <= 0) return std::nullopt;

  StepPools pools = StepPools::defaults(th, {s, t}, opt.seeds, opt.int_pool);
  const std::size_t base = std::max(s0.size(), t0.size());
  std::vector<std::size_t> caps;
  for (int slack : opt.size_slack) caps.push_back(base + static_cast<std::size_t>(slack));
  caps.push_back(SIZE_MAX);

  for (std::size_t cap : caps) {
    fwd.clear();
    bwd.clear();
    fwd[s0] = NodeInfo{};
    bwd[t0] = NodeInfo{};
    std::vector<Term> f_front{s0};
    std::vector<Term> b_front{t0};
    int f_depth = 0;
    int b_depth = 0;
    std::size_t visited = 2;
    bool pruned = false;
    bool exhausted = false;
    while (f_depth + b_depth < opt.bound && (!f_front.empty() || !b_front.empty()) && !exhausted) {
      bool forward = !f_front.empty() && (b_front.empty() || f_front.size() <= b_front.size());
      NodeMap& mine = forward ? fwd : bwd;
      NodeMap& other = forward ? bwd : fwd;
      std::vector<Term>& front = forward ? f_front : b_front;
      int& depth = forward ? f_depth : b_depth;
      std::vector<Term> next;
      for (const Term& u : front) {
        for (auto& [v, edge] : successors(u, th, pools)) {
          if (v.size() > cap) {
            pruned = true;
            continue;
          }
          if (mine.count(v)) continue;
          NodeInfo info;
          info.depth = depth + 1;
          info.parent = u;
          info.edge = std::move(edge);
          mine.emplace(v, std::move(info));
          if (other.count(v)) return build(fwd, bwd, v);
          next.push_back(v);
          if (++visited > opt.max_nodes) exhausted = true;
        }
        if (exhausted) break;
      }
      ++depth;
      front = std::move(next);
    }
    // Nothing was cut away by the cap: larger caps cannot help.
    if (!pruned && !exhausted) break;
  }
  return std::nullopt;
}

std::vector<std::pair<Term, ConversionTrace>> reachable(const Term& t, const CETheory& th,
                                                        const StepPools& pools, int depth,
                                                        std::size_t max_nodes) {
  const UnderlyingModel& m = *th.model;
  auto t_calc = calc_sequence(m, t);
  Term t0 = t_calc.empty() ? t : t_calc.back().result;
  NodeMap map;
  map[t0] = NodeInfo{};
  std::vector<Term> order{t0};
  std::vector<Term> front{t0};
  for (int d = 0; d < depth && !front.empty() && map.size() < max_nodes; ++d) {
    std::vector<Term> next;
    for (const Term& u : front) {
      for (auto& [v, edge] : successors(u, th, pools)) {
        if (map.count(v)) continue;
        NodeInfo info;
        info.depth = d + 1;
        info.parent = u;
        info.edge = std::move(edge);
        map.emplace(v, std::move(info));
        order.push_back(v);
        next.push_back(v);
        if (map.size() >= max_nodes) break;
      }
      if (map.size() >= max_nodes) break;
    }
    front = std::move(next);
  }
  std::vector<std::pair<Term, ConversionTrace>> out;
  for (const Term& v : order) {
    ConversionTrace tr;
    tr.start = t;
    append_calc(tr.steps, t_calc);
    for (const NodeInfo* info : path_to(map, v)) append_edge(tr.steps, info->edge);
    out.emplace_back(v, std::move(tr));
  }
  return out;
}

}  // namespace lcre
