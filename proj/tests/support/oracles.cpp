#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>

#include "faasflow/core/topology.hpp"

namespace faasflow::testing {

using nlohmann::json;

std::vector<std::string> oracle_topo(const WorkflowDAG& d) {
  std::vector<std::string> order;
  std::set<std::string> placed;
  while (order.size() < d.nodes.size()) {
    std::string best;
    for (const auto& n : d.nodes) {
      if (placed.count(n.node_id)) continue;
      bool ready = true;
      for (const auto& e : d.edges)
        if (e.target == n.node_id && !e.from_start() && !placed.count(e.source)) ready = false;
      if (ready && (best.empty() || n.node_id < best)) best = n.node_id;
    }
    order.push_back(best);
    placed.insert(best);
  }
  return order;
}

std::map<std::string, std::map<std::string, bool>> oracle_closure(const WorkflowDAG& d) {
  std::map<std::string, std::map<std::string, bool>> r;
  for (const auto& a : d.nodes)
    for (const auto& b : d.nodes) r[a.node_id][b.node_id] = false;
  for (const auto& e : d.edges)
    if (!e.from_start()) r[e.source][e.target] = true;
  for (const auto& k : d.nodes)
    for (const auto& i : d.nodes)
      for (const auto& j : d.nodes)
        if (r[i.node_id][k.node_id] && r[k.node_id][j.node_id]) r[i.node_id][j.node_id] = true;
  return r;
}

std::map<std::string, std::string> oracle_matching(const WorkflowDAG& pred, const WorkflowDAG& truth) {
  std::map<std::string, std::vector<std::string>> t_by_fn, p_by_fn;
  for (const auto& id : oracle_topo(truth)) t_by_fn[truth.find_node(id)->function.id].push_back(id);
  for (const auto& id : oracle_topo(pred)) p_by_fn[pred.find_node(id)->function.id].push_back(id);
  std::map<std::string, std::string> m;
  for (const auto& [f, ts] : t_by_fn)
    for (std::size_t k = 0; k < ts.size() && k < p_by_fn[f].size(); ++k) m[ts[k]] = p_by_fn[f][k];
  return m;
}

double oracle_selection(const WorkflowDAG& pred, const WorkflowDAG& truth) {
  if (truth.nodes.empty()) return 1.0;
  std::map<std::string, int> t, p;
  for (const auto& n : truth.nodes) ++t[n.function.id];
  for (const auto& n : pred.nodes) ++p[n.function.id];
  std::size_t common = 0;
  for (const auto& [f, c] : t) common += std::min(c, p[f]);
  return static_cast<double>(common) / truth.nodes.size();
}

double oracle_ordering(const WorkflowDAG& pred, const WorkflowDAG& truth) {
  auto m = oracle_matching(pred, truth);
  auto rt = oracle_closure(truth);
  auto rp = oracle_closure(pred);
  auto order = oracle_topo(pred);
  auto pos = [&](const std::string& id) { return std::find(order.begin(), order.end(), id) - order.begin(); };
  std::size_t pairs = 0, kept = 0;
  for (const auto& a : truth.nodes)
    for (const auto& b : truth.nodes) {
      if (!rt[a.node_id][b.node_id]) continue;
      ++pairs;
      if (!m.count(a.node_id) || !m.count(b.node_id)) continue;
      auto x = m[a.node_id], y = m[b.node_id];
      if (rp[x][y] || (!rp[y][x] && pos(x) < pos(y))) ++kept;
    }
  return pairs == 0 ? 1.0 : static_cast<double>(kept) / pairs;
}

double oracle_dependency(const WorkflowDAG& pred, const WorkflowDAG& truth) {
  using Tuple = std::tuple<std::string, std::string, std::string>;
  auto m = oracle_matching(pred, truth);
  std::set<std::string> matched_pred;
  for (const auto& [t, p] : m) matched_pred.insert(p);
  auto label = [](const WorkflowDAG& d, const std::string& id) {
    return id == kStartNodeId ? std::string("START") : d.find_node(id)->function.id;
  };
  std::vector<Tuple> t, p;
  for (const auto& e : truth.edges)
    if (e.binding) t.emplace_back(label(truth, e.source), label(truth, e.target), e.binding->target_param);
  for (const auto& e : pred.edges)
    if (e.binding && matched_pred.count(e.target) && (e.from_start() || matched_pred.count(e.source)))
      p.emplace_back(label(pred, e.source), label(pred, e.target), e.binding->target_param);
  if (t.empty()) return 1.0;
  std::size_t hits = 0;
  for (const auto& x : t)
    if (auto it = std::find(p.begin(), p.end(), x); it != p.end()) {
      ++hits;
      p.erase(it);
    }
  return static_cast<double>(hits) / t.size();
}

json arithmetic(const FunctionSpec& fn, const json& args) {
  double acc = static_cast<double>(std::hash<std::string>{}(fn.id) % 7);
  int weight = 1;
  for (const auto& p : fn.inputs) {
    if (args.contains(p.name)) acc += weight * args.at(p.name).get<double>();
    ++weight;
  }
  json out = json::object();
  for (std::size_t k = 0; k < fn.outputs.size(); ++k) out[fn.outputs[k].name] = acc * (k + 2) + 1;
  return out;
}

json reference_sink_outputs(const WorkflowDAG& dag, const json& inputs) {
  std::map<std::string, json> memo;
  std::function<json(const std::string&)> outputs_of = [&](const std::string& node_id) -> json {
    if (auto it = memo.find(node_id); it != memo.end()) return it->second;
    json args = json::object();
    for (const auto& e : dag.edges) {
      if (e.target != node_id || !e.binding) continue;
      args[e.binding->target_param] = e.from_start() ? inputs.at(e.binding->target_param)
                                                     : outputs_of(e.source).at(*e.binding->source_param);
    }
    return memo[node_id] = arithmetic(dag.find_node(node_id)->function, args);
  };
  std::set<std::string> sources;
  for (const auto& e : dag.edges) sources.insert(e.source);
  json out = json::object();
  for (const auto& n : dag.nodes)
    if (!sources.count(n.node_id)) {
      auto values = outputs_of(n.node_id);
      for (const auto& [k, v] : values.items()) out[n.node_id + "." + k] = v;
    }
  return out;
}

std::set<std::string> descendants(const WorkflowDAG& dag, const std::string& root) {
  std::set<std::string> out;
  std::vector<std::string> stack = {root};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    for (const auto& e : dag.edges)
      if (e.source == cur && out.insert(e.target).second) stack.push_back(e.target);
  }
  return out;
}

namespace {

std::string malformed(llm::TemplateId id) {
  switch (id) {
    case llm::TemplateId::Select: return R"({"function_id": "not_a_candidate"})";
    case llm::TemplateId::Order: return R"(["n0", "n0"])";
    case llm::TemplateId::Classify: return R"({"source": {"node_id": "n99", "output": "x"}})";
    default: return "I am not sure.";
  }
}

}  // namespace

std::string FuzzReplies::operator()(const llm::BackendCall& call) {
  std::lock_guard lock(mutex_);
  const auto& req = call.request;
  if (call.attempt == 1 && coin(0.15)) return malformed(req.template_id);
  switch (req.template_id) {
    case llm::TemplateId::Plan:
      return json(plan_).dump();
    case llm::TemplateId::Select: {
      std::uniform_int_distribution<std::size_t> pick(0, req.constraints.choices.size() - 1);
      return json{{"function_id", req.constraints.choices[pick(rng_)]}}.dump();
    }
    case llm::TemplateId::Order: {
      auto order = req.constraints.choices;
      std::shuffle(order.begin(), order.end(), rng_);
      last_order_ = order;
      return json(order).dump();
    }
    case llm::TemplateId::Classify: {
      if (coin(0.3)) return R"({"source": "INPUT"})";
      std::uniform_int_distribution<std::size_t> pick(0, req.constraints.catalog.size() - 1);
      auto [n, o] = req.constraints.catalog[pick(rng_)];
      return json{{"source", {{"node_id", n}, {"output", o}}}}.dump();
    }
    default:
      throw llm::BackendError("unexpected template");
  }
}

std::vector<std::string> FuzzReplies::last_order() const {
  std::lock_guard lock(mutex_);
  return last_order_;
}

std::vector<FunctionSpec> fuzz_functions(std::mt19937_64& rng) {
  static const std::vector<std::string> names = {"url", "text", "count", "image_url", "report"};
  std::uniform_int_distribution<int> n_inputs(0, 3), n_outputs(1, 2), pick(0, names.size() - 1);
  std::vector<FunctionSpec> fns;
  for (int f = 0; f < 12; ++f) {
    FunctionSpec fn;
    fn.id = fn.name = "fn_" + std::to_string(f);
    fn.description = "step number " + std::to_string(f);
    fn.endpoint = "http://127.0.0.1:9/fn/" + fn.id;
    std::set<std::string> used;
    for (int i = n_inputs(rng); i > 0; --i) {
      auto n = names[pick(rng)];
      if (used.insert(n).second)
        fn.inputs.push_back({n, DataType::String, "", std::bernoulli_distribution(0.8)(rng)});
    }
    used.clear();
    for (int i = n_outputs(rng); i > 0; --i) {
      auto n = names[pick(rng)];
      if (used.insert(n).second) fn.outputs.push_back({n, DataType::String, "", true});
    }
    fns.push_back(std::move(fn));
  }
  return fns;
}

std::vector<std::string> dataflow_violations(const WorkflowDAG& dag, const std::vector<std::string>& order) {
  std::vector<std::string> out;
  try {
    topological_order(dag);
  } catch (const std::exception& e) {
    out.push_back(std::string("cyclic: ") + e.what());
  }

  std::set<std::string> reached = {std::string(kStartNodeId)};
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& e : dag.edges)
      if (reached.count(e.source) && reached.insert(e.target).second) grew = true;
  }
  for (const auto& n : dag.nodes)
    if (!reached.count(n.node_id)) out.push_back(n.node_id + " unreachable from start");

  for (const auto& n : dag.nodes)
    for (const auto& p : n.function.inputs) {
      auto bindings = std::count_if(dag.edges.begin(), dag.edges.end(), [&](const DataFlowEdge& e) {
        return e.target == n.node_id && e.binding && e.binding->target_param == p.name;
      });
      if (p.required ? bindings != 1 : bindings > 1)
        out.push_back(n.node_id + "." + p.name + " has " + std::to_string(bindings) + " bindings");
    }

  std::map<std::string, std::size_t> position = {{std::string(kStartNodeId), 0}};
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i + 1;
  for (const auto& e : dag.edges) {
    auto s = position.find(e.source), t = position.find(e.target);
    if (s == position.end() || t == position.end() || s->second >= t->second)
      out.push_back("forward reference " + e.source + " -> " + e.target);
  }
  return out;
}

double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::pair<double, std::string>> brute_force_ranking(const TableEmbedder& embedder,
                                                                const std::vector<std::string>& ids,
                                                                const std::string& query) {
  std::vector<std::pair<double, std::string>> all;
  for (const auto& id : ids) all.emplace_back(naive_cosine(embedder.table.at(id), embedder.table.at(query)), id);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  return all;
}

}  // namespace faasflow::testing
