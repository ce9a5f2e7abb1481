#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "faasflow/core/serialize.hpp"
#include "faasflow/core/topology.hpp"
#include "faasflow/core/validate.hpp"
#include "random_dag.hpp"

using namespace faasflow;
using faasflow::testing::random_workflow;
using faasflow::testing::resolver_for;

namespace {

const std::string kStart(kStartNodeId);

FunctionSpec make_function(std::string id, std::vector<std::string> required_inputs,
                           std::vector<std::string> outputs) {
  FunctionSpec fn;
  fn.id = id;
  fn.name = id;
  fn.description = "test function " + id;
  fn.endpoint = "http://localhost:8080/" + id;
  for (auto& in : required_inputs) fn.inputs.push_back({in, DataType::String, in, true});
  for (auto& out : outputs) fn.outputs.push_back({out, DataType::String, out, true});
  return fn;
}

WorkflowNode make_node(std::string id, std::size_t index, FunctionSpec fn) {
  return {std::move(id), {index, "do " + fn.id}, std::move(fn)};
}

DataFlowEdge user_edge(std::string target, std::string param) {
  return {kStart, std::move(target), ParamBinding{std::move(param), std::nullopt}};
}

DataFlowEdge output_edge(std::string source, std::string target, std::string target_param,
                         std::string source_param) {
  return {std::move(source), std::move(target),
          ParamBinding{std::move(target_param), std::move(source_param)}};
}

WorkflowDAG single_node_dag() {
  WorkflowDAG dag;
  dag.dag_id = "weather";
  dag.query = "what's the weather";
  dag.start.user_inputs.push_back({"city", DataType::String, "city", true});
  dag.nodes.push_back(make_node("n0", 0, make_function("get_weather", {"city"}, {"forecast"})));
  dag.edges.push_back(user_edge("n0", "city"));
  return dag;
}

// n0 (resize) -> n1 (email), n1 also takes a user address; n2 (log) consumes n1.
WorkflowDAG three_node_dag() {
  WorkflowDAG dag;
  dag.dag_id = "resize-and-mail";
  dag.query = "resize the image then email it and log the receipt";
  dag.start.user_inputs = {{"image_url", DataType::String, "image", true},
                           {"to", DataType::String, "recipient", true}};
  dag.nodes = {make_node("n0", 0, make_function("resize_image", {"image_url"}, {"resized_url"})),
               make_node("n1", 1, make_function("send_email", {"to", "attachment"}, {"receipt"})),
               make_node("n2", 2, make_function("log_event", {"event"}, {}))};
  dag.edges = {user_edge("n0", "image_url"), user_edge("n1", "to"),
               output_edge("n0", "n1", "attachment", "resized_url"),
               output_edge("n1", "n2", "event", "receipt")};
  return dag;
}

std::set<ViolationKind> kinds(const ValidationReport& report) {
  std::set<ViolationKind> out;
  for (const auto& v : report.violations) out.insert(v.kind);
  return out;
}

// Independent validator: adjacency matrix with Floyd-Warshall closure and
// nested-loop binding counts.
std::set<ViolationKind> brute_force_kinds(const WorkflowDAG& dag) {
  std::set<ViolationKind> found;
  std::vector<const WorkflowNode*> nodes;
  auto index_of = [&](const std::string& id) -> int {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i]->node_id == id) return static_cast<int>(i);
    return -1;
  };
  for (const auto& n : dag.nodes) {
    if (n.node_id.empty()) { found.insert(ViolationKind::EmptyNodeId); continue; }
    if (n.node_id == kStart) { found.insert(ViolationKind::ReservedNodeId); continue; }
    if (index_of(n.node_id) >= 0) { found.insert(ViolationKind::DuplicateNodeId); continue; }
    nodes.push_back(&n);
    if (!check_function_spec(n.function).empty()) found.insert(ViolationKind::InvalidFunction);
    if (n.subtask.text.empty()) found.insert(ViolationKind::EmptySubtaskText);
  }
  std::vector<std::size_t> indices;
  for (auto* n : nodes) indices.push_back(n->subtask.index);
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (indices[i] != i) found.insert(ViolationKind::SubtaskIndexGap);

  for (std::size_t i = 0; i < dag.start.user_inputs.size(); ++i) {
    if (dag.start.user_inputs[i].name.empty()) found.insert(ViolationKind::InvalidUserInput);
    for (std::size_t j = 0; j < i; ++j)
      if (!dag.start.user_inputs[i].name.empty() &&
          dag.start.user_inputs[i].name == dag.start.user_inputs[j].name)
        found.insert(ViolationKind::InvalidUserInput);
  }

  const std::size_t n = nodes.size();
  const std::size_t start = n;
  std::vector<std::vector<bool>> reach(n + 1, std::vector<bool>(n + 1, false));
  std::vector<const DataFlowEdge*> live;
  for (const auto& e : dag.edges) {
    int s = e.source == kStart ? static_cast<int>(start) : index_of(e.source);
    int t = index_of(e.target);
    if (s < 0 || t < 0) { found.insert(ViolationKind::UnknownEdgeEndpoint); continue; }
    if (s == t) { found.insert(ViolationKind::SelfLoop); continue; }
    reach[s][t] = true;
    live.push_back(&e);
  }
  for (std::size_t k = 0; k <= n; ++k)
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j <= n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (reach[i][i]) found.insert(ViolationKind::Cycle);
    if (!reach[start][i]) found.insert(ViolationKind::Unreachable);
  }

  for (const auto* e : live) {
    if (!e->binding) continue;
    const auto& b = *e->binding;
    const auto& target_fn = nodes[index_of(e->target)]->function;
    bool target_ok = false;
    for (const auto& in : target_fn.inputs) target_ok |= in.name == b.target_param;
    if (!target_ok) found.insert(ViolationKind::UnknownTargetParam);
    if (e->source == kStart) {
      if (b.source_param) found.insert(ViolationKind::MalformedBinding);
      bool declared = false;
      for (const auto& u : dag.start.user_inputs) declared |= u.name == b.target_param;
      if (!declared) found.insert(ViolationKind::UnknownUserInput);
    } else if (!b.source_param) {
      found.insert(ViolationKind::MalformedBinding);
    } else {
      bool source_ok = false;
      for (const auto& out : nodes[index_of(e->source)]->function.outputs)
        source_ok |= out.name == *b.source_param;
      if (!source_ok) found.insert(ViolationKind::UnknownSourceParam);
    }
  }
  for (auto* node : nodes) {
    for (const auto& in : node->function.inputs) {
      std::size_t count = 0;
      for (const auto* e : live)
        if (e->target == node->node_id && e->binding && e->binding->target_param == in.name)
          ++count;
      if (count > 1) found.insert(ViolationKind::DuplicateBinding);
      if (in.required && count == 0) found.insert(ViolationKind::UnboundParameter);
    }
    // Bindings to unknown params can also collide.
    std::map<std::string, std::size_t> per_param;
    for (const auto* e : live)
      if (e->target == node->node_id && e->binding && ++per_param[e->binding->target_param] > 1)
        found.insert(ViolationKind::DuplicateBinding);
  }
  return found;
}

void mutate(std::mt19937_64& rng, WorkflowDAG& dag) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  switch (pick(9)) {
    case 0:
      if (!dag.edges.empty()) dag.edges.erase(dag.edges.begin() + pick(dag.edges.size()));
      break;
    case 1:
      if (!dag.edges.empty()) dag.edges.push_back(dag.edges[pick(dag.edges.size())]);
      break;
    case 2:
      if (!dag.nodes.empty()) {
        // Reverse an edge between two nodes or add a back edge.
        auto& a = dag.nodes[pick(dag.nodes.size())];
        auto& b = dag.nodes[pick(dag.nodes.size())];
        dag.edges.push_back({a.node_id, b.node_id, std::nullopt});
        dag.edges.push_back({b.node_id, a.node_id, std::nullopt});
      }
      break;
    case 3:
      for (auto& e : dag.edges)
        if (e.binding) { e.binding->target_param = "bogus"; break; }
      break;
    case 4:
      dag.edges.push_back({"ghost", dag.nodes.empty() ? "n0" : dag.nodes[0].node_id, std::nullopt});
      break;
    case 5:
      if (!dag.nodes.empty()) dag.nodes.push_back(dag.nodes[pick(dag.nodes.size())]);
      break;
    case 6:
      if (!dag.nodes.empty()) dag.nodes[pick(dag.nodes.size())].subtask.text.clear();
      break;
    case 7:
      for (auto& e : dag.edges)
        if (e.binding && !e.from_start()) { e.binding->source_param.reset(); break; }
      break;
    case 8:
      if (!dag.start.user_inputs.empty()) dag.start.user_inputs.erase(dag.start.user_inputs.begin());
      break;
  }
}

// Lexicographically least order among all valid topological orders.
std::vector<std::string> brute_force_least_order(const WorkflowDAG& dag) {
  std::vector<std::string> ids;
  for (const auto& n : dag.nodes) ids.push_back(n.node_id);
  std::sort(ids.begin(), ids.end());
  do {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;
    bool ok = true;
    for (const auto& e : dag.edges)
      if (!e.from_start() && pos[e.source] > pos[e.target]) ok = false;
    if (ok) return ids;
  } while (std::next_permutation(ids.begin(), ids.end()));
  return {};
}

}  // namespace

TEST(ValidateDag, MinimalDagIsValid) {
  auto report = validate_dag(single_node_dag());
  EXPECT_TRUE(report.ok()) << report.to_string();
  EXPECT_TRUE(report.violations.empty());
}

TEST(ValidateDag, TwoCycleIsReported) {
  auto dag = three_node_dag();
  dag.edges.push_back({"n2", "n1", std::nullopt});
  auto report = validate_dag(dag);
  EXPECT_TRUE(report.has(ViolationKind::Cycle)) << report.to_string();
}

TEST(ValidateDag, UnboundRequiredInputNamesParameter) {
  auto dag = single_node_dag();
  dag.edges.clear();
  dag.edges.push_back({kStart, "n0", std::nullopt});
  auto report = validate_dag(dag);
  ASSERT_TRUE(report.has(ViolationKind::UnboundParameter));
  EXPECT_EQ(brute_force_kinds(dag), kinds(report));
  bool names_city = false;
  for (const auto& v : report.violations)
    if (v.kind == ViolationKind::UnboundParameter)
      names_city = v.message.find("city") != std::string::npos && v.locus == "n0.city";
  EXPECT_TRUE(names_city);
}

TEST(ValidateDag, DuplicateBindingAndReservedId) {
  auto dag = single_node_dag();
  dag.edges.push_back(user_edge("n0", "city"));
  dag.nodes.push_back(make_node(kStart, 1, make_function("x", {}, {})));
  auto report = validate_dag(dag);
  EXPECT_TRUE(report.has(ViolationKind::DuplicateBinding));
  EXPECT_TRUE(report.has(ViolationKind::ReservedNodeId));
}

TEST(ValidateDag, TypeMismatchIsOnlyAWarning) {
  auto dag = three_node_dag();
  dag.nodes[1].function.inputs[1].data_type = DataType::Number;
  auto report = validate_dag(dag);
  EXPECT_TRUE(report.ok());
  ASSERT_EQ(report.warnings.size(), 1u);
  EXPECT_EQ(report.warnings[0].kind, ViolationKind::TypeMismatch);
}

TEST(ValidateDag, AgreesWithBruteForceOnRandomDags) {
  std::mt19937_64 rng(7);
  std::size_t invalid = 0;
  for (int i = 0; i < 200; ++i) {
    auto wf = random_workflow(rng, {.min_nodes = 1, .max_nodes = 10});
    if (i % 2 == 1) mutate(rng, wf.dag);
    auto report = validate_dag(wf.dag);
    auto expected = brute_force_kinds(wf.dag);
    EXPECT_EQ(expected, kinds(report)) << "case " << i << ": " << report.to_string();
    EXPECT_EQ(expected.empty(), report.ok());
    if (i % 2 == 0) EXPECT_TRUE(report.ok()) << report.to_string();
    invalid += !report.ok();
  }
  // Most mutations must actually break the DAG for the check to mean anything.
  EXPECT_GT(invalid, 60u);
}

TEST(CanonicalSerialize, IsDeterministic) {
  auto dag = three_node_dag();
  EXPECT_EQ(canonical_serialize(dag), canonical_serialize(dag));
  auto shuffled = dag;
  std::reverse(shuffled.nodes.begin(), shuffled.nodes.end());
  std::reverse(shuffled.edges.begin(), shuffled.edges.end());
  EXPECT_EQ(canonical_serialize(dag), canonical_serialize(shuffled));
}

TEST(CanonicalSerialize, StartOnlyDag) {
  WorkflowDAG dag;
  dag.dag_id = "empty";
  dag.query = "nothing";
  auto text = canonical_serialize(dag);
  EXPECT_EQ(text,
            "{\n  \"dag_id\": \"empty\",\n  \"edges\": [],\n  \"nodes\": [],\n"
            "  \"query\": \"nothing\",\n  \"user_inputs\": []\n}\n");
}

TEST(CanonicalSerialize, RejectsInvalidDag) {
  auto dag = single_node_dag();
  dag.edges.clear();
  EXPECT_THROW(canonical_serialize(dag), ValidationError);
}

TEST(CanonicalSerialize, ThreeNodeRoundTripFieldByField) {
  auto dag = three_node_dag();
  auto functions = std::vector<FunctionSpec>{dag.nodes[0].function, dag.nodes[1].function,
                                             dag.nodes[2].function};
  auto parsed = parse_dag(canonical_serialize(dag), resolver_for(functions));
  EXPECT_EQ(parsed.dag_id, dag.dag_id);
  EXPECT_EQ(parsed.query, dag.query);
  EXPECT_EQ(parsed.start.user_inputs, dag.start.user_inputs);
  ASSERT_EQ(parsed.nodes.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(parsed.nodes[i].node_id, dag.nodes[i].node_id);
    EXPECT_EQ(parsed.nodes[i].subtask, dag.nodes[i].subtask);
    EXPECT_EQ(parsed.nodes[i].function, dag.nodes[i].function);
  }
  EXPECT_EQ(parsed.edges, canonicalize(dag).edges);
}

TEST(CanonicalSerialize, RoundTripAndInjectivityOnRandomDags) {
  std::mt19937_64 rng(11);
  std::map<std::string, WorkflowDAG> seen;
  for (int i = 0; i < 200; ++i) {
    auto wf = random_workflow(rng, {.min_nodes = 0, .max_nodes = 10});
    auto text = canonical_serialize(wf.dag);
    auto parsed = parse_dag(text, resolver_for(wf.functions));
    EXPECT_EQ(parsed, canonicalize(wf.dag));
    auto [it, inserted] = seen.emplace(text, canonicalize(wf.dag));
    if (!inserted) EXPECT_EQ(it->second, canonicalize(wf.dag));
  }
}

TEST(ParseDag, DuplicateNodeIdNamesTheId) {
  auto dag = single_node_dag();
  auto doc = dag_to_json(dag);
  doc["nodes"].push_back(doc["nodes"][0]);
  try {
    parse_dag(doc.dump(), resolver_for({dag.nodes[0].function}));
    FAIL() << "expected DuplicateIdError";
  } catch (const DuplicateIdError& e) {
    EXPECT_EQ(e.id(), "n0");
  }
}

TEST(ParseDag, TruncatedDocumentReportsPosition) {
  auto text = canonical_serialize(single_node_dag());
  auto truncated = text.substr(0, text.size() / 2);
  try {
    parse_dag(truncated, resolver_for({single_node_dag().nodes[0].function}));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(e.position(), ParseError::npos);
    EXPECT_LE(e.position(), truncated.size() + 1);
  }
}

TEST(ParseDag, UnknownDataTypeAndFunction) {
  auto dag = single_node_dag();
  auto doc = dag_to_json(dag);
  doc["user_inputs"][0]["data_type"] = "float";
  EXPECT_THROW(parse_dag(doc.dump(), resolver_for({dag.nodes[0].function})), ParseError);
  EXPECT_THROW(parse_dag(canonical_serialize(dag), resolver_for({})), ParseError);
}

TEST(TopologicalOrder, Chain) {
  auto dag = three_node_dag();
  dag.nodes.pop_back();
  dag.edges.pop_back();
  EXPECT_EQ(topological_order(dag), (std::vector<std::string>{"n0", "n1"}));
}

TEST(TopologicalOrder, DiamondMatchesLexicographicallyLeastOrder) {
  WorkflowDAG dag;
  dag.dag_id = "diamond";
  dag.query = "q";
  auto fn = make_function("f", {}, {"out"});
  for (auto id : {"A", "B", "C", "D"}) dag.nodes.push_back(make_node(id, dag.nodes.size(), fn));
  dag.edges = {{kStart, "A", std::nullopt}, {"A", "C", std::nullopt}, {"A", "B", std::nullopt},
               {"C", "D", std::nullopt}, {"B", "D", std::nullopt}};
  auto expected = brute_force_least_order(dag);
  EXPECT_EQ(expected, (std::vector<std::string>{"A", "B", "C", "D"}));
  EXPECT_EQ(topological_order(dag), expected);
}

TEST(TopologicalOrder, IndependentNodesTieBreakById) {
  WorkflowDAG dag;
  auto fn = make_function("f", {}, {});
  dag.nodes = {make_node("B", 0, fn), make_node("A", 1, fn)};
  dag.edges = {{kStart, "B", std::nullopt}, {kStart, "A", std::nullopt}};
  EXPECT_EQ(topological_order(dag), (std::vector<std::string>{"A", "B"}));
}

TEST(TopologicalOrder, CycleErrorListsCycle) {
  WorkflowDAG dag;
  auto fn = make_function("f", {}, {});
  dag.nodes = {make_node("A", 0, fn), make_node("B", 1, fn), make_node("C", 2, fn)};
  dag.edges = {{kStart, "A", std::nullopt}, {"A", "B", std::nullopt}, {"B", "C", std::nullopt},
               {"C", "B", std::nullopt}};
  try {
    topological_order(dag);
    FAIL() << "expected CycleError";
  } catch (const CycleError& e) {
    std::set<std::string> members(e.cycle().begin(), e.cycle().end());
    EXPECT_EQ(members, (std::set<std::string>{"B", "C"}));
    EXPECT_EQ(e.cycle().front(), e.cycle().back());
  }
}

TEST(TopologicalOrder, RandomDagsRespectEveryEdgeAndLeastOrder) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto wf = random_workflow(rng, {.min_nodes = 0, .max_nodes = i < 100 ? 7 : 10});
    auto order = topological_order(wf.dag);
    ASSERT_EQ(order.size(), wf.dag.nodes.size());
    std::map<std::string, std::size_t> pos;
    for (std::size_t j = 0; j < order.size(); ++j) pos[order[j]] = j;
    for (const auto& e : wf.dag.edges)
      if (!e.from_start()) EXPECT_LT(pos[e.source], pos[e.target]);
    if (i < 100) EXPECT_EQ(order, brute_force_least_order(wf.dag));
  }
}

TEST(TopologicalLevels, Diamond) {
  WorkflowDAG dag;
  auto fn = make_function("f", {}, {});
  for (auto id : {"n0", "n1", "n2", "n3"}) dag.nodes.push_back(make_node(id, dag.nodes.size(), fn));
  dag.edges = {{kStart, "n0", std::nullopt}, {"n0", "n1", std::nullopt}, {"n0", "n2", std::nullopt},
               {"n1", "n3", std::nullopt}, {"n2", "n3", std::nullopt}};
  EXPECT_EQ(topological_levels(dag),
            (std::vector<std::vector<std::string>>{{"n0"}, {"n1", "n2"}, {"n3"}}));
}
