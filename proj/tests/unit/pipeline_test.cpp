#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "faasflow/core/serialize.hpp"
#include "faasflow/core/topology.hpp"
#include "faasflow/pipeline/workflow_generator.hpp"
#include "oracles.hpp"

using namespace faasflow;
using llm::BackendError;
using llm::TemplateId;

namespace {

/// Backend answering through a callback; records every call.
class FunctionBackend final : public llm::LlmBackend {
 public:
  using Handler = std::function<std::string(const llm::BackendCall&)>;
  explicit FunctionBackend(Handler handler) : handler_(std::move(handler)) {}

  std::string complete(const llm::BackendCall& call) override {
    {
      std::lock_guard lock(mutex_);
      calls_.push_back(call.request.template_id);
    }
    return handler_(call);
  }

  std::size_t calls(TemplateId id) const {
    std::lock_guard lock(mutex_);
    return std::count(calls_.begin(), calls_.end(), id);
  }

 private:
  Handler handler_;
  mutable std::mutex mutex_;
  std::vector<TemplateId> calls_;
};

ParameterSpec param(std::string name, DataType type = DataType::String, bool required = true) {
  return {std::move(name), type, "", required};
}

FunctionSpec function(std::string id, std::string description, std::vector<ParameterSpec> inputs,
                      std::vector<ParameterSpec> outputs) {
  FunctionSpec fn;
  fn.name = id;
  fn.endpoint = "http://127.0.0.1:9/fn/" + id;
  fn.id = std::move(id);
  fn.description = std::move(description);
  fn.inputs = std::move(inputs);
  fn.outputs = std::move(outputs);
  return fn;
}

std::vector<FunctionSpec> catalog_functions() {
  return {
      function("fetch_image", "Download an image from a web page", {param("page_url")},
               {param("image_url")}),
      function("resize_image", "Resize an image to a given width", {param("image_url"), param("width", DataType::Number)},
               {param("resized_image_url")}),
      function("send_email", "Send an email with an attachment",
               {param("to"), param("subject", DataType::String, false), param("attachment_url")},
               {param("message_id")}),
      function("send_sms", "Send a text message to a phone", {param("phone"), param("text")},
               {param("sms_id")}),
      function("fetch_report", "Fetch the latest sales report", {}, {param("report_url")}),
  };
}

std::shared_ptr<FunctionRepository> make_repo(const std::vector<FunctionSpec>& fns) {
  auto repo = std::make_shared<FunctionRepository>(std::make_shared<TokenHashEmbedder>());
  repo->register_functions(fns);
  return repo;
}

std::string quoted_list(const std::vector<std::string>& items) {
  return nlohmann::json(items).dump();
}

struct Harness {
  std::shared_ptr<FunctionBackend> backend;
  llm::LlmGateway gateway;

  explicit Harness(FunctionBackend::Handler h)
      : backend(std::make_shared<FunctionBackend>(std::move(h))), gateway(backend) {}
};

WorkflowNode node(std::size_t index, std::string text, FunctionSpec fn) {
  return {"n" + std::to_string(index), {index, std::move(text)}, std::move(fn)};
}

}  // namespace

// ---- func-identifier ----

TEST(PlanTasks, PassesScriptedSubTasksThroughVerbatim) {
  Harness h([](const llm::BackendCall&) {
    return R"(["resize image", "send email with attachment"])";
  });
  auto repo = make_repo(catalog_functions());
  FuncIdentifier fi(*repo, h.gateway);
  auto tasks = fi.plan_tasks({"resize the image then email it"});
  ASSERT_EQ(tasks.size(), 2u);
  EXPECT_EQ(tasks[0].text, "resize image");
  EXPECT_EQ(tasks[0].index, 0u);
  EXPECT_EQ(tasks[1].text, "send email with attachment");
  EXPECT_EQ(tasks[1].index, 1u);
}

TEST(PlanTasks, SingleActionQueryGivesOneSubTask) {
  Harness h([](const llm::BackendCall&) { return R"(["send an sms"])"; });
  auto repo = make_repo(catalog_functions());
  EXPECT_EQ(FuncIdentifier(*repo, h.gateway).plan_tasks({"text my phone"}).size(), 1u);
}

TEST(PlanTasks, EmptyListIsEmptyPlanError) {
  Harness h([](const llm::BackendCall&) { return "[]"; });
  auto repo = make_repo(catalog_functions());
  EXPECT_THROW(FuncIdentifier(*repo, h.gateway).plan_tasks({"do nothing"}), EmptyPlanError);
}

TEST(PlanTasks, BackendFailureNamesStage) {
  Harness h([](const llm::BackendCall&) -> std::string { throw UnavailableError("connection refused"); });
  auto repo = make_repo(catalog_functions());
  try {
    FuncIdentifier(*repo, h.gateway).plan_tasks({"x"});
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "plan");
    EXPECT_NE(std::string(e.what()).find("connection refused"), std::string::npos);
  }
}

TEST(SelectFunction, SingleCandidateSkipsLlm) {
  Harness h([](const llm::BackendCall&) -> std::string { throw BackendError("unexpected call"); });
  auto repo = make_repo(catalog_functions());
  FuncIdentifier fi(*repo, h.gateway);
  auto fns = catalog_functions();
  auto chosen = fi.select_function({"q"}, {0, "send email"}, {{fns[2], 0.5}});
  EXPECT_EQ(chosen.id, "send_email");
  EXPECT_EQ(h.backend->calls(TemplateId::Select), 0u);
}

TEST(SelectFunction, ScriptedChoiceAmongCandidates) {
  Harness h([](const llm::BackendCall& call) {
    EXPECT_NE(call.request.bindings.at("candidates").find("- send_sms: "), std::string::npos);
    return R"({"function_id": "send_email"})";
  });
  auto repo = make_repo(catalog_functions());
  auto fns = catalog_functions();
  auto chosen = FuncIdentifier(*repo, h.gateway)
                    .select_function({"email it"}, {0, "send email"}, {{fns[3], 0.6}, {fns[2], 0.5}});
  EXPECT_EQ(chosen.id, "send_email");
}

TEST(SelectFunction, IdOutsideCandidatesWithoutRetriesIsSelectionError) {
  Harness h([](const llm::BackendCall&) { return R"({"function_id": "make_coffee"})"; });
  auto repo = make_repo(catalog_functions());
  auto fns = catalog_functions();
  FuncIdentifier fi(*repo, h.gateway, 5, {.max_retries = 0});
  EXPECT_THROW(fi.select_function({"q"}, {0, "send email"}, {{fns[2], 0.5}, {fns[3], 0.4}}),
               SelectionError);
  EXPECT_EQ(h.backend->calls(TemplateId::Select), 1u);
}

TEST(Identify, NodeIdsFollowSubTaskIndex) {
  Harness h([](const llm::BackendCall& call) -> std::string {
    if (call.request.template_id == TemplateId::Plan) return R"(["resize image", "send email"])";
    return nlohmann::json{{"function_id", call.request.bindings.at("subtask") == "resize image"
                                               ? "resize_image"
                                               : "send_email"}}
        .dump();
  });
  auto repo = make_repo(catalog_functions());
  auto nodes = FuncIdentifier(*repo, h.gateway, 5).identify({"resize then email"});
  ASSERT_EQ(nodes.size(), 2u);
  EXPECT_EQ(nodes[0].node_id, "n0");
  EXPECT_EQ(nodes[0].function.id, "resize_image");
  EXPECT_EQ(nodes[1].node_id, "n1");
  EXPECT_EQ(nodes[1].function.id, "send_email");
}

TEST(Identify, SevenSubTasksGiveSevenNodesFromTopK) {
  const std::size_t k = 3;
  std::vector<std::string> plan = {"download image", "resize image", "send email", "send sms",
                                   "fetch report",   "resize image", "send email"};
  Harness h([&](const llm::BackendCall& call) -> std::string {
    if (call.request.template_id == TemplateId::Plan) return quoted_list(plan);
    // Always the last candidate, to check it really came from the top-k.
    return nlohmann::json{{"function_id", call.request.constraints.choices.back()}}.dump();
  });
  auto repo = make_repo(catalog_functions());
  auto nodes = FuncIdentifier(*repo, h.gateway, k).identify({"a long errand"});
  ASSERT_EQ(nodes.size(), plan.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto top = repo->top_k(plan[i], k);
    EXPECT_EQ(nodes[i].function.id, top.back().function.id);
    EXPECT_EQ(nodes[i].subtask.text, plan[i]);
  }
}

TEST(Identify, SelectionFailureCitesSubTaskIndex) {
  Harness h([](const llm::BackendCall& call) -> std::string {
    if (call.request.template_id == TemplateId::Plan) return R"(["a image", "b email", "c sms"])";
    if (call.request.bindings.at("subtask") == "c sms") return R"({"function_id": "nope"})";
    return nlohmann::json{{"function_id", call.request.constraints.choices.front()}}.dump();
  });
  auto repo = make_repo(catalog_functions());
  try {
    FuncIdentifier(*repo, h.gateway, 5, {.max_retries = 1}).identify({"q"});
    FAIL();
  } catch (const SelectionError& e) {
    EXPECT_EQ(e.subtask_index(), 2u);
    EXPECT_NE(std::string(e.what()).find("sub-task 2"), std::string::npos);
  }
}

TEST(Identify, EmptyRepositoryFailsBeforeAnyCall) {
  Harness h([](const llm::BackendCall&) -> std::string { throw BackendError("unexpected call"); });
  FunctionRepository repo(std::make_shared<TokenHashEmbedder>());
  EXPECT_THROW(FuncIdentifier(repo, h.gateway).identify({"q"}), EmptyRepositoryError);
}

// ---- workflow-generator ----

TEST(OrderNodes, SingleNodeIsIdentityWithoutLlm) {
  Harness h([](const llm::BackendCall&) -> std::string { throw BackendError("unexpected call"); });
  auto fns = catalog_functions();
  std::vector<WorkflowNode> nodes = {node(0, "fetch", fns[4])};
  EXPECT_EQ(WorkflowGenerator(h.gateway).order_nodes(nodes, {"q"}), nodes);
}

TEST(OrderNodes, ScriptedSemanticOrder) {
  Harness h([](const llm::BackendCall&) { return R"(["n1", "n0"])"; });
  auto fns = catalog_functions();
  std::vector<WorkflowNode> nodes = {node(0, "send email", fns[2]), node(1, "fetch report", fns[4])};
  auto ordered = WorkflowGenerator(h.gateway).order_nodes(nodes, {"email me the report"});
  ASSERT_EQ(ordered.size(), 2u);
  EXPECT_EQ(ordered[0].function.id, "fetch_report");
  EXPECT_EQ(ordered[1].function.id, "send_email");
}

TEST(OrderNodes, OmittedNodeWithoutRetriesIsOrderingError) {
  Harness h([](const llm::BackendCall&) { return R"(["n1"])"; });
  auto fns = catalog_functions();
  std::vector<WorkflowNode> nodes = {node(0, "a", fns[2]), node(1, "b", fns[4])};
  EXPECT_THROW(WorkflowGenerator(h.gateway, {.max_retries = 0}).order_nodes(nodes, {"q"}), OrderingError);
}

TEST(ClassifyParameter, EmptyCatalogIsInputWithoutLlm) {
  Harness h([](const llm::BackendCall&) -> std::string { throw BackendError("unexpected call"); });
  auto fns = catalog_functions();
  auto c = WorkflowGenerator(h.gateway).classify_parameter(node(0, "x", fns[1]), fns[1].inputs[0], {}, {"q"});
  EXPECT_TRUE(c.is_input());
}

TEST(ClassifyParameter, ScriptedOutputReference) {
  Harness h([](const llm::BackendCall& call) {
    EXPECT_NE(call.request.bindings.at("catalog").find("n0.resized_image_url"), std::string::npos);
    return R"({"source": {"node_id": "n0", "output": "resized_image_url"}})";
  });
  auto fns = catalog_functions();
  OutputCatalog catalog{{{"n0", param("resized_image_url")}}};
  auto c = WorkflowGenerator(h.gateway)
               .classify_parameter(node(1, "email", fns[2]), param("attachment_url"), catalog, {"q"});
  ASSERT_FALSE(c.is_input());
  EXPECT_EQ(*c.output, std::make_pair(std::string("n0"), std::string("resized_image_url")));
}

TEST(ClassifyParameter, ForwardReferenceFailsAfterRetries) {
  Harness h([](const llm::BackendCall&) { return R"({"source": {"node_id": "n5", "output": "x"}})"; });
  auto fns = catalog_functions();
  OutputCatalog catalog{{{"n0", param("resized_image_url")}}};
  try {
    WorkflowGenerator(h.gateway, {.max_retries = 2})
        .classify_parameter(node(1, "email", fns[2]), param("attachment_url"), catalog, {"q"});
    FAIL();
  } catch (const ClassificationError& e) {
    EXPECT_EQ(e.node_id(), "n1");
    EXPECT_EQ(e.param(), "attachment_url");
  }
  EXPECT_EQ(h.backend->calls(TemplateId::Classify), 3u);
}

TEST(BuildDataflow, TwoRequiredInputsOnFirstNodeBindFromStart) {
  Harness h([](const llm::BackendCall&) -> std::string { throw BackendError("unexpected call"); });
  auto fns = catalog_functions();
  auto flow = WorkflowGenerator(h.gateway).build_dataflow({node(0, "resize", fns[1])}, {"q"});
  ASSERT_EQ(flow.edges.size(), 2u);
  for (const auto& e : flow.edges) EXPECT_TRUE(e.from_start());
  ASSERT_EQ(flow.user_inputs.size(), 2u);
  EXPECT_EQ(flow.user_inputs[0].name, "image_url");
  EXPECT_EQ(flow.user_inputs[1].name, "width");
}

TEST(BuildDataflow, SecondNodeConsumesFirstOutputPlusUserValue) {
  // n1 = send_sms(phone: user, text: n0.report_url); n0 = fetch_report() first.
  Harness h([](const llm::BackendCall& call) -> std::string {
    if (call.request.bindings.at("parameter").rfind("phone", 0) == 0) return R"({"source": "INPUT"})";
    return R"({"source": {"node_id": "n0", "output": "report_url"}})";
  });
  auto fns = catalog_functions();
  auto flow = WorkflowGenerator(h.gateway)
                  .build_dataflow({node(0, "fetch", fns[4]), node(1, "text it", fns[3])}, {"q"});
  std::set<std::tuple<std::string, std::string, std::string>> got;
  for (const auto& e : flow.edges) got.emplace(e.source, e.target, e.binding ? e.binding->target_param : "");
  EXPECT_EQ(got, (std::set<std::tuple<std::string, std::string, std::string>>{
                     {"__start__", "n0", ""}, {"__start__", "n1", "phone"}, {"n0", "n1", "text"}}));
}

TEST(BuildDataflow, ZeroInputNodeGetsOrderingEdgeFromPredecessor) {
  Harness h([](const llm::BackendCall&) -> std::string { return R"({"source": "INPUT"})"; });
  auto fns = catalog_functions();
  auto flow = WorkflowGenerator(h.gateway)
                  .build_dataflow({node(0, "text", fns[3]), node(1, "fetch", fns[4])}, {"q"});
  std::vector<DataFlowEdge> into_n1;
  for (const auto& e : flow.edges)
    if (e.target == "n1") into_n1.push_back(e);
  ASSERT_EQ(into_n1.size(), 1u);
  EXPECT_EQ(into_n1[0].source, "n0");
  EXPECT_TRUE(into_n1[0].is_ordering_only());
}

TEST(BuildDataflow, OptionalInputBoundOnlyWhenSupplied) {
  Harness h([](const llm::BackendCall&) -> std::string { return R"({"source": "INPUT"})"; });
  auto fns = catalog_functions();
  WorkflowGenerator gen(h.gateway);
  auto has_subject = [](const Dataflow& f) {
    return std::any_of(f.edges.begin(), f.edges.end(),
                       [](const DataFlowEdge& e) { return e.binding && e.binding->target_param == "subject"; });
  };
  EXPECT_FALSE(has_subject(gen.build_dataflow({node(0, "email", fns[2])}, {"q"})));
  UserQuery supplied{"q", {{"subject", "hi"}}};
  EXPECT_TRUE(has_subject(gen.build_dataflow({node(0, "email", fns[2])}, supplied)));
}

TEST(BuildDataflow, SharedUserInputNamesAppearOnce) {
  Harness h([](const llm::BackendCall&) -> std::string { return R"({"source": "INPUT"})"; });
  auto fns = catalog_functions();
  auto flow = WorkflowGenerator(h.gateway)
                  .build_dataflow({node(0, "a", fns[1]), node(1, "b", fns[1])}, {"q"});
  EXPECT_EQ(flow.user_inputs.size(), 2u);
  EXPECT_EQ(flow.edges.size(), 4u);
}

TEST(AssembleDag, ResultValidatesAndCarriesQuery) {
  Harness h([](const llm::BackendCall&) -> std::string { return R"({"source": "INPUT"})"; });
  auto fns = catalog_functions();
  std::vector<WorkflowNode> nodes = {node(0, "resize", fns[1])};
  UserQuery q{"resize it"};
  auto dag = WorkflowGenerator::assemble_dag("wf", nodes, WorkflowGenerator(h.gateway).build_dataflow(nodes, q), q);
  EXPECT_TRUE(validate_dag(dag).empty());
  EXPECT_EQ(dag.query, "resize it");
}

TEST(AssembleDag, DuplicateBindingIsAssemblyError) {
  auto fns = catalog_functions();
  std::vector<WorkflowNode> nodes = {node(0, "fetch", fns[0])};
  Dataflow flow;
  flow.user_inputs = {param("page_url")};
  flow.edges = {{"__start__", "n0", ParamBinding{"page_url", std::nullopt}},
                {"__start__", "n0", ParamBinding{"page_url", std::nullopt}}};
  try {
    WorkflowGenerator::assemble_dag("wf", nodes, flow, {"q"});
    FAIL();
  } catch (const AssemblyError& e) {
    EXPECT_FALSE(e.report().ok());
    EXPECT_EQ(e.stage(), "assemble");
  }
}

TEST(DefaultDagId, StableAndShaped) {
  auto id = default_dag_id("resize the image then email it");
  EXPECT_EQ(id, default_dag_id("resize the image then email it"));
  EXPECT_EQ(id.size(), 15u);
  EXPECT_EQ(id.rfind("wf-", 0), 0u);
  EXPECT_NE(id, default_dag_id("something else"));
}

// Three-step fixture: fetch_image -> resize_image -> send_email.
namespace {

std::string three_node_reply(const llm::BackendCall& call) {
  const auto& b = call.request.bindings;
  switch (call.request.template_id) {
    case TemplateId::Plan:
      return R"(["download the image from the page", "resize the image", "email the resized image"])";
    case TemplateId::Select: {
      const auto& s = b.at("subtask");
      std::string id = s.find("download") != std::string::npos ? "fetch_image"
                       : s.find("email") != std::string::npos  ? "send_email"
                                                                : "resize_image";
      return nlohmann::json{{"function_id", id}}.dump();
    }
    case TemplateId::Order:
      return R"(["n0", "n1", "n2"])";
    case TemplateId::Classify: {
      const auto& p = b.at("parameter");
      if (p.rfind("image_url", 0) == 0) return R"({"source": {"node_id": "n0", "output": "image_url"}})";
      if (p.rfind("attachment_url", 0) == 0)
        return R"({"source": {"node_id": "n1", "output": "resized_image_url"}})";
      return R"({"source": "INPUT"})";
    }
    default:
      throw BackendError("unexpected template");
  }
}

}  // namespace

TEST(GenerateWorkflow, ThreeNodeFixtureMatchesGolden) {
  Harness h(three_node_reply);
  auto repo = make_repo(catalog_functions());
  FuncIdentifier fi(*repo, h.gateway);
  WorkflowGenerator gen(h.gateway);
  auto dag = generate_workflow(fi, gen, {"download the picture on my page, shrink it and email it to me"},
                               "resize-and-email");
  auto text = canonical_serialize(dag);
  auto golden_path = std::filesystem::path(FAASFLOW_FIXTURE_DIR) / "dags" / "resize_and_email.json";
  if (std::getenv("FAASFLOW_REGENERATE_GOLDENS")) {
    std::filesystem::create_directories(golden_path.parent_path());
    std::ofstream(golden_path) << text;
  }
  std::ifstream in(golden_path);
  ASSERT_TRUE(in) << golden_path;
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(text, golden.str());
  EXPECT_EQ(text, canonical_serialize(generate_workflow(
                      fi, gen, {"download the picture on my page, shrink it and email it to me"},
                      "resize-and-email")));
}

// ---- dataflow invariants over fuzzed scripted runs ----


TEST(DataflowInvariants, FiveHundredFuzzedRuns) {
  std::mt19937_64 rng(20240611);
  std::size_t generated = 0;
  for (int run = 0; run < 500; ++run) {
    auto fns = faasflow::testing::fuzz_functions(rng);
    auto repo = make_repo(fns);
    std::uniform_int_distribution<int> size(1, 10);
    std::vector<std::string> plan;
    for (int i = size(rng); i > 0; --i) plan.push_back("step number " + std::to_string(rng() % 12));

    auto replies = std::make_shared<faasflow::testing::FuzzReplies>(rng(), plan);
    Harness h([replies](const llm::BackendCall& c) { return (*replies)(c); });
    FuncIdentifier fi(*repo, h.gateway, 4, {.max_retries = 2});
    WorkflowGenerator gen(h.gateway, {.max_retries = 2});
    UserQuery q{"fuzzed query " + std::to_string(run)};
    if (run % 3 == 0) q.user_inputs = {{"text", "hello"}};

    auto dag = generate_workflow(fi, gen, q, "fuzz-" + std::to_string(run));
    ++generated;
    SCOPED_TRACE("run " + std::to_string(run));
    ASSERT_EQ(dag.nodes.size(), plan.size());

    auto report = validate_dag(dag);
    EXPECT_TRUE(report.ok()) << report.to_string();
    auto order = plan.size() == 1 ? std::vector<std::string>{"n0"} : replies->last_order();
    for (const auto& v : faasflow::testing::dataflow_violations(dag, order)) ADD_FAILURE() << v;
  }
  EXPECT_EQ(generated, 500u);
}

TEST(DataflowInvariants, ReplayReproducesDataflow) {
  auto fns = catalog_functions();
  Harness a(three_node_reply), b(three_node_reply);
  std::vector<WorkflowNode> nodes = {node(0, "download", fns[0]), node(1, "resize", fns[1]),
                                     node(2, "email", fns[2])};
  EXPECT_EQ(WorkflowGenerator(a.gateway).build_dataflow(nodes, {"q"}).edges,
            WorkflowGenerator(b.gateway).build_dataflow(nodes, {"q"}).edges);
}
