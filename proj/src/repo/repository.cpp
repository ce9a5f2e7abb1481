#include "faasflow/repo/repository.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace faasflow {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : "; ") + item;
  return out;
}

}  // namespace

InvalidFunctionError::InvalidFunctionError(std::string id, std::vector<std::string> problems)
    : Error("invalid function '" + id + "': " + join(problems)), problems_(std::move(problems)) {}

std::string embedding_text(const FunctionSpec& spec) {
  std::string text = spec.name;
  if (!spec.description.empty()) text += "\n" + spec.description;
  for (const auto* params : {&spec.inputs, &spec.outputs}) {
    for (const auto& p : *params) {
      text += "\n" + p.name;
      if (!p.description.empty()) text += ": " + p.description;
    }
  }
  return text;
}

std::vector<FunctionSpec> load_function_file(const std::filesystem::path& path) {
  auto doc = parse_json(read_file(path), path.string());
  std::vector<FunctionSpec> specs;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i)
      specs.push_back(function_from_json(doc[i], "$[" + std::to_string(i) + "]"));
  } else {
    specs.push_back(function_from_json(doc));
  }
  return specs;
}

FunctionRepository::FunctionRepository(std::shared_ptr<const EmbeddingProvider> provider)
    : provider_(std::move(provider)), entries_(std::make_shared<const std::vector<Entry>>()) {}

std::string FunctionRepository::register_function(FunctionSpec spec) {
  if (auto problems = check_function_spec(spec); !problems.empty())
    throw InvalidFunctionError(spec.id, std::move(problems));
  if (find(spec.id)) throw DuplicateIdError(spec.id);
  auto embedding = provider_->embed(embedding_text(spec));
  auto id = spec.id;
  std::vector<Entry> batch;
  batch.push_back({std::move(spec), std::move(embedding)});
  insert(std::move(batch));
  return id;
}

void FunctionRepository::register_functions(std::vector<FunctionSpec> specs) {
  std::vector<Entry> batch;
  batch.reserve(specs.size());
  for (auto& spec : specs) {
    if (auto problems = check_function_spec(spec); !problems.empty())
      throw InvalidFunctionError(spec.id, std::move(problems));
    auto embedding = provider_->embed(embedding_text(spec));
    batch.push_back({std::move(spec), std::move(embedding)});
  }
  insert(std::move(batch));
}

void FunctionRepository::insert(std::vector<Entry> batch) {
  auto by_id = [](const Entry& a, const Entry& b) { return a.spec.id < b.spec.id; };
  std::sort(batch.begin(), batch.end(), by_id);
  for (std::size_t i = 1; i < batch.size(); ++i)
    if (batch[i].spec.id == batch[i - 1].spec.id) throw DuplicateIdError(batch[i].spec.id);

  std::unique_lock lock(mutex_);
  auto next = std::make_shared<std::vector<Entry>>();
  next->reserve(entries_->size() + batch.size());
  std::merge(entries_->begin(), entries_->end(), std::make_move_iterator(batch.begin()),
             std::make_move_iterator(batch.end()), std::back_inserter(*next), by_id);
  for (std::size_t i = 1; i < next->size(); ++i)
    if ((*next)[i].spec.id == (*next)[i - 1].spec.id) throw DuplicateIdError((*next)[i].spec.id);
  entries_ = std::move(next);
}

FunctionRepository::Snapshot FunctionRepository::snapshot() const {
  std::shared_lock lock(mutex_);
  return entries_;
}

std::vector<RankedFunction> FunctionRepository::top_k(std::string_view query,
                                                      std::size_t k) const {
  if (size() == 0) throw EmptyRepositoryError();
  return top_k(provider_->embed(query), k);
}

std::vector<RankedFunction> FunctionRepository::top_k(const EmbeddingVector& query,
                                                      std::size_t k) const {
  if (k == 0) throw std::invalid_argument("top_k requires k >= 1");
  auto entries = snapshot();
  if (entries->empty()) throw EmptyRepositoryError();

  std::vector<std::pair<double, const Entry*>> scored;
  scored.reserve(entries->size());
  for (const auto& entry : *entries) scored.emplace_back(cosine_similarity(query, entry.embedding), &entry);
  auto count = std::min(k, scored.size());
  // Equal scores resolve by ascending id.
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(count),
                    scored.end(), [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second->spec.id < b.second->spec.id;
                    });
  std::vector<RankedFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back({scored[i].second->spec, scored[i].first});
  return out;
}

std::optional<FunctionSpec> FunctionRepository::find(std::string_view id) const {
  auto entries = snapshot();
  auto pos = std::lower_bound(entries->begin(), entries->end(), id,
                              [](const Entry& e, std::string_view key) { return e.spec.id < key; });
  if (pos == entries->end() || pos->spec.id != id) return std::nullopt;
  return pos->spec;
}

std::vector<FunctionSpec> FunctionRepository::list() const {
  std::vector<FunctionSpec> out;
  for (const auto& entry : *snapshot()) out.push_back(entry.spec);
  return out;
}

std::size_t FunctionRepository::size() const { return snapshot()->size(); }

FunctionResolver FunctionRepository::resolver() const {
  return [entries = snapshot()](std::string_view id) -> std::optional<FunctionSpec> {
    auto pos = std::lower_bound(entries->begin(), entries->end(), id,
                                [](const Entry& e, std::string_view key) { return e.spec.id < key; });
    if (pos == entries->end() || pos->spec.id != id) return std::nullopt;
    return pos->spec;
  };
}

void FunctionRepository::save(const std::filesystem::path& dir) const {
  auto entries = snapshot();
  std::filesystem::create_directories(dir / "functions");

  Json sidecar = Json::object();
  if (std::filesystem::exists(dir / "embeddings.json"))
    sidecar = parse_json(read_file(dir / "embeddings.json"), "embeddings.json");
  auto& mine = sidecar[provider_->id()];
  mine = Json::object();
  for (const auto& entry : *entries) {
    write_file(dir / "functions" / (entry.spec.id + ".json"), dump_pretty(function_to_json(entry.spec)));
    mine[entry.spec.id] = entry.embedding.values;
  }
  write_file(dir / "embeddings.json", sidecar.dump() + "\n");
}

std::unique_ptr<FunctionRepository> FunctionRepository::load(
    const std::filesystem::path& dir, std::shared_ptr<const EmbeddingProvider> provider) {
  auto repo = std::make_unique<FunctionRepository>(std::move(provider));
  if (!std::filesystem::exists(dir / "functions")) return repo;

  Json cached = Json::object();
  if (std::filesystem::exists(dir / "embeddings.json")) {
    auto sidecar = parse_json(read_file(dir / "embeddings.json"), "embeddings.json");
    if (auto it = sidecar.find(repo->provider_->id()); it != sidecar.end()) cached = *it;
  }

  std::vector<std::filesystem::path> files;
  for (const auto& item : std::filesystem::directory_iterator(dir / "functions"))
    if (item.path().extension() == ".json") files.push_back(item.path());
  std::sort(files.begin(), files.end());

  std::vector<Entry> batch;
  for (const auto& file : files) {
    for (auto& spec : load_function_file(file)) {
      if (auto problems = check_function_spec(spec); !problems.empty())
        throw InvalidFunctionError(spec.id, std::move(problems));
      EmbeddingVector embedding;
      if (auto it = cached.find(spec.id); it != cached.end())
        embedding.values = it->get<std::vector<double>>();
      if (embedding.dimension() != repo->provider_->dimension())
        embedding = repo->provider_->embed(embedding_text(spec));
      batch.push_back({std::move(spec), std::move(embedding)});
    }
  }
  repo->insert(std::move(batch));
  return repo;
}

}  // namespace faasflow
