#include "ssn/service.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ssn/annotations.hpp"
#include "ssn/error.hpp"
#include "ssn/pipeline.hpp"

namespace fs = std::filesystem;

namespace ssn {

namespace {

constexpr const char* kIndexFile = "index.json";

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Write-then-rename so a crash never leaves a half-written artifact behind.
void write_atomic(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, p);
}

Response json_response(int status, const Json& body) { return Response{status, "application/json", dump(body), {}}; }

Response error_response(int status, std::string_view code, const std::string& message, Json details = Json::object()) {
  return json_response(status, Json{{"code", code}, {"message", message}, {"details", std::move(details)}});
}

Response error_response(int status, const Error& e) {
  Json details = Json::object();
  if (e.line()) details["line"] = *e.line();
  return error_response(status, to_string(e.code()), e.what(), std::move(details));
}

std::optional<JobState> parse_state(std::string_view s) {
  for (auto st : {JobState::Queued, JobState::Running, JobState::Done, JobState::Failed})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

Json optional_string(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool accepts(const std::string& accept, std::string_view type) { return accept.find(type) != std::string::npos; }

unsigned env_unsigned(const char* name, unsigned fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0' || n == 0) throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be a positive integer");
  return static_cast<unsigned>(n);
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  if (const char* d = std::getenv("SSN_DATA_DIR"); d && *d) c.data_dir = d;
  if (const char* b = std::getenv("SSN_BIND_ADDR"); b && *b) c.bind_addr = b;
  c.workers = env_unsigned("SSN_WORKERS", c.workers);
  c.queue_capacity = env_unsigned("SSN_QUEUE_CAPACITY", static_cast<unsigned>(c.queue_capacity));
  return c;
}

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "?";
}

std::string SubResult::key() const { return std::string(to_string(measure)) + "-" + std::string(to_string(ns)); }

Json to_json(const Dataset& d) {
  Json j = d.summary;
  j["id"] = d.id;
  j["organism"] = d.organism;
  j["created_at"] = d.created_at;
  j["ontology_ref"] = "datasets/" + d.id + "/ontology.obo";
  j["annotation_ref"] = "datasets/" + d.id + "/annotations.gaf";
  return j;
}

Json to_json(const AnalysisJob& job) {
  Json results = Json::array();
  for (const auto& r : job.results) {
    results.push_back(Json{{"measure", to_string(r.measure)},
                           {"namespace", to_string(r.ns)},
                           {"state", to_string(r.state)},
                           {"error", optional_string(r.error)},
                           {"converged", r.converged}});
  }
  return Json{{"id", job.id},
              {"dataset_id", job.dataset_id},
              {"namespace", job.ns},
              {"measure", job.measure},
              {"mixer", to_string(job.mixer)},
              {"threshold_config", threshold_config_to_json(job.threshold_config)},
              {"seed", job.seed},
              {"state", to_string(job.state)},
              {"error", optional_string(job.error)},
              {"created_at", job.created_at},
              {"results", std::move(results)}};
}

namespace {

Dataset dataset_from_json(const Json& j) {
  Dataset d;
  d.id = j.at("id").get<std::string>();
  d.organism = j.at("organism").get<std::string>();
  d.created_at = j.at("created_at").get<std::string>();
  d.summary = j;
  for (const char* k : {"id", "organism", "created_at", "ontology_ref", "annotation_ref"}) d.summary.erase(k);
  return d;
}

AnalysisJob job_from_json(const Json& j) {
  AnalysisJob job;
  job.id = j.at("id").get<std::string>();
  job.dataset_id = j.at("dataset_id").get<std::string>();
  job.ns = j.at("namespace").get<std::string>();
  job.measure = j.at("measure").get<std::string>();
  job.mixer = parse_mixer(j.at("mixer").get<std::string>()).value();
  job.threshold_config = threshold_config_from_json(j.at("threshold_config"));
  job.seed = j.at("seed").get<std::uint64_t>();
  job.state = parse_state(j.at("state").get<std::string>()).value();
  if (!j.at("error").is_null()) job.error = j["error"].get<std::string>();
  job.created_at = j.at("created_at").get<std::string>();
  for (const auto& r : j.at("results")) {
    SubResult s;
    s.measure = parse_measure(r.at("measure").get<std::string>()).value();
    s.ns = parse_namespace(r.at("namespace").get<std::string>()).value();
    s.state = parse_state(r.at("state").get<std::string>()).value();
    if (!r.at("error").is_null()) s.error = r["error"].get<std::string>();
    s.converged = r.at("converged").get<bool>();
    job.results.push_back(std::move(s));
  }
  return job;
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  if (config_.workers == 0) throw Error(ErrorCode::InvalidConfig, "workers must be positive");
  id_state_ = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
  fs::create_directories(config_.data_dir);
  load_index();
  if (config_.start_workers) start();
}

void Service::start() {
  if (!workers_.empty()) return;
  workers_.reserve(config_.workers);
  for (unsigned i = 0; i < config_.workers; ++i) {
    workers_.emplace_back([this](std::stop_token st) { worker_loop(st); });
  }
}

Service::~Service() {
  for (auto& w : workers_) w.request_stop();
  cv_.notify_all();
  workers_.clear();
}

void Service::load_index() {
  auto path = config_.data_dir / kIndexFile;
  if (!fs::exists(path)) return;
  Json index = Json::parse(read_file(path));
  for (const auto& d : index.at("datasets")) {
    auto ds = dataset_from_json(d);
    datasets_.emplace(ds.id, std::move(ds));
  }
  bool changed = false;
  for (const auto& j : index.at("analyses")) {
    auto job = job_from_json(j);
    // A job caught mid-run has partial artifacts; it is not resumed.
    if (job.state == JobState::Running) {
      job.state = JobState::Failed;
      job.error = "interrupted by a service restart";
      changed = true;
    } else if (job.state == JobState::Queued) {
      queue_.push_back(job.id);
    }
    job_order_.push_back(job.id);
    jobs_.emplace(job.id, std::move(job));
  }
  if (changed) save_index_locked();
}

void Service::save_index_locked() {
  Json datasets = Json::array();
  for (const auto& [id, d] : datasets_) datasets.push_back(to_json(d));
  Json analyses = Json::array();
  for (const auto& id : job_order_) analyses.push_back(to_json(jobs_.at(id)));
  write_atomic(config_.data_dir / kIndexFile, dump(Json{{"datasets", datasets}, {"analyses", analyses}}));
}

std::string Service::fresh_id_locked(const char* prefix) {
  for (;;) {
    // splitmix64
    std::uint64_t z = (id_state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%016llx", prefix, static_cast<unsigned long long>(z));
    if (!datasets_.count(buf) && !jobs_.count(buf)) return buf;
  }
}

Response Service::handle(const Request& req) {
  auto seg = split_path(req.path);
  try {
    if (!seg.empty() && seg[0] == "datasets") {
      if (seg.size() == 1 && req.method == "POST") return upload_dataset(req);
      if (seg.size() == 1 && req.method == "GET") return list_datasets();
      if (seg.size() == 2 && req.method == "GET") return get_dataset(seg[1]);
    } else if (!seg.empty() && seg[0] == "analyses") {
      if (seg.size() == 1 && req.method == "POST") return create_analysis(req);
      if (seg.size() == 1 && req.method == "GET") return list_analyses();
      if (seg.size() == 2 && req.method == "GET") return get_analysis(seg[1]);
      if (seg.size() == 3 && req.method == "GET") return get_artifact(seg[1], seg[2], req);
    }
    return error_response(404, "NotFound", "no route for " + req.method + " " + req.path);
  } catch (const Error& e) {
    return error_response(is_input_error(e.code()) ? 400 : 500, e);
  } catch (const std::exception& e) {
    return error_response(500, "InternalError", e.what());
  }
}

Response Service::upload_dataset(const Request& req) {
  auto obo = req.parts.find("obo");
  auto gaf = req.parts.find("gaf");
  if (obo == req.parts.end() || gaf == req.parts.end()) {
    Json missing = Json::array();
    if (obo == req.parts.end()) missing.push_back("obo");
    if (gaf == req.parts.end()) missing.push_back("gaf");
    return error_response(400, "MissingPart", "multipart upload needs obo and gaf parts", Json{{"missing", missing}});
  }
  auto org = req.parts.find("organism");
  std::string organism = org == req.parts.end() ? "" : org->second;

  Json summary;
  try {
    std::istringstream obo_in(obo->second);
    auto graph = parse_obo(obo_in);
    std::istringstream gaf_in(gaf->second);
    auto annotations = load_annotations(gaf_in, graph);
    Json products = Json::object();
    for (auto ns : kAllNamespaces) products[std::string(to_string(ns))] = annotations.corpus(ns).total;
    summary = Json{{"term_count", graph.size()},
                   {"products", products},
                   {"diagnostics", gaf_diagnostics_to_json(annotations.diagnostics)}};
  } catch (const Error& e) {
    return error_response(400, e);
  }

  std::lock_guard lock(mu_);
  Dataset d;
  d.id = fresh_id_locked("d");
  d.organism = organism;
  d.created_at = now_utc();
  d.summary = std::move(summary);
  auto dir = config_.data_dir / "datasets" / d.id;
  write_atomic(dir / "ontology.obo", obo->second);
  write_atomic(dir / "annotations.gaf", gaf->second);
  auto body = to_json(d);
  datasets_.emplace(d.id, std::move(d));
  save_index_locked();
  Response r = json_response(201, body);
  r.headers["Location"] = "/datasets/" + body["id"].get<std::string>();
  return r;
}

Response Service::create_analysis(const Request& req) {
  Json body;
  try {
    body = Json::parse(req.body);
  } catch (const Json::exception& e) {
    return error_response(400, "MalformedJson", e.what());
  }
  if (!body.is_object()) return error_response(400, "MalformedJson", "request body must be a JSON object");
  if (!body.contains("dataset_id") || !body["dataset_id"].is_string())
    return error_response(422, "InvalidConfig", "dataset_id is required", Json{{"field", "dataset_id"}});

  auto field = [&](const char* name, const char* fallback) -> std::optional<std::string> {
    if (!body.contains(name)) return std::string(fallback);
    if (!body[name].is_string()) return std::nullopt;
    return body[name].get<std::string>();
  };
  auto invalid = [](const char* name, const std::string& why) {
    return error_response(422, "InvalidConfig", why, Json{{"field", name}});
  };

  AnalysisJob job;
  job.dataset_id = body["dataset_id"].get<std::string>();

  auto ns = field("namespace", "BP");
  if (!ns) return invalid("namespace", "namespace must be a string");
  if (*ns == "ALL") {
    job.ns = "ALL";
  } else if (auto parsed = parse_namespace(*ns)) {
    job.ns = std::string(to_string(*parsed));
  } else {
    return invalid("namespace", "unknown namespace '" + *ns + "'");
  }

  auto measure = field("measure", "Lin");
  if (!measure) return invalid("measure", "measure must be a string");
  if (*measure == "ALL") {
    job.measure = "ALL";
  } else if (auto parsed = parse_measure(*measure)) {
    job.measure = std::string(to_string(*parsed));
  } else {
    return invalid("measure", "unknown measure '" + *measure + "'");
  }

  auto mixer = field("mixer", "BMA");
  if (!mixer) return invalid("mixer", "mixer must be a string");
  auto parsed_mixer = parse_mixer(*mixer);
  if (!parsed_mixer) return invalid("mixer", "unknown mixer '" + *mixer + "'");
  job.mixer = *parsed_mixer;

  try {
    job.threshold_config = threshold_config_from_json(body.value("threshold_config", Json()));
    validate(job.threshold_config);
  } catch (const Error& e) {
    return error_response(422, e);
  }
  if (body.contains("seed")) {
    if (!body["seed"].is_number_unsigned()) return invalid("seed", "seed must be a non-negative integer");
    job.seed = body["seed"].get<std::uint64_t>();
  }

  std::vector<Namespace> namespaces;
  if (job.ns == "ALL") {
    namespaces.assign(std::begin(kAllNamespaces), std::end(kAllNamespaces));
  } else {
    namespaces.push_back(*parse_namespace(job.ns));
  }
  std::vector<Measure> measures;
  if (job.measure == "ALL") {
    measures.assign(std::begin(kAllMeasures), std::end(kAllMeasures));
  } else {
    measures.push_back(*parse_measure(job.measure));
  }
  for (auto n : namespaces)
    for (auto m : measures) job.results.push_back(SubResult{m, n, JobState::Queued, std::nullopt, false});

  std::lock_guard lock(mu_);
  if (!datasets_.count(job.dataset_id))
    return error_response(404, "NotFound", "unknown dataset '" + job.dataset_id + "'",
                          Json{{"dataset_id", job.dataset_id}});
  std::size_t pending = queue_.size();
  if (pending >= config_.queue_capacity)
    return error_response(503, "QueueFull", "analysis queue is full", Json{{"capacity", config_.queue_capacity}});
  job.id = fresh_id_locked("a");
  job.created_at = now_utc();
  auto out = to_json(job);
  job_order_.push_back(job.id);
  queue_.push_back(job.id);
  jobs_.emplace(job.id, std::move(job));
  save_index_locked();
  cv_.notify_one();
  Response r = json_response(202, out);
  r.headers["Location"] = "/analyses/" + out["id"].get<std::string>();
  return r;
}

Response Service::get_analysis(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return error_response(404, "NotFound", "unknown analysis '" + id + "'");
  return json_response(200, to_json(it->second));
}

Response Service::list_analyses() {
  std::lock_guard lock(mu_);
  Json out = Json::array();
  for (const auto& id : job_order_) out.push_back(to_json(jobs_.at(id)));
  return json_response(200, out);
}

Response Service::list_datasets() {
  std::lock_guard lock(mu_);
  Json out = Json::array();
  for (const auto& [id, d] : datasets_) out.push_back(to_json(d));
  return json_response(200, out);
}

Response Service::get_dataset(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = datasets_.find(id);
  if (it == datasets_.end()) return error_response(404, "NotFound", "unknown dataset '" + id + "'");
  return json_response(200, to_json(it->second));
}

Response Service::get_artifact(const std::string& id, const std::string& what, const Request& req) {
  static const std::set<std::string> kArtifacts = {"matrix", "network", "spectra", "communities"};
  if (!kArtifacts.count(what)) return error_response(404, "NotFound", "no artifact '" + what + "'");

  SubResult sub;
  {
    std::lock_guard lock(mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) return error_response(404, "NotFound", "unknown analysis '" + id + "'");
    const auto& job = it->second;
    if (job.state != JobState::Done)
      return error_response(409, "JobNotDone", "analysis is " + std::string(to_string(job.state)),
                            Json{{"state", to_string(job.state)}, {"error", optional_string(job.error)}});

    auto qm = req.query.find("measure");
    auto qn = req.query.find("namespace");
    std::vector<const SubResult*> matches;
    for (const auto& r : job.results) {
      if (qm != req.query.end() && parse_measure(qm->second) != r.measure) continue;
      if (qn != req.query.end() && parse_namespace(qn->second) != r.ns) continue;
      matches.push_back(&r);
    }
    if (matches.size() != 1) {
      Json keys = Json::array();
      for (const auto* r : matches) keys.push_back(Json{{"measure", to_string(r->measure)}, {"namespace", to_string(r->ns)}});
      if (matches.empty()) return error_response(404, "NotFound", "no result for that measure/namespace");
      return error_response(400, "AmbiguousResult", "select a result with ?measure=&namespace=",
                            Json{{"results", keys}});
    }
    sub = *matches.front();
  }
  if (sub.state != JobState::Done)
    return error_response(409, "ResultFailed", sub.error.value_or("result not available"),
                          Json{{"measure", to_string(sub.measure)}, {"namespace", to_string(sub.ns)}});

  auto dir = config_.data_dir / "analyses" / id / sub.key();
  auto fmt_it = req.query.find("format");
  std::string format = fmt_it == req.query.end() ? "" : fmt_it->second;
  auto serve = [&](const std::string& file, const char* type) {
    return Response{200, type, read_file(dir / file), {}};
  };

  if (what == "matrix") {
    if (format.empty()) format = accepts(req.accept, "text/csv") ? "csv" : "json";
    if (format == "csv") return serve("matrix.csv", "text/csv");
    if (format == "json") return serve("matrix.json", "application/json");
    return error_response(400, "InvalidFormat", "matrix formats are csv and json");
  }
  if (what == "network") {
    auto k = req.query.find("kind");
    std::string kind = k == req.query.end() ? "raw" : k->second;
    if (kind != "raw" && kind != "pruned") return error_response(400, "InvalidQuery", "kind must be raw or pruned");
    if (format.empty()) format = accepts(req.accept, "text/tab-separated-values") ? "tsv" : "json";
    Response r;
    if (format == "tsv") {
      r = serve("network-" + kind + ".tsv", "text/tab-separated-values");
    } else if (format == "json") {
      r = serve("network-" + kind + ".json", "application/json");
    } else {
      return error_response(400, "InvalidFormat", "network formats are tsv and json");
    }
    if (kind == "pruned") r.headers["X-SSN-Converged"] = sub.converged ? "true" : "false";
    return r;
  }
  if (what == "spectra") return serve("spectra.json", "application/json");
  auto on = req.query.find("on");
  std::string which = on == req.query.end() ? "pruned" : on->second;
  if (which != "raw" && which != "pruned") return error_response(400, "InvalidQuery", "on must be raw or pruned");
  return serve("communities-" + which + ".json", "application/json");
}

void Service::worker_loop(std::stop_token stop) {
  for (;;) {
    std::string id;
    {
      std::unique_lock lock(mu_);
      if (!cv_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
      id = queue_.front();
      queue_.pop_front();
      ++running_;
      auto& job = jobs_.at(id);
      job.state = JobState::Running;
      save_index_locked();
    }
    run_job(id);
    {
      std::lock_guard lock(mu_);
      --running_;
    }
    idle_cv_.notify_all();
  }
}

void Service::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && running_ == 0; });
}

void Service::run_job(const std::string& id) {
  AnalysisJob job;
  {
    std::lock_guard lock(mu_);
    job = jobs_.at(id);
  }
  auto dataset_dir = config_.data_dir / "datasets" / job.dataset_id;
  auto job_dir = config_.data_dir / "analyses" / id;

  std::optional<OntologyGraph> graph;
  std::optional<GafResult> annotations;
  std::optional<std::string> setup_error;
  try {
    graph = parse_obo_file(dataset_dir / "ontology.obo");
    std::ifstream gaf(dataset_dir / "annotations.gaf");
    annotations = load_annotations(gaf, *graph);
  } catch (const std::exception& e) {
    setup_error = e.what();
  }

  for (auto& sub : job.results) {
    if (setup_error) {
      sub.state = JobState::Failed;
      sub.error = setup_error;
      continue;
    }
    try {
      const auto& corpus = annotations->corpus(sub.ns);
      auto ic = compute_ic(corpus);
      auto built = build_matrix(corpus_products(corpus), sub.measure, job.mixer, corpus, ic, *graph);
      const auto& m = built.matrix;
      auto c = compare(m, job.threshold_config, job.seed);

      auto dir = job_dir / sub.key();
      write_atomic(dir / "matrix.csv", matrix_to_csv(m));
      write_atomic(dir / "matrix.json", dump(matrix_to_json(m)));
      write_atomic(dir / "network-raw.tsv", network_to_tsv(c.raw));
      write_atomic(dir / "network-raw.json", dump(network_to_json(c.raw)));
      write_atomic(dir / "network-pruned.tsv", network_to_tsv(c.prune.pruned));
      Json pruned = network_to_json(c.prune.pruned);
      pruned["converged"] = c.prune.converged;
      pruned["final_alpha"] = c.prune.final_alpha;
      write_atomic(dir / "network-pruned.json", dump(pruned));
      write_atomic(dir / "spectra.json", dump(spectra_to_json(c.prune, job.threshold_config)));
      write_atomic(dir / "communities-raw.json", dump(communities_to_json(c.raw_partition, c.raw_coherence)));
      Json communities = communities_to_json(c.pruned_partition, c.pruned_coherence);
      communities["converged"] = c.prune.converged;
      write_atomic(dir / "communities-pruned.json", dump(communities));
      write_atomic(dir / "dropped.json", dump(Json(built.dropped)));
      sub.state = JobState::Done;
      sub.converged = c.prune.converged;
    } catch (const std::exception& e) {
      sub.state = JobState::Failed;
      sub.error = e.what();
    }
  }

  bool any_done = false;
  for (const auto& sub : job.results) any_done = any_done || sub.state == JobState::Done;

  std::lock_guard lock(mu_);
  auto& stored = jobs_.at(id);
  stored.results = job.results;
  if (any_done) {
    stored.state = JobState::Done;
  } else {
    stored.state = JobState::Failed;
    stored.error = job.results.empty() ? std::string("no results") : job.results.front().error.value_or("failed");
  }
  save_index_locked();
}

}  // namespace ssn
