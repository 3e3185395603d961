#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ssn/io.hpp"
#include "ssn/ontology.hpp"
#include "ssn/semsim.hpp"
#include "ssn/threshold.hpp"

namespace ssn {

struct ServiceConfig {
  std::filesystem::path data_dir = "ssn-data";
  std::string bind_addr = "127.0.0.1:8080";
  unsigned workers = 2;
  std::size_t queue_capacity = 64;
  /// When false, jobs stay queued until start() is called.
  bool start_workers = true;

  /// Reads SSN_DATA_DIR, SSN_BIND_ADDR, SSN_WORKERS and SSN_QUEUE_CAPACITY
  /// on top of the defaults. Throws Error(InvalidConfig) on unparsable values.
  static ServiceConfig from_env();
};

/// Transport-neutral request; the HTTP layer fills it from the wire.
struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string accept;
  std::string body;
  /// Multipart parts by field name.
  std::map<std::string, std::string> parts;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

enum class JobState { Queued, Running, Done, Failed };
std::string_view to_string(JobState s);

/// One (measure, namespace) slice of an analysis.
struct SubResult {
  Measure measure = Measure::Lin;
  Namespace ns = Namespace::BP;
  JobState state = JobState::Queued;
  std::optional<std::string> error;
  bool converged = false;

  std::string key() const;
};

struct Dataset {
  std::string id;
  std::string organism;
  std::string created_at;
  Json summary;  // term count, product counts, GAF diagnostics
};

struct AnalysisJob {
  std::string id;
  std::string dataset_id;
  std::string ns;       // BP, MF, CC or ALL
  std::string measure;  // a measure name or ALL
  Mixer mixer = Mixer::BMA;
  ThresholdConfig threshold_config;
  std::uint64_t seed = 0;
  JobState state = JobState::Queued;
  std::optional<std::string> error;
  std::string created_at;
  std::vector<SubResult> results;
};

Json to_json(const Dataset& d);
Json to_json(const AnalysisJob& j);

/// Dataset store, job queue and artifact routes. Everything lives under
/// data_dir: index.json, datasets/<id>/ and analyses/<id>/<measure>-<ns>/.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& req);

  /// Starts the worker pool if it is not running yet.
  void start();
  /// Blocks until no job is queued or running.
  void wait_idle();
  const ServiceConfig& config() const noexcept { return config_; }

 private:
  Response upload_dataset(const Request& req);
  Response create_analysis(const Request& req);
  Response get_analysis(const std::string& id);
  Response get_artifact(const std::string& id, const std::string& what, const Request& req);
  Response list_datasets();
  Response get_dataset(const std::string& id);
  Response list_analyses();

  void load_index();
  void save_index_locked();
  std::string fresh_id_locked(const char* prefix);
  void worker_loop(std::stop_token stop);
  void run_job(const std::string& id);

  ServiceConfig config_;
  std::mutex mu_;
  std::condition_variable_any cv_;
  std::condition_variable_any idle_cv_;
  std::map<std::string, Dataset> datasets_;
  std::map<std::string, AnalysisJob> jobs_;
  std::vector<std::string> job_order_;
  std::deque<std::string> queue_;
  std::size_t running_ = 0;
  std::uint64_t id_state_;
  std::vector<std::jthread> workers_;
};

}  // namespace ssn
