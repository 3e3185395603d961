#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracle.hpp"
#include "ssn/error.hpp"
#include "ssn/http_server.hpp"
#include "ssn/pipeline.hpp"
#include "ssn/service.hpp"
#include "support.hpp"

#include <httplib.h>

using namespace ssn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("ssn-service-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ServiceConfig config_for(const fs::path& dir, bool start = true) {
  ServiceConfig c;
  c.data_dir = dir;
  c.workers = 2;
  c.start_workers = start;
  return c;
}

Request get(const std::string& path, std::map<std::string, std::string> query = {}, std::string accept = "") {
  Request r;
  r.method = "GET";
  r.path = path;
  r.query = std::move(query);
  r.accept = std::move(accept);
  return r;
}

Request post_json(const std::string& path, const Json& body) {
  Request r;
  r.method = "POST";
  r.path = path;
  r.body = body.dump();
  return r;
}

Request upload(const std::string& obo, const std::string& gaf, const std::string& organism = "9606") {
  Request r;
  r.method = "POST";
  r.path = "/datasets";
  r.parts["obo"] = obo;
  r.parts["gaf"] = gaf;
  r.parts["organism"] = organism;
  return r;
}

std::string fixture_text(const char* name) { return oracle::slurp(testing::fixture(name).string()); }

Json body(const Response& r) { return Json::parse(r.body); }

std::string upload_fixture(Service& s, const char* stem) {
  auto r = s.handle(upload(fixture_text((std::string(stem) + ".obo").c_str()),
                           fixture_text((std::string(stem) + ".gaf").c_str())));
  REQUIRE(r.status == 201);
  return body(r)["id"].get<std::string>();
}

std::string submit(Service& s, Json request) {
  auto r = s.handle(post_json("/analyses", request));
  REQUIRE(r.status == 202);
  return body(r)["id"].get<std::string>();
}

}  // namespace

TEST_CASE("dataset upload") {
  TempDir tmp;
  Service s(config_for(tmp.path));

  auto ok = s.handle(upload(fixture_text("planted.obo"), fixture_text("planted.gaf")));
  CHECK(ok.status == 201);
  auto d = body(ok);
  CHECK(d["organism"] == "9606");
  CHECK(d["term_count"] == 20);
  CHECK(d["products"]["BP"] == 30);
  CHECK(d["diagnostics"]["skipped_not_qualifier"] == 1);
  CHECK(ok.headers.at("Location") == "/datasets/" + d["id"].get<std::string>());
  CHECK(s.handle(get("/datasets/" + d["id"].get<std::string>())).status == 200);
  CHECK(body(s.handle(get("/datasets"))).size() == 1);

  auto cyclic = s.handle(upload(fixture_text("cycle.obo"), fixture_text("eight.gaf")));
  CHECK(cyclic.status == 400);
  CHECK(body(cyclic)["code"] == "CycleDetected");
  CHECK(body(cyclic).contains("details"));

  Request missing;
  missing.method = "POST";
  missing.path = "/datasets";
  missing.parts["obo"] = fixture_text("eight.obo");
  auto m = s.handle(missing);
  CHECK(m.status == 400);
  CHECK(body(m)["details"]["missing"] == Json::array({"gaf"}));

  auto bad_gaf = s.handle(upload(fixture_text("eight.obo"), "!only comments\n"));
  CHECK(bad_gaf.status == 400);
  CHECK(body(bad_gaf)["code"] == "EmptyCorpus");

  CHECK(s.handle(get("/datasets/nope")).status == 404);
  CHECK(s.handle(get("/nothing/here")).status == 404);
}

TEST_CASE("analysis request validation") {
  TempDir tmp;
  Service s(config_for(tmp.path, false));
  auto id = upload_fixture(s, "eight");

  CHECK(s.handle(post_json("/analyses", Json{{"dataset_id", id}})).status == 202);
  auto unknown = s.handle(post_json("/analyses", Json{{"dataset_id", "missing"}}));
  CHECK(unknown.status == 404);
  CHECK(body(unknown)["code"] == "NotFound");

  auto inverted = s.handle(post_json(
      "/analyses", Json{{"dataset_id", id}, {"threshold_config", {{"alpha_start", 2.0}, {"alpha_max", 1.0}}}}));
  CHECK(inverted.status == 422);
  CHECK(body(inverted)["code"] == "InvalidConfig");

  CHECK(s.handle(post_json("/analyses", Json{{"dataset_id", id}, {"measure", "Foo"}})).status == 422);
  CHECK(s.handle(post_json("/analyses", Json{{"dataset_id", id}, {"namespace", "XX"}})).status == 422);
  CHECK(s.handle(post_json("/analyses", Json{{"dataset_id", id}, {"mixer", 3}})).status == 422);
  CHECK(s.handle(post_json("/analyses", Json{{"measure", "Lin"}})).status == 422);

  Request junk;
  junk.method = "POST";
  junk.path = "/analyses";
  junk.body = "{not json";
  auto j = s.handle(junk);
  CHECK(j.status == 400);
  auto jb = body(j);
  CHECK(jb.contains("code"));
  CHECK(jb.contains("message"));
  CHECK(jb.contains("details"));

  CHECK(s.handle(get("/analyses/none")).status == 404);
  CHECK(s.handle(get("/analyses/none/matrix")).status == 404);
}

TEST_CASE("artifacts are unavailable until the job is done") {
  TempDir tmp;
  Service s(config_for(tmp.path, false));
  auto ds = upload_fixture(s, "eight");
  auto job = submit(s, Json{{"dataset_id", ds}});
  CHECK(body(s.handle(get("/analyses/" + job)))["state"] == "queued");
  auto early = s.handle(get("/analyses/" + job + "/matrix"));
  CHECK(early.status == 409);
  CHECK(body(early)["details"]["state"] == "queued");

  s.start();
  s.wait_idle();
  CHECK(body(s.handle(get("/analyses/" + job)))["state"] == "done");
  CHECK(s.handle(get("/analyses/" + job + "/matrix")).status == 200);
  CHECK(s.handle(get("/analyses/" + job + "/bogus")).status == 404);
}

TEST_CASE("queue capacity") {
  TempDir tmp;
  auto cfg = config_for(tmp.path, false);
  cfg.queue_capacity = 1;
  Service s(cfg);
  auto ds = upload_fixture(s, "eight");
  CHECK(s.handle(post_json("/analyses", Json{{"dataset_id", ds}})).status == 202);
  auto full = s.handle(post_json("/analyses", Json{{"dataset_id", ds}}));
  CHECK(full.status == 503);
  CHECK(body(full)["code"] == "QueueFull");
}

TEST_CASE("done job artifacts match the library serializations") {
  TempDir tmp;
  Service s(config_for(tmp.path));
  auto ds = upload_fixture(s, "planted");
  auto job = submit(s, Json{{"dataset_id", ds}, {"namespace", "BP"}, {"measure", "Lin"}, {"mixer", "BMA"}});
  s.wait_idle();
  auto state = body(s.handle(get("/analyses/" + job)));
  REQUIRE(state["state"] == "done");

  auto g = parse_obo_file(testing::fixture("planted.obo"));
  std::ifstream in(testing::fixture("planted.gaf"));
  auto annotations = load_annotations(in, g);
  const auto& corpus = annotations.corpus(Namespace::BP);
  auto ic = compute_ic(corpus);
  auto m = build_matrix(corpus_products(corpus), Measure::Lin, Mixer::BMA, corpus, ic, g).matrix;
  auto c = compare(m, ThresholdConfig{}, 0);

  auto csv = s.handle(get("/analyses/" + job + "/matrix", {{"format", "csv"}}));
  CHECK(csv.status == 200);
  CHECK(csv.content_type == "text/csv");
  CHECK(csv.body == matrix_to_csv(m));
  CHECK(s.handle(get("/analyses/" + job + "/matrix", {}, "text/csv")).body == csv.body);
  CHECK(s.handle(get("/analyses/" + job + "/matrix")).body == dump(matrix_to_json(m)));
  CHECK(s.handle(get("/analyses/" + job + "/matrix", {{"format", "xml"}})).status == 400);

  auto raw = s.handle(get("/analyses/" + job + "/network", {{"kind", "raw"}, {"format", "tsv"}}));
  CHECK(raw.body == network_to_tsv(c.raw));
  auto pruned = s.handle(get("/analyses/" + job + "/network", {{"kind", "pruned"}}));
  auto pj = body(pruned);
  CHECK(pj["converged"] == c.prune.converged);
  CHECK(pruned.headers.at("X-SSN-Converged") == (c.prune.converged ? "true" : "false"));
  CHECK(network_from_json(pj) == c.prune.pruned);
  CHECK(s.handle(get("/analyses/" + job + "/network", {{"kind", "pruned"}}, "text/tab-separated-values")).body ==
        network_to_tsv(c.prune.pruned));
  CHECK(s.handle(get("/analyses/" + job + "/network", {{"kind", "cooked"}})).status == 400);

  auto spectra = s.handle(get("/analyses/" + job + "/spectra"));
  CHECK(spectra.body == dump(spectra_to_json(c.prune, ThresholdConfig{})));

  auto comm = body(s.handle(get("/analyses/" + job + "/communities", {{"on", "raw"}})));
  CHECK(comm == communities_to_json(c.raw_partition, c.raw_coherence));
  auto comm_pruned = body(s.handle(get("/analyses/" + job + "/communities", {{"on", "pruned"}})));
  CHECK(comm_pruned["partition"] == partition_to_json(c.pruned_partition));

  // repeated GETs are byte-identical
  for (const char* what : {"matrix", "network", "spectra", "communities"}) {
    auto a = s.handle(get("/analyses/" + job + "/" + what));
    auto b = s.handle(get("/analyses/" + job + "/" + what));
    CHECK(a.status == 200);
    CHECK(a.body == b.body);
  }
}

TEST_CASE("non-converged pruning is flagged, not an error") {
  // Three products under one informative parent form a uniform triangle,
  // which empties at the first step; the fourth keeps that parent's IC up.
  std::string obo = testing::stanza("GO:0000001") + testing::stanza("GO:0000002", {"GO:0000001"}) +
                    testing::stanza("GO:0000003", {"GO:0000002"}) + testing::stanza("GO:0000004", {"GO:0000002"}) +
                    testing::stanza("GO:0000005", {"GO:0000002"}) + testing::stanza("GO:0000006", {"GO:0000001"});
  std::string gaf = testing::gaf_row("P1", "GO:0000003", "P") + testing::gaf_row("P2", "GO:0000004", "P") +
                    testing::gaf_row("P3", "GO:0000005", "P") + testing::gaf_row("P4", "GO:0000006", "P");
  TempDir tmp;
  Service s(config_for(tmp.path));
  auto r = s.handle(upload(obo, gaf));
  REQUIRE(r.status == 201);
  auto job = submit(s, Json{{"dataset_id", body(r)["id"]}, {"measure", "CzekanowskiDice"}});
  s.wait_idle();
  auto pruned = s.handle(get("/analyses/" + job + "/network", {{"kind", "pruned"}}));
  CHECK(pruned.status == 200);
  CHECK(body(pruned)["converged"] == false);
  CHECK(pruned.headers.at("X-SSN-Converged") == "false");
  CHECK(body(s.handle(get("/analyses/" + job)))["results"][0]["converged"] == false);
}

TEST_CASE("ALL x ALL fans out and needs a selection") {
  TempDir tmp;
  Service s(config_for(tmp.path));
  auto ds = upload_fixture(s, "planted");
  auto job = submit(s, Json{{"dataset_id", ds}, {"namespace", "ALL"}, {"measure", "ALL"}});
  s.wait_idle();
  auto state = body(s.handle(get("/analyses/" + job)));
  CHECK(state["results"].size() == 33);
  CHECK(state["state"] == "done");

  auto ambiguous = s.handle(get("/analyses/" + job + "/matrix"));
  CHECK(ambiguous.status == 400);
  CHECK(body(ambiguous)["details"]["results"].size() == 33);

  auto one = s.handle(get("/analyses/" + job + "/matrix", {{"measure", "Kappa"}, {"namespace", "BP"}}));
  CHECK(one.status == 200);
  CHECK(body(one)["measure"] == "Kappa");
  CHECK(body(one)["namespace"] == "BP");
}

TEST_CASE("a job with no usable namespace fails") {
  TempDir tmp;
  Service s(config_for(tmp.path));
  auto ds = upload_fixture(s, "eight");
  auto job = submit(s, Json{{"dataset_id", ds}, {"namespace", "CC"}});
  s.wait_idle();
  auto state = body(s.handle(get("/analyses/" + job)));
  CHECK(state["state"] == "failed");
  CHECK(state["error"].is_string());
  CHECK(s.handle(get("/analyses/" + job + "/matrix")).status == 409);
}

TEST_CASE("restart preserves artifacts and resumes queued jobs") {
  TempDir tmp;
  std::string done_job, queued_job, running_job, matrix_before, spectra_before;
  {
    Service s(config_for(tmp.path));
    auto ds = upload_fixture(s, "planted");
    done_job = submit(s, Json{{"dataset_id", ds}});
    s.wait_idle();
    matrix_before = s.handle(get("/analyses/" + done_job + "/matrix", {{"format", "csv"}})).body;
    spectra_before = s.handle(get("/analyses/" + done_job + "/spectra")).body;
  }
  {
    Service s(config_for(tmp.path, false));
    auto ds = body(s.handle(get("/datasets")))[0]["id"].get<std::string>();
    queued_job = submit(s, Json{{"dataset_id", ds}, {"measure", "WeightedJaccard"}});
    running_job = submit(s, Json{{"dataset_id", ds}, {"measure", "Cosine"}});
  }
  // Pretend the process died while one job was running.
  {
    auto path = tmp.path / "index.json";
    auto index = Json::parse(oracle::slurp(path.string()));
    for (auto& a : index["analyses"])
      if (a["id"] == running_job) a["state"] = "running";
    std::ofstream(path) << index.dump(2);
  }
  Service s(config_for(tmp.path));
  s.wait_idle();
  CHECK(s.handle(get("/analyses/" + done_job + "/matrix", {{"format", "csv"}})).body == matrix_before);
  CHECK(s.handle(get("/analyses/" + done_job + "/spectra")).body == spectra_before);
  CHECK(body(s.handle(get("/analyses/" + queued_job)))["state"] == "done");
  auto interrupted = body(s.handle(get("/analyses/" + running_job)));
  CHECK(interrupted["state"] == "failed");
  CHECK(body(s.handle(get("/analyses"))).size() == 3);
}

TEST_CASE("bind address parsing") {
  CHECK(parse_bind_addr("127.0.0.1:9000") == std::pair<std::string, int>{"127.0.0.1", 9000});
  CHECK(parse_bind_addr("localhost") == std::pair<std::string, int>{"localhost", 8080});
  CHECK_THROWS_AS(parse_bind_addr("host:port"), ssn::Error);
  CHECK_THROWS_AS(parse_bind_addr("host:70000"), ssn::Error);
}

TEST_CASE("http front end") {
  TempDir tmp;
  Service s(config_for(tmp.path));
  HttpServer server(s);
  int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread loop([&] { server.run(); });
  httplib::Client cli("127.0.0.1", port);

  httplib::MultipartFormDataItems items = {{"obo", fixture_text("eight.obo"), "eight.obo", "text/plain"},
                                           {"gaf", fixture_text("eight.gaf"), "eight.gaf", "text/plain"}};
  auto up = cli.Post("/datasets", items);
  REQUIRE(up);
  CHECK(up->status == 201);
  CHECK(up->get_header_value("Access-Control-Allow-Origin") == "*");
  auto ds = Json::parse(up->body)["id"].get<std::string>();
  CHECK(Json::parse(up->body)["organism"] == "");

  auto missing = cli.Post("/datasets", httplib::MultipartFormDataItems{items[0]});
  REQUIRE(missing);
  CHECK(missing->status == 400);

  auto posted = cli.Post("/analyses", Json{{"dataset_id", ds}}.dump(), "application/json");
  REQUIRE(posted);
  CHECK(posted->status == 202);
  auto job = Json::parse(posted->body)["id"].get<std::string>();
  s.wait_idle();

  auto csv = cli.Get("/analyses/" + job + "/matrix", {{"Accept", "text/csv"}});
  REQUIRE(csv);
  CHECK(csv->status == 200);
  CHECK(csv->get_header_value("Content-Type") == "text/csv");
  auto forced = cli.Get("/analyses/" + job + "/matrix?format=json", {{"Accept", "text/csv"}});
  REQUIRE(forced);
  CHECK(forced->get_header_value("Content-Type") == "application/json");
  auto pruned = cli.Get("/analyses/" + job + "/network?kind=pruned");
  REQUIRE(pruned);
  CHECK(pruned->has_header("X-SSN-Converged"));
  auto nothing = cli.Get("/nowhere");
  REQUIRE(nothing);
  CHECK(nothing->status == 404);
  CHECK(Json::parse(nothing->body).contains("code"));

  server.stop();
  loop.join();
}
