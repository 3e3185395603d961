// ssn: batch front end for the semantic similarity network pipeline.
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ssn/annotations.hpp"
#include "ssn/error.hpp"
#include "ssn/http_server.hpp"
#include "ssn/io.hpp"
#include "ssn/pipeline.hpp"
#include "ssn/service.hpp"

namespace fs = std::filesystem;
using namespace ssn;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitCompute = 3;

bool has_ext(const std::string& path, const char* ext) { return fs::path(path).extension() == ext; }

std::string pick_format(const std::string& flag, const std::string& path, const std::string& fallback) {
  if (!flag.empty()) return flag;
  auto ext = fs::path(path).extension().string();
  if (ext.size() > 1) {
    ext = ext.substr(1);
    if (ext == "csv" || ext == "json" || ext == "tsv") return ext;
  }
  return fallback;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path);
  out << content;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + path);
  return in;
}

SimilarityMatrix read_matrix(const std::string& path) {
  auto in = open_input(path);
  if (has_ext(path, ".json")) {
    try {
      return matrix_from_json(Json::parse(in));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::MalformedMatrix, e.what());
    }
  }
  return matrix_from_csv(in);
}

WeightedNetwork read_network(const std::string& path) {
  auto in = open_input(path);
  if (has_ext(path, ".json")) {
    try {
      return network_from_json(Json::parse(in));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::MalformedNetwork, e.what());
    }
  }
  return network_from_tsv(in);
}

std::string network_text(const WeightedNetwork& g, const std::string& format) {
  return format == "json" ? dump(network_to_json(g)) : network_to_tsv(g);
}

// "matrix.csv" + Lin -> "matrix-Lin.csv"
std::string suffixed(const std::string& path, Measure m) {
  fs::path p(path);
  auto name = p.stem().string() + "-" + std::string(to_string(m)) + p.extension().string();
  return (p.parent_path() / name).string();
}

struct ThresholdFlags {
  ThresholdConfig cfg;
  std::string laplacian = "symmetric-normalized";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha-start", cfg.alpha_start, "First alpha")->capture_default_str();
    cmd->add_option("--alpha-step", cfg.alpha_step, "Alpha increment")->capture_default_str();
    cmd->add_option("--alpha-max", cfg.alpha_max, "Last alpha")->capture_default_str();
    cmd->add_option("--tolerance", cfg.fiedler_tolerance, "Fiedler value tolerance")->capture_default_str();
    cmd->add_option("--laplacian", laplacian, "combinatorial or symmetric-normalized")->capture_default_str();
    cmd->add_option("--spectrum-size", cfg.spectrum_size, "Eigenvalues kept per iteration")->capture_default_str();
  }

  ThresholdConfig resolve() {
    auto kind = parse_laplacian_kind(laplacian);
    if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown laplacian '" + laplacian + "'");
    cfg.laplacian_kind = *kind;
    validate(cfg);
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic similarity networks: similarity matrices, spectral pruning and communities"};
  app.set_config("--config", "", "TOML or INI file with option values; flags take precedence");
  app.require_subcommand(1);

  // compute-matrix
  std::string obo_path, gaf_path, ns_name = "BP", measure_name = "Lin", mixer_name = "BMA";
  std::string matrix_out, matrix_format;
  bool no_part_of = false, binary_cosine = false;
  unsigned threads = 0;
  auto* cm = app.add_subcommand("compute-matrix", "Gene-product similarity matrix from OBO + GAF");
  cm->add_option("--obo", obo_path, "Ontology file")->required()->check(CLI::ExistingFile);
  cm->add_option("--gaf", gaf_path, "Annotation file")->required()->check(CLI::ExistingFile);
  cm->add_option("--namespace", ns_name, "BP, MF or CC")->capture_default_str();
  cm->add_option("--measure", measure_name, "Measure name or ALL")->capture_default_str();
  cm->add_option("--mixer", mixer_name, "Max, Avg or BMA")->capture_default_str();
  cm->add_option("--out", matrix_out, "Output path; ALL writes one suffixed file per measure")->required();
  cm->add_option("--format", matrix_format, "csv or json (default from extension)")
      ->check(CLI::IsMember({"csv", "json"}));
  cm->add_flag("--no-part-of", no_part_of, "Traverse is_a edges only");
  cm->add_flag("--binary-cosine", binary_cosine, "Cosine on 0/1 vectors");
  cm->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // build
  std::string matrix_in, net_out, net_format;
  auto* build = app.add_subcommand("build", "Raw similarity network from a matrix");
  build->add_option("--matrix", matrix_in, "Matrix file (csv or json)")->required()->check(CLI::ExistingFile);
  build->add_option("--out", net_out, "Output network")->required();
  build->add_option("--format", net_format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));

  // prune
  ThresholdFlags prune_flags;
  std::string report_out;
  auto* pr = app.add_subcommand("prune", "Spectral pruning of the raw network");
  pr->add_option("--matrix", matrix_in, "Matrix file")->required()->check(CLI::ExistingFile);
  pr->add_option("--out", net_out, "Pruned network")->required();
  pr->add_option("--format", net_format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));
  pr->add_option("--report", report_out, "Per-iteration spectra (json)");
  prune_flags.add_to(pr);

  // communities
  std::string net_in, communities_out, summary_out;
  std::uint64_t seed = 0;
  auto* co = app.add_subcommand("communities", "Greedy modularity communities and coherence");
  co->add_option("--network", net_in, "Network file (tsv or json)")->required()->check(CLI::ExistingFile);
  co->add_option("--matrix", matrix_in, "Matrix file")->required()->check(CLI::ExistingFile);
  co->add_option("--out", communities_out, "Output json")->required();
  co->add_option("--summary", summary_out, "community,size,coherence csv");
  co->add_option("--seed", seed, "Seed for label order")->capture_default_str();

  // compare
  ThresholdFlags compare_flags;
  std::string compare_out = "-", compare_format;
  auto* cp = app.add_subcommand("compare", "Raw vs pruned communities side by side");
  cp->add_option("--matrix", matrix_in, "Matrix file")->required()->check(CLI::ExistingFile);
  cp->add_option("--out", compare_out, "Output path, - for stdout")->capture_default_str();
  cp->add_option("--format", compare_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cp->add_option("--seed", seed, "Seed for label order")->capture_default_str();
  compare_flags.add_to(cp);

  // serve
  std::string data_dir, bind_addr;
  unsigned workers = 0;
  auto* sv = app.add_subcommand("serve", "HTTP service (SSN_DATA_DIR, SSN_BIND_ADDR, SSN_WORKERS)");
  sv->add_option("--data-dir", data_dir, "Overrides SSN_DATA_DIR");
  sv->add_option("--bind", bind_addr, "host:port, overrides SSN_BIND_ADDR; port 0 picks one");
  sv->add_option("--workers", workers, "Overrides SSN_WORKERS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*cm) {
      auto ns = parse_namespace(ns_name);
      if (!ns) throw Error(ErrorCode::InvalidConfig, "unknown namespace '" + ns_name + "'");
      auto mixer = parse_mixer(mixer_name);
      if (!mixer) throw Error(ErrorCode::InvalidConfig, "unknown mixer '" + mixer_name + "'");
      std::vector<Measure> measures;
      if (measure_name == "ALL") {
        measures.assign(std::begin(kAllMeasures), std::end(kAllMeasures));
      } else if (auto m = parse_measure(measure_name)) {
        measures.push_back(*m);
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown measure '" + measure_name + "'");
      }
      auto format = pick_format(matrix_format, matrix_out, "csv");

      auto graph = parse_obo_file(obo_path, OboOptions{.follow_part_of = !no_part_of});
      auto gaf_in = open_input(gaf_path);
      auto annotations = load_annotations(gaf_in, graph);
      const auto& d = annotations.diagnostics;
      std::fprintf(stderr, "gaf: %zu used, %zu unknown term, %zu NOT, %zu malformed\n", d.used,
                   d.skipped_unknown_term, d.skipped_not_qualifier, d.malformed);
      const auto& corpus = annotations.corpus(*ns);
      auto ic = compute_ic(corpus);
      SemsimOptions options;
      options.binary_cosine = binary_cosine;
      options.threads = threads;
      for (auto m : measures) {
        auto built = build_matrix(corpus_products(corpus), m, *mixer, corpus, ic, graph, options);
        for (const auto& p : built.dropped) std::fprintf(stderr, "dropped %s: no usable annotations\n", p.c_str());
        if (!built.clamped.empty())
          std::fprintf(stderr, "%s: %zu negative kappa values clamped to 0\n", std::string(to_string(m)).c_str(),
                       built.clamped.size());
        auto path = measures.size() > 1 ? suffixed(matrix_out, m) : matrix_out;
        write_output(path, format == "json" ? dump(matrix_to_json(built.matrix)) : matrix_to_csv(built.matrix));
      }
    } else if (*build) {
      auto g = build_ssn(read_matrix(matrix_in));
      write_output(net_out, network_text(g, pick_format(net_format, net_out, "tsv")));
    } else if (*pr) {
      auto cfg = prune_flags.resolve();
      auto result = prune(build_ssn(read_matrix(matrix_in)), cfg);
      write_output(net_out, network_text(result.pruned, pick_format(net_format, net_out, "tsv")));
      if (!report_out.empty()) write_output(report_out, dump(spectra_to_json(result, cfg)));
      if (!result.converged) std::fprintf(stderr, "prune: no nearly disconnected candidate; kept last non-empty\n");
    } else if (*co) {
      auto m = read_matrix(matrix_in);
      auto g = read_network(net_in);
      auto [partition, report] = analyse_communities(g, m, seed);
      write_output(communities_out, dump(communities_to_json(partition, report)));
      if (!summary_out.empty()) write_output(summary_out, communities_summary_csv(report));
    } else if (*cp) {
      auto cfg = compare_flags.resolve();
      auto c = compare(read_matrix(matrix_in), cfg, seed);
      auto format = pick_format(compare_format, compare_out, "csv");
      write_output(compare_out, format == "json" ? dump(comparison_to_json(c)) : comparison_csv(c));
    } else if (*sv) {
      auto config = ServiceConfig::from_env();
      if (!data_dir.empty()) config.data_dir = data_dir;
      if (!bind_addr.empty()) config.bind_addr = bind_addr;
      if (workers > 0) config.workers = workers;
      auto [host, port] = parse_bind_addr(config.bind_addr);
      Service service(config);
      HttpServer server(service);
      int bound = server.bind(host, port);
      if (bound < 0) throw Error(ErrorCode::InvalidConfig, "cannot bind " + config.bind_addr);
      std::printf("listening on %s:%d\n", host.c_str(), bound);
      std::fflush(stdout);
      return server.run() ? 0 : kExitCompute;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "ssn: %s\n", e.what());
    return is_input_error(e.code()) ? kExitInput : kExitCompute;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ssn: %s\n", e.what());
    return kExitCompute;
  }
  return 0;
}
