#pragma once

#include <filesystem>
#include <sstream>
#include <string>

#include "ssn/annotations.hpp"
#include "ssn/ontology.hpp"

namespace ssn::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SSN_FIXTURE_DIR) / name;
}

inline OntologyGraph obo(const std::string& text, const OboOptions& options = {}) {
  std::istringstream in(text);
  return parse_obo(in, options);
}

/// One [Term] stanza; parents are is_a targets.
inline std::string stanza(const std::string& id, std::initializer_list<std::string> parents = {},
                          const std::string& ns = "biological_process") {
  std::string s = "[Term]\nid: " + id + "\nname: " + id + "\nnamespace: " + ns + "\n";
  for (const auto& p : parents) s += "is_a: " + p + "\n";
  return s + "\n";
}

/// Minimal GAF row: accession, term, aspect letter, optional qualifier.
inline std::string gaf_row(const std::string& acc, const std::string& term, const std::string& aspect,
                           const std::string& qualifier = "") {
  return "DB\t" + acc + "\t" + acc + "\t" + qualifier + "\t" + term + "\tREF\tIDA\t\t" + aspect +
         "\t\t\tprotein\ttaxon:1\t20200101\tDB\n";
}

inline GafResult gaf(const std::string& text, const OntologyGraph& g) {
  std::istringstream in(text);
  return load_annotations(in, g);
}

}  // namespace ssn::testing
