#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "plcheck/policy_io.hpp"

namespace plcheck::testing {

std::filesystem::path source_path(const std::string& relative) {
  return std::filesystem::path(PLCHECK_SOURCE_DIR) / relative;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const VocabularyOntology& befit_vocab() {
  static const VocabularyOntology voc = load_vocabulary_file(source_path("vocab/befit.voc"));
  return voc;
}

const VocabularyOntology& gdpr_vocab() {
  static const VocabularyOntology voc = load_vocabulary_file(source_path("vocab/gdpr.voc"));
  return voc;
}

FullPolicy policy_fixture(const std::string& name, PolicyKind kind) {
  return parse_policy_file(source_path("policies/" + name), kind);
}

}  // namespace plcheck::testing
