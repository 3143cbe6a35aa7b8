#pragma once

#include <filesystem>
#include <string>

#include "plcheck/policy.hpp"
#include "plcheck/vocab.hpp"

namespace plcheck::testing {

/// Path relative to the source tree.
std::filesystem::path source_path(const std::string& relative);

std::string read_text(const std::filesystem::path& path);

/// Vocabularies and policies shipped under vocab/ and policies/.
const VocabularyOntology& befit_vocab();
const VocabularyOntology& gdpr_vocab();
FullPolicy policy_fixture(const std::string& name, PolicyKind kind);

}  // namespace plcheck::testing
