#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "plcheck/policy.hpp"

namespace plcheck {

/// Parses a policy document: one policy object, or an array of them for a
/// union. The syntax is JSON extended with bare identifiers, intersection
/// sets and duration intervals:
///
///   {
///     has_purpose: { FitnessRecommendation, contact: SMS },
///     has_data: BiometricData,
///     has_processing: Analytics,
///     has_recipient: BeFit,
///     has_storage: { has_location: EU, has_duration: [1year, 5year] }
///   }
///
/// A bare key must be followed by whitespace after its colon
/// (`contact: SMS`); `contact:SMS` lexes as one prefixed identifier.
/// Quoted keys and strings are accepted everywhere.
///
/// Throws ParseError with a line/column position.
FullPolicy parse_policy(std::string_view text, PolicyKind kind);
FullPolicy parse_policy_file(const std::filesystem::path& path, PolicyKind kind);

/// Parses a single filler expression in the same syntax.
ClassExpr parse_filler(std::string_view text);

/// Canonical rendering: slots in alphabetical key order, durations in days,
/// single-disjunct policies without the enclosing array.
/// parse_policy(serialize_policy(p), p.kind) == p for every parsed p.
std::string serialize_policy(const FullPolicy& p);
std::string serialize_filler(const ClassExpr& e);

/// Parses a duration bound such as `5year`, `30d`, `12` (days) or `*`.
/// Throws ParseError (without a position) on malformed input.
std::int64_t parse_duration_bound(std::string_view text);

}  // namespace plcheck
