#pragma once

#include <string_view>

// Identifiers of the built-in policy-language terms.
namespace plcheck::terms {

inline constexpr std::string_view kHasData = "spl:hasData";
inline constexpr std::string_view kHasPurpose = "spl:hasPurpose";
inline constexpr std::string_view kHasProcessing = "spl:hasProcessing";
inline constexpr std::string_view kHasRecipient = "spl:hasRecipient";
inline constexpr std::string_view kHasStorage = "spl:hasStorage";
inline constexpr std::string_view kHasLocation = "spl:hasLocation";
inline constexpr std::string_view kHasDuration = "spl:hasDuration";
inline constexpr std::string_view kDurationInDays = "spl:durationInDays";
inline constexpr std::string_view kHasDuty = "sbpl:hasDuty";
inline constexpr std::string_view kHasLegalBasis = "sbpl:hasLegalBasis";

inline constexpr std::string_view kAnyData = "spl:AnyData";
inline constexpr std::string_view kAnyPurpose = "spl:AnyPurpose";
inline constexpr std::string_view kAnyProcessing = "spl:AnyProcessing";
inline constexpr std::string_view kAnyRecipient = "spl:AnyRecipient";
inline constexpr std::string_view kAnyStorage = "spl:AnyStorage";
inline constexpr std::string_view kNull = "spl:Null";

}  // namespace plcheck::terms
