#include "plcheck/policy.hpp"

#include "plcheck/terms.hpp"

namespace plcheck {

StorageExpr StorageExpr::of_class(ClassExpr c) {
  StorageExpr s;
  s.form = Form::kClass;
  s.filler = std::move(c);
  return s;
}

StorageExpr StorageExpr::block(ClassExpr location, std::variant<Interval, ClassExpr> duration) {
  StorageExpr s;
  s.form = Form::kBlock;
  s.location = std::move(location);
  s.duration = std::move(duration);
  return s;
}

namespace {

ClassExpr storage_filler(const StorageExpr& s) {
  switch (s.form) {
    case StorageExpr::Form::kNull:
      return ClassExpr::named(std::string(terms::kNull));
    case StorageExpr::Form::kClass:
      return s.filler;
    case StorageExpr::Form::kBlock:
      break;
  }
  std::vector<ClassExpr> parts;
  parts.push_back(ClassExpr::exists(std::string(terms::kHasLocation), s.location));
  if (const auto* iv = std::get_if<Interval>(&s.duration)) {
    parts.push_back(ClassExpr::exists(std::string(terms::kDurationInDays), ClassExpr::interval(*iv)));
  } else {
    parts.push_back(ClassExpr::exists(std::string(terms::kHasDuration), std::get<ClassExpr>(s.duration)));
  }
  return ClassExpr::intersection(std::move(parts));
}

}  // namespace

ClassExpr to_class_expr(const SimplePolicy& p) {
  std::vector<ClassExpr> slots;
  slots.push_back(ClassExpr::exists(std::string(terms::kHasData), p.data));
  slots.push_back(ClassExpr::exists(std::string(terms::kHasPurpose), p.purpose));
  slots.push_back(ClassExpr::exists(std::string(terms::kHasProcessing), p.processing));
  slots.push_back(ClassExpr::exists(std::string(terms::kHasRecipient), p.recipient));
  slots.push_back(ClassExpr::exists(std::string(terms::kHasStorage), storage_filler(p.storage)));
  for (const auto& d : p.duties) slots.push_back(ClassExpr::exists(std::string(terms::kHasDuty), d));
  if (p.legal_basis) {
    slots.push_back(ClassExpr::exists(std::string(terms::kHasLegalBasis), *p.legal_basis));
  }
  return ClassExpr::intersection(std::move(slots));
}

SimplePolicy usage_projection(const SimplePolicy& p) {
  SimplePolicy out = p;
  out.duties.clear();
  out.legal_basis.reset();
  return out;
}

}  // namespace plcheck
