#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "plcheck/bench.hpp"
#include "plcheck/engine.hpp"
#include "plcheck/error.hpp"
#include "plcheck/gdpr.hpp"
#include "plcheck/ledger.hpp"
#include "plcheck/normalizer.hpp"
#include "plcheck/policy_io.hpp"
#include "plcheck/vocab.hpp"
#include "plcheck/workload.hpp"

namespace plcheck::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string vocab;
  std::string format = "text";
  std::string kind = "consent";
  std::string policy;
  std::string business;
  std::string consent;
  std::string rules;
  std::string ledger;
  bool explain = false;
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
  std::string profile = "pilot1";
  std::uint64_t seed = 1;
  std::size_t parallelism = 1;
  std::size_t warmup = 0;
  double target = 0.5;
  std::string report;
};

bool json(const Options& o) { return o.format == "json"; }

VocabularyOntology load_vocab(const Options& o) {
  std::string path = o.vocab;
  if (path.empty()) {
    if (const char* env = std::getenv("PLCHECK_VOCAB")) path = env;
  }
  if (path.empty()) throw Error("no vocabulary given (use --vocab or set PLCHECK_VOCAB)");
  return load_vocabulary_file(path);
}

FullPolicy load_policy(const std::string& path, PolicyKind kind) {
  try {
    return parse_policy_file(path, kind);
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.what());
  }
}

Json trace_json(const FailureTrace& f) {
  Json j{{"business", f.business}};
  if (f.against) j["against"] = *f.against;
  j["path"] = f.path;
  j["found"] = f.found;
  j["required"] = f.required;
  j["reason"] = f.reason;
  return j;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : std::string(sep)) + p;
  return out;
}

void print_report(const ComplianceReport& r, const Options& o, bool explain, std::string_view cover_label,
                  std::ostream& out) {
  if (json(o)) {
    Json j{{"verdict", to_string(r.verdict)}};
    if (explain) {
      Json cover = Json::array();
      for (const auto& c : r.cover) cover.push_back(Json{{"business", c.business}, {"by", c.by}});
      j["cover"] = cover;
      j["unsatisfiable"] = r.unsatisfiable;
    }
    if (r.failure) j["failure"] = trace_json(*r.failure);
    out << j.dump() << '\n';
    return;
  }
  out << to_string(r.verdict) << '\n';
  if (explain) {
    for (const auto& c : r.cover) {
      std::vector<std::string> by;
      for (auto i : c.by) by.push_back(std::to_string(i));
      out << "  business " << c.business << " <- " << cover_label << ' ' << join(by, " + ") << '\n';
    }
    for (auto i : r.unsatisfiable) out << "  business " << i << " unsatisfiable\n";
  }
  if (r.failure) {
    const auto& f = *r.failure;
    out << "  business " << f.business;
    if (f.against) out << " vs " << cover_label << ' ' << *f.against;
    out << ": " << (f.path.empty() ? std::string("(root)") : join(f.path, " > ")) << '\n';
    out << "    reason:   " << f.reason << '\n';
    out << "    found:    " << f.found << '\n';
    out << "    required: " << f.required << '\n';
  }
}

int cmd_validate(const Options& o, std::ostream& out) {
  const auto voc = load_vocab(o);
  const auto kind = o.kind == "business" ? PolicyKind::kBusiness : PolicyKind::kConsent;
  const auto normal = normalize_full(voc, load_policy(o.policy, kind));
  if (json(o)) {
    Json sats = Json::array();
    for (const auto& d : normal) sats.push_back(d.satisfiable());
    out << Json{{"valid", true}, {"satisfiable", sats}, {"vacuous", vacuous(normal)}}.dump() << '\n';
  } else {
    for (std::size_t i = 0; i < normal.size(); ++i) {
      out << "disjunct " << i << ": " << (normal[i].satisfiable() ? "satisfiable" : "unsatisfiable") << '\n';
    }
  }
  return vacuous(normal) ? kNonCompliant : kSuccess;
}

int cmd_normalize(const Options& o, std::ostream& out) {
  const auto voc = load_vocab(o);
  const auto kind = o.kind == "business" ? PolicyKind::kBusiness : PolicyKind::kConsent;
  const auto normal = normalize_full(voc, load_policy(o.policy, kind));
  if (json(o)) {
    Json items = Json::array();
    for (const auto& d : normal) {
      items.push_back(Json{{"disjunct", d.provenance},
                           {"satisfiable", d.satisfiable()},
                           {"expression", to_string(to_class_expr(voc, d.root))}});
    }
    out << items.dump() << '\n';
  } else {
    out << serialize_policy(to_full_policy(voc, normal, kind));
  }
  return kSuccess;
}

int cmd_check(const Options& o, std::ostream& out) {
  const auto voc = load_vocab(o);
  const auto bp = load_policy(o.business, PolicyKind::kBusiness);
  const auto consent = load_policy(o.consent, PolicyKind::kConsent);
  const auto report = check_compliance(voc, bp, consent);
  print_report(report, o, o.explain, "consent", out);
  return report.compliant() ? kSuccess : kNonCompliant;
}

int cmd_gdpr(const Options& o, std::ostream& out) {
  const auto voc = load_vocab(o);
  const auto rb = o.rules.empty() ? builtin_gdpr_rulebook() : load_rulebook_file(o.rules);
  const auto bp = load_policy(o.business, PolicyKind::kBusiness);
  const auto report = check_regulatory(voc, bp, rb);
  print_report(report, o, o.explain, "branch", out);
  return report.compliant() ? kSuccess : kNonCompliant;
}

int cmd_audit(const Options& o, std::ostream& out) {
  const auto voc = load_vocab(o);
  std::ifstream in(o.ledger, std::ios::binary);
  if (!in) throw Error("cannot read " + o.ledger);
  std::ostringstream text;
  text << in.rdbuf();
  const auto ledger = TransparencyLedger::from_text(text.str());
  const auto report = ledger.audit(voc, o.from.value_or(std::numeric_limits<Timestamp>::min()),
                                   o.to.value_or(std::numeric_limits<Timestamp>::max()));
  if (json(o)) {
    out << report.to_json_lines();
  } else {
    for (const auto& e : report.entries) {
      out << e.event << ' ' << e.occurred_at << ' ' << e.subject << ' ' << e.business_policy << ' '
          << to_string(e.status);
      if (e.record) out << ' ' << *e.record;
      if (!e.detail.empty()) out << " (" << e.detail << ')';
      out << '\n';
    }
    out << report.entries.size() << " events: " << report.justified << " justified, " << report.unjustified
        << " unjustified, " << report.errors << " errors\n";
  }
  return report.justified == report.entries.size() ? kSuccess : kNonCompliant;
}

int cmd_bench(const Options& o, std::ostream& out) {
  auto profile = WorkloadProfile::named(o.profile);
  profile.seed = o.seed;
  profile.target_compliant = o.target;
  const auto workload = generate_workload(profile);
  const auto result = run_bench(workload, {o.warmup, o.parallelism});
  const std::string report = result.to_json();
  if (!o.report.empty()) {
    std::ofstream file(o.report, std::ios::binary);
    if (!file || !(file << report << '\n')) throw Error("cannot write " + o.report);
  }
  if (json(o)) {
    out << report << '\n';
  } else {
    out << "profile            " << result.profile << '\n'
        << "checks             " << result.checks << '\n'
        << "phase-1 seconds    " << result.phase1_seconds << '\n'
        << "wall seconds       " << result.wall_seconds << '\n'
        << "mean us            " << result.mean_us << '\n'
        << "median us          " << result.median_us << '\n'
        << "p99 us             " << result.p99_us << '\n'
        << "checks per second  " << result.checks_per_second << '\n'
        << "compliant          " << result.compliant << '\n'
        << "agreeing           " << result.agreeing << '\n';
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Policy compliance checker", "plcheck"};
  app.require_subcommand(1);
  app.add_option("--vocab", o.vocab, "Vocabulary file (default: $PLCHECK_VOCAB)");
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json"}));

  auto* validate = app.add_subcommand("validate", "Parse and normalize a policy; report satisfiability");
  validate->add_option("policy", o.policy)->required();
  validate->add_option("--kind", o.kind)->check(CLI::IsMember({"consent", "business"}));

  auto* normalize = app.add_subcommand("normalize", "Print the normal form of a policy");
  normalize->add_option("policy", o.policy)->required();
  normalize->add_option("--kind", o.kind)->check(CLI::IsMember({"consent", "business"}));

  auto* check = app.add_subcommand("check", "Check a business policy against a consent policy");
  check->add_option("business", o.business)->required();
  check->add_option("consent", o.consent)->required();
  check->add_flag("--explain", o.explain, "Print the cover map or the failure path");

  auto* gdpr = app.add_subcommand("gdpr", "Check a business policy against a regulatory rulebook");
  gdpr->add_option("business", o.business)->required();
  gdpr->add_option("--rules", o.rules, "Rulebook file (default: builtin GDPR fragment)");
  gdpr->add_flag("--explain", o.explain, "Also print the satisfied root branch");

  auto* audit = app.add_subcommand("audit", "Audit processing events of a ledger file");
  audit->add_option("ledger", o.ledger)->required();
  audit->add_option("--from", o.from, "First timestamp (inclusive)");
  audit->add_option("--to", o.to, "Last timestamp (inclusive)");

  auto* bench = app.add_subcommand("bench", "Generate a pilot-shaped workload and time the checks");
  bench->add_option("--profile", o.profile)->check(CLI::IsMember({"pilot1", "pilot2"}));
  bench->add_option("--seed", o.seed);
  bench->add_option("--parallelism", o.parallelism)->check(CLI::PositiveNumber);
  bench->add_option("--warmup", o.warmup);
  bench->add_option("--target-compliant", o.target)->check(CLI::Range(0.0, 1.0));
  bench->add_option("--report", o.report, "Also write the report to this file");

  for (auto* sub : {validate, normalize, check, gdpr, audit, bench}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (*validate) return cmd_validate(o, out);
    if (*normalize) return cmd_normalize(o, out);
    if (*check) return cmd_check(o, out);
    if (*gdpr) return cmd_gdpr(o, out);
    if (*audit) return cmd_audit(o, out);
    if (*bench) return cmd_bench(o, out);
  } catch (const Error& e) {
    err << "plcheck: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "plcheck: internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace plcheck::cli
