// branchgrp: batch front end for the word calculus, portraits, conjugacy
// certificates and the verification suites.
//
// Settings come from flags, then BRANCHGRP_* environment variables, then the
// built-in defaults, in that order.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "branchgrp/errors.hpp"
#include "branchgrp/suites.hpp"

using namespace branchgrp;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kCap = 3 };

struct RunConfig {
  std::string group = "dihedral_infinite";
  std::size_t depth_cap = 8;
  std::size_t vertex_cap = 2'000'000;
  std::string format;  // empty: the command's own default
  std::uint64_t seed = 1;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

OraclePtr resolve_group(const std::string& selector) {
  if (selector.rfind("file:", 0) == 0) {
    std::ifstream in(selector.substr(5));
    if (!in) throw UsageError("cannot read group descriptor '" + selector.substr(5) + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_group_descriptor(ss.str());
  }
  try {
    return make_group(selector);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_of(const RunConfig& cfg, const std::string& fallback,
                      std::initializer_list<const char*> allowed) {
  std::string f = cfg.format.empty() ? fallback : cfg.format;
  for (const char* a : allowed)
    if (f == a) return f;
  throw UsageError("format '" + f + "' is not available for this command");
}

json vertex_json(const Tower& tower, const Vertex& v) {
  json labels = json::array();
  for (std::size_t i = 0; i < v.letters.size(); ++i)
    labels.push_back(tower.alphabet(v.base_level + i + 1).label(v.letters[i]));
  return labels;
}

json envelope(const std::string& command, const RunConfig& cfg) {
  return json{{"schema", 1}, {"command", command}, {"group", cfg.group}};
}

int cmd_wp(const Tower& tower, const RunConfig& cfg, const std::string& file) {
  std::string fmt = format_of(cfg, "text", {"text", "json"});
  auto tokens = parse_word_file(tower, 0, read_input(file));
  std::size_t ell = sigma_length(tokens);
  if (2 * ell > cfg.depth_cap)
    throw CapExceeded("deciding needs depth " + std::to_string(2 * ell) + ", above --depth-cap " +
                      std::to_string(cfg.depth_cap));
  WpResult r = decide_wp_Gamma(tower, tokens);
  if (fmt == "json") {
    json j = envelope("wp", cfg);
    j["trivial"] = r.trivial;
    j["ell"] = r.ell;
    j["depth"] = r.depth;
    if (r.witness) j["witness"] = vertex_json(tower, *r.witness);
    std::cout << j.dump(2) << '\n';
  } else if (r.trivial) {
    std::cout << "trivial (ℓ=" << r.ell << ")\n";
  } else {
    std::cout << "nontrivial, witness depth " << r.witness->depth() << " (ℓ=" << r.ell << ")\n"
              << "witness " << format_vertex(tower, *r.witness) << '\n';
  }
  return kOk;
}

int cmd_portrait(const Tower& tower, const RunConfig& cfg, const std::string& file, std::size_t depth) {
  std::string fmt = format_of(cfg, "text", {"text", "json", "dot"});
  if (depth > cfg.depth_cap)
    throw CapExceeded("portrait depth " + std::to_string(depth) + " above --depth-cap " +
                      std::to_string(cfg.depth_cap));
  GammaWord w = normal_form(tower, 0, parse_word_file(tower, 0, read_input(file)));
  if (depth > 0 && tower.vertex_count(0, depth - 1, cfg.vertex_cap) > cfg.vertex_cap)
    throw CapExceeded("portrait depth " + std::to_string(depth) + " needs more than " +
                      std::to_string(cfg.vertex_cap) + " labels");
  Portrait p = word_portrait(tower, w, depth);
  if (fmt == "dot") {
    std::cout << format_portrait_dot(tower, p);
  } else if (fmt == "json") {
    json j = envelope("portrait", cfg);
    j["depth"] = depth;
    json labels = json::array();
    for (const auto& [v, perm] : p.labels)
      labels.push_back({{"vertex", vertex_json(tower, v)}, {"label", to_cycle_string(perm)}});
    j["labels"] = labels;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << format_portrait_text(tower, p);
  }
  return kOk;
}

int cmd_section(const Tower& tower, const RunConfig& cfg, const std::string& file, const std::string& path) {
  std::string fmt = format_of(cfg, "text", {"text", "json"});
  GammaWord w = normal_form(tower, 0, parse_word_file(tower, 0, read_input(file)));
  Vertex v = parse_vertex(tower, 0, path);
  if (v.depth() > cfg.depth_cap) throw CapExceeded("vertex deeper than --depth-cap");
  for (Point d : v.letters) w = section_word(tower, w, d);
  if (fmt == "json") {
    json j = envelope("section", cfg);
    j["vertex"] = vertex_json(tower, v);
    j["level"] = w.level;
    j["word"] = format_gamma_word(tower, w);
    j["h_count"] = h_count(w);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "level " << w.level << '\n' << format_gamma_word(tower, w) << '\n';
  }
  return kOk;
}

int cmd_conj(const Tower& tower, const RunConfig& cfg, const std::string& gs, const std::string& ks,
             CertificateBounds bounds) {
  std::string fmt = format_of(cfg, "text", {"text", "json"});
  const GroupOracle& G = tower.oracle();
  HElem g = parse_helem(G, gs), k = parse_helem(G, ks);
  if (bounds.depth > cfg.depth_cap) throw CapExceeded("--cert-depth above --depth-cap");
  Certificate c = conjugacy_certificate(tower, g, k, bounds);
  bool ok = recheck_certificate(tower, g, k, c);
  auto counts = [](const CycleCounts& cc) {
    std::string s;
    for (const auto& [len, mult] : cc) s += (s.empty() ? "" : " ") + std::to_string(len) + "^" + std::to_string(mult);
    return s;
  };
  if (fmt == "json") {
    json j = envelope("conj", cfg);
    j["g"] = format_helem(G, g);
    j["k"] = format_helem(G, k);
    j["kind"] = certificate_kind_name(c.kind);
    if (c.kind == Certificate::Kind::ConjugateWitness) j["witness"] = format_gamma_word(tower, c.witness);
    if (c.kind == Certificate::Kind::NotConjugateAtLevel) {
      j["level"] = c.level;
      j["type_g"] = counts(c.type_g);
      j["type_k"] = counts(c.type_k);
    }
    j["verified_depth"] = c.verified_depth;
    j["recheck"] = ok;
    j["transcript"] = c.transcript;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << certificate_kind_name(c.kind);
    if (c.kind == Certificate::Kind::ConjugateWitness)
      std::cout << " " << format_gamma_word(tower, c.witness) << " (depth " << c.verified_depth << ")";
    if (c.kind == Certificate::Kind::NotConjugateAtLevel)
      std::cout << " level " << c.level << ": " << counts(c.type_g) << " vs " << counts(c.type_k);
    std::cout << '\n';
    for (const auto& line : c.transcript) std::cout << "  " << line << '\n';
    std::cout << "recheck " << (ok ? "ok" : "FAILED") << '\n';
  }
  return ok ? kOk : kFailure;
}

int cmd_chain(const Tower& tower, const RunConfig& cfg, std::size_t n, std::size_t radius_cap) {
  std::string fmt = format_of(cfg, "text", {"text", "json"});
  if (n == 0) throw UsageError("n must be at least 1");
  const GroupOracle& G = tower.oracle();
  const QuotientMap& f = tower.chain().level(n);
  std::size_t radius = std::min(n, radius_cap);
  auto rep = kernel_min_length_check(G, f, radius);
  if (fmt == "json") {
    json j = envelope("chain", cfg);
    j["n"] = n;
    j["order"] = f.quotient.order();
    json images = json::object();
    for (Generator s = 0; s < G.generator_count(); ++s)
      images[G.generator_names()[s]] = to_cycle_string(f.quotient.generator_image(s));
    j["generators"] = images;
    j["kernel_check"] = {{"radius", radius}, {"checked", rep.checked}, {"passed", rep.passed}};
    if (rep.counterexample) j["kernel_check"]["counterexample"] = G.format_word(*rep.counterexample);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << format_homomorphism(G, f.quotient);
    std::cout << "kernel check radius " << radius << ": " << (rep.passed ? "pass" : "FAIL") << " ("
              << rep.checked << " words)";
    if (rep.counterexample) std::cout << ", counterexample " << G.format_word(*rep.counterexample);
    std::cout << '\n';
  }
  return rep.passed ? kOk : kFailure;
}

int cmd_efrf(const Tower& tower, const RunConfig& cfg, const std::string& file) {
  std::string fmt = format_of(cfg, "text", {"text", "json"});
  auto tokens = parse_word_file(tower, 0, read_input(file));
  if (2 * sigma_length(tokens) > cfg.depth_cap) throw CapExceeded("word too long for --depth-cap");
  auto ans = efrf_output_Gamma(tower, tokens);
  if (fmt == "json") {
    json j = envelope("efrf", cfg);
    if (std::holds_alternative<TrivialMarker>(ans)) {
      j["trivial"] = true;
    } else {
      const auto& out = std::get<EfrfGammaOutput>(ans);
      j["trivial"] = false;
      j["depth"] = out.depth;
      if (out.degraded) j["degraded"] = true; else j["degree"] = out.degree;
      json images = json::array();
      for (const auto& im : out.images)
        images.push_back({{"token", im.token}, {"image", im.image ? json(to_cycle_string(*im.image)) : json(nullptr)}});
      j["images"] = images;
      j["witness"] = vertex_json(tower, out.witness);
    }
    std::cout << j.dump(2) << '\n';
  } else if (std::holds_alternative<TrivialMarker>(ans)) {
    std::cout << "trivial\n";
  } else {
    std::cout << format_efrf_output(tower, std::get<EfrfGammaOutput>(ans));
  }
  return kOk;
}

json suite_json(const SuiteResult& r) {
  json notes = json::object();
  for (const auto& [k, v] : r.notes) notes[k] = v;
  return json{{"name", r.name},   {"passed", r.passed},
              {"checked", r.checked}, {"failed", r.failed},
              {"counterexamples", r.counterexamples}, {"notes", notes}};
}

int cmd_verify(const Tower& tower, const RunConfig& cfg, const std::string& suite) {
  std::string fmt = format_of(cfg, "json", {"text", "json"});
  std::vector<std::string> names;
  if (suite == "all") {
    names = suite_names();
  } else {
    const auto& known = suite_names();
    if (std::find(known.begin(), known.end(), suite) == known.end())
      throw UsageError("unknown suite '" + suite + "'");
    names = {suite};
  }
  std::vector<SuiteResult> results;
  for (const auto& n : names) results.push_back(run_suite(n, tower, cfg.seed));
  bool all = std::all_of(results.begin(), results.end(), [](const SuiteResult& r) { return r.passed; });
  if (fmt == "json") {
    json j = envelope("verify", cfg);
    j["seed"] = cfg.seed;
    j["passed"] = all;
    json arr = json::array();
    for (const auto& r : results) arr.push_back(suite_json(r));
    j["suites"] = arr;
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& r : results) {
      std::cout << (r.passed ? "pass " : "FAIL ") << r.name << ' ' << (r.checked - r.failed) << '/'
                << r.checked << '\n';
      for (const auto& c : r.counterexamples) std::cout << "  " << c << '\n';
    }
  }
  return all ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branchgrp: branch groups over residually finite groups"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--group", cfg.group, "dihedral_infinite | integers | finite:<m> | product:<a>,<b> | file:<path>")
      ->envname("BRANCHGRP_GROUP")
      ->capture_default_str();
  app.add_option("--depth-cap", cfg.depth_cap, "largest tree depth any command may explore")
      ->envname("BRANCHGRP_DEPTH_CAP")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--vertex-cap", cfg.vertex_cap, "largest number of vertices materialized at once")
      ->envname("BRANCHGRP_VERTEX_CAP")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", cfg.format, "text | json | dot")
      ->envname("BRANCHGRP_FORMAT")
      ->check(CLI::IsMember({"text", "json", "dot"}));
  app.add_option("--seed", cfg.seed, "seed for the randomized suites")
      ->envname("BRANCHGRP_SEED")
      ->capture_default_str();

  std::string file = "-";
  auto* wp = app.add_subcommand("wp", "decide whether a word is trivial");
  wp->add_option("file", file, "word file, - for stdin");

  std::size_t depth = 2;
  auto* por = app.add_subcommand("portrait", "portrait of a word to a given depth");
  por->add_option("file", file, "word file, - for stdin");
  por->add_option("--depth", depth)->capture_default_str();

  std::string vertex = "root";
  auto* sec = app.add_subcommand("section", "section word at a vertex");
  sec->add_option("file", file, "word file, - for stdin")->required();
  sec->add_option("vertex", vertex, "letters such as 'x@1 y@2'")->required();

  std::string gs, ks;
  CertificateBounds bounds;
  auto* conj = app.add_subcommand("conj", "conjugacy certificate for g~ and k~");
  conj->add_option("g", gs, "H element such as 't|(x y z)'")->required();
  conj->add_option("k", ks)->required();
  conj->add_option("--h-radius", bounds.h_radius)->capture_default_str();
  conj->add_option("--max-h", bounds.max_h_count)->capture_default_str();
  conj->add_option("--cert-depth", bounds.depth)->capture_default_str();

  std::size_t n = 1, radius_cap = 4;
  auto* chain = app.add_subcommand("chain", "the n-th quotient in the chain");
  chain->add_option("n", n)->required()->check(CLI::PositiveNumber);
  chain->add_option("--radius-cap", radius_cap)->capture_default_str();

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run a verification suite (or all)");
  verify->add_option("suite", suite)->capture_default_str();

  auto* efrf = app.add_subcommand("efrf", "finite quotient of the level-0 group detecting a word");
  efrf->add_option("file", file, "word file, - for stdin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    TowerLimits limits;
    limits.vertex_cap = cfg.vertex_cap;
    Tower tower(resolve_group(cfg.group), limits);
    if (*wp) return cmd_wp(tower, cfg, file);
    if (*por) return cmd_portrait(tower, cfg, file, depth);
    if (*sec) return cmd_section(tower, cfg, file, vertex);
    if (*conj) return cmd_conj(tower, cfg, gs, ks, bounds);
    if (*chain) return cmd_chain(tower, cfg, n, radius_cap);
    if (*verify) return cmd_verify(tower, cfg, suite);
    if (*efrf) return cmd_efrf(tower, cfg, file);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << '\n';
    return kCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
