#include "sentinel/codescan.hpp"
#include "sentinel/error.hpp"
#include "sentinel/textfeat.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace sentinel;
using sentinel::test::file;
using sentinel::test::TempDir;

TEST(Lexer, StringLiteralLengthsInCodePoints) {
  auto lx = lex_lines("a = 'abc'\nb = \"h\\\"i\"\nc = '''x\ny'''\nd = r'\\d+'\ne = 'h\xc3\xa9'\n");
  ASSERT_EQ(lx.literals.size(), 5u);
  EXPECT_EQ(lx.literals[0].length, 3u);
  EXPECT_EQ(lx.literals[1].length, 4u);
  EXPECT_EQ(lx.literals[2].length, 3u);
  EXPECT_EQ(lx.literals[2].start_line, 3u);
  EXPECT_EQ(lx.literals[3].length, 3u);
  EXPECT_EQ(lx.literals[4].length, 2u);
}

TEST(Lexer, IdentifiersFollowedByParen) {
  auto lx = lex_lines("x = os.system ('id')  # eval(x)\ny = name\nexec \\\n(code)\n");
  std::vector<std::string> calls;
  for (const auto& id : lx.identifiers) {
    if (id.followed_by_paren) calls.push_back(id.text);
  }
  EXPECT_EQ(calls, (std::vector<std::string>{"system", "exec"}));
}

TEST(Lexer, DiagnosticsForUnterminatedStrings) {
  auto a = lex_lines("x = 'open\ny = 1\n");
  ASSERT_EQ(a.diagnostics.size(), 1u);
  EXPECT_EQ(a.diagnostics[0].message, "unterminated string literal");
  auto b = lex_lines("x = \"\"\"never closed\n");
  ASSERT_EQ(b.diagnostics.size(), 1u);
  EXPECT_NE(b.diagnostics[0].message.find("triple-quoted"), std::string::npos);
}

TEST(Scan, FindsSuspiciousCallsWithLineNumbers) {
  TempDir tmp;
  auto snap = test::snapshot_of({file("p/setup.py", "import os\nos.system('id')\nexec(code)\n# eval(x)\n"),
                                 file("p/p/m.py", "value = getattr(o, 'x')\nsystem = 3\n"),
                                 file("p/README.md", "exec(x)\n")},
                                tmp.path());
  auto lines = scan_suspicious_apis(snap, ScanConfig::defaults());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].filepath, "p/m.py");
  EXPECT_EQ(lines[0].api_name, "getattr");
  EXPECT_EQ(lines[1].filepath, "setup.py");
  EXPECT_EQ(lines[1].lineno, 2u);
  EXPECT_EQ(lines[1].api_name, "system");
  EXPECT_EQ(lines[2].api_name, "exec");
  EXPECT_EQ(lines[2].line_text, "exec(code)");
}

TEST(Scan, LongStringThreshold) {
  TempDir tmp;
  auto at = [&](std::size_t n) {
    auto snap = test::snapshot_of({file("p/a.py", "x = '" + std::string(n, 'z') + "'\n")}, tmp.path(),
                                  "len" + std::to_string(n));
    return feature_long_string(snap, ScanConfig::defaults());
  };
  EXPECT_FALSE(at(40));
  EXPECT_TRUE(at(41));
  ScanConfig cfg = ScanConfig::defaults();
  cfg.long_string_threshold = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Scan, UrlsInLines) {
  auto urls = find_urls_in_line("get('https://pypi.org/simple/', \"http://1.2.3.4/p\") ftp://x.org/a.");
  ASSERT_EQ(urls.size(), 3u);
  EXPECT_EQ(urls[0].url, "https://pypi.org/simple/");
  EXPECT_EQ(urls[1].host, "1.2.3.4");
  EXPECT_TRUE(urls[1].is_ip);
  EXPECT_EQ(urls[2].url, "ftp://x.org/a");
  auto bare = find_urls_in_line("connect('10.0.0.5:4444') version = '1.2.3.4'");
  ASSERT_EQ(bare.size(), 1u);
  EXPECT_EQ(bare[0].scheme, "http");
  EXPECT_EQ(bare[0].host, "10.0.0.5");
}

TEST(Scan, SuspiciousUrlFeature) {
  TempDir tmp;
  const auto& allow = DomainAllowlist::bundled();
  auto clean = test::snapshot_of({file("p/a.py", "U = 'https://github.com/x'\n")}, tmp.path(), "clean");
  EXPECT_FALSE(feature_suspicious_url(clean, allow));
  auto http = test::snapshot_of({file("p/a.py", "U = 'http://github.com/x'\n")}, tmp.path(), "http");
  EXPECT_TRUE(feature_suspicious_url(http, allow));
  auto other = test::snapshot_of({file("p/a.py", "U = 'https://drop.unknown-zz.xyz/x'\n")}, tmp.path(), "other");
  EXPECT_TRUE(feature_suspicious_url(other, allow));
  auto ip = test::snapshot_of({file("p/a.py", "U = 'https://8.8.8.8/x'\n")}, tmp.path(), "ip");
  EXPECT_TRUE(feature_suspicious_url(ip, allow));
}

TEST(Scan, InstallCommandPatterns) {
  TextFeature text;
  auto line = [&](std::string s) { text.lines.push_back({TextSource::SetupPy, "setup.py", text.lines.size() + 1, s}); };
  line("from setuptools.command.install import install");
  line("class PostInstall(install):");
  line("    cmdclass={'install': PostInstall},");
  auto matches = find_install_commands(text);
  EXPECT_GE(matches.size(), 3u);
  EXPECT_TRUE(feature_install_command(text));

  TextFeature plain;
  plain.lines.push_back({TextSource::SetupPy, "setup.py", 1, "setup(install_requires=['requests'])"});
  EXPECT_FALSE(feature_install_command(plain));

  TextFeature shell;
  shell.lines.push_back({TextSource::SuspiciousLine, "a.py", 4, "os.system('pip install evilpkg')"});
  EXPECT_TRUE(feature_install_command(shell));
}

TEST(Scan, DiagnosticsAreReported) {
  TempDir tmp;
  auto snap = test::snapshot_of({file("p/a.py", "x = 'broken\n")}, tmp.path());
  auto res = scan_package(snap, ScanConfig::defaults());
  ASSERT_EQ(res.diagnostics.size(), 1u);
  EXPECT_EQ(res.diagnostics[0].format(), "a.py:1: unterminated string literal");
}
