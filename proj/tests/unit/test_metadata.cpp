#include "sentinel/error.hpp"
#include "sentinel/metadata.hpp"

#include <gtest/gtest.h>

using namespace sentinel;

TEST(Metadata, ParsesHeadersUntilBlankLine) {
  auto md = parse_pkg_info("Metadata-Version: 2.1\nName: demo\nVersion: 0.3\nHome-page: https://github.com/a/demo\n"
                           "Author-email: \"A\" <a@gmail.com>\nLicense: MIT\n"
                           "Classifier: License :: OSI Approved :: MIT License\n"
                           "Classifier: Programming Language :: Python\n"
                           "Project-URL: Source, https://gitlab.com/a/demo\n\nHome-page: https://evil.example\n");
  EXPECT_EQ(md.name, "demo");
  EXPECT_EQ(md.version, "0.3");
  EXPECT_EQ(md.homepage, "https://github.com/a/demo");
  EXPECT_EQ(md.author_email, "\"A\" <a@gmail.com>");
  EXPECT_EQ(md.license_field, "MIT");
  ASSERT_EQ(md.license_classifiers.size(), 1u);
  ASSERT_EQ(md.project_urls.size(), 1u);
  EXPECT_EQ(md.project_urls[0], "https://gitlab.com/a/demo");
}

TEST(Metadata, ContinuationLinesAndLicenseExpression) {
  auto md = parse_pkg_info("Name: x\nLicense-Expression: Apache-2.0\nSummary: first\n  second\n");
  EXPECT_EQ(md.license_field, "Apache-2.0");
  EXPECT_TRUE(parse_pkg_info("").name.empty());
}

TEST(Metadata, ParsesUrls) {
  auto u = parse_url("HTTPS://Example.COM:8443/a/b?q=1");
  ASSERT_TRUE(u.has_value());
  EXPECT_EQ(u->scheme, "https");
  EXPECT_EQ(u->host, "example.com");
  EXPECT_EQ(u->port, 8443u);
  auto ip = parse_url("http://[::1]/x");
  ASSERT_TRUE(ip.has_value());
  EXPECT_TRUE(is_ip_literal(ip->host));
  EXPECT_FALSE(parse_url("not a url").has_value());
  EXPECT_TRUE(is_dotted_quad("10.0.0.1"));
  EXPECT_FALSE(is_dotted_quad("10.0.0.256"));
  EXPECT_FALSE(is_dotted_quad("10.0.0"));
}

TEST(Metadata, PublicSuffixRules) {
  PublicSuffixList psl("com\nuk\nco.uk\n*.ck\n!www.ck\n");
  EXPECT_EQ(psl.registrable_domain("a.b.example.com"), "example.com");
  EXPECT_EQ(psl.registrable_domain("shop.example.co.uk"), "example.co.uk");
  EXPECT_EQ(psl.registrable_domain("a.b.c.ck"), "b.c.ck");
  EXPECT_EQ(psl.registrable_domain("www.ck"), "www.ck");
  EXPECT_FALSE(psl.registrable_domain("co.uk").has_value());
  EXPECT_EQ(PublicSuffixList::bundled().registrable_domain("docs.github.com"), "github.com");
}

TEST(Metadata, EmailValidity) {
  EXPECT_TRUE(email_is_valid("alice@gmail.com"));
  EXPECT_TRUE(email_is_valid("a.b+c@mail.example.org"));
  EXPECT_FALSE(email_is_valid("alice@localhost"));
  EXPECT_FALSE(email_is_valid("alice at mail"));
  EXPECT_FALSE(email_is_valid("a@b@c.com"));
  EXPECT_FALSE(email_is_valid("@gmail.com"));
  EXPECT_FALSE(email_is_valid("alice@example.notatld"));
  auto addrs = extract_email_addresses("\"Doe, J\" <j@x.org>, k@y.org");
  ASSERT_EQ(addrs.size(), 2u);
  EXPECT_EQ(addrs[0], "j@x.org");
  EXPECT_EQ(addrs[1], "k@y.org");
}

TEST(Metadata, HomepageFeature) {
  const auto& allow = DomainAllowlist::bundled();
  PackageMetadata md;
  EXPECT_TRUE(feature_invalid_homepage(md, allow));
  md.homepage = "https://github.com/a/b";
  EXPECT_FALSE(feature_invalid_homepage(md, allow));
  md.homepage = "http://github.com/a/b";
  EXPECT_TRUE(feature_invalid_homepage(md, allow));
  md.homepage = "https://10.0.0.1/";
  EXPECT_TRUE(feature_invalid_homepage(md, allow));
  md.homepage = "https://unknown-domain-zz.xyz/";
  EXPECT_TRUE(feature_invalid_homepage(md, allow));
  md.project_urls = {"https://docs.python.org/3/"};
  EXPECT_FALSE(feature_invalid_homepage(md, allow));
}

TEST(Metadata, AuthorEmailFeature) {
  PackageMetadata md;
  EXPECT_TRUE(feature_invalid_author_email(md));
  md.author_email = "bob@localhost";
  EXPECT_TRUE(feature_invalid_author_email(md));
  md.maintainer_email = "bob@gmail.com";
  EXPECT_FALSE(feature_invalid_author_email(md));
}

TEST(Metadata, AllowlistParsing) {
  auto a = DomainAllowlist::from_text("# comment\nexample.org\nGitHub.com\n");
  EXPECT_EQ(a.size(), 2u);
  EXPECT_TRUE(a.contains("github.com"));
  EXPECT_TRUE(a.allows_host("www.example.org"));
  EXPECT_FALSE(a.allows_host("example.net"));
  EXPECT_THROW(DomainAllowlist::from_text("# nothing\n"), Error);
  EXPECT_THROW(DomainAllowlist::from_text("https://example.org/\n"), Error);
  EXPECT_GT(DomainAllowlist::bundled().size(), 100u);
}
